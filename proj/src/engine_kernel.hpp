// Lockstep lane-group kernel. Private to the engine; included by engine.cpp only.
#ifndef WAVESEQ_ENGINE_KERNEL_HPP
#define WAVESEQ_ENGINE_KERNEL_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "waveseq/engine.hpp"

// Lanes never touch each other's slots inside the cell update; tell the
// vectorizer so it does not give up on alias checks.
#if defined(__clang__)
#define WAVESEQ_INDEPENDENT_LANES _Pragma("clang loop vectorize(assume_safety)")
#elif defined(__GNUC__)
#define WAVESEQ_INDEPENDENT_LANES _Pragma("GCC ivdep")
#else
#define WAVESEQ_INDEPENDENT_LANES
#endif

namespace waveseq::engine::detail {

// ---------------------------------------------------------------------------
// Cell arithmetic. A lane cell is either one 32-bit score or two independent
// 16-bit scores with saturating add/sub and elementwise max.

struct ScalarCells {
    using Cell = std::int32_t;
    using Sym = SymbolCode;
    using TableEntry = std::int32_t;
    static constexpr int kHalves = 1;

    static Cell splat(Score v) noexcept { return v; }
    static Score get(Cell c, int) noexcept { return c; }
    static Cell add(Cell a, Cell b) noexcept { return a + b; }
    static Cell sub(Cell a, Cell b) noexcept { return a - b; }
    static Cell max(Cell a, Cell b) noexcept { return a > b ? a : b; }
    static Cell neg_inf() noexcept { return kNegInf; }

    static Sym symbol(const std::array<std::span<const SymbolCode>, 1>& q, std::ptrdiff_t pos) noexcept {
        return (pos < 0 || pos >= static_cast<std::ptrdiff_t>(q[0].size())) ? kMaskedSymbol : q[0][pos];
    }
    static Sym pad_symbol() noexcept { return kMaskedSymbol; }

    // Stage tables are laid out [symbol][column][lane]; `stride` is one symbol row.
    // Only rows 1..limit belong to the matrix; other lanes hold padding.
    static void track(Cell& best, Cell& best_row, Cell h, Cell row, const Cell& limit) noexcept {
        const bool gt = (h > best) & (row >= 1) & (row <= limit);
        best_row = gt ? row : best_row;
        best = gt ? h : best;
    }
};

struct Half2 {
    std::int16_t lo = 0;
    std::int16_t hi = 0;
};

struct SymPair {
    SymbolCode lo = kMaskedSymbol;
    SymbolCode hi = kMaskedSymbol;
};

inline constexpr Score kNegInf16 = -24576;

struct PackedCells {
    using Cell = Half2;
    using Sym = SymPair;
    using TableEntry = std::int16_t;
    static constexpr int kHalves = 2;

    static std::int16_t sat(std::int32_t v) noexcept {
        return static_cast<std::int16_t>(std::clamp<std::int32_t>(v, -32768, 32767));
    }
    static Cell splat(Score v) noexcept { return {sat(v), sat(v)}; }
    static Score get(Cell c, int h) noexcept { return h == 0 ? c.lo : c.hi; }
    static Cell add(Cell a, Cell b) noexcept { return {sat(a.lo + b.lo), sat(a.hi + b.hi)}; }
    static Cell sub(Cell a, Cell b) noexcept { return {sat(a.lo - b.lo), sat(a.hi - b.hi)}; }
    static Cell max(Cell a, Cell b) noexcept {
        return {a.lo > b.lo ? a.lo : b.lo, a.hi > b.hi ? a.hi : b.hi};
    }
    static Cell neg_inf() noexcept { return splat(kNegInf16); }

    static Sym symbol(const std::array<std::span<const SymbolCode>, 2>& q, std::ptrdiff_t pos) noexcept {
        auto one = [pos](std::span<const SymbolCode> s) {
            return (pos < 0 || pos >= static_cast<std::ptrdiff_t>(s.size())) ? kMaskedSymbol : s[pos];
        };
        return {one(q[0]), one(q[1])};
    }
    static Sym pad_symbol() noexcept { return {}; }

    // Rows past a half's own query length hold values of no alignment.
    static void track(Cell& best, Cell& best_row, Cell h, Cell row, const Cell& limit) noexcept {
        if (h.lo > best.lo && row.lo >= 1 && row.lo <= limit.lo) { best.lo = h.lo; best_row.lo = row.lo; }
        if (h.hi > best.hi && row.hi >= 1 && row.hi <= limit.hi) { best.hi = h.hi; best_row.hi = row.hi; }
    }
};

/// Score operations inside the cell update; the counting variant feeds the
/// arithmetic counters of a StageProbe.
template <class Tr, bool Count>
struct CellOps {
    using Cell = typename Tr::Cell;
    StageProbe* probe = nullptr;

    Cell add(Cell a, Cell b) const noexcept {
        if constexpr (Count) ++probe->adds;
        return Tr::add(a, b);
    }
    Cell sub(Cell a, Cell b) const noexcept {
        if constexpr (Count) ++probe->adds;
        return Tr::sub(a, b);
    }
    Cell max(Cell a, Cell b) const noexcept {
        if constexpr (Count) ++probe->maxes;
        return Tr::max(a, b);
    }
    Cell floor(Cell a, Cell b) const noexcept {
        if constexpr (Count) ++probe->floor_maxes;
        return Tr::max(a, b);
    }
};

// ---------------------------------------------------------------------------

template <class Tr>
struct KernelInput {
    static constexpr int H = Tr::kHalves;
    using Cell = typename Tr::Cell;

    std::array<std::span<const SymbolCode>, H> query{};
    std::array<std::size_t, H> n{};  // subject length per half
    std::size_t rows = 0;            // max query length over halves
    std::size_t cols = 0;            // max subject length over halves

    Score alpha = 0;       // gap_open
    Score beta = 0;        // per-symbol extension (gap_open for linear)
    bool free_borders = false;
    bool want_last_row = false;
    bool want_column = false;
};

/// Captured outputs of a whole pass, per half.
template <class Tr>
struct KernelOutput {
    static constexpr int H = Tr::kHalves;
    std::array<tracked_vector<Score>, H> column;    // H(0..m, n)
    std::array<tracked_vector<Score>, H> last_h;    // H(m, 0..n)
    std::array<tracked_vector<Score>, H> last_e;    // E(m, 0..n)
    std::array<tracked_vector<Score>, H> best_val;  // per column best (Track)
    std::array<tracked_vector<std::uint32_t>, H> best_row;
    std::uint64_t iterations = 0;
};

/// One lane group of width P. Affine selects the E/F recurrences, Floor the
/// local floor, Track the running maximum over every cell, Count the
/// instrumentation counters.
template <int P, class Tr, bool Affine, bool Floor, bool Track, bool Count>
class LaneGroup {
public:
    using Cell = typename Tr::Cell;
    using Sym = typename Tr::Sym;
    static constexpr int H = Tr::kHalves;
    using Lanes = std::array<Cell, P>;

    LaneGroup(const KernelInput<Tr>& in, int k, StageProbe* probe)
        : in_(in), k_(k), width_(P * k), probe_(probe), ops_{probe} {
        gap_shift_ = Tr::splat(Affine ? in.alpha - in.beta : in.alpha);
        beta_ = Tr::splat(in.beta);
        for (int h = 0; h < H; ++h) {
            m_[h] = in.query[h].size();
            n_[h] = in.n[h];
        }
        Score lim[2] = {static_cast<Score>(m_[0]), static_cast<Score>(m_[H - 1])};
        if constexpr (H == 1) limit_ = Tr::splat(lim[0]);
        else limit_ = Cell{static_cast<std::int16_t>(lim[0]), static_cast<std::int16_t>(lim[1])};
    }

    // Stage-local column offset applied to affine scores: stored value =
    // true value + beta * x, where x is the 1-based column inside the stage.
    Score offset(int x) const noexcept { return Affine ? in_.beta * x : 0; }

    Score top_row(std::size_t j) const noexcept {
        if (in_.free_borders || j == 0) return 0;
        return -(in_.alpha + static_cast<Score>(j - 1) * in_.beta);
    }

    /// Runs one stage. boundary_in/out hold rows 0..rows of the left and
    /// right edge columns (F only when Affine).
    void run_stage(std::size_t stage, const std::array<const typename Tr::TableEntry*, H>& tables,
                   const tracked_vector<Cell>& in_h, const tracked_vector<Cell>& in_f,
                   tracked_vector<Cell>& out_h, tracked_vector<Cell>& out_f, KernelOutput<Tr>& out) {
        const int k = k_;
        const int M = static_cast<int>(in_.rows);
        const std::size_t j0 = stage * static_cast<std::size_t>(width_);
        const Cell pad_h = Tr::splat(0);
        const Cell neg = Tr::neg_inf();

        reset_lanes();

        // Transpose this stage's profile to [symbol][column][lane] so a column
        // of lanes reads contiguous entries.
        const int stride = k * P;
        for (int h = 0; h < H; ++h)
            for (int sym = 0; sym <= kAlphabetSize; ++sym)
                for (int c = 0; c < k; ++c)
                    for (int t = 0; t < P; ++t)
                        stage_tab_[h][sym * stride + c * P + t] =
                            tables[h][static_cast<std::size_t>(sym) * width_ + t * k + c];

        // Column inside this stage that holds each half's last subject column.
        std::array<int, H> cap_lane{}, cap_col{};
        std::array<bool, H> cap_here{};
        for (int h = 0; h < H; ++h) {
            const std::size_t n = n_[h];
            cap_here[h] = in_.want_column && n > j0 && n <= j0 + static_cast<std::size_t>(width_);
            if (cap_here[h]) {
                const int x = static_cast<int>(n - j0) - 1;
                cap_lane[h] = x / k;
                cap_col[h] = x % k;
            }
        }

        if constexpr (Floor) {
            for (int c = 0; c < k; ++c)
                for (int t = 0; t < P; ++t) floor_[c][t] = Tr::splat(offset(t * k + c + 1));
        }

        const Cell out_shift = Tr::splat(offset(width_));
        int pending_out = 0;
        std::size_t next_out_row = 0;

        auto flush_out = [&](int count) {
            for (int q = 0; q < count; ++q) {
                const std::size_t row = next_out_row + q;
                out_h[row] = out_reg_h_[P - count + q];
                if constexpr (Affine) out_f[row] = out_reg_f_[P - count + q];
            }
            next_out_row += count;
            if constexpr (Count) {
                ++probe_->boundary_writes;
                probe_->boundary_rows_written += count;
                if (count != P) ++probe_->boundary_partial_writes;
            }
        };

        const int iterations = M + P;
        for (int i = 0; i < iterations; ++i) {
            // (a) query symbol rotation; memory is touched every P iterations.
            if (i % P == 0) {
                for (int t = 0; t < P; ++t) cq1_[t] = Tr::symbol(in_.query, i - 1 + t);
                if constexpr (Count) {
                    ++probe_->query_loads;
                    if (i % P != 0) ++probe_->query_loads_off_phase;
                }
            }
            lane_shift_up<Sym>(std::span<Sym>(cq0_), cq1_[0]);
            lane_shift_down<Sym>(std::span<Sym>(cq1_), Tr::pad_symbol());

            // (b) left-edge values for lane 0, batched like the query.
            if (i % P == 0) {
                for (int t = 0; t < P; ++t) {
                    const int row = i + t;
                    in_reg_h_[t] = row <= M ? in_h[row] : pad_h;
                    if constexpr (Affine) in_reg_f_[t] = row <= M ? in_f[row] : neg;
                }
                if constexpr (Count) {
                    ++probe_->boundary_reads;
                    if (i % P != 0) ++probe_->boundary_reads_off_phase;
                }
            }

            // (c) neighbour exchange: diagonal <- left, left <- lane t-1's last column.
            h_diag_ = h_left_;
            for (int t = P - 1; t > 0; --t) {
                h_left_[t] = H_[k - 1][t - 1];
                ho_left_[t] = HO_[k - 1][t - 1];
                if constexpr (Affine) f_left_[t] = f_last_[t - 1];
            }
            h_left_[0] = in_reg_h_[0];
            ho_left_[0] = Tr::sub(in_reg_h_[0], gap_shift_);
            if constexpr (Affine) f_left_[0] = in_reg_f_[0];
            lane_shift_down<Cell>(std::span<Cell>(in_reg_h_), pad_h);
            if constexpr (Affine) lane_shift_down<Cell>(std::span<Cell>(in_reg_f_), neg);

            // (d) lanes holding rows 1..M update their k cells.
            // Every lane runs; lanes outside rows 1..M compute padding that is
            // either overwritten at row 0 or never read.
            if (i >= 1) update_lanes(i);

            // (e) lane i enters the band at row 0.
            if (i < P) init_row0(i, j0);

            // (f) lane P-1 emits the stage's right column.
            const int r_out = i - (P - 1);
            if (r_out >= 0 && r_out <= M) {
                lane_shift_down<Cell>(std::span<Cell>(out_reg_h_), Tr::sub(H_[k - 1][P - 1], out_shift));
                if constexpr (Affine) lane_shift_down<Cell>(std::span<Cell>(out_reg_f_), Tr::sub(f_last_[P - 1], out_shift));
                if (++pending_out == P) {
                    flush_out(P);
                    pending_out = 0;
                }
            }

            capture(i, j0, cap_here, cap_lane, cap_col, out);
        }
        if (pending_out > 0) flush_out(pending_out);

        if constexpr (Track) collect_best(j0, out);
        out.iterations += static_cast<std::uint64_t>(iterations);
        if constexpr (Count) probe_->iterations += static_cast<std::uint64_t>(iterations);
    }

private:
    void reset_lanes() {
        const Cell zero = Tr::splat(0);
        for (int c = 0; c < kMaxColsPerLane; ++c) {
            H_[c].fill(zero);
            HO_[c].fill(zero);
            if constexpr (Affine) E_[c].fill(Tr::neg_inf());
            if constexpr (Track) {
                best_[c].fill(Tr::neg_inf());
                best_row_[c].fill(zero);
            }
        }
        h_left_.fill(zero);
        ho_left_.fill(zero);
        h_diag_.fill(zero);
        f_left_.fill(Tr::neg_inf());
        f_last_.fill(Tr::neg_inf());
        in_reg_h_.fill(zero);
        in_reg_f_.fill(Tr::neg_inf());
        out_reg_h_.fill(zero);
        out_reg_f_.fill(Tr::neg_inf());
        cq0_.fill(Tr::pad_symbol());
        cq1_.fill(Tr::pad_symbol());
    }

    void init_row0(int t, std::size_t j0) {
        for (int c = 0; c < k_; ++c) {
            const int x = t * k_ + c + 1;
            const Cell h = Tr::splat(top_row(j0 + x) + offset(x));
            H_[c][t] = h;
            HO_[c][t] = Tr::sub(h, gap_shift_);
            if constexpr (Affine) E_[c][t] = Tr::neg_inf();
        }
        f_last_[t] = Tr::neg_inf();
    }

    // Substitution score for lane t in stage column `base` / P. A select over
    // the five profile rows keeps the lane loop free of gathers.
    Cell score(int stride, int base, Sym c, int t) const noexcept {
        if constexpr (H == 1) {
            Cell s = stage_tab_[0][base + t];
            for (int sym = 1; sym <= kAlphabetSize; ++sym)
                s = c == sym ? stage_tab_[0][sym * stride + base + t] : s;
            return s;
        } else {
            return {stage_tab_[0][c.lo * stride + base + t], stage_tab_[1][c.hi * stride + base + t]};
        }
    }

    void update_lanes(int i) {
        const int k = k_;
        const int stride = k * P;
        alignas(64) Lanes d = h_diag_, lf = f_left_, lho = ho_left_, row;
        for (int t = 0; t < P; ++t) row[t] = Tr::splat(i - t);
        for (int c = 0; c < k; ++c) {
            auto& Hc = H_[c];
            auto& HOc = HO_[c];
            auto& Ec = E_[c];
            const auto& Fl = floor_[c];
            WAVESEQ_INDEPENDENT_LANES
            for (int t = 0; t < P; ++t) {
                const Cell s = score(stride, c * P, cq0_[t], t);
                const Cell up = Hc[t];
                Cell h;
                if constexpr (Affine) {
                    // 3 add/sub + 4 max per cell.
                    const Cell hd = ops_.add(d[t], s);
                    const Cell e = ops_.sub(ops_.max(Ec[t], HOc[t]), beta_);
                    const Cell f = ops_.max(lf[t], lho[t]);
                    h = ops_.max(ops_.max(hd, e), f);
                    Ec[t] = e;
                    lf[t] = f;
                } else {
                    const Cell hd = ops_.add(d[t], s);
                    h = ops_.max(hd, ops_.max(HOc[t], lho[t]));
                }
                if constexpr (Floor) h = ops_.floor(h, Fl[t]);
                const Cell ho = ops_.sub(h, gap_shift_);
                d[t] = up;
                Hc[t] = h;
                HOc[t] = ho;
                lho[t] = ho;
                if constexpr (Track) Tr::track(best_[c][t], best_row_[c][t], h, row[t], limit_);
            }
        }
        if constexpr (Affine) f_last_ = lf;
        if constexpr (Count) probe_->lane_cell_updates += static_cast<std::uint64_t>(P) * k;
    }

    void capture(int i, std::size_t j0, const std::array<bool, H>& here, const std::array<int, H>& lane,
                 const std::array<int, H>& col, KernelOutput<Tr>& out) {
        for (int h = 0; h < H; ++h) {
            if (here[h]) {
                const int r = i - lane[h];
                if (r >= 0 && static_cast<std::size_t>(r) <= m_[h]) {
                    const int x = lane[h] * k_ + col[h] + 1;
                    out.column[h][r] = Tr::get(H_[col[h]][lane[h]], h) - offset(x);
                }
            }
            if (in_.want_last_row) {
                const int t = i - static_cast<int>(m_[h]);
                if (t >= 0 && t < P) {
                    for (int c = 0; c < k_; ++c) {
                        const int x = t * k_ + c + 1;
                        const std::size_t j = j0 + x;
                        if (j > n_[h]) break;
                        out.last_h[h][j] = Tr::get(H_[c][t], h) - offset(x);
                        if constexpr (Affine) out.last_e[h][j] = Tr::get(E_[c][t], h) - offset(x);
                    }
                }
            }
        }
    }

    void collect_best(std::size_t j0, KernelOutput<Tr>& out) {
        for (int t = 0; t < P; ++t) {
            for (int c = 0; c < k_; ++c) {
                const int x = t * k_ + c + 1;
                const std::size_t j = j0 + x;
                for (int h = 0; h < H; ++h) {
                    if (j > n_[h]) continue;
                    const Score v = Tr::get(best_[c][t], h);
                    // Untouched slots keep the sentinel; leave them below every score.
                    out.best_val[h][j] = v <= Tr::get(Tr::neg_inf(), h) ? kNegInf : v - offset(x);
                    out.best_row[h][j] = static_cast<std::uint32_t>(Tr::get(best_row_[c][t], h));
                }
            }
        }
    }

    const KernelInput<Tr>& in_;
    int k_;
    int width_;
    StageProbe* probe_;
    CellOps<Tr, Count> ops_;
    Cell gap_shift_{};
    Cell beta_{};
    Cell limit_{};
    std::array<std::size_t, H> m_{}, n_{};

    // Lane-local register files: [column][lane].
    alignas(64) std::array<Lanes, kMaxColsPerLane> H_{};
    alignas(64) std::array<Lanes, kMaxColsPerLane> HO_{};  // H - gap shift
    alignas(64) std::array<Lanes, kMaxColsPerLane> E_{};
    alignas(64) std::array<Lanes, kMaxColsPerLane> floor_{};
    alignas(64) std::array<Lanes, kMaxColsPerLane> best_{};
    alignas(64) std::array<Lanes, kMaxColsPerLane> best_row_{};
    Lanes h_left_{}, ho_left_{}, h_diag_{}, f_left_{}, f_last_{};
    Lanes in_reg_h_{}, in_reg_f_{}, out_reg_h_{}, out_reg_f_{};
    std::array<Sym, P> cq0_{}, cq1_{};
    // Stage profile as [symbol][column][lane].
    alignas(64) std::array<std::array<typename Tr::TableEntry, (kAlphabetSize + 1) * kMaxColsPerLane * P>, H>
        stage_tab_{};
};

}  // namespace waveseq::engine::detail

#endif

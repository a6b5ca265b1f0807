#include "waveseq/engine.hpp"

#include <algorithm>
#include <memory>
#include <stdexcept>
#include <string>
#include <type_traits>

#include "engine_kernel.hpp"

namespace waveseq::engine {

using detail::KernelInput;
using detail::KernelOutput;
using detail::LaneGroup;
using detail::PackedCells;
using detail::ScalarCells;

void StageProbe::merge(const StageProbe& o) {
    iterations += o.iterations;
    cells += o.cells;
    query_loads += o.query_loads;
    query_loads_off_phase += o.query_loads_off_phase;
    boundary_reads += o.boundary_reads;
    boundary_reads_off_phase += o.boundary_reads_off_phase;
    boundary_writes += o.boundary_writes;
    boundary_partial_writes += o.boundary_partial_writes;
    boundary_rows_written += o.boundary_rows_written;
    lane_cell_updates += o.lane_cell_updates;
    adds += o.adds;
    maxes += o.maxes;
    floor_maxes += o.floor_maxes;
}

void validate_tuning(const EngineTuning& t) {
    const int p = t.lanes;
    if (p < kMinLanes || p > kMaxLanes || (p & (p - 1)) != 0)
        throw std::invalid_argument("lane count must be a power of two in [4, 64], got " +
                                    std::to_string(p));
    if (t.cols_per_lane < 1 || t.cols_per_lane > kMaxColsPerLane)
        throw std::invalid_argument("columns per lane must be in [1, 16], got " +
                                    std::to_string(t.cols_per_lane));
}

EngineTuning auto_tuning(std::size_t max_len) {
    EngineTuning t;
    if (max_len <= 32) {
        t.lanes = 8;
        t.cols_per_lane = 4;
    } else if (max_len <= 128) {
        t.lanes = 16;
        t.cols_per_lane = 8;
    } else {
        // wider groups amortize the per-stage boundary traffic best here
        t.lanes = 32;
        t.cols_per_lane = 8;
    }
    return t;
}

ScoringProfile build_scoring_profile(std::span<const SymbolCode> chunk, const ScoringScheme& scheme,
                                     const EngineTuning& tuning) {
    const int width = tuning.stage_width();
    if (chunk.size() > static_cast<std::size_t>(width))
        throw ChunkOverflow("subject chunk of " + std::to_string(chunk.size()) +
                            " symbols exceeds stage width " + std::to_string(width));
    ScoringProfile prof;
    prof.width = width;
    prof.chunk_len = static_cast<int>(chunk.size());
    prof.table.assign(static_cast<std::size_t>(kAlphabetSize + 1) * width, scheme.mismatch_score);
    // One pass over the chunk fills every row.
    for (int x = 0; x < prof.chunk_len; ++x)
        for (int c = 0; c <= kAlphabetSize; ++c)
            prof.table[static_cast<std::size_t>(c) * width + x] =
                substitution_score(scheme, static_cast<SymbolCode>(c), chunk[x]);
    return prof;
}

namespace {

Score lead_cost(const ScoringScheme& scheme, Score lead_first, std::size_t r) {
    if (r == 0) return 0;
    return lead_first + static_cast<Score>(r - 1) * scheme.extend_cost();
}

Score resolve_lead(const ScoringScheme& scheme, Score lead_first) {
    return lead_first < 0 ? scheme.gap_open : lead_first;
}

template <class Tr>
void fill_initial_boundary(tracked_vector<typename Tr::Cell>& h, tracked_vector<typename Tr::Cell>& f,
                           std::size_t rows, bool free_borders, const ScoringScheme& scheme,
                           Score lead_first) {
    h.assign(rows + 1, Tr::splat(0));
    f.assign(rows + 1, Tr::neg_inf());
    if (!free_borders)
        for (std::size_t r = 1; r <= rows; ++r) h[r] = Tr::splat(-lead_cost(scheme, lead_first, r));
}

// Scoring profile in the kernel's frame: affine diagonal moves carry +beta
// because of the per-column score offset.
template <class Tr>
void biased_table(const ScoringProfile& prof, Score bias, std::vector<typename Tr::TableEntry>& out) {
    out.resize(prof.table.size());
    for (std::size_t i = 0; i < prof.table.size(); ++i)
        out[i] = static_cast<typename Tr::TableEntry>(prof.table[i] + bias);
}

template <class Fn>
decltype(auto) with_lanes(int p, Fn&& fn) {
    switch (p) {
        case 4: return fn(std::integral_constant<int, 4>{});
        case 8: return fn(std::integral_constant<int, 8>{});
        case 16: return fn(std::integral_constant<int, 16>{});
        case 32: return fn(std::integral_constant<int, 32>{});
        case 64: return fn(std::integral_constant<int, 64>{});
    }
    throw std::invalid_argument("unsupported lane count " + std::to_string(p));
}

template <class Fn>
decltype(auto) with_bool(bool b, Fn&& fn) {
    if (b) return fn(std::true_type{});
    return fn(std::false_type{});
}

// Floor/track combinations: 0 = neither, 1 = track only, 2 = floor and track.
template <class Fn>
decltype(auto) with_mode(bool floor, bool track, Fn&& fn) {
    if (floor) return fn(std::true_type{}, std::true_type{});
    if (track) return fn(std::false_type{}, std::true_type{});
    return fn(std::false_type{}, std::false_type{});
}

/// Drives all stages of one pass through a lane group.
template <int P, class Tr, bool Affine, bool Floor, bool Track, bool Count>
void run_stages(const KernelInput<Tr>& in, const std::array<std::span<const SymbolCode>, Tr::kHalves>& subject,
                int k, const ScoringScheme& scheme, Score lead_first, StageProbe* probe,
                KernelOutput<Tr>& out) {
    using Cell = typename Tr::Cell;
    constexpr int H = Tr::kHalves;
    const auto group = std::make_unique<LaneGroup<P, Tr, Affine, Floor, Track, Count>>(in, k, probe);

    EngineTuning tuning{P, k, H == 2};
    const int width = P * k;
    const std::size_t stages = tuning.stage_count(in.cols);

    tracked_vector<Cell> bh, bf, oh(in.rows + 1), of(Affine ? in.rows + 1 : 0);
    fill_initial_boundary<Tr>(bh, bf, in.rows, in.free_borders, scheme, lead_first);
    if (!Affine) bf.clear();

    std::array<std::vector<typename Tr::TableEntry>, H> tables;
    std::array<const typename Tr::TableEntry*, H> table_ptrs{};
    const Score bias = Affine ? scheme.extend_cost() : 0;

    for (std::size_t s = 0; s < stages; ++s) {
        const std::size_t j0 = s * static_cast<std::size_t>(width);
        for (int h = 0; h < H; ++h) {
            const std::size_t n = subject[h].size();
            const std::size_t lo = std::min(j0, n);
            const std::size_t hi = std::min(j0 + width, n);
            const auto prof = build_scoring_profile(subject[h].subspan(lo, hi - lo), scheme, tuning);
            biased_table<Tr>(prof, bias, tables[h]);
            table_ptrs[h] = tables[h].data();
            if (probe) probe->cells += static_cast<std::uint64_t>(in.query[h].size()) * (hi - lo);
        }
        group->run_stage(s, table_ptrs, bh, bf, oh, of, out);
        std::swap(bh, oh);
        std::swap(bf, of);
    }
}

template <class Tr>
void prepare_output(const KernelInput<Tr>& in, bool track, KernelOutput<Tr>& out) {
    for (int h = 0; h < Tr::kHalves; ++h) {
        const std::size_t m = in.query[h].size(), n = in.n[h];
        if (in.want_column) out.column[h].assign(m + 1, kNegInf);
        if (in.want_last_row) {
            out.last_h[h].assign(n + 1, kNegInf);
            out.last_e[h].assign(n + 1, kNegInf);
        }
        if (track) {
            out.best_val[h].assign(n + 1, kNegInf);
            out.best_row[h].assign(n + 1, 0);
        }
    }
}

/// Picks the optimum of one half from the captured rows and columns.
template <class Tr>
EngineScore extract(const KernelOutput<Tr>& out, int h, std::size_t m, std::size_t n, Extract mode) {
    EngineScore r;
    r.cells_computed = static_cast<std::uint64_t>(m) * n;
    switch (mode) {
        case Extract::corner:
            r.score = out.column[h][m];
            r.q_end = m;
            r.s_end = n;
            break;
        case Extract::last_row_col: {
            r.score = out.column[h][0];
            r.q_end = 0;
            r.s_end = n;
            for (std::size_t i = 1; i < m; ++i)
                if (out.column[h][i] > r.score) {
                    r.score = out.column[h][i];
                    r.q_end = i;
                }
            for (std::size_t j = 0; j <= n; ++j) {
                const Score v = j == n ? out.column[h][m] : out.last_h[h][j];
                if (v > r.score) {
                    r.score = v;
                    r.q_end = m;
                    r.s_end = j;
                }
            }
            break;
        }
        case Extract::anywhere: {
            // Border cells are all <= 0 with H(0,0) = 0 smallest in order.
            r.score = 0;
            r.q_end = 0;
            r.s_end = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                const Score v = out.best_val[h][j];
                const std::size_t i = out.best_row[h][j];
                if (v > r.score || (v == r.score && (i < r.q_end || (i == r.q_end && j < r.s_end)))) {
                    r.score = v;
                    r.q_end = i;
                    r.s_end = j;
                }
            }
            break;
        }
    }
    return r;
}

template <class Tr>
void finish_last_row(const KernelInput<Tr>& in, const ScoringScheme& scheme, Score lead_first,
                     KernelOutput<Tr>& out) {
    if (!in.want_last_row) return;
    for (int h = 0; h < Tr::kHalves; ++h) {
        const std::size_t m = in.query[h].size();
        const Score col0 = -lead_cost(scheme, lead_first, m);
        out.last_h[h][0] = in.free_borders ? 0 : col0;
        out.last_e[h][0] = col0;
        if (in.n[h] > 0 && in.want_column) out.last_h[h][in.n[h]] = out.column[h][m];
    }
}

template <class Tr, bool Count>
KernelOutput<Tr> run_kernel(const KernelInput<Tr>& in,
                            const std::array<std::span<const SymbolCode>, Tr::kHalves>& subject,
                            const EngineTuning& tuning, const ScoringScheme& scheme, const PassSpec& spec,
                            StageProbe* probe) {
    const bool track = spec.extract == Extract::anywhere;
    const Score lead = resolve_lead(scheme, spec.lead_first);
    KernelOutput<Tr> out;
    prepare_output(in, track, out);
    with_lanes(tuning.lanes, [&](auto p) {
        with_bool(scheme.gap_model == GapModel::affine, [&](auto affine) {
            with_mode(spec.floor_zero, track, [&](auto floor, auto trk) {
                run_stages<decltype(p)::value, Tr, decltype(affine)::value, decltype(floor)::value,
                           decltype(trk)::value, Count>(in, subject, tuning.cols_per_lane, scheme, lead,
                                                        probe, out);
            });
        });
    });
    finish_last_row(in, scheme, lead, out);
    return out;
}

void check_lengths(std::size_t m, std::size_t n, const ScoringScheme& scheme) {
    if (m == 0 || n == 0) throw EmptySequence("engine requires non-empty query and subject");
    const std::size_t limit = max_sequence_length(scheme);
    if (m > limit || n > limit)
        throw LengthOverflow("sequence length exceeds the supported maximum of " +
                             std::to_string(limit) + " for this scoring scheme");
}

}  // namespace

StageBoundary initial_boundary(std::size_t m, const AlignConfig& cfg, const ScoringScheme& scheme) {
    StageBoundary b;
    fill_initial_boundary<ScalarCells>(b.h, b.f, m, cfg.align_type != AlignType::global, scheme,
                                       scheme.gap_open);
    if (scheme.gap_model != GapModel::affine) b.f.clear();
    return b;
}

PassSpec pass_spec_for(const AlignConfig& cfg) {
    PassSpec spec;
    switch (cfg.align_type) {
        case AlignType::global:
            spec.extract = Extract::corner;
            break;
        case AlignType::local:
            spec.free_borders = true;
            spec.floor_zero = true;
            spec.extract = Extract::anywhere;
            break;
        case AlignType::semiglobal:
            spec.free_borders = true;
            spec.extract = Extract::last_row_col;
            spec.want_last_row = true;
            break;
    }
    return spec;
}

PassResult run_pass(std::span<const SymbolCode> q, std::span<const SymbolCode> s,
                    const ScoringScheme& scheme, const EngineTuning& tuning, const PassSpec& spec,
                    StageProbe* probe) {
    validate_tuning(tuning);
    check_lengths(q.size(), s.size(), scheme);

    KernelInput<ScalarCells> in;
    in.query = {q};
    in.n = {s.size()};
    in.rows = q.size();
    in.cols = s.size();
    in.alpha = scheme.gap_open;
    in.beta = scheme.extend_cost();
    in.free_borders = spec.free_borders;
    in.want_column = spec.extract != Extract::anywhere || spec.want_last_row;
    in.want_last_row = spec.want_last_row || spec.extract == Extract::last_row_col;

    const std::array<std::span<const SymbolCode>, 1> subject{s};
    auto out = probe ? run_kernel<ScalarCells, true>(in, subject, tuning, scheme, spec, probe)
                     : run_kernel<ScalarCells, false>(in, subject, tuning, scheme, spec, nullptr);

    PassResult res;
    res.end = extract(out, 0, q.size(), s.size(), spec.extract);
    if (spec.want_last_row) {
        res.last_h = std::move(out.last_h[0]);
        if (scheme.gap_model == GapModel::affine) res.last_e = std::move(out.last_e[0]);
    }
    return res;
}

EngineScore engine_score(std::span<const SymbolCode> q, std::span<const SymbolCode> s,
                         const AlignConfig& cfg, const ScoringScheme& scheme,
                         const EngineTuning& tuning, StageProbe* probe) {
    if (cfg.gap_model != scheme.gap_model) throw ConfigMismatch("gap model differs between config and scheme");
    return run_pass(q, s, scheme, tuning, pass_spec_for(cfg), probe).end;
}

EngineScore engine_score(const Sequence& q, const Sequence& s, const AlignConfig& cfg,
                         const ScoringScheme& scheme, const EngineTuning& tuning) {
    const auto qs = q.symbols();
    const auto ss = s.symbols();
    return engine_score(qs, ss, cfg, scheme, tuning);
}

StageOutput wavefront_stage(std::span<const SymbolCode> query, const ScoringProfile& profile,
                            const AlignConfig& cfg, const ScoringScheme& scheme,
                            const EngineTuning& tuning, const StageBoundary& boundary_in,
                            std::size_t stage_index, StageProbe* probe) {
    validate_tuning(tuning);
    if (profile.width != tuning.stage_width())
        throw std::invalid_argument("profile width does not match the tuning's stage width");
    const std::size_t m = query.size();
    const bool affine = scheme.gap_model == GapModel::affine;
    if (boundary_in.h.size() != m + 1 || (affine && boundary_in.f.size() != m + 1))
        throw std::invalid_argument("boundary column must hold m + 1 rows");

    const std::size_t j0 = stage_index * static_cast<std::size_t>(tuning.stage_width());
    const PassSpec spec = pass_spec_for(cfg);

    KernelInput<ScalarCells> in;
    in.query = {query};
    in.n = {j0 + static_cast<std::size_t>(profile.chunk_len)};
    in.rows = m;
    in.cols = in.n[0];
    in.alpha = scheme.gap_open;
    in.beta = scheme.extend_cost();
    in.free_borders = spec.free_borders;
    in.want_last_row = true;

    KernelOutput<ScalarCells> out;
    out.last_h[0].assign(in.n[0] + 1, kNegInf);
    out.last_e[0].assign(in.n[0] + 1, kNegInf);

    StageOutput res;
    res.boundary.h.assign(m + 1, 0);
    if (affine) res.boundary.f.assign(m + 1, kNegInf);
    tracked_vector<Score> in_f = affine ? boundary_in.f : tracked_vector<Score>(m + 1, kNegInf);

    std::vector<Score> table;
    biased_table<ScalarCells>(profile, affine ? scheme.extend_cost() : 0, table);
    const std::array<const Score*, 1> tables{table.data()};

    auto run = [&](auto count) {
        with_lanes(tuning.lanes, [&](auto p) {
            with_bool(affine, [&](auto aff) {
                with_bool(cfg.align_type == AlignType::local, [&](auto local) {
                    constexpr int P = decltype(p)::value;
                    LaneGroup<P, ScalarCells, decltype(aff)::value, decltype(local)::value, false,
                              decltype(count)::value>
                        group(in, tuning.cols_per_lane, probe);
                    tracked_vector<Score> scratch_f(m + 1, kNegInf);
                    group.run_stage(stage_index, tables, boundary_in.h, in_f, res.boundary.h,
                                    affine ? res.boundary.f : scratch_f, out);
                });
            });
        });
    };
    if (probe) {
        run(std::true_type{});
        probe->cells += static_cast<std::uint64_t>(m) * profile.chunk_len;
    } else {
        run(std::false_type{});
    }

    res.iterations = out.iterations;
    res.cells = static_cast<std::uint64_t>(m) * profile.chunk_len;
    res.last_row.assign(out.last_h[0].begin() + static_cast<std::ptrdiff_t>(j0) + 1, out.last_h[0].end());
    return res;
}

bool packed_range_ok(const SequencePair& a, const SequencePair& b, const ScoringScheme& scheme,
                     const EngineTuning& tuning) {
    const std::int64_t term = std::max<Score>(1, scheme.max_term());
    const std::int64_t offset = static_cast<std::int64_t>(scheme.extend_cost()) * tuning.stage_width();
    constexpr std::int64_t kLimit = std::int64_t{1} << 14;
    for (const auto* pr : {&a, &b}) {
        const auto len = static_cast<std::int64_t>(pr->query.size() + pr->subject.size());
        if (term * len >= kLimit) return false;
    }
    // Stage-local offsets ride on top of the score range.
    return kLimit + offset < 32767;
}

std::pair<EngineScore, EngineScore> engine_score_packed(const SequencePair& a, const SequencePair& b,
                                                        const AlignConfig& cfg,
                                                        const ScoringScheme& scheme,
                                                        const EngineTuning& tuning, StageProbe* probe) {
    validate_tuning(tuning);
    if (cfg.gap_model != scheme.gap_model) throw ConfigMismatch("gap model differs between config and scheme");
    for (const auto* pr : {&a, &b})
        if (pr->query.empty() || pr->subject.empty())
            throw EmptySequence("engine requires non-empty query and subject");
    if (!packed_range_ok(a, b, scheme, tuning))
        throw PackedRangeOverflow("pair exceeds the 16-bit packed score range");

    const PassSpec spec = pass_spec_for(cfg);
    KernelInput<PackedCells> in;
    in.query = {a.query, b.query};
    in.n = {a.subject.size(), b.subject.size()};
    in.rows = std::max(a.query.size(), b.query.size());
    in.cols = std::max(a.subject.size(), b.subject.size());
    in.alpha = scheme.gap_open;
    in.beta = scheme.extend_cost();
    in.free_borders = spec.free_borders;
    in.want_column = spec.extract != Extract::anywhere;
    in.want_last_row = spec.extract == Extract::last_row_col;

    const std::array<std::span<const SymbolCode>, 2> subject{a.subject, b.subject};
    // Packed lanes carry no instrumentation; the probe only sees cell counts.
    auto out = run_kernel<PackedCells, false>(in, subject, tuning, scheme, spec, nullptr);
    if (probe) {
        probe->cells += static_cast<std::uint64_t>(a.query.size()) * a.subject.size() +
                        static_cast<std::uint64_t>(b.query.size()) * b.subject.size();
        probe->iterations += out.iterations;
    }
    return {extract(out, 0, a.query.size(), a.subject.size(), spec.extract),
            extract(out, 1, b.query.size(), b.subject.size(), spec.extract)};
}

}  // namespace waveseq::engine

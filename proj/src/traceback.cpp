#include "waveseq/traceback.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace waveseq::traceback {

PredecessorMatrix::PredecessorMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), bits_((rows * cols + 1) / 2, 0) {}

void PredecessorMatrix::set(std::size_t i, std::size_t j, Origin h, bool e_ext, bool f_ext) noexcept {
    const std::size_t c = i * cols_ + j;
    const unsigned shift = (c & 1) * 4;
    const auto v = static_cast<std::uint8_t>(h | (e_ext ? 4 : 0) | (f_ext ? 8 : 0));
    auto& byte = bits_[c >> 1];
    byte = static_cast<std::uint8_t>((byte & ~(0xF << shift)) | (v << shift));
}

namespace {

using Origin = PredecessorMatrix::Origin;

// Border conditions of one explicit DP. Global frames may charge a custom
// first-symbol cost for vertical gaps on the left (lead) and right (trail)
// edge; the divide-and-conquer base cases need both.
struct Frame {
    AlignType type = AlignType::global;
    Score lead = 0;
    Score trail = 0;
    bool has_trail = false;
};

struct ExplicitDp {
    PredecessorMatrix pred;
    tracked_vector<std::uint8_t> trail_ext;  // extension bits of the right-edge gap column
    Score score = 0;
    std::size_t end_i = 0, end_j = 0;
    bool end_in_trail = false;
};

Score run_cost(Score first, Score extend, std::size_t len) {
    return len == 0 ? 0 : first + static_cast<Score>(len - 1) * extend;
}

ExplicitDp fill_explicit(std::span<const SymbolCode> q, std::span<const SymbolCode> s,
                         const ScoringScheme& scheme, const Frame& fr) {
    const std::size_t m = q.size(), n = s.size();
    const bool affine = scheme.gap_model == GapModel::affine;
    const bool global = fr.type == AlignType::global;
    const bool local = fr.type == AlignType::local;
    const Score alpha = scheme.gap_open;
    const Score beta = scheme.extend_cost();
    const Score nu = local ? 0 : kNegInf;
    const bool trail = fr.has_trail && affine;

    ExplicitDp dp;
    dp.pred = PredecessorMatrix(m + 1, n + 1);
    if (trail) dp.trail_ext.assign(m + 1, 0);

    tracked_vector<Score> hp(n + 1), hc(n + 1), ep(n + 1, kNegInf), ec(n + 1, kNegInf);
    tracked_vector<Score> last_col(m + 1);
    for (std::size_t j = 0; j <= n; ++j) hp[j] = global ? -run_cost(alpha, beta, j) : 0;
    last_col[0] = hp[n];

    Score et = kNegInf;  // trailing vertical gap in the right-edge column
    std::size_t best_i = 0, best_j = 0;
    Score best = 0;

    for (std::size_t i = 1; i <= m; ++i) {
        hc[0] = global ? -run_cost(fr.lead, beta, i) : 0;
        Score f = kNegInf;
        for (std::size_t j = 1; j <= n; ++j) {
            const Score diag = hp[j - 1] + substitution_score(scheme, q[i - 1], s[j - 1]);
            Score e, fv;
            bool e_ext = false, f_ext = false;
            if (affine) {
                const Score e_extend = ep[j] - beta;
                e = std::max(e_extend, hp[j] - alpha);
                e_ext = i >= 2 && e == e_extend;
                const Score f_extend = f - beta;
                fv = std::max(f_extend, hc[j - 1] - alpha);
                f_ext = j >= 2 && fv == f_extend;
                ec[j] = e;
                f = fv;
            } else {
                e = hp[j] - alpha;
                fv = hc[j - 1] - alpha;
            }
            const Score h = std::max({diag, e, fv, nu});
            Origin o;
            if (local && h == 0) o = Origin::stop;
            else if (h == diag) o = Origin::diag;
            else if (h == e) o = Origin::up;
            else if (h == fv) o = Origin::left;
            else o = Origin::stop;
            dp.pred.set(i, j, o, e_ext, f_ext);
            hc[j] = h;
            if (local && h > best) {
                best = h;
                best_i = i;
                best_j = j;
            }
        }
        if (trail) {
            const Score ext = et - beta;
            et = std::max(ext, hp[n] - fr.trail);
            dp.trail_ext[i] = i >= 2 && et == ext;
        }
        last_col[i] = hc[n];
        std::swap(hp, hc);
        std::swap(ep, ec);
    }
    // hp now holds row m.

    switch (fr.type) {
        case AlignType::global:
            dp.score = hp[n];
            dp.end_i = m;
            dp.end_j = n;
            if (trail && m > 0 && et > dp.score) {
                dp.score = et;
                dp.end_in_trail = true;
            }
            break;
        case AlignType::local:
            dp.score = best;
            dp.end_i = best_i;
            dp.end_j = best_j;
            break;
        case AlignType::semiglobal:
            dp.score = last_col[0];
            dp.end_i = 0;
            dp.end_j = n;
            for (std::size_t i = 1; i < m; ++i)
                if (last_col[i] > dp.score) {
                    dp.score = last_col[i];
                    dp.end_i = i;
                }
            for (std::size_t j = 0; j <= n; ++j)
                if (hp[j] > dp.score) {
                    dp.score = hp[j];
                    dp.end_i = m;
                    dp.end_j = j;
                }
            break;
    }
    return dp;
}

/// Walks the predecessor bits from the end cell; returns the start cell.
std::pair<std::size_t, std::size_t> walk(const ExplicitDp& dp, bool global, EditOps& rev) {
    enum class State { h, e, f };
    std::size_t i = dp.end_i, j = dp.end_j;
    State st = State::h;
    if (dp.end_in_trail) {
        // Right-edge gap column: insertions straight up until it was opened.
        while (true) {
            append_run(rev, EditOp::insertion);
            const bool ext = dp.trail_ext[i];
            --i;
            if (!ext) break;
        }
    }
    while (true) {
        if (st == State::h) {
            if (i == 0 || j == 0) {
                if (global) {
                    append_run(rev, EditOp::deletion, static_cast<std::uint32_t>(j));
                    append_run(rev, EditOp::insertion, static_cast<std::uint32_t>(i));
                    i = j = 0;
                }
                break;
            }
            const Origin o = dp.pred.origin(i, j);
            if (o == Origin::diag) {
                append_run(rev, EditOp::match);
                --i;
                --j;
            } else if (o == Origin::up) {
                st = State::e;
            } else if (o == Origin::left) {
                st = State::f;
            } else {
                break;
            }
        } else if (st == State::e) {
            append_run(rev, EditOp::insertion);
            const bool ext = dp.pred.e_extends(i, j);
            --i;
            if (!ext) st = State::h;
        } else {
            append_run(rev, EditOp::deletion);
            const bool ext = dp.pred.f_extends(i, j);
            --j;
            if (!ext) st = State::h;
        }
    }
    return {i, j};
}

void append_reversed(EditOps& out, const EditOps& rev) {
    for (auto it = rev.rbegin(); it != rev.rend(); ++it) append_run(out, it->op, it->len);
}

tracked_vector<SymbolCode> reversed(std::span<const SymbolCode> v) {
    return tracked_vector<SymbolCode>(v.rbegin(), v.rend());
}

struct Recursion {
    const ScoringScheme& scheme;
    const engine::EngineTuning& tuning;
    std::size_t threshold;
    std::span<const SymbolCode> q, s;          // whole problem
    std::span<const SymbolCode> q_rev, s_rev;  // whole problem, reversed
    EditOps ops;
    std::uint64_t cells = 0;

    /// Aligns q[qo, qo+m) x s[so, so+n) globally under the given edge costs
    /// and appends the ops. Returns the subproblem's score.
    Score run(std::size_t qo, std::size_t m, std::size_t so, std::size_t n, Score lead, Score trail) {
        const Score beta = scheme.extend_cost();
        if (n == 0) {
            append_run(ops, EditOp::insertion, static_cast<std::uint32_t>(m));
            return -run_cost(std::min(lead, trail), beta, m);
        }
        if (m == 0) {
            append_run(ops, EditOp::deletion, static_cast<std::uint32_t>(n));
            return -run_cost(scheme.gap_open, beta, n);
        }
        const auto qs = q.subspan(qo, m);
        const auto ss = s.subspan(so, n);
        if (m + n <= threshold || m <= 1) {
            Frame fr;
            fr.lead = lead;
            fr.trail = trail;
            fr.has_trail = true;
            const ExplicitDp dp = fill_explicit(qs, ss, scheme, fr);
            cells += static_cast<std::uint64_t>(m) * n;
            EditOps rev;
            walk(dp, true, rev);
            append_reversed(ops, rev);
            return dp.score;
        }
        const auto qr = q_rev.subspan(q.size() - qo - m, m);
        const auto sr = s_rev.subspan(s.size() - so - n, n);
        Score value = 0;
        const SplitPoint sp = find_split(qs, ss, qr, sr, scheme, tuning, lead, trail, &value, &cells);
        const Score alpha = scheme.gap_open;
        if (!sp.in_gap) {
            run(qo, sp.row, so, sp.col, lead, alpha);
            run(qo + sp.row, m - sp.row, so + sp.col, n - sp.col, alpha, trail);
        } else {
            // The gap crossing the midline consumes q[row-1] and q[row].
            run(qo, sp.row - 1, so, sp.col, lead, beta);
            append_run(ops, EditOp::insertion, 2);
            run(qo + sp.row + 1, m - sp.row - 1, so + sp.col, n - sp.col, beta, trail);
        }
        return value;
    }
};

AlignmentResult empty_result(std::uint64_t cells) {
    AlignmentResult r;
    r.cells_computed = cells;
    return r;
}

void require_nonempty(std::span<const SymbolCode> q, std::span<const SymbolCode> s) {
    if (q.empty() || s.empty()) throw EmptySequence("alignment requires non-empty query and subject");
}

void require_matching_gaps(const AlignConfig& cfg, const ScoringScheme& scheme) {
    if (cfg.gap_model != scheme.gap_model)
        throw ConfigMismatch("gap model differs between config and scheme");
}

}  // namespace

AlignmentResult explicit_traceback(std::span<const SymbolCode> q, std::span<const SymbolCode> s,
                                   const AlignConfig& cfg, const ScoringScheme& scheme,
                                   std::size_t threshold) {
    require_matching_gaps(cfg, scheme);
    if (q.size() + s.size() > threshold)
        throw UseHirschberg("m + n = " + std::to_string(q.size() + s.size()) +
                            " exceeds the explicit traceback limit of " + std::to_string(threshold));
    Frame fr;
    fr.type = cfg.align_type;
    fr.lead = scheme.gap_open;
    const ExplicitDp dp = fill_explicit(q, s, scheme, fr);
    EditOps rev;
    const auto [i0, j0] = walk(dp, cfg.align_type == AlignType::global, rev);

    AlignmentResult r;
    r.score = dp.score;
    r.q_start = i0;
    r.s_start = j0;
    r.q_end = dp.end_i;
    r.s_end = dp.end_j;
    r.ops.assign(rev.rbegin(), rev.rend());
    r.cells_computed = static_cast<std::uint64_t>(q.size()) * s.size();
    return r;
}

SplitPoint find_split(std::span<const SymbolCode> q, std::span<const SymbolCode> s,
                      std::span<const SymbolCode> q_rev, std::span<const SymbolCode> s_rev,
                      const ScoringScheme& scheme, const engine::EngineTuning& tuning,
                      Score lead_first, Score trail_first, Score* value, std::uint64_t* cells) {
    const std::size_t m = q.size(), n = s.size();
    if (m < 2 || n == 0) throw std::invalid_argument("split needs at least two query rows and one column");
    const std::size_t mid = m / 2;
    const bool affine = scheme.gap_model == GapModel::affine;

    engine::PassSpec spec;
    spec.want_last_row = true;
    spec.lead_first = lead_first;
    const auto fwd = engine::run_pass(q.subspan(0, mid), s, scheme, tuning, spec);
    spec.lead_first = trail_first;
    const auto rev = engine::run_pass(q_rev.subspan(0, m - mid), s_rev, scheme, tuning, spec);
    if (cells) *cells += fwd.end.cells_computed + rev.end.cells_computed;

    SplitPoint sp;
    sp.row = mid;
    std::int64_t best = std::int64_t{fwd.last_h[0]} + rev.last_h[n];
    for (std::size_t j = 1; j <= n; ++j) {
        const std::int64_t v = std::int64_t{fwd.last_h[j]} + rev.last_h[n - j];
        if (v > best) {
            best = v;
            sp.col = j;
        }
    }
    if (affine) {
        // Both halves charged an opening for the same gap; refund one.
        const std::int64_t refund = scheme.gap_open - scheme.extend_cost();
        for (std::size_t j = 0; j <= n; ++j) {
            const std::int64_t v = std::int64_t{fwd.last_e[j]} + rev.last_e[n - j] + refund;
            if (v > best) {
                best = v;
                sp.col = j;
                sp.in_gap = true;
            }
        }
    }
    if (value) *value = static_cast<Score>(best);
    return sp;
}

Endpoints locate_endpoints(std::span<const SymbolCode> q, std::span<const SymbolCode> s,
                           const AlignConfig& cfg, const ScoringScheme& scheme,
                           const engine::EngineTuning& tuning) {
    require_nonempty(q, s);
    require_matching_gaps(cfg, scheme);
    const auto fwd = engine::run_pass(q, s, scheme, tuning, engine::pass_spec_for(cfg));
    Endpoints ep;
    ep.score = fwd.end.score;
    ep.q_end = fwd.end.q_end;
    ep.s_end = fwd.end.s_end;
    ep.cells_computed = fwd.end.cells_computed;

    if (cfg.align_type == AlignType::global) return ep;
    if (cfg.align_type == AlignType::local && ep.score <= 0)
        throw EmptyAlignment("no positive-scoring local alignment");
    if (ep.q_end == 0 || ep.s_end == 0) {
        ep.q_start = ep.q_end;
        ep.s_start = ep.s_end;
        return ep;
    }

    // Align the reversed prefixes anchored at the end cell; the best cell of
    // that pass is the start, seen from the end.
    const auto rq = reversed(q.subspan(0, ep.q_end));
    const auto rs = reversed(s.subspan(0, ep.s_end));
    engine::PassSpec spec;
    spec.extract = cfg.align_type == AlignType::local ? engine::Extract::anywhere
                                                      : engine::Extract::last_row_col;
    const auto back = engine::run_pass(rq, rs, scheme, tuning, spec);
    if (back.end.score != ep.score)
        throw std::logic_error("reverse pass disagrees with the forward optimum");
    ep.q_start = ep.q_end - back.end.q_end;
    ep.s_start = ep.s_end - back.end.s_end;
    ep.cells_computed += back.end.cells_computed;
    return ep;
}

AlignmentResult hirschberg(std::span<const SymbolCode> q, std::span<const SymbolCode> s,
                           const AlignConfig& cfg, const ScoringScheme& scheme,
                           const TracebackOptions& opts) {
    require_nonempty(q, s);
    require_matching_gaps(cfg, scheme);
    engine::validate_tuning(opts.tuning);

    Endpoints ep;
    try {
        ep = locate_endpoints(q, s, cfg, scheme, opts.tuning);
    } catch (const EmptyAlignment&) {
        return empty_result(static_cast<std::uint64_t>(q.size()) * s.size());
    }
    if (cfg.align_type == AlignType::global) ep.cells_computed = 0;  // the split passes recompute it

    const auto qs = q.subspan(ep.q_start, ep.q_end - ep.q_start);
    const auto ss = s.subspan(ep.s_start, ep.s_end - ep.s_start);
    const auto qr = reversed(qs);
    const auto sr = reversed(ss);
    Recursion rec{scheme, opts.tuning, opts.explicit_threshold, qs, ss, qr, sr, {}, 0};
    const Score alpha = scheme.gap_open;
    const Score value = rec.run(0, qs.size(), 0, ss.size(), alpha, alpha);

    AlignmentResult r;
    r.score = cfg.align_type == AlignType::global ? value : ep.score;
    r.q_start = ep.q_start;
    r.s_start = ep.s_start;
    r.q_end = ep.q_end;
    r.s_end = ep.s_end;
    r.ops = std::move(rec.ops);
    r.cells_computed = ep.cells_computed + rec.cells;
    return r;
}

AlignmentResult align(std::span<const SymbolCode> q, std::span<const SymbolCode> s,
                      const AlignConfig& cfg, const ScoringScheme& scheme,
                      const TracebackOptions& opts) {
    require_nonempty(q, s);
    require_matching_gaps(cfg, scheme);
    if (cfg.result_mode == ResultMode::traceback) {
        if (q.size() + s.size() <= opts.explicit_threshold)
            return explicit_traceback(q, s, cfg, scheme, opts.explicit_threshold);
        return hirschberg(q, s, cfg, scheme, opts);
    }
    const auto e = engine::engine_score(q, s, cfg, scheme, opts.tuning);
    AlignmentResult r;
    r.score = e.score;
    r.q_end = e.q_end;
    r.s_end = e.s_end;
    r.has_start = cfg.align_type == AlignType::global;
    r.cells_computed = e.cells_computed;
    return r;
}

AlignmentResult align(const Sequence& q, const Sequence& s, const AlignConfig& cfg,
                      const ScoringScheme& scheme, const TracebackOptions& opts) {
    const auto qs = q.symbols();
    const auto ss = s.symbols();
    return align(qs, ss, cfg, scheme, opts);
}

}  // namespace waveseq::traceback

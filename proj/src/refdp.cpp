#include "waveseq/refdp.hpp"

#include <algorithm>

namespace waveseq::refdp {

DpMatrices fill_matrices(std::span<const SymbolCode> q, std::span<const SymbolCode> s,
                         const AlignConfig& cfg, const ScoringScheme& scheme) {
    const std::size_t m = q.size(), n = s.size();
    const bool affine = scheme.gap_model == GapModel::affine;
    const bool global = cfg.align_type == AlignType::global;
    const Score nu = cfg.effective_floor();
    const Score alpha = scheme.gap_open;
    const Score beta = scheme.extend_cost();

    DpMatrices dp;
    dp.rows = m + 1;
    dp.cols = n + 1;
    dp.H.assign(dp.rows * dp.cols, 0);
    if (affine) {
        dp.E.assign(dp.rows * dp.cols, kNegInf);
        dp.F.assign(dp.rows * dp.cols, kNegInf);
    }
    auto at = [&](std::size_t i, std::size_t j) { return i * dp.cols + j; };

    for (std::size_t i = 1; i <= m; ++i) {
        dp.H[at(i, 0)] = global ? -scheme.gap_cost(i) : 0;
        if (affine) dp.E[at(i, 0)] = -scheme.gap_cost(i);
    }
    for (std::size_t j = 1; j <= n; ++j) {
        dp.H[at(0, j)] = global ? -scheme.gap_cost(j) : 0;
        if (affine) dp.F[at(0, j)] = -scheme.gap_cost(j);
    }

    for (std::size_t i = 1; i <= m; ++i) {
        for (std::size_t j = 1; j <= n; ++j) {
            Score e, f;
            if (affine) {
                e = std::max(dp.E[at(i - 1, j)] - beta, dp.H[at(i - 1, j)] - alpha);
                f = std::max(dp.F[at(i, j - 1)] - beta, dp.H[at(i, j - 1)] - alpha);
                dp.E[at(i, j)] = e;
                dp.F[at(i, j)] = f;
            } else {
                e = dp.H[at(i - 1, j)] - alpha;
                f = dp.H[at(i, j - 1)] - alpha;
            }
            const Score diag = dp.H[at(i - 1, j - 1)] + substitution_score(scheme, q[i - 1], s[j - 1]);
            dp.H[at(i, j)] = std::max({diag, e, f, nu});
        }
    }
    return dp;
}

EndPoint locate_optimum(const DpMatrices& dp, const AlignConfig& cfg) {
    const std::size_t m = dp.rows - 1, n = dp.cols - 1;
    switch (cfg.align_type) {
        case AlignType::global:
            return {dp.h(m, n), m, n};
        case AlignType::local: {
            EndPoint best{dp.h(0, 0), 0, 0};
            for (std::size_t i = 0; i <= m; ++i)
                for (std::size_t j = 0; j <= n; ++j)
                    if (dp.h(i, j) > best.score) best = {dp.h(i, j), i, j};
            return best;
        }
        case AlignType::semiglobal: {
            // Row-major scan restricted to the last column and the last row.
            EndPoint best{dp.h(0, n), 0, n};
            for (std::size_t i = 1; i < m; ++i)
                if (dp.h(i, n) > best.score) best = {dp.h(i, n), i, n};
            for (std::size_t j = 0; j <= n; ++j)
                if (dp.h(m, j) > best.score) best = {dp.h(m, j), m, j};
            return best;
        }
    }
    return {};
}

EndPoint ref_score(std::span<const SymbolCode> q, std::span<const SymbolCode> s,
                   const AlignConfig& cfg, const ScoringScheme& scheme) {
    return locate_optimum(fill_matrices(q, s, cfg, scheme), cfg);
}

EndPoint ref_score(const Sequence& q, const Sequence& s, const AlignConfig& cfg,
                   const ScoringScheme& scheme) {
    const auto qs = q.symbols();
    const auto ss = s.symbols();
    return ref_score(qs, ss, cfg, scheme);
}

AlignmentResult ref_traceback(std::span<const SymbolCode> q, std::span<const SymbolCode> s,
                              const AlignConfig& cfg, const ScoringScheme& scheme) {
    const DpMatrices dp = fill_matrices(q, s, cfg, scheme);
    const EndPoint end = locate_optimum(dp, cfg);
    const bool affine = scheme.gap_model == GapModel::affine;
    const bool global = cfg.align_type == AlignType::global;
    const bool local = cfg.align_type == AlignType::local;
    const Score alpha = scheme.gap_open;
    const Score beta = scheme.extend_cost();

    auto e_at = [&](std::size_t i, std::size_t j) {
        return affine ? dp.e(i, j) : dp.h(i - 1, j) - alpha;
    };
    auto f_at = [&](std::size_t i, std::size_t j) {
        return affine ? dp.f(i, j) : dp.h(i, j - 1) - alpha;
    };

    enum class State { h, e, f };
    State state = State::h;
    std::size_t i = end.q_end, j = end.s_end;
    EditOps rev;

    while (true) {
        if (state == State::h) {
            if (i == 0 || j == 0) {
                if (global) {
                    append_run(rev, EditOp::deletion, static_cast<std::uint32_t>(j));
                    append_run(rev, EditOp::insertion, static_cast<std::uint32_t>(i));
                    i = j = 0;
                }
                break;
            }
            const Score h = dp.h(i, j);
            if (local && h == 0) break;
            if (h == dp.h(i - 1, j - 1) + substitution_score(scheme, q[i - 1], s[j - 1])) {
                append_run(rev, EditOp::match);
                --i;
                --j;
            } else if (h == e_at(i, j)) {
                state = State::e;
            } else if (h == f_at(i, j)) {
                state = State::f;
            } else {
                break;  // floor
            }
        } else if (state == State::e) {
            append_run(rev, EditOp::insertion);
            const bool extend = affine && i >= 2 && dp.e(i, j) == dp.e(i - 1, j) - beta;
            --i;
            if (!extend) state = State::h;
        } else {
            append_run(rev, EditOp::deletion);
            const bool extend = affine && j >= 2 && dp.f(i, j) == dp.f(i, j - 1) - beta;
            --j;
            if (!extend) state = State::h;
        }
    }

    AlignmentResult out;
    out.score = end.score;
    out.q_start = i;
    out.s_start = j;
    out.q_end = end.q_end;
    out.s_end = end.s_end;
    out.ops.assign(rev.rbegin(), rev.rend());
    out.cells_computed = static_cast<std::uint64_t>(q.size()) * s.size();
    return out;
}

AlignmentResult ref_traceback(const Sequence& q, const Sequence& s, const AlignConfig& cfg,
                              const ScoringScheme& scheme) {
    const auto qs = q.symbols();
    const auto ss = s.symbols();
    return ref_traceback(qs, ss, cfg, scheme);
}

}  // namespace waveseq::refdp

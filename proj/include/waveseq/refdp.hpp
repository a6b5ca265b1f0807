#ifndef WAVESEQ_REFDP_HPP
#define WAVESEQ_REFDP_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "waveseq/core.hpp"

// Quadratic-space reference implementation of the alignment recurrences.
// Slow and obvious on purpose: every other module is checked against it.
namespace waveseq::refdp {

/// Full (m+1) x (n+1) score grids. E and F are left empty for linear gaps,
/// where they are derived inline from H.
struct DpMatrices {
    std::size_t rows = 0;  // m + 1
    std::size_t cols = 0;  // n + 1
    std::vector<Score> H, E, F;

    Score h(std::size_t i, std::size_t j) const { return H[i * cols + j]; }
    Score e(std::size_t i, std::size_t j) const { return E[i * cols + j]; }
    Score f(std::size_t i, std::size_t j) const { return F[i * cols + j]; }
};

struct EndPoint {
    Score score = 0;
    std::size_t q_end = 0;
    std::size_t s_end = 0;

    bool operator==(const EndPoint&) const = default;
};

DpMatrices fill_matrices(std::span<const SymbolCode> q, std::span<const SymbolCode> s,
                         const AlignConfig& cfg, const ScoringScheme& scheme);

/// Optimum per alignment type; ties go to the smallest row, then column.
EndPoint locate_optimum(const DpMatrices& dp, const AlignConfig& cfg);

EndPoint ref_score(std::span<const SymbolCode> q, std::span<const SymbolCode> s,
                   const AlignConfig& cfg, const ScoringScheme& scheme);
EndPoint ref_score(const Sequence& q, const Sequence& s, const AlignConfig& cfg,
                   const ScoringScheme& scheme);

/// Traceback priority: diagonal, then E (query gap), then F (subject gap);
/// inside a gap state extension wins over opening. Local paths stop at the
/// first zero cell.
AlignmentResult ref_traceback(std::span<const SymbolCode> q, std::span<const SymbolCode> s,
                              const AlignConfig& cfg, const ScoringScheme& scheme);
AlignmentResult ref_traceback(const Sequence& q, const Sequence& s, const AlignConfig& cfg,
                              const ScoringScheme& scheme);

}  // namespace waveseq::refdp

#endif

#ifndef WAVESEQ_TRACEBACK_HPP
#define WAVESEQ_TRACEBACK_HPP

#include <cstddef>
#include <cstdint>
#include <span>

#include "waveseq/core.hpp"
#include "waveseq/engine.hpp"
#include "waveseq/memory.hpp"

// Full alignments. Short pairs keep every cell's predecessor; long pairs
// are split recursively at optimal midpoints so only score passes of the
// engine and O(m + n) extra memory are needed.
namespace waveseq::traceback {

/// Local alignment whose best score is 0: nothing aligns.
class EmptyAlignment : public Error {
public:
    using Error::Error;
};

inline constexpr std::size_t kDefaultExplicitThreshold = 128;

/// Four bits per cell: H origin (2 bits), E extends, F extends.
class PredecessorMatrix {
public:
    enum Origin : std::uint8_t { diag = 0, up = 1, left = 2, stop = 3 };

    PredecessorMatrix() = default;
    PredecessorMatrix(std::size_t rows, std::size_t cols);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t bytes() const noexcept { return bits_.size(); }

    void set(std::size_t i, std::size_t j, Origin h, bool e_ext, bool f_ext) noexcept;
    Origin origin(std::size_t i, std::size_t j) const noexcept { return Origin(nibble(i, j) & 3); }
    bool e_extends(std::size_t i, std::size_t j) const noexcept { return nibble(i, j) & 4; }
    bool f_extends(std::size_t i, std::size_t j) const noexcept { return nibble(i, j) & 8; }

private:
    std::uint8_t nibble(std::size_t i, std::size_t j) const noexcept {
        const std::size_t c = i * cols_ + j;
        return (bits_[c >> 1] >> ((c & 1) * 4)) & 0xF;
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    tracked_vector<std::uint8_t> bits_;  // two cells per byte
};

struct SplitPoint {
    std::size_t row = 0;  // last query row of the upper half
    std::size_t col = 0;  // subject column where the path crosses
    bool in_gap = false;  // path crosses inside a vertical gap (affine)
};

struct Endpoints {
    std::size_t q_start = 0;
    std::size_t s_start = 0;
    std::size_t q_end = 0;
    std::size_t s_end = 0;
    Score score = 0;
    std::uint64_t cells_computed = 0;
};

struct TracebackOptions {
    engine::EngineTuning tuning{};
    std::size_t explicit_threshold = kDefaultExplicitThreshold;  // on m + n
};

/// Predecessor-matrix traceback; the path equals refdp::ref_traceback's.
/// Throws UseHirschberg when m + n exceeds the threshold.
AlignmentResult explicit_traceback(std::span<const SymbolCode> q, std::span<const SymbolCode> s,
                                   const AlignConfig& cfg, const ScoringScheme& scheme,
                                   std::size_t threshold = kDefaultExplicitThreshold);

/// Optimal crossing of row `mid` for the global problem q x s, where the
/// first/last symbol of a vertical gap on the left/right edge costs
/// lead_first/trail_first instead of gap_open.
SplitPoint find_split(std::span<const SymbolCode> q, std::span<const SymbolCode> s,
                      std::span<const SymbolCode> q_rev, std::span<const SymbolCode> s_rev,
                      const ScoringScheme& scheme, const engine::EngineTuning& tuning,
                      Score lead_first, Score trail_first, Score* value = nullptr,
                      std::uint64_t* cells = nullptr);

/// Forward pass for the end cell, reverse pass over the reversed prefixes
/// for the start. Throws EmptyAlignment for a local score of 0.
Endpoints locate_endpoints(std::span<const SymbolCode> q, std::span<const SymbolCode> s,
                           const AlignConfig& cfg, const ScoringScheme& scheme,
                           const engine::EngineTuning& tuning);

/// Linear-space alignment. Local and semi-global problems are first reduced
/// to their optimal rectangle with locate_endpoints.
AlignmentResult hirschberg(std::span<const SymbolCode> q, std::span<const SymbolCode> s,
                           const AlignConfig& cfg, const ScoringScheme& scheme,
                           const TracebackOptions& opts = {});

/// Score-only or full alignment per cfg.result_mode.
AlignmentResult align(std::span<const SymbolCode> q, std::span<const SymbolCode> s,
                      const AlignConfig& cfg, const ScoringScheme& scheme,
                      const TracebackOptions& opts = {});
AlignmentResult align(const Sequence& q, const Sequence& s, const AlignConfig& cfg,
                      const ScoringScheme& scheme, const TracebackOptions& opts = {});

}  // namespace waveseq::traceback

#endif

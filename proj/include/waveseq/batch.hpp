#ifndef WAVESEQ_BATCH_HPP
#define WAVESEQ_BATCH_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "waveseq/core.hpp"
#include "waveseq/engine.hpp"
#include "waveseq/traceback.hpp"

// Many alignments over a worker pool. Pairs are grouped by length so packed
// lanes run similar work; results come back in input order.
namespace waveseq::batch {

struct PairIndex {
    std::size_t query = 0;
    std::size_t subject = 0;

    bool operator==(const PairIndex&) const = default;
};

/// Cartesian product, row-major over queries.
std::vector<PairIndex> all_pairs(std::size_t query_count, std::size_t subject_count);
std::vector<PairIndex> all_pairs(std::span<const Sequence> queries, std::span<const Sequence> subjects);

struct BatchJob {
    std::span<const Sequence> queries;
    std::span<const Sequence> subjects;
    std::vector<PairIndex> pairs;
    AlignConfig cfg;
    ScoringScheme scheme;
    std::optional<engine::EngineTuning> tuning;  // auto-selected when empty
    bool packed = false;                         // two score-only pairs per lane
    std::size_t workers = 1;                     // 0 = hardware concurrency
    std::size_t explicit_threshold = traceback::kDefaultExplicitThreshold;
};

struct BatchReport {
    std::vector<AlignmentResult> results;  // same order as job.pairs
    double wall_time = 0.0;                // seconds
    std::uint64_t total_cells = 0;         // sum of m*n
    std::uint64_t computed_cells = 0;      // including traceback passes
    std::size_t packed_pairs = 0;          // pairs that ran in packed lanes
    double gcups = 0.0;                    // total_cells / wall_time / 1e9
};

/// A pair failed; index refers to job.pairs.
class BatchError : public Error {
public:
    BatchError(std::size_t pair_index, const std::string& what);
    std::size_t pair_index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// Power-of-two bucket of max(m, n).
unsigned length_bucket(std::size_t m, std::size_t n) noexcept;

/// WAVESEQ_WORKERS when set to a positive integer, else `fallback`.
std::size_t workers_from_env(std::size_t fallback);

BatchReport run_batch(const BatchJob& job);

}  // namespace waveseq::batch

#endif

#ifndef WAVESEQ_ENGINE_HPP
#define WAVESEQ_ENGINE_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "waveseq/core.hpp"
#include "waveseq/memory.hpp"

// Lane-group wavefront engine.
//
// A group of p lanes advances in lockstep over one vertical slab ("stage")
// of p*k DP columns. Lane t owns k adjacent columns and in iteration i
// computes row i - t of them, so all cells in flight lie on one anti-diagonal
// band. Neighbouring cells travel between lanes by shifting, query symbols
// are rotated through two per-lane registers and refreshed from memory only
// every p iterations, and substitution scores come from a per-stage scoring
// profile. Long subjects are processed as l = ceil(n / (p*k)) stages chained
// through a boundary column.
namespace waveseq::engine {

inline constexpr int kMinLanes = 4;
inline constexpr int kMaxLanes = 64;
inline constexpr int kMaxColsPerLane = 16;

struct EngineTuning {
    int lanes = 32;          // p: power of two in [4, 64]
    int cols_per_lane = 4;   // k: in [1, 16]
    bool packed = false;     // dual 16-bit alignments per lane

    int stage_width() const noexcept { return lanes * cols_per_lane; }
    std::size_t stage_count(std::size_t n) const noexcept {
        const auto w = static_cast<std::size_t>(stage_width());
        return (n + w - 1) / w;
    }
};

/// Throws std::invalid_argument for out-of-range p or k.
void validate_tuning(const EngineTuning& t);

/// Tuning used when the caller does not pick one, keyed on the longest
/// sequence of the workload.
EngineTuning auto_tuning(std::size_t max_len);

/// table[c][x] = sigma(c, chunk[x]) for c in {A,C,G,T} plus a fifth row for
/// masked query positions. Columns past chunk_len hold the mismatch score.
struct ScoringProfile {
    int width = 0;
    int chunk_len = 0;
    std::vector<Score> table;  // (kAlphabetSize + 1) rows of `width`

    Score at(SymbolCode c, int x) const { return table[static_cast<std::size_t>(c) * width + x]; }
};

/// Throws ChunkOverflow if the chunk is longer than p*k.
ScoringProfile build_scoring_profile(std::span<const SymbolCode> chunk, const ScoringScheme& scheme,
                                     const EngineTuning& tuning);

/// out[t] = in[t-1], out[0] = fill.
template <class T>
void lane_shift_up(std::span<T> values, T fill) {
    for (std::size_t t = values.size(); t-- > 1;) values[t] = values[t - 1];
    if (!values.empty()) values[0] = fill;
}

/// out[t] = in[t+1], out[p-1] = fill.
template <class T>
void lane_shift_down(std::span<T> values, T fill) {
    for (std::size_t t = 0; t + 1 < values.size(); ++t) values[t] = values[t + 1];
    if (!values.empty()) values.back() = fill;
}

/// Rightmost column of a stage: H and the horizontal-gap score F for rows
/// 0..m. The next stage reads it as its left edge.
struct StageBoundary {
    tracked_vector<Score> h;
    tracked_vector<Score> f;  // affine only
};

/// Left edge of stage 0, i.e. column 0 of the DP matrix.
StageBoundary initial_boundary(std::size_t m, const AlignConfig& cfg, const ScoringScheme& scheme);

/// Instrumentation filled in by a probed run.
struct StageProbe {
    std::uint64_t iterations = 0;
    std::uint64_t cells = 0;
    std::uint64_t query_loads = 0;             // batched loads of p query symbols
    std::uint64_t query_loads_off_phase = 0;   // loads at i mod p != 0
    std::uint64_t boundary_reads = 0;          // batched reads of p boundary rows
    std::uint64_t boundary_reads_off_phase = 0;
    std::uint64_t boundary_writes = 0;         // flushes of the outgoing column
    std::uint64_t boundary_partial_writes = 0; // flushes with fewer than p rows
    std::uint64_t boundary_rows_written = 0;
    std::uint64_t lane_cell_updates = 0;       // cells updated by lanes, padding included
    std::uint64_t adds = 0;                    // score add/sub inside cell updates
    std::uint64_t maxes = 0;                   // score max inside cell updates
    std::uint64_t floor_maxes = 0;             // local floor, counted apart

    void merge(const StageProbe& o);
};

struct StageOutput {
    StageBoundary boundary;
    std::uint64_t iterations = 0;
    std::uint64_t cells = 0;
    std::vector<Score> last_row;  // H(m, j) for the stage's valid columns
};

/// Runs one stage of the wavefront for the columns covered by `profile`.
/// `stage_index` positions the stage at columns [index*p*k + 1, ...].
StageOutput wavefront_stage(std::span<const SymbolCode> query, const ScoringProfile& profile,
                            const AlignConfig& cfg, const ScoringScheme& scheme,
                            const EngineTuning& tuning, const StageBoundary& boundary_in,
                            std::size_t stage_index, StageProbe* probe = nullptr);

struct EngineScore {
    Score score = 0;
    std::size_t q_end = 0;
    std::size_t s_end = 0;
    std::uint64_t cells_computed = 0;

    bool operator==(const EngineScore&) const = default;
};

EngineScore engine_score(std::span<const SymbolCode> q, std::span<const SymbolCode> s,
                         const AlignConfig& cfg, const ScoringScheme& scheme,
                         const EngineTuning& tuning, StageProbe* probe = nullptr);
EngineScore engine_score(const Sequence& q, const Sequence& s, const AlignConfig& cfg,
                         const ScoringScheme& scheme, const EngineTuning& tuning);

struct SequencePair {
    std::span<const SymbolCode> query;
    std::span<const SymbolCode> subject;
};

/// True when both pairs fit the 16-bit saturating range for this scheme.
bool packed_range_ok(const SequencePair& a, const SequencePair& b, const ScoringScheme& scheme,
                     const EngineTuning& tuning);

/// Two alignments at once, one per 16-bit half of every lane cell.
/// Throws PackedRangeOverflow when packed_range_ok is false.
std::pair<EngineScore, EngineScore> engine_score_packed(const SequencePair& a, const SequencePair& b,
                                                        const AlignConfig& cfg,
                                                        const ScoringScheme& scheme,
                                                        const EngineTuning& tuning,
                                                        StageProbe* probe = nullptr);

// ---------------------------------------------------------------------------
// Generalized passes used by the traceback module.

enum class Extract {
    corner,        // H(m, n)
    last_row_col,  // best of the last row and last column
    anywhere,      // best cell of the whole matrix
};

struct PassSpec {
    bool free_borders = false;  // zero first row/column instead of gap costs
    bool floor_zero = false;    // apply the local floor
    Extract extract = Extract::corner;
    Score lead_first = -1;      // cost of the first symbol of a gap running down
                                // column 0; negative means gap_open
    bool want_last_row = false; // capture H and E along row m
};

struct PassResult {
    EngineScore end;
    tracked_vector<Score> last_h;  // H(m, 0..n) when requested
    tracked_vector<Score> last_e;  // E(m, 0..n), affine only
};

PassResult run_pass(std::span<const SymbolCode> q, std::span<const SymbolCode> s,
                    const ScoringScheme& scheme, const EngineTuning& tuning, const PassSpec& spec,
                    StageProbe* probe = nullptr);

PassSpec pass_spec_for(const AlignConfig& cfg);

}  // namespace waveseq::engine

#endif

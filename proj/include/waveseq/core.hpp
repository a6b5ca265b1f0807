#ifndef WAVESEQ_CORE_HPP
#define WAVESEQ_CORE_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace waveseq {

using Score = std::int32_t;
using SymbolCode = std::uint8_t;

// Finite stand-in for minus infinity. Every score reachable inside the
// supported length range stays above -2^29, so NEG_INF minus any single
// penalty term cannot wrap a 32-bit integer.
inline constexpr Score kNegInf = -(Score{1} << 30);
inline constexpr Score kScoreHeadroom = Score{1} << 29;

// Unpacked symbol codes: 0..3 for A,C,G,T and kMaskedSymbol for any
// position that held a non-ACGT character.
inline constexpr SymbolCode kMaskedSymbol = 4;
inline constexpr int kAlphabetSize = 4;

// ---------------------------------------------------------------------------
// errors

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define WAVESEQ_DEFINE_ERROR(name)               \
    class name : public Error {                  \
    public:                                      \
        using Error::Error;                      \
    }

WAVESEQ_DEFINE_ERROR(EmptySequence);
WAVESEQ_DEFINE_ERROR(ConfigMismatch);
WAVESEQ_DEFINE_ERROR(ChunkOverflow);
WAVESEQ_DEFINE_ERROR(LengthOverflow);
WAVESEQ_DEFINE_ERROR(PackedRangeOverflow);
WAVESEQ_DEFINE_ERROR(UseHirschberg);

#undef WAVESEQ_DEFINE_ERROR

// ---------------------------------------------------------------------------
// sequences

struct Symbol {
    SymbolCode code = 0;
    bool flagged = false;
};

/// DNA sequence stored at two bits per symbol. Non-ACGT input positions are
/// kept (coded as A) and marked in a side bitmap so they never score a match.
class Sequence {
public:
    Sequence() = default;

    const std::string& id() const noexcept { return id_; }
    std::size_t size() const noexcept { return len_; }
    bool empty() const noexcept { return len_ == 0; }

    SymbolCode code(std::size_t i) const noexcept {
        return static_cast<SymbolCode>((packed_[i >> 2] >> ((i & 3) * 2)) & 3);
    }
    bool flagged(std::size_t i) const noexcept {
        return (flags_[i >> 6] >> (i & 63)) & 1;
    }
    Symbol symbol(std::size_t i) const noexcept { return {code(i), flagged(i)}; }
    bool has_flags() const noexcept { return flag_count_ > 0; }

    /// One code per position; flagged positions become kMaskedSymbol.
    std::vector<SymbolCode> symbols() const;

    /// Text form; flagged positions decode as 'N'.
    std::string decode() const;

    const std::vector<std::uint8_t>& packed() const noexcept { return packed_; }

private:
    friend Sequence encode_sequence(std::string_view id, std::string_view raw);

    std::string id_;
    std::vector<std::uint8_t> packed_;
    std::vector<std::uint64_t> flags_;
    std::size_t len_ = 0;
    std::size_t flag_count_ = 0;
};

/// Case-insensitive. Throws EmptySequence for empty input.
Sequence encode_sequence(std::string_view id, std::string_view raw);

// ---------------------------------------------------------------------------
// scoring

enum class GapModel { linear, affine };
enum class AlignType { local, global, semiglobal };
enum class ResultMode { score_only, traceback };

std::string_view to_string(GapModel g);
std::string_view to_string(AlignType t);
std::string_view to_string(ResultMode r);
GapModel parse_gap_model(std::string_view s);
AlignType parse_align_type(std::string_view s);

struct ScoringScheme {
    Score match_score = 2;
    Score mismatch_score = -1;
    Score gap_open = 1;    // cost of the first gap symbol
    Score gap_extend = 1;  // cost of each further symbol (affine only)
    GapModel gap_model = GapModel::linear;

    /// Per-symbol extension cost actually used by the recurrences. Under the
    /// linear model every gap symbol costs gap_open.
    Score extend_cost() const noexcept {
        return gap_model == GapModel::affine ? gap_extend : gap_open;
    }

    /// Total penalty of one gap run of `len` symbols.
    Score gap_cost(std::size_t len) const noexcept {
        if (len == 0) return 0;
        return gap_open + static_cast<Score>(len - 1) * extend_cost();
    }

    /// Largest magnitude of any single additive term.
    Score max_term() const noexcept;
};

/// Score for codes in 0..kMaskedSymbol.
inline Score substitution_score(const ScoringScheme& s, SymbolCode a, SymbolCode b) noexcept {
    return (a == b && a != kMaskedSymbol) ? s.match_score : s.mismatch_score;
}

inline Score substitution_score(const ScoringScheme& s, Symbol a, Symbol b) noexcept {
    return (a.code == b.code && !a.flagged && !b.flagged) ? s.match_score : s.mismatch_score;
}

// ---------------------------------------------------------------------------
// configuration

struct AlignConfig {
    AlignType align_type = AlignType::global;
    GapModel gap_model = GapModel::linear;
    ResultMode result_mode = ResultMode::score_only;
    std::optional<Score> floor;  // the nu term; filled in by validate_config

    Score effective_floor() const noexcept {
        return floor.value_or(align_type == AlignType::local ? 0 : kNegInf);
    }
};

struct ValidatedConfig {
    AlignConfig config;
    std::vector<std::string> warnings;
};

/// Normalizes the floor for the alignment type and checks the gap model
/// agrees with the scheme. Throws ConfigMismatch on contradictions and
/// std::invalid_argument on negative penalties.
ValidatedConfig validate_config(const AlignConfig& cfg, const ScoringScheme& scheme);

/// Largest per-sequence length the 32-bit engine accepts for this scheme.
std::size_t max_sequence_length(const ScoringScheme& scheme);

// ---------------------------------------------------------------------------
// results

enum class EditOp : char { match = 'M', insertion = 'I', deletion = 'D' };

struct EditRun {
    EditOp op = EditOp::match;
    std::uint32_t len = 0;

    bool operator==(const EditRun&) const = default;
};

using EditOps = std::vector<EditRun>;

/// Appends a run, merging with the previous run when the op matches.
void append_run(EditOps& ops, EditOp op, std::uint32_t len = 1);

inline bool consumes_query(EditOp op) noexcept { return op != EditOp::deletion; }
inline bool consumes_subject(EditOp op) noexcept { return op != EditOp::insertion; }

struct AlignmentResult {
    Score score = 0;
    std::size_t q_start = 0;
    std::size_t q_end = 0;
    std::size_t s_start = 0;
    std::size_t s_end = 0;
    bool has_start = true;  // false for local/semi-global score-only runs
    EditOps ops;
    std::uint64_t cells_computed = 0;
};

/// Scores an edit script placed at (q_start, s_start) under the scheme.
/// Throws std::out_of_range if the ops run past either sequence.
Score rescore(std::span<const SymbolCode> query, std::span<const SymbolCode> subject,
              std::size_t q_start, std::size_t s_start, const EditOps& ops,
              const ScoringScheme& scheme);

Score rescore(const Sequence& query, const Sequence& subject, const AlignmentResult& result,
              const ScoringScheme& scheme);

std::size_t query_span(const EditOps& ops);
std::size_t subject_span(const EditOps& ops);

}  // namespace waveseq

#endif

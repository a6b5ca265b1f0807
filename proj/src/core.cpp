#include "waveseq/core.hpp"

#include <algorithm>
#include <cstdlib>

namespace waveseq {

namespace {

int code_of(char c) {
    switch (c) {
        case 'A': case 'a': return 0;
        case 'C': case 'c': return 1;
        case 'G': case 'g': return 2;
        case 'T': case 't': return 3;
        default: return -1;
    }
}

constexpr char kLetters[] = {'A', 'C', 'G', 'T'};

}  // namespace

Sequence encode_sequence(std::string_view id, std::string_view raw) {
    if (raw.empty()) throw EmptySequence("empty sequence '" + std::string(id) + "'");

    Sequence seq;
    seq.id_ = std::string(id);
    seq.len_ = raw.size();
    seq.packed_.assign((raw.size() + 3) / 4, 0);
    seq.flags_.assign((raw.size() + 63) / 64, 0);
    for (std::size_t i = 0; i < raw.size(); ++i) {
        int c = code_of(raw[i]);
        if (c < 0) {
            seq.flags_[i >> 6] |= std::uint64_t{1} << (i & 63);
            ++seq.flag_count_;
            c = 0;
        }
        seq.packed_[i >> 2] |= static_cast<std::uint8_t>(c << ((i & 3) * 2));
    }
    return seq;
}

std::vector<SymbolCode> Sequence::symbols() const {
    std::vector<SymbolCode> out(len_);
    for (std::size_t i = 0; i < len_; ++i) out[i] = flagged(i) ? kMaskedSymbol : code(i);
    return out;
}

std::string Sequence::decode() const {
    std::string out(len_, 'N');
    for (std::size_t i = 0; i < len_; ++i)
        if (!flagged(i)) out[i] = kLetters[code(i)];
    return out;
}

std::string_view to_string(GapModel g) { return g == GapModel::linear ? "linear" : "affine"; }

std::string_view to_string(AlignType t) {
    switch (t) {
        case AlignType::local: return "local";
        case AlignType::global: return "global";
        case AlignType::semiglobal: return "semiglobal";
    }
    return "?";
}

std::string_view to_string(ResultMode r) {
    return r == ResultMode::score_only ? "score_only" : "traceback";
}

GapModel parse_gap_model(std::string_view s) {
    if (s == "linear") return GapModel::linear;
    if (s == "affine") return GapModel::affine;
    throw std::invalid_argument("unknown gap model '" + std::string(s) + "'");
}

AlignType parse_align_type(std::string_view s) {
    if (s == "local") return AlignType::local;
    if (s == "global") return AlignType::global;
    if (s == "semiglobal" || s == "semi-global") return AlignType::semiglobal;
    throw std::invalid_argument("unknown alignment type '" + std::string(s) + "'");
}

Score ScoringScheme::max_term() const noexcept {
    return std::max({std::abs(match_score), std::abs(mismatch_score), gap_open, gap_extend});
}

ValidatedConfig validate_config(const AlignConfig& cfg, const ScoringScheme& scheme) {
    if (cfg.gap_model != scheme.gap_model)
        throw ConfigMismatch("config uses " + std::string(to_string(cfg.gap_model)) +
                             " gaps but scheme is " + std::string(to_string(scheme.gap_model)));
    if (scheme.gap_open < 0 || scheme.gap_extend < 0)
        throw std::invalid_argument("gap penalties must be non-negative");

    const Score expected = cfg.align_type == AlignType::local ? 0 : kNegInf;
    if (cfg.floor && *cfg.floor != expected)
        throw ConfigMismatch(std::string(to_string(cfg.align_type)) +
                             " alignment requires floor " + std::to_string(expected));

    ValidatedConfig out{cfg, {}};
    out.config.floor = expected;
    if (scheme.gap_model == GapModel::affine && scheme.gap_extend > scheme.gap_open)
        out.warnings.emplace_back("gap_extend exceeds gap_open; long gaps are penalized more "
                                  "than separate openings");
    return out;
}

std::size_t max_sequence_length(const ScoringScheme& scheme) {
    const auto term = static_cast<std::size_t>(std::max<Score>(1, scheme.max_term()));
    // Each sequence is bounded so that (m + n) * term plus the per-stage
    // column offsets stays under the headroom.
    const std::size_t base = static_cast<std::size_t>(kScoreHeadroom / 2) / term;
    return base > 8192 ? base - 4096 : base / 2;
}

void append_run(EditOps& ops, EditOp op, std::uint32_t len) {
    if (len == 0) return;
    if (!ops.empty() && ops.back().op == op)
        ops.back().len += len;
    else
        ops.push_back({op, len});
}

Score rescore(std::span<const SymbolCode> query, std::span<const SymbolCode> subject,
              std::size_t q_start, std::size_t s_start, const EditOps& ops,
              const ScoringScheme& scheme) {
    std::size_t i = q_start, j = s_start;
    Score score = 0;
    for (const auto& run : ops) {
        switch (run.op) {
            case EditOp::match:
                if (i + run.len > query.size() || j + run.len > subject.size())
                    throw std::out_of_range("edit ops run past the sequence end");
                for (std::uint32_t r = 0; r < run.len; ++r, ++i, ++j)
                    score += substitution_score(scheme, query[i], subject[j]);
                break;
            case EditOp::insertion:
                if (i + run.len > query.size()) throw std::out_of_range("insertion past query end");
                score -= scheme.gap_cost(run.len);
                i += run.len;
                break;
            case EditOp::deletion:
                if (j + run.len > subject.size()) throw std::out_of_range("deletion past subject end");
                score -= scheme.gap_cost(run.len);
                j += run.len;
                break;
        }
    }
    return score;
}

Score rescore(const Sequence& query, const Sequence& subject, const AlignmentResult& result,
              const ScoringScheme& scheme) {
    const auto q = query.symbols();
    const auto s = subject.symbols();
    return rescore(q, s, result.q_start, result.s_start, result.ops, scheme);
}

std::size_t query_span(const EditOps& ops) {
    std::size_t n = 0;
    for (const auto& r : ops)
        if (consumes_query(r.op)) n += r.len;
    return n;
}

std::size_t subject_span(const EditOps& ops) {
    std::size_t n = 0;
    for (const auto& r : ops)
        if (consumes_subject(r.op)) n += r.len;
    return n;
}

}  // namespace waveseq

#ifndef WAVESEQ_TESTS_SUPPORT_HPP
#define WAVESEQ_TESTS_SUPPORT_HPP

#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "waveseq/core.hpp"

namespace waveseq::testing {

inline std::vector<SymbolCode> codes(std::string_view raw) {
    return encode_sequence("x", raw).symbols();
}

inline std::string cigar(const EditOps& ops) {
    std::string out;
    for (const auto& r : ops) out += std::to_string(r.len) + static_cast<char>(r.op);
    return out;
}

inline std::vector<SymbolCode> random_codes(std::mt19937_64& rng, std::size_t len) {
    std::uniform_int_distribution<int> d(0, 3);
    std::vector<SymbolCode> out(len);
    for (auto& c : out) c = static_cast<SymbolCode>(d(rng));
    return out;
}

/// Copy of `src` with roughly `rate` of positions substituted or indel-ed.
inline std::vector<SymbolCode> mutate(std::mt19937_64& rng, const std::vector<SymbolCode>& src,
                                      double rate) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> d(0, 3);
    std::vector<SymbolCode> out;
    for (auto c : src) {
        const double r = u(rng);
        if (r < rate / 3) continue;
        if (r < 2 * rate / 3) out.push_back(static_cast<SymbolCode>(d(rng)));
        else out.push_back(c);
        if (u(rng) < rate / 3) out.push_back(static_cast<SymbolCode>(d(rng)));
    }
    if (out.empty()) out.push_back(0);
    return out;
}

struct Combo {
    AlignType type;
    GapModel gaps;
};

inline const Combo kAllCombos[] = {
    {AlignType::global, GapModel::linear},     {AlignType::global, GapModel::affine},
    {AlignType::local, GapModel::linear},      {AlignType::local, GapModel::affine},
    {AlignType::semiglobal, GapModel::linear}, {AlignType::semiglobal, GapModel::affine},
};

inline ScoringScheme scheme_for(GapModel g) {
    ScoringScheme s;
    s.match_score = 2;
    s.mismatch_score = -3;
    s.gap_model = g;
    s.gap_open = g == GapModel::affine ? 5 : 2;
    s.gap_extend = 2;
    return s;
}

inline AlignConfig config_for(const Combo& c) {
    AlignConfig cfg;
    cfg.align_type = c.type;
    cfg.gap_model = c.gaps;
    return cfg;
}

}  // namespace waveseq::testing

#endif

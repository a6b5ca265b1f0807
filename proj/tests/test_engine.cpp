#include <random>

#include "doctest.h"
#include "support.hpp"
#include "waveseq/engine.hpp"
#include "waveseq/refdp.hpp"

using namespace waveseq;
using namespace waveseq::testing;

namespace {

void expect_matches_ref(const std::vector<SymbolCode>& q, const std::vector<SymbolCode>& s,
                        const Combo& combo, const engine::EngineTuning& tuning) {
    const auto scheme = scheme_for(combo.gaps);
    const auto cfg = config_for(combo);
    const auto ref = refdp::ref_score(q, s, cfg, scheme);
    const auto got = engine::engine_score(q, s, cfg, scheme, tuning);
    INFO("type=" << to_string(combo.type) << " gaps=" << to_string(combo.gaps) << " p=" << tuning.lanes
                 << " k=" << tuning.cols_per_lane << " m=" << q.size() << " n=" << s.size());
    CHECK(got.score == ref.score);
    CHECK(got.q_end == ref.q_end);
    CHECK(got.s_end == ref.s_end);
    CHECK(got.cells_computed == q.size() * s.size());
}

}  // namespace

TEST_CASE("engine matches the reference on random pairs") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::size_t> len(1, 90);
    for (int rep = 0; rep < 25; ++rep) {
        const auto q = random_codes(rng, len(rng));
        const auto s = rep % 2 ? mutate(rng, q, 0.2) : random_codes(rng, len(rng));
        for (const auto& combo : kAllCombos)
            for (int p : {4, 8, 16, 32, 64})
                for (int k : {1, 3, 4})
                    expect_matches_ref(q, s, combo, {p, k});
    }
}

TEST_CASE("engine handles single-symbol and very unequal lengths") {
    std::mt19937_64 rng(5);
    for (const auto& combo : kAllCombos) {
        expect_matches_ref({2}, {2}, combo, {4, 1});
        expect_matches_ref({2}, {1}, combo, {8, 2});
        expect_matches_ref(random_codes(rng, 1), random_codes(rng, 200), combo, {4, 2});
        expect_matches_ref(random_codes(rng, 200), random_codes(rng, 3), combo, {16, 4});
    }
}

TEST_CASE("masked query symbols never match") {
    const std::vector<SymbolCode> q{0, kMaskedSymbol, 2};
    const std::vector<SymbolCode> s{0, 0, 2};
    for (const auto& combo : kAllCombos) expect_matches_ref(q, s, combo, {4, 1});
}

TEST_CASE("packed engine returns both alignments") {
    std::mt19937_64 rng(21);
    std::uniform_int_distribution<std::size_t> len(1, 120);
    for (int rep = 0; rep < 20; ++rep) {
        const auto qa = random_codes(rng, len(rng)), sa = mutate(rng, qa, 0.15);
        const auto qb = random_codes(rng, len(rng)), sb = random_codes(rng, len(rng));
        for (const auto& combo : kAllCombos) {
            const auto scheme = scheme_for(combo.gaps);
            const auto cfg = config_for(combo);
            const engine::EngineTuning tuning{8, 4, true};
            const auto [a, b] = engine::engine_score_packed({qa, sa}, {qb, sb}, cfg, scheme, tuning);
            const auto ra = refdp::ref_score(qa, sa, cfg, scheme);
            const auto rb = refdp::ref_score(qb, sb, cfg, scheme);
            CHECK(a.score == ra.score);
            CHECK(a.q_end == ra.q_end);
            CHECK(a.s_end == ra.s_end);
            CHECK(b.score == rb.score);
            CHECK(b.q_end == rb.q_end);
            CHECK(b.s_end == rb.s_end);
        }
    }
}

TEST_CASE("packed engine refuses pairs beyond the 16-bit range") {
    std::mt19937_64 rng(2);
    const auto q = random_codes(rng, 4000), s = random_codes(rng, 4000);
    const auto scheme = scheme_for(GapModel::linear);
    const engine::EngineTuning tuning{8, 4, true};
    CHECK_FALSE(engine::packed_range_ok({q, s}, {q, s}, scheme, tuning));
    CHECK_THROWS_AS(engine::engine_score_packed({q, s}, {q, s}, config_for(kAllCombos[0]), scheme, tuning),
                    PackedRangeOverflow);
}

TEST_CASE("stages chained by hand equal one engine pass") {
    std::mt19937_64 rng(8);
    const auto q = random_codes(rng, 37), s = random_codes(rng, 70);
    for (const auto& combo : kAllCombos) {
        const auto scheme = scheme_for(combo.gaps);
        const auto cfg = config_for(combo);
        const engine::EngineTuning tuning{4, 4};
        const auto dp = refdp::fill_matrices(q, s, cfg, scheme);
        auto boundary = engine::initial_boundary(q.size(), cfg, scheme);
        for (std::size_t st = 0; st < tuning.stage_count(s.size()); ++st) {
            const std::size_t j0 = st * 16;
            const std::size_t len = std::min<std::size_t>(16, s.size() - j0);
            const auto prof = engine::build_scoring_profile(std::span(s).subspan(j0, len), scheme, tuning);
            auto out = engine::wavefront_stage(q, prof, cfg, scheme, tuning, boundary, st);
            CHECK(out.iterations == q.size() + 4);
            REQUIRE(out.last_row.size() == len);
            for (std::size_t x = 0; x < len; ++x) CHECK(out.last_row[x] == dp.h(q.size(), j0 + x + 1));
            if (len == 16)
                for (std::size_t i = 0; i <= q.size(); ++i) {
                    CHECK(out.boundary.h[i] == dp.h(i, j0 + 16));
                    if (combo.gaps == GapModel::affine && i > 0) CHECK(out.boundary.f[i] == dp.f(i, j0 + 16));
                }
            boundary = std::move(out.boundary);
        }
    }
}

TEST_CASE("scoring profile rows") {
    const std::vector<SymbolCode> chunk{0, 1, 3};
    ScoringScheme scheme;
    const auto prof = engine::build_scoring_profile(chunk, scheme, {4, 1});
    CHECK(prof.width == 4);
    CHECK(prof.at(0, 0) == 2);
    CHECK(prof.at(0, 1) == -1);
    CHECK(prof.at(3, 2) == 2);
    CHECK(prof.at(kMaskedSymbol, 0) == -1);
    CHECK(prof.at(1, 3) == -1);
    CHECK_THROWS_AS(engine::build_scoring_profile(std::vector<SymbolCode>(5, 0), scheme, {4, 1}),
                    ChunkOverflow);
}

TEST_CASE("tuning validation") {
    CHECK_THROWS_AS(engine::validate_tuning({3, 1}), std::invalid_argument);
    CHECK_THROWS_AS(engine::validate_tuning({128, 1}), std::invalid_argument);
    CHECK_THROWS_AS(engine::validate_tuning({8, 0}), std::invalid_argument);
    CHECK_THROWS_AS(engine::validate_tuning({8, 17}), std::invalid_argument);
    CHECK_NOTHROW(engine::validate_tuning({64, 16}));
}

TEST_CASE("lane shifts") {
    std::array<int, 4> v{1, 2, 3, 4};
    engine::lane_shift_up<int>(std::span<int>(v), 9);
    CHECK(v == std::array<int, 4>{9, 1, 2, 3});
    engine::lane_shift_down<int>(std::span<int>(v), 7);
    CHECK(v == std::array<int, 4>{1, 2, 3, 7});
}

#include <random>

#include "doctest.h"
#include "support.hpp"
#include "waveseq/memory.hpp"
#include "waveseq/refdp.hpp"
#include "waveseq/traceback.hpp"

using namespace waveseq;
using namespace waveseq::testing;
using traceback::TracebackOptions;

TEST_CASE("explicit traceback on small examples") {
    const ScoringScheme scheme;
    AlignConfig cfg;
    auto r = traceback::explicit_traceback(codes("ACGT"), codes("ACGT"), cfg, scheme);
    CHECK(cigar(r.ops) == "4M");
    CHECK(r.score == 8);
    r = traceback::explicit_traceback(codes("ACGT"), codes("AGT"), cfg, scheme);
    CHECK(cigar(r.ops) == "1M1I2M");
    CHECK(r.score == 5);
}

TEST_CASE("explicit traceback stops at the threshold") {
    const ScoringScheme scheme;
    const AlignConfig cfg;
    const std::vector<SymbolCode> q(64, 0), s(65, 0), s2(64, 0);
    CHECK_THROWS_AS(traceback::explicit_traceback(q, s, cfg, scheme), UseHirschberg);
    CHECK_NOTHROW(traceback::explicit_traceback(q, s2, cfg, scheme));
}

TEST_CASE("explicit traceback reproduces the reference path") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<std::size_t> len(1, 60);
    for (int rep = 0; rep < 60; ++rep) {
        const auto q = random_codes(rng, len(rng));
        const auto s = rep % 3 ? mutate(rng, q, 0.25) : random_codes(rng, len(rng));
        for (const auto& combo : kAllCombos) {
            const auto scheme = scheme_for(combo.gaps);
            const auto cfg = config_for(combo);
            const auto ref = refdp::ref_traceback(q, s, cfg, scheme);
            const auto got = traceback::explicit_traceback(q, s, cfg, scheme);
            CHECK(got.score == ref.score);
            CHECK(got.ops == ref.ops);
            CHECK(got.q_start == ref.q_start);
            CHECK(got.s_start == ref.s_start);
            CHECK(got.q_end == ref.q_end);
            CHECK(got.s_end == ref.s_end);
        }
    }
}

TEST_CASE("hirschberg alignments re-score to the optimum") {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<std::size_t> len(1, 200);
    for (int rep = 0; rep < 40; ++rep) {
        const auto q = random_codes(rng, len(rng));
        const auto s = rep % 2 ? mutate(rng, q, 0.2) : random_codes(rng, len(rng));
        for (const auto& combo : kAllCombos) {
            const auto scheme = scheme_for(combo.gaps);
            const auto cfg = config_for(combo);
            const auto ref = refdp::ref_score(q, s, cfg, scheme);
            for (std::size_t threshold : {std::size_t{2}, std::size_t{8}, std::size_t{128}}) {
                TracebackOptions opts;
                opts.tuning = {8, 2};
                opts.explicit_threshold = threshold;
                const auto r = traceback::hirschberg(q, s, cfg, scheme, opts);
                INFO("type=" << to_string(combo.type) << " gaps=" << to_string(combo.gaps)
                             << " T=" << threshold << " m=" << q.size() << " n=" << s.size());
                CHECK(r.score == ref.score);
                CHECK(r.q_end - r.q_start == query_span(r.ops));
                CHECK(r.s_end - r.s_start == subject_span(r.ops));
                CHECK(rescore(q, s, r.q_start, r.s_start, r.ops, scheme) == ref.score);
            }
        }
    }
}

TEST_CASE("affine gap across the midline is charged one opening") {
    ScoringScheme scheme;
    scheme.gap_model = GapModel::affine;
    scheme.gap_open = 4;
    scheme.gap_extend = 1;
    AlignConfig cfg;
    cfg.gap_model = GapModel::affine;
    for (std::size_t qa : {40, 41, 57}) {
        const std::vector<SymbolCode> q(qa, 0), s(20, 0);
        const auto ref = refdp::ref_score(q, s, cfg, scheme);
        for (std::size_t threshold : {std::size_t{2}, std::size_t{8}}) {
            TracebackOptions opts;
            opts.explicit_threshold = threshold;
            opts.tuning = {4, 1};
            const auto r = traceback::hirschberg(q, s, cfg, scheme, opts);
            CHECK(r.score == ref.score);
            CHECK(rescore(q, s, 0, 0, r.ops, scheme) == ref.score);
        }
    }
}

TEST_CASE("endpoint location") {
    const ScoringScheme scheme;
    AlignConfig local;
    local.align_type = AlignType::local;
    auto ep = traceback::locate_endpoints(codes("TTACGTT"), codes("ACG"), local, scheme, {});
    CHECK(ep.score == 6);
    CHECK(ep.q_start == 2);
    CHECK(ep.s_start == 0);
    CHECK(ep.q_end == 5);
    CHECK(ep.s_end == 3);

    AlignConfig semi;
    semi.align_type = AlignType::semiglobal;
    ep = traceback::locate_endpoints(codes("ACG"), codes("TTACGTT"), semi, scheme, {});
    CHECK(ep.score == 6);
    CHECK(ep.q_start == 0);
    CHECK(ep.q_end == 3);
    CHECK(ep.s_start == 2);
    CHECK(ep.s_end == 5);

    CHECK_THROWS_AS(traceback::locate_endpoints(codes("AAAA"), codes("CCC"), local, scheme, {}),
                    traceback::EmptyAlignment);
}

TEST_CASE("empty local alignment through the driver") {
    const ScoringScheme scheme;
    AlignConfig local;
    local.align_type = AlignType::local;
    local.result_mode = ResultMode::traceback;
    TracebackOptions opts;
    opts.explicit_threshold = 2;
    const auto r = traceback::align(codes("AAAA"), codes("CCC"), local, scheme, opts);
    CHECK(r.score == 0);
    CHECK(r.ops.empty());
    CHECK(r.q_start == r.q_end);
    CHECK(r.s_start == r.s_end);
}

TEST_CASE("long identical pair aligns as one match run") {
    std::vector<SymbolCode> q;
    for (int i = 0; i < 500; ++i)
        for (SymbolCode c : {0, 1, 2, 3}) q.push_back(c);
    const ScoringScheme scheme;
    AlignConfig cfg;
    cfg.result_mode = ResultMode::traceback;
    const auto r = traceback::align(q, q, cfg, scheme);
    CHECK(r.score == 4000);
    CHECK(cigar(r.ops) == "2000M");
    CHECK(r.cells_computed <= 2ull * 2000 * 2000 + 2000ull * 128);
}

TEST_CASE("hirschberg memory stays linear, explicit grows quadratically") {
    std::mt19937_64 rng(9);
    const auto scheme = scheme_for(GapModel::affine);
    AlignConfig cfg;
    cfg.gap_model = GapModel::affine;
    auto peak_for = [&](std::size_t n, std::size_t threshold) {
        const auto q = random_codes(rng, n), s = mutate(rng, q, 0.1);
        TracebackOptions opts;
        opts.explicit_threshold = threshold;
        reset_aux_peak();
        const auto before = aux_memory().current;
        if (threshold >= q.size() + s.size()) traceback::explicit_traceback(q, s, cfg, scheme, threshold);
        else traceback::hirschberg(q, s, cfg, scheme, opts);
        return aux_memory().peak - before;
    };
    const double h1 = static_cast<double>(peak_for(500, 128));
    const double h2 = static_cast<double>(peak_for(1000, 128));
    CHECK(h2 / h1 < 2.5);
    const double e1 = static_cast<double>(peak_for(250, 100000));
    const double e2 = static_cast<double>(peak_for(1000, 100000));
    CHECK(e2 / e1 > 10.0);
}

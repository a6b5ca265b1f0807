#include <random>

#include "doctest.h"
#include "support.hpp"
#include "waveseq/batch.hpp"
#include "waveseq/bench.hpp"
#include "waveseq/io.hpp"
#include "waveseq/refdp.hpp"

using namespace waveseq;
using namespace waveseq::testing;

namespace {

std::vector<Sequence> reads(std::size_t count, std::size_t len, std::uint64_t seed) {
    const auto genome = io::random_genome("g", 4 * len + 100, seed);
    io::SimSpec spec;
    spec.count = count;
    spec.read_len = len;
    spec.sub_rate = 0.05;
    spec.ins_rate = 0.02;
    spec.del_rate = 0.02;
    spec.seed = seed + 1;
    return io::simulate_reads(genome, spec);
}

bool same(const AlignmentResult& a, const AlignmentResult& b) {
    return a.score == b.score && a.q_start == b.q_start && a.q_end == b.q_end && a.s_start == b.s_start &&
           a.s_end == b.s_end && a.has_start == b.has_start && a.ops == b.ops;
}

}  // namespace

TEST_CASE("all_pairs") {
    const auto p = batch::all_pairs(2, 2);
    CHECK(p == std::vector<batch::PairIndex>{{0, 0}, {0, 1}, {1, 0}, {1, 1}});
    CHECK(batch::all_pairs(1, 7).size() == 7);
    CHECK(batch::all_pairs(3536, 3536).size() == 12'503'296);
}

TEST_CASE("length buckets") {
    CHECK(batch::length_bucket(1, 1) == 0);
    CHECK(batch::length_bucket(2, 1) == 1);
    CHECK(batch::length_bucket(100, 128) == 7);
    CHECK(batch::length_bucket(129, 3) == 8);
}

TEST_CASE("batch results match the reference for every pair") {
    const auto rs = reads(16, 60, 5);
    for (const auto& combo : kAllCombos) {
        batch::BatchJob job;
        job.queries = rs;
        job.subjects = rs;
        job.pairs = batch::all_pairs(rs, rs);
        job.cfg = config_for(combo);
        job.scheme = scheme_for(combo.gaps);
        job.workers = 4;
        const auto rep = batch::run_batch(job);
        REQUIRE(rep.results.size() == 256);
        for (std::size_t i = 0; i < job.pairs.size(); ++i) {
            const auto ref = refdp::ref_score(rs[job.pairs[i].query], rs[job.pairs[i].subject], job.cfg, job.scheme);
            CHECK(rep.results[i].score == ref.score);
            CHECK(rep.results[i].q_end == ref.q_end);
            CHECK(rep.results[i].s_end == ref.s_end);
        }
        std::uint64_t cells = 0;
        for (const auto& p : job.pairs) cells += rs[p.query].size() * rs[p.subject].size();
        CHECK(rep.total_cells == cells);
    }
}

TEST_CASE("worker count and packing do not change results") {
    std::vector<Sequence> rs = reads(12, 40, 8);
    const auto longer = reads(6, 150, 9);
    rs.insert(rs.end(), longer.begin(), longer.end());
    for (const auto mode : {ResultMode::score_only, ResultMode::traceback}) {
        batch::BatchJob job;
        job.queries = rs;
        job.subjects = rs;
        job.pairs = batch::all_pairs(rs, rs);
        job.cfg = config_for({AlignType::local, GapModel::affine});
        job.cfg.result_mode = mode;
        job.scheme = scheme_for(GapModel::affine);
        job.workers = 1;
        const auto one = batch::run_batch(job);
        job.workers = 8;
        const auto eight = batch::run_batch(job);
        job.packed = true;
        const auto packed = batch::run_batch(job);
        if (mode == ResultMode::score_only) CHECK(packed.packed_pairs > 0);
        for (std::size_t i = 0; i < job.pairs.size(); ++i) {
            CHECK(same(one.results[i], eight.results[i]));
            CHECK(same(one.results[i], packed.results[i]));
        }
    }
}

TEST_CASE("batch errors") {
    const auto rs = reads(2, 20, 1);
    batch::BatchJob job;
    job.queries = rs;
    job.subjects = rs;
    CHECK_THROWS_AS(batch::run_batch(job), std::invalid_argument);
    job.pairs = {{0, 0}, {0, 5}};
    try {
        batch::run_batch(job);
        FAIL("expected BatchError");
    } catch (const batch::BatchError& e) {
        CHECK(e.pair_index() == 1);
    }
}

TEST_CASE("theoretical peak of known GPU configurations") {
    CHECK(bench::theoretical_peak({5120, 1.91, 7}) / 1000 == doctest::Approx(1.40).epsilon(0.005));
    CHECK(bench::theoretical_peak({10496, 1.70, 7}) / 1000 == doctest::Approx(2.55).epsilon(0.005));
    CHECK(bench::theoretical_peak({6912, 1.41, 3.5}) / 1000 == doctest::Approx(2.78).epsilon(0.005));
    CHECK(bench::theoretical_peak({7680, 1.50, 3.5}) / 1000 == doctest::Approx(3.29).epsilon(0.005));
    CHECK_THROWS(bench::theoretical_peak({0, 1.0, 7}));
}

TEST_CASE("median rule") {
    CHECK(bench::median({5}) == 5);
    CHECK(bench::median({3, 3}) == 3);
    CHECK(bench::median({10, 1, 9, 2, 8, 3, 7, 4, 6, 5}) == doctest::Approx(5.5));
    CHECK(bench::median({3, 1, 2}) == 2);
}

TEST_CASE("benchmark report") {
    const auto rs = reads(8, 64, 2);
    batch::BatchJob job;
    job.queries = rs;
    job.subjects = rs;
    job.pairs = batch::all_pairs(rs, rs);
    const auto rep = bench::measure_gcups(job, 3, bench::HardwareModel{8, 3.0, 7});
    CHECK(rep.run_gcups.size() == 3);
    std::uint64_t cells = 0;
    for (const auto& p : job.pairs) cells += rs[p.query].size() * rs[p.subject].size();
    CHECK(rep.cells == cells);
    REQUIRE(rep.tpp_gcups);
    CHECK(*rep.efficiency == doctest::Approx(rep.achieved_gcups / *rep.tpp_gcups));
    const auto json = bench::to_json(rep);
    for (const char* key : {"\"achieved_gcups\"", "\"tpp_gcups\"", "\"efficiency\"", "\"cells\"", "\"wall_s\""})
        CHECK(json.find(key) != std::string::npos);
    CHECK_THROWS(bench::measure_gcups(job, 0));
}

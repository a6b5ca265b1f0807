// waveseq command line: align, bench, simulate, selftest.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "waveseq/batch.hpp"
#include "waveseq/bench.hpp"
#include "waveseq/engine.hpp"
#include "waveseq/io.hpp"
#include "waveseq/refdp.hpp"
#include "waveseq/traceback.hpp"

using namespace waveseq;

namespace {

struct WorkloadArgs {
    std::string queries;
    std::string subjects;
    std::string pairs_file;
    bool all_pairs = false;
    std::string type = "global";
    std::string gaps = "linear";
    int match = 2;
    int mismatch = -1;
    int gap_open = 1;
    int gap_extend = 1;
    bool traceback = false;
    std::optional<int> lanes;
    std::optional<int> cols_per_lane;
    bool packed = false;
    std::optional<std::size_t> workers;
    std::size_t explicit_threshold = traceback::kDefaultExplicitThreshold;
    std::string out = "-";
};

void add_workload_options(CLI::App* cmd, WorkloadArgs& a, bool subjects_required) {
    cmd->add_option("--queries", a.queries, "query FASTA")->required()->check(CLI::ExistingFile);
    auto* subj = cmd->add_option("--subjects", a.subjects, "subject FASTA")->check(CLI::ExistingFile);
    if (subjects_required) subj->required();
    auto* pairs = cmd->add_option("--pairs", a.pairs_file, "file of 'query_id subject_id' lines")
                      ->check(CLI::ExistingFile);
    auto* all = cmd->add_flag("--all-pairs", a.all_pairs, "align every query against every subject");
    pairs->excludes(all);
    all->excludes(pairs);
    cmd->add_option("--type", a.type, "alignment type")
        ->check(CLI::IsMember({"global", "local", "semiglobal"}));
    cmd->add_option("--gaps", a.gaps, "gap model")->check(CLI::IsMember({"linear", "affine"}));
    cmd->add_option("--match", a.match, "match score");
    cmd->add_option("--mismatch", a.mismatch, "mismatch score");
    cmd->add_option("--gap-open", a.gap_open, "cost of the first gap symbol")->check(CLI::NonNegativeNumber);
    cmd->add_option("--gap-extend", a.gap_extend, "cost of each further gap symbol (affine)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_flag("--traceback", a.traceback, "compute full alignments (CIGAR)");
    cmd->add_option("--lanes", a.lanes, "lanes per group (p)")->check(CLI::IsMember({4, 8, 16, 32, 64}));
    cmd->add_option("--cols-per-lane", a.cols_per_lane, "columns per lane (k)")->check(CLI::Range(1, 16));
    cmd->add_flag("--packed", a.packed, "two score-only alignments per lane (16-bit)");
    cmd->add_option("--workers", a.workers, "worker threads (default: WAVESEQ_WORKERS or all cores)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--explicit-threshold", a.explicit_threshold,
                    "largest m+n traced back with a full predecessor matrix")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--out", a.out, "output path, '-' for stdout");
}

struct Workload {
    std::vector<Sequence> queries;
    std::vector<Sequence> subjects;
    batch::BatchJob job;
};

std::vector<batch::PairIndex> read_pairs_file(const std::string& path, const std::vector<Sequence>& queries,
                                             const std::vector<Sequence>& subjects) {
    std::map<std::string, std::size_t> qi, si;
    for (std::size_t i = 0; i < queries.size(); ++i) qi.emplace(queries[i].id(), i);
    for (std::size_t i = 0; i < subjects.size(); ++i) si.emplace(subjects[i].id(), i);
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    std::vector<batch::PairIndex> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string q, s;
        if (!(ls >> q)) continue;
        if (!(ls >> s)) throw io::ParseError(line_no, "expected 'query_id subject_id'");
        const auto a = qi.find(q);
        const auto b = si.find(s);
        if (a == qi.end()) throw io::ParseError(line_no, "unknown query id '" + q + "'");
        if (b == si.end()) throw io::ParseError(line_no, "unknown subject id '" + s + "'");
        out.push_back({a->second, b->second});
    }
    return out;
}

// The Workload must not move after this: the job keeps spans into it.
void build_workload(const WorkloadArgs& a, Workload& w) {
    w.queries = io::read_fasta(a.queries);
    w.subjects = a.subjects.empty() ? w.queries : io::read_fasta(a.subjects);
    if (w.queries.empty()) throw Error("no records in '" + a.queries + "'");
    if (w.subjects.empty()) throw Error("no records in '" + a.subjects + "'");

    auto& job = w.job;
    job.queries = w.queries;
    job.subjects = w.subjects;
    job.pairs = a.pairs_file.empty() ? batch::all_pairs(w.queries, w.subjects)
                                     : read_pairs_file(a.pairs_file, w.queries, w.subjects);

    job.scheme.match_score = a.match;
    job.scheme.mismatch_score = a.mismatch;
    job.scheme.gap_open = a.gap_open;
    job.scheme.gap_extend = a.gap_extend;
    job.scheme.gap_model = parse_gap_model(a.gaps);
    AlignConfig cfg;
    cfg.align_type = parse_align_type(a.type);
    cfg.gap_model = job.scheme.gap_model;
    cfg.result_mode = a.traceback ? ResultMode::traceback : ResultMode::score_only;
    const auto validated = validate_config(cfg, job.scheme);
    for (const auto& warning : validated.warnings) std::cerr << "warning: " << warning << '\n';
    job.cfg = validated.config;

    if (a.lanes || a.cols_per_lane) {
        std::size_t max_len = 1;
        for (const auto& s : w.queries) max_len = std::max(max_len, s.size());
        for (const auto& s : w.subjects) max_len = std::max(max_len, s.size());
        auto t = engine::auto_tuning(max_len);
        if (a.lanes) t.lanes = *a.lanes;
        if (a.cols_per_lane) t.cols_per_lane = *a.cols_per_lane;
        job.tuning = t;
    }
    job.packed = a.packed;
    job.workers = a.workers ? *a.workers : batch::workers_from_env(std::max(1u, std::thread::hardware_concurrency()));
    job.explicit_threshold = a.explicit_threshold;
}

template <class Fn>
void with_output(const std::string& path, Fn&& fn) {
    if (path == "-") {
        fn(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    fn(out);
    if (!out) throw Error("write to '" + path + "' failed");
}

int cmd_align(const WorkloadArgs& a) {
    Workload w;
    build_workload(a, w);
    const auto report = batch::run_batch(w.job);
    std::vector<io::ResultRow> rows;
    rows.reserve(report.results.size());
    for (std::size_t i = 0; i < w.job.pairs.size(); ++i) {
        const auto& p = w.job.pairs[i];
        rows.push_back({w.queries[p.query].id(), w.subjects[p.subject].id(), &report.results[i]});
    }
    with_output(a.out, [&](std::ostream& out) { io::write_results_tsv(out, rows); });
    std::cerr << report.results.size() << " alignments, " << report.total_cells << " cells, "
              << report.gcups << " GCUPS\n";
    return 0;
}

struct BenchArgs {
    std::size_t reps = 10;
    std::optional<double> cores;
    std::optional<double> clock;
    std::optional<double> cycles;
};

int cmd_bench(const WorkloadArgs& a, const BenchArgs& b) {
    Workload w;
    build_workload(a, w);
    std::optional<bench::HardwareModel> hw;
    if (b.cores && b.clock) hw = bench::HardwareModel{*b.cores, *b.clock, b.cycles.value_or(7.0)};
    const auto report = bench::measure_gcups(w.job, b.reps, hw);
    with_output(a.out, [&](std::ostream& out) { out << bench::to_json(report) << '\n'; });
    return 0;
}

struct SimArgs {
    std::string genome;
    std::size_t genome_length = 100000;
    io::SimSpec spec{100, 512, 0.0, 0.0, 0.0, 1};
    std::string out = "-";
};

int cmd_simulate(const SimArgs& a) {
    Sequence genome;
    if (!a.genome.empty()) {
        auto recs = io::read_fasta(a.genome);
        if (recs.empty()) throw Error("no records in '" + a.genome + "'");
        genome = std::move(recs.front());
    } else {
        genome = io::random_genome("genome", a.genome_length, a.spec.seed ^ 0x9e3779b97f4a7c15ull);
    }
    io::SimStats stats;
    const auto reads = io::simulate_reads(genome, a.spec, &stats);
    with_output(a.out, [&](std::ostream& out) { io::write_fasta(out, reads); });
    std::cerr << reads.size() << " reads; substitutions " << stats.substitutions << ", insertions "
              << stats.insertions << ", deletions " << stats.deletions << " over " << stats.source_symbols
              << " source symbols\n";
    return 0;
}

struct SelftestArgs {
    std::uint64_t seed = 1;
    std::size_t cases = 200;
    std::size_t max_len = 120;
    bool inject_fault = false;
};

std::string decode_codes(const std::vector<SymbolCode>& v) {
    std::string s;
    for (auto c : v) s += "ACGTN"[c];
    return s;
}

// Randomized comparison of the engine and the traceback paths against the
// reference DP over every alignment type, gap model and a spread of tunings.
int cmd_selftest(const SelftestArgs& a) {
    static constexpr AlignType kTypes[] = {AlignType::global, AlignType::local, AlignType::semiglobal};
    static constexpr GapModel kGaps[] = {GapModel::linear, GapModel::affine};
    static constexpr int kLanes[] = {4, 8, 16, 32, 64};

    std::mt19937_64 rng(a.seed);
    std::uniform_int_distribution<std::size_t> len(1, a.max_len);
    std::uniform_int_distribution<int> base(0, 3), lane(0, 4), cols(1, 16), score(1, 4);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::size_t ok = 0;
    for (std::size_t c = 0; c < a.cases; ++c) {
        std::vector<SymbolCode> q(len(rng)), s;
        for (auto& x : q) x = static_cast<SymbolCode>(base(rng));
        if (unit(rng) < 0.5) {
            for (auto x : q) {
                const double u = unit(rng);
                if (u < 0.05) continue;
                s.push_back(u < 0.15 ? static_cast<SymbolCode>(base(rng)) : x);
                if (unit(rng) < 0.05) s.push_back(static_cast<SymbolCode>(base(rng)));
            }
            if (s.empty()) s.push_back(0);
        } else {
            s.resize(len(rng));
            for (auto& x : s) x = static_cast<SymbolCode>(base(rng));
        }

        ScoringScheme scheme;
        scheme.match_score = score(rng);
        scheme.mismatch_score = -score(rng);
        scheme.gap_model = kGaps[c % 2];
        scheme.gap_extend = score(rng);
        scheme.gap_open = scheme.gap_extend + (scheme.gap_model == GapModel::affine ? score(rng) : 0);
        AlignConfig cfg;
        cfg.align_type = kTypes[(c / 2) % 3];
        cfg.gap_model = scheme.gap_model;
        const engine::EngineTuning tuning{kLanes[lane(rng)], cols(rng)};

        const auto ref = refdp::ref_score(q, s, cfg, scheme);
        auto got = engine::engine_score(q, s, cfg, scheme, tuning);
        if (a.inject_fault && c == 0) got.score += 1;
        traceback::TracebackOptions opts;
        opts.tuning = tuning;
        opts.explicit_threshold = 16;
        const auto hb = traceback::hirschberg(q, s, cfg, scheme, opts);
        const Score hb_rescored = rescore(q, s, hb.q_start, hb.s_start, hb.ops, scheme);

        const bool pass = got.score == ref.score && got.q_end == ref.q_end && got.s_end == ref.s_end &&
                          hb.score == ref.score && hb_rescored == ref.score;
        if (!pass) {
            nlohmann::ordered_json blob;
            blob["case"] = c;
            blob["seed"] = a.seed;
            blob["align_type"] = to_string(cfg.align_type);
            blob["gap_model"] = to_string(scheme.gap_model);
            blob["scheme"] = {{"match", scheme.match_score}, {"mismatch", scheme.mismatch_score},
                              {"gap_open", scheme.gap_open}, {"gap_extend", scheme.gap_extend}};
            blob["tuning"] = {{"lanes", tuning.lanes}, {"cols_per_lane", tuning.cols_per_lane}};
            blob["query"] = decode_codes(q);
            blob["subject"] = decode_codes(s);
            blob["expected"] = {{"score", ref.score}, {"q_end", ref.q_end}, {"s_end", ref.s_end}};
            blob["engine"] = {{"score", got.score}, {"q_end", got.q_end}, {"s_end", got.s_end}};
            blob["traceback"] = {{"score", hb.score}, {"rescored", hb_rescored}};
            std::cout << ok << "/" << a.cases << " ok before failure\n";
            std::cerr << "mismatch: " << blob.dump() << '\n';
            return 1;
        }
        ++ok;
    }
    std::cout << ok << "/" << a.cases << " ok\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"waveseq: batched pairwise DNA alignment"};
    app.require_subcommand(1);

    WorkloadArgs align_args;
    auto* align = app.add_subcommand("align", "align FASTA records and write a TSV");
    add_workload_options(align, align_args, true);

    WorkloadArgs bench_args;
    BenchArgs bench_opts;
    auto* bench_cmd = app.add_subcommand("bench", "measure GCUPS and efficiency");
    add_workload_options(bench_cmd, bench_args, false);
    bench_cmd->add_option("--reps", bench_opts.reps, "repetitions (median reported)")->check(CLI::Range(1, 1000000));
    auto* cores = bench_cmd->add_option("--cores", bench_opts.cores, "ALU lanes for the peak model")
                      ->check(CLI::PositiveNumber);
    auto* clock = bench_cmd->add_option("--clock", bench_opts.clock, "clock in GHz")->check(CLI::PositiveNumber);
    auto* cycles = bench_cmd->add_option("--cycles", bench_opts.cycles, "cycles per cell update (default 7)")
                       ->check(CLI::PositiveNumber);
    cores->needs(clock);
    clock->needs(cores);
    cycles->needs(cores);

    SimArgs sim_args;
    auto* sim = app.add_subcommand("simulate", "simulate reads as FASTA");
    sim->add_option("--genome", sim_args.genome, "source genome FASTA (first record)")->check(CLI::ExistingFile);
    sim->add_option("--genome-length", sim_args.genome_length, "random genome length when --genome is absent")
        ->check(CLI::PositiveNumber);
    sim->add_option("--count", sim_args.spec.count, "number of reads");
    sim->add_option("--read-len", sim_args.spec.read_len, "read length")->check(CLI::PositiveNumber);
    sim->add_option("--sub-rate", sim_args.spec.sub_rate, "substitution probability")->check(CLI::Range(0.0, 1.0));
    sim->add_option("--ins-rate", sim_args.spec.ins_rate, "insertion probability")->check(CLI::Range(0.0, 1.0));
    sim->add_option("--del-rate", sim_args.spec.del_rate, "deletion probability")->check(CLI::Range(0.0, 1.0));
    sim->add_option("--seed", sim_args.spec.seed, "random seed");
    sim->add_option("--out", sim_args.out, "output path, '-' for stdout");

    SelftestArgs self_args;
    auto* self = app.add_subcommand("selftest", "randomized comparison against the reference DP");
    self->add_option("--seed", self_args.seed, "random seed");
    self->add_option("--cases", self_args.cases, "number of cases")->check(CLI::Range(1, 100000000));
    self->add_option("--max-len", self_args.max_len, "longest generated sequence")->check(CLI::Range(1, 5000));
    self->add_flag("--inject-fault", self_args.inject_fault, "corrupt one result to exercise the failure path")
        ->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    for (auto [cmd, args] : {std::pair{align, &align_args}, std::pair{bench_cmd, &bench_args}}) {
        if (*cmd && !args->all_pairs && args->pairs_file.empty()) {
            std::cerr << cmd->get_name() << ": one of --pairs or --all-pairs is required\n";
            return 2;
        }
    }

    try {
        if (*align) return cmd_align(align_args);
        if (*bench_cmd) return cmd_bench(bench_args, bench_opts);
        if (*sim) return cmd_simulate(sim_args);
        if (*self) return cmd_selftest(self_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

#include "waveseq/batch.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cstdlib>
#include <deque>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>

namespace waveseq::batch {

namespace {

constexpr std::size_t kChunkPairs = 64;

// One unit of work: a single pair, or two pairs sharing packed lanes.
struct Task {
    std::size_t first = 0;
    std::size_t second = 0;
    bool dual = false;
};

struct Chunk {
    std::size_t begin = 0;
    std::size_t end = 0;  // range in the task list
};

class StealQueues {
public:
    explicit StealQueues(std::size_t workers) : queues_(workers), locks_(workers) {}

    void push(std::size_t w, Chunk c) { queues_[w].push_back(c); }

    /// Own queue from the front, then other queues from the back.
    bool pop(std::size_t w, Chunk& out) {
        {
            std::lock_guard lock(locks_[w]);
            if (!queues_[w].empty()) {
                out = queues_[w].front();
                queues_[w].pop_front();
                return true;
            }
        }
        for (std::size_t d = 1; d < queues_.size(); ++d) {
            const std::size_t v = (w + d) % queues_.size();
            std::lock_guard lock(locks_[v]);
            if (!queues_[v].empty()) {
                out = queues_[v].back();
                queues_[v].pop_back();
                return true;
            }
        }
        return false;
    }

private:
    std::vector<std::deque<Chunk>> queues_;
    std::vector<std::mutex> locks_;
};

AlignmentResult from_engine(const engine::EngineScore& e, const AlignConfig& cfg) {
    AlignmentResult r;
    r.score = e.score;
    r.q_end = e.q_end;
    r.s_end = e.s_end;
    r.has_start = cfg.align_type == AlignType::global;
    r.cells_computed = e.cells_computed;
    return r;
}

void validate_job(const BatchJob& job) {
    if (job.pairs.empty()) throw std::invalid_argument("batch has no pairs");
    for (std::size_t i = 0; i < job.pairs.size(); ++i) {
        const auto& p = job.pairs[i];
        if (p.query >= job.queries.size() || p.subject >= job.subjects.size())
            throw BatchError(i, "pair index out of range");
    }
    if (job.cfg.gap_model != job.scheme.gap_model)
        throw ConfigMismatch("gap model differs between config and scheme");
    if (job.tuning) engine::validate_tuning(*job.tuning);
}

}  // namespace

BatchError::BatchError(std::size_t pair_index, const std::string& what)
    : Error("pair " + std::to_string(pair_index) + ": " + what), index_(pair_index) {}

std::vector<PairIndex> all_pairs(std::size_t query_count, std::size_t subject_count) {
    std::vector<PairIndex> out;
    out.reserve(query_count * subject_count);
    for (std::size_t q = 0; q < query_count; ++q)
        for (std::size_t s = 0; s < subject_count; ++s) out.push_back({q, s});
    return out;
}

std::vector<PairIndex> all_pairs(std::span<const Sequence> queries, std::span<const Sequence> subjects) {
    return all_pairs(queries.size(), subjects.size());
}

unsigned length_bucket(std::size_t m, std::size_t n) noexcept {
    const std::size_t len = std::max<std::size_t>({m, n, 1});
    return static_cast<unsigned>(std::bit_width(len - 1));
}

std::size_t workers_from_env(std::size_t fallback) {
    if (const char* v = std::getenv("WAVESEQ_WORKERS")) {
        char* end = nullptr;
        const long n = std::strtol(v, &end, 10);
        if (end != v && *end == '\0' && n > 0) return static_cast<std::size_t>(n);
    }
    return fallback;
}

BatchReport run_batch(const BatchJob& job) {
    validate_job(job);
    const auto t0 = std::chrono::steady_clock::now();

    // Decode every sequence once; workers share them read-only.
    std::vector<std::vector<SymbolCode>> q_codes(job.queries.size()), s_codes(job.subjects.size());
    for (std::size_t i = 0; i < job.queries.size(); ++i) q_codes[i] = job.queries[i].symbols();
    for (std::size_t i = 0; i < job.subjects.size(); ++i) s_codes[i] = job.subjects[i].symbols();

    std::size_t max_len = 1;
    for (const auto& p : job.pairs)
        max_len = std::max({max_len, q_codes[p.query].size(), s_codes[p.subject].size()});
    engine::EngineTuning tuning = job.tuning.value_or(engine::auto_tuning(max_len));

    const std::size_t n_pairs = job.pairs.size();
    std::vector<unsigned> bucket(n_pairs);
    for (std::size_t i = 0; i < n_pairs; ++i)
        bucket[i] = length_bucket(q_codes[job.pairs[i].query].size(), s_codes[job.pairs[i].subject].size());
    std::vector<std::size_t> order(n_pairs);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return bucket[a] < bucket[b]; });

    const bool packed = job.packed && job.cfg.result_mode == ResultMode::score_only;
    std::vector<Task> tasks;
    tasks.reserve(n_pairs);
    for (std::size_t i = 0; i < n_pairs; ++i) {
        if (packed && i + 1 < n_pairs && bucket[order[i]] == bucket[order[i + 1]]) {
            tasks.push_back({order[i], order[i + 1], true});
            ++i;
        } else {
            tasks.push_back({order[i], 0, false});
        }
    }

    std::size_t workers = job.workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : job.workers;
    const std::size_t tasks_per_chunk = packed ? kChunkPairs / 2 : kChunkPairs;
    const std::size_t n_chunks = (tasks.size() + tasks_per_chunk - 1) / tasks_per_chunk;
    workers = std::min(workers, n_chunks);

    StealQueues queues(workers);
    for (std::size_t c = 0; c < n_chunks; ++c)
        queues.push(c % workers, {c * tasks_per_chunk, std::min(tasks.size(), (c + 1) * tasks_per_chunk)});

    BatchReport report;
    report.results.resize(n_pairs);
    std::vector<std::uint8_t> ran_packed(n_pairs, 0);
    std::atomic<bool> failed{false};
    std::mutex error_lock;
    std::size_t error_index = n_pairs;
    std::string error_what;

    traceback::TracebackOptions opts;
    opts.tuning = tuning;
    opts.explicit_threshold = job.explicit_threshold;

    auto single = [&](std::size_t idx) {
        const auto& p = job.pairs[idx];
        report.results[idx] = traceback::align(q_codes[p.query], s_codes[p.subject], job.cfg, job.scheme, opts);
    };

    auto run_task = [&](const Task& t) {
        if (!t.dual) {
            single(t.first);
            return;
        }
        const auto& pa = job.pairs[t.first];
        const auto& pb = job.pairs[t.second];
        const engine::SequencePair a{q_codes[pa.query], s_codes[pa.subject]};
        const engine::SequencePair b{q_codes[pb.query], s_codes[pb.subject]};
        engine::EngineTuning pt = tuning;
        pt.packed = true;
        if (engine::packed_range_ok(a, b, job.scheme, pt)) {
            const auto [ra, rb] = engine::engine_score_packed(a, b, job.cfg, job.scheme, pt);
            report.results[t.first] = from_engine(ra, job.cfg);
            report.results[t.second] = from_engine(rb, job.cfg);
            ran_packed[t.first] = ran_packed[t.second] = 1;
        } else {
            single(t.first);
            single(t.second);
        }
    };

    auto worker = [&](std::size_t w) {
        Chunk c;
        while (!failed.load(std::memory_order_relaxed) && queues.pop(w, c)) {
            for (std::size_t i = c.begin; i < c.end; ++i) {
                const Task& t = tasks[i];
                try {
                    run_task(t);
                } catch (const std::exception& e) {
                    // A dual task reports its earlier pair.
                    const std::size_t idx = t.dual ? std::min(t.first, t.second) : t.first;
                    std::lock_guard lock(error_lock);
                    if (idx < error_index) {
                        error_index = idx;
                        error_what = e.what();
                    }
                    failed.store(true);
                    return;
                }
            }
        }
    };

    if (workers == 1) {
        worker(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker, w);
    }
    if (failed) throw BatchError(error_index, error_what);

    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (std::size_t i = 0; i < n_pairs; ++i) {
        const auto& p = job.pairs[i];
        report.total_cells += static_cast<std::uint64_t>(q_codes[p.query].size()) * s_codes[p.subject].size();
        report.computed_cells += report.results[i].cells_computed;
        report.packed_pairs += ran_packed[i];
    }
    report.gcups = report.wall_time > 0 ? static_cast<double>(report.total_cells) / report.wall_time / 1e9 : 0.0;
    return report;
}

}  // namespace waveseq::batch

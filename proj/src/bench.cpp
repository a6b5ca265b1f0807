#include "waveseq/bench.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace waveseq::bench {

void validate(const HardwareModel& hw) {
    if (!(hw.cores > 0 && hw.clock_ghz > 0 && hw.cycles_per_cell > 0))
        throw std::invalid_argument("hardware model values must be positive");
}

double theoretical_peak(const HardwareModel& hw) {
    validate(hw);
    return hw.cores * hw.clock_ghz / hw.cycles_per_cell;
}

double median(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("median of an empty list");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

BenchReport measure_gcups(const batch::BatchJob& job, std::size_t repetitions,
                          const std::optional<HardwareModel>& hw) {
    if (repetitions == 0) throw std::invalid_argument("repetitions must be at least 1");
    if (hw) validate(*hw);

    BenchReport rep;
    rep.repetitions = repetitions;
    std::vector<double> walls;
    for (std::size_t r = 0; r < repetitions; ++r) {
        const auto br = batch::run_batch(job);
        rep.run_gcups.push_back(br.gcups);
        walls.push_back(br.wall_time);
        rep.cells = br.total_cells;
        rep.computed_cells = br.computed_cells;
    }
    rep.achieved_gcups = median(rep.run_gcups);
    rep.wall_s = median(walls);

    std::size_t max_len = 1;
    for (const auto& p : job.pairs)
        max_len = std::max({max_len, job.queries[p.query].size(), job.subjects[p.subject].size()});
    const auto tuning = job.tuning.value_or(engine::auto_tuning(max_len));
    rep.pairs = job.pairs.size();
    rep.workers = job.workers;
    rep.align_type = to_string(job.cfg.align_type);
    rep.gap_model = to_string(job.cfg.gap_model);
    rep.result_mode = to_string(job.cfg.result_mode);
    rep.lanes = tuning.lanes;
    rep.cols_per_lane = tuning.cols_per_lane;
    rep.packed = job.packed;

    if (hw) {
        rep.tpp_gcups = theoretical_peak(*hw);
        rep.efficiency = rep.achieved_gcups / *rep.tpp_gcups;
    }
    return rep;
}

std::string to_json(const BenchReport& r) {
    nlohmann::ordered_json j;
    j["achieved_gcups"] = r.achieved_gcups;
    j["tpp_gcups"] = r.tpp_gcups ? nlohmann::ordered_json(*r.tpp_gcups) : nlohmann::ordered_json(nullptr);
    j["efficiency"] = r.efficiency ? nlohmann::ordered_json(*r.efficiency) : nlohmann::ordered_json(nullptr);
    j["cells"] = r.cells;
    j["computed_cells"] = r.computed_cells;
    j["wall_s"] = r.wall_s;
    j["repetitions"] = r.repetitions;
    j["median_rule"] = "middle value; mean of the two middle values for even counts";
    j["run_gcups"] = r.run_gcups;
    j["config"] = {
        {"pairs", r.pairs},           {"workers", r.workers},
        {"align_type", r.align_type}, {"gap_model", r.gap_model},
        {"result_mode", r.result_mode}, {"lanes", r.lanes},
        {"cols_per_lane", r.cols_per_lane}, {"packed", r.packed},
    };
    return j.dump(2);
}

}  // namespace waveseq::bench

#ifndef WAVESEQ_BENCH_HPP
#define WAVESEQ_BENCH_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "waveseq/batch.hpp"

namespace waveseq::bench {

/// Inputs of the theoretical-peak model. "cores" counts scalar ALU units
/// (SIMD width included on a CPU).
struct HardwareModel {
    double cores = 0.0;
    double clock_ghz = 0.0;
    double cycles_per_cell = 7.0;  // 4 max + 3 add/sub per affine cell; 3.5 when packed
};

void validate(const HardwareModel& hw);

/// cores * clock / cycles_per_cell, in GCUPS.
double theoretical_peak(const HardwareModel& hw);

/// Middle value, or the mean of the two middle values for even counts.
double median(std::vector<double> values);

struct BenchReport {
    double achieved_gcups = 0.0;  // median over repetitions
    std::optional<double> tpp_gcups;
    std::optional<double> efficiency;  // achieved / tpp
    std::uint64_t cells = 0;           // score cells per repetition
    std::uint64_t computed_cells = 0;  // including traceback passes
    double wall_s = 0.0;               // wall time of the median-speed run
    std::size_t repetitions = 0;
    std::vector<double> run_gcups;     // per repetition, in run order
    std::size_t pairs = 0;
    std::size_t workers = 0;
    std::string align_type;
    std::string gap_model;
    std::string result_mode;
    int lanes = 0;
    int cols_per_lane = 0;
    bool packed = false;
};

/// Runs the batch `repetitions` times and reports the median speed.
BenchReport measure_gcups(const batch::BatchJob& job, std::size_t repetitions,
                          const std::optional<HardwareModel>& hw = std::nullopt);

/// JSON object with stable key names, pretty-printed.
std::string to_json(const BenchReport& report);

}  // namespace waveseq::bench

#endif

#pragma once

#include <cstdint>
#include <vector>

namespace sphcusum {

// Calibrated sup-norm thresholds: threshold[i] is the level[i] quantile of
// the limit process sup, estimated at the recorded sampling configuration.
struct QuantileTable {
    std::vector<double> levels;
    std::vector<double> thresholds;
    int grid = 0;
    long inner_n = 0;
    int draws = 0;
    std::uint64_t seed = 0;

    // Exact level lookup (tolerance 1e-12); throws if the level is absent.
    double threshold_for(double level) const;
};

} // namespace sphcusum

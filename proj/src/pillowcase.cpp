#include "sphcusum/pillowcase.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "sphcusum/errors.hpp"
#include "sphcusum/parallel.hpp"

namespace sphcusum {

namespace {

constexpr int kPathChunk = 512;

void fill_bm_column(int grid, SubstreamRng &rng, double *out) {
    const double step_sd = 1.0 / std::sqrt(static_cast<double>(grid));
    double acc = 0.0;
    for (int k = 0; k < grid; ++k) {
        acc += step_sd * rng.next_normal();
        out[k] = acc;
    }
}

void fill_bridge_column(int grid, SubstreamRng &rng, double *out) {
    fill_bm_column(grid, rng, out);
    const double end = out[grid - 1];
    for (int k = 0; k < grid; ++k)
        out[k] -= (static_cast<double>(k + 1) / grid) * end; // k = grid-1 lands on exact 0
}

} // namespace

std::vector<double> sample_bm(int grid, SubstreamRng &rng) {
    if (grid < 1) throw invalid_argument_error("sample_bm: grid must be >= 1");
    std::vector<double> out(grid);
    fill_bm_column(grid, rng, out.data());
    return out;
}

std::vector<double> sample_bridge(int grid, SubstreamRng &rng) {
    if (grid < 1) throw invalid_argument_error("sample_bridge: grid must be >= 1");
    std::vector<double> out(grid);
    fill_bridge_column(grid, rng, out.data());
    return out;
}

std::vector<double> sample_pillowcase(int grid, long inner_n, SubstreamRng &rng) {
    if (grid < 1) throw invalid_argument_error("sample_pillowcase: grid must be >= 1");
    if (inner_n < 1) throw invalid_argument_error("sample_pillowcase: inner_n must be >= 1");

    Eigen::MatrixXd inner = Eigen::MatrixXd::Zero(grid, grid);
    Eigen::MatrixXd bm(grid, kPathChunk), br(grid, kPathChunk);
    long done = 0;
    while (done < inner_n) {
        const int c = static_cast<int>(std::min<long>(kPathChunk, inner_n - done));
        for (int i = 0; i < c; ++i) {
            fill_bm_column(grid, rng, bm.col(i).data());
            fill_bridge_column(grid, rng, br.col(i).data());
        }
        inner.noalias() += bm.leftCols(c) * br.leftCols(c).transpose();
        done += c;
    }

    std::vector<double> w(static_cast<std::size_t>(grid + 1) * (grid + 1), 0.0);
    const double scale = 1.0 / std::sqrt(static_cast<double>(inner_n));
    for (int j = 1; j <= grid; ++j) {
        double *row = w.data() + static_cast<std::size_t>(j) * (grid + 1);
        for (int k = 1; k <= grid; ++k) row[k] = scale * inner(j - 1, k - 1);
    }
    return w;
}

double pillowcase_covariance(double r, double s, double r2, double s2) {
    for (const double v : {r, s, r2, s2})
        if (v < 0.0 || v > 1.0)
            throw invalid_argument_error("pillowcase_covariance: arguments must lie in [0,1]");
    return std::min(r, r2) * (std::min(s, s2) - s * s2);
}

QuantileTable estimate_quantiles(int grid, long inner_n, int draws,
                                 std::vector<double> levels, std::uint64_t seed,
                                 int n_threads) {
    if (draws < 100) throw invalid_argument_error("draws below minimum 100");
    if (grid < 1) throw invalid_argument_error("estimate_quantiles: grid must be >= 1");
    if (inner_n < 1) throw invalid_argument_error("estimate_quantiles: inner_n must be >= 1");
    if (levels.empty()) throw invalid_argument_error("estimate_quantiles: levels must be nonempty");
    for (const double lv : levels)
        if (!(lv > 0.0 && lv < 1.0))
            throw invalid_argument_error("estimate_quantiles: levels must lie in (0,1)");
    std::sort(levels.begin(), levels.end());

    std::vector<double> sups(draws);
    parallel_for(draws, n_threads, [&](int b) {
        SubstreamRng rng(seed, static_cast<std::uint64_t>(b));
        const std::vector<double> w = sample_pillowcase(grid, inner_n, rng);
        double m = 0.0;
        for (const double v : w) m = std::max(m, std::abs(v));
        sups[b] = m;
    });
    std::sort(sups.begin(), sups.end());

    QuantileTable table;
    table.levels = levels;
    table.grid = grid;
    table.inner_n = inner_n;
    table.draws = draws;
    table.seed = seed;
    table.thresholds.reserve(levels.size());
    for (const double lv : levels) {
        // 1e-9 guard keeps exact-integer level*draws from rounding up
        int rank = static_cast<int>(std::ceil(lv * draws - 1e-9));
        rank = std::clamp(rank, 1, draws);
        table.thresholds.push_back(sups[rank - 1]);
    }
    for (std::size_t i = 1; i < table.thresholds.size(); ++i) {
        if (!(table.thresholds[i] > table.thresholds[i - 1]))
            throw runtime_model_error(
                "estimate_quantiles: levels " + std::to_string(table.levels[i - 1]) + " and " +
                std::to_string(table.levels[i]) +
                " map to the same order statistic; increase draws");
    }
    return table;
}

} // namespace sphcusum

#pragma once

#include <cstdint>
#include <vector>

#include "sphcusum/quantile_table.hpp"
#include "sphcusum/rng.hpp"

namespace sphcusum {

// Brownian motion on {k/G : k = 1..G}: B(k/G) = sum_{i<=k} xi_i with
// xi ~ N(0, 1/G). B(0) = 0 is implicit.
std::vector<double> sample_bm(int grid, SubstreamRng &rng);

// Brownian bridge from an independent BM path: b(k/G) = B(k/G) - (k/G) B(1);
// b(1) = 0 exactly.
std::vector<double> sample_bridge(int grid, SubstreamRng &rng);

// W_n(r_j, s_k) = n^{-1/2} sum_{i=1}^n B_i(r_j) b_i(s_k) over independent
// (BM, bridge) pairs. Returned (G+1) x (G+1) row-major in j; row j = 0,
// column k = 0, and column k = G are exactly zero.
std::vector<double> sample_pillowcase(int grid, long inner_n, SubstreamRng &rng);

// Limit covariance (r ^ r2) ((s ^ s2) - s s2).
double pillowcase_covariance(double r, double s, double r2, double s2);

// Monte Carlo sup-norm quantiles: draw b uses substream (seed, b); the
// threshold at each level is the ascending order statistic of the B sups at
// rank ceil(level * B), no interpolation. Deterministic in (seed, grid,
// inner_n, draws) regardless of n_threads.
QuantileTable estimate_quantiles(int grid, long inner_n, int draws,
                                 std::vector<double> levels, std::uint64_t seed,
                                 int n_threads = 1);

} // namespace sphcusum

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sphcusum/harmonics.hpp"
#include "sphcusum/panel.hpp"

namespace sphcusum {

// Regular lat-lon gridded series. Axes ascend; values are indexed
// [time][lat][lon]. Monthly data carries (year, month); yearly data uses
// month = 0.
struct LatLonSeries {
    std::vector<double> lats; // degrees in [-90, 90], ascending, regular step
    std::vector<double> lons; // degrees in [0, 360), ascending, regular step
    std::vector<std::pair<int, int>> times;
    std::vector<double> values;

    int n_lat() const { return static_cast<int>(lats.size()); }
    int n_lon() const { return static_cast<int>(lons.size()); }
    int n_time() const { return static_cast<int>(times.size()); }

    double &at(int t, int i_lat, int i_lon) {
        return values[(static_cast<std::size_t>(t) * n_lat() + i_lat) * n_lon() + i_lon];
    }
    double at(int t, int i_lat, int i_lon) const {
        return values[(static_cast<std::size_t>(t) * n_lat() + i_lat) * n_lon() + i_lon];
    }
};

// Same axes, values relative to the per-(cell, calendar month) mean over
// the base period.
struct AnomalySeries {
    LatLonSeries series;
    int base_start = 0;
    int base_end = 0;
};

// CSV schema: header `year,month,lat,lon,value`, rows in any order, exactly
// one row per (time, cell). NaN or absent cells are an error naming the
// cell unless fill_missing selects nearest-neighbor filling.
LatLonSeries read_latlon_csv(const std::string &path, bool fill_missing = false);

void write_latlon_csv(const LatLonSeries &series, const std::string &path);

AnomalySeries compute_anomalies(const LatLonSeries &series, int base_start, int base_end);

struct AnnualResult {
    AnomalySeries yearly;
    std::vector<std::string> warnings; // JSON lines, one per dropped year
};

// Per-cell mean over the 12 months of each complete year; incomplete years
// are dropped and reported.
AnnualResult annual_average(const AnomalySeries &anomalies);

// Bilinear interpolation in (lat, lon) with longitude wraparound; latitudes
// beyond the data range clamp to the nearest data row. One snapshot time
// per input time.
FieldSnapshot regrid_to_cubature(const AnomalySeries &anomalies, const CubatureGrid &grid);

struct PipelineResult {
    CoefficientPanel panel;
    std::vector<std::string> warnings;
    std::vector<int> years; // time axis of the panel, ascending
};

// read -> anomalies -> annual means -> regrid to build_gauss_grid(lstar) ->
// analyze(lmax). n_times of the panel = number of complete years.
PipelineResult pipeline(const std::string &path, int base_start, int base_end,
                        int lmax, int lstar, bool fill_missing = false);

} // namespace sphcusum

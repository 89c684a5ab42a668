#include "sphcusum/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "sphcusum/errors.hpp"

namespace sphcusum {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

std::string cell_name(const std::pair<int, int> &time, double lat, double lon) {
    std::ostringstream os;
    os << "year " << time.first << " month " << time.second << " lat " << lat << " lon " << lon;
    return os.str();
}

void check_regular(const std::vector<double> &axis, const char *name) {
    if (axis.size() < 2) return;
    const double step = axis[1] - axis[0];
    if (step <= 0.0) throw runtime_model_error(std::string(name) + " axis is not increasing");
    for (std::size_t i = 2; i < axis.size(); ++i) {
        if (std::abs((axis[i] - axis[i - 1]) - step) > 1e-6 * std::abs(step))
            throw runtime_model_error(std::string("irregular ") + name + " spacing near " +
                                      std::to_string(axis[i]));
    }
}

// nearest present cell in the same time slab, by chord distance
void fill_one(LatLonSeries &s, const std::vector<char> &present, int t, int i_lat, int i_lon) {
    double best = std::numeric_limits<double>::infinity();
    double value = 0.0;
    const double lat0 = s.lats[i_lat] * kDeg, lon0 = s.lons[i_lon] * kDeg;
    const double x0 = std::cos(lat0) * std::cos(lon0), y0 = std::cos(lat0) * std::sin(lon0),
                 z0 = std::sin(lat0);
    for (int a = 0; a < s.n_lat(); ++a) {
        for (int b = 0; b < s.n_lon(); ++b) {
            const std::size_t idx = (static_cast<std::size_t>(t) * s.n_lat() + a) * s.n_lon() + b;
            if (!present[idx]) continue;
            const double la = s.lats[a] * kDeg, lo = s.lons[b] * kDeg;
            const double dx = std::cos(la) * std::cos(lo) - x0;
            const double dy = std::cos(la) * std::sin(lo) - y0;
            const double dz = std::sin(la) - z0;
            const double d = dx * dx + dy * dy + dz * dz;
            if (d < best) {
                best = d;
                value = s.values[idx];
            }
        }
    }
    if (!std::isfinite(best)) throw runtime_model_error("fill requested but a time slab is empty");
    s.at(t, i_lat, i_lon) = value;
}

} // namespace

LatLonSeries read_latlon_csv(const std::string &path, bool fill_missing) {
    std::ifstream in(path);
    if (!in) throw runtime_model_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw runtime_model_error(path + ": empty file");
    {
        std::string h = line;
        h.erase(std::remove_if(h.begin(), h.end(), [](char c) { return c == ' ' || c == '\r'; }),
                h.end());
        if (h != "year,month,lat,lon,value")
            throw runtime_model_error(path + ": expected header year,month,lat,lon,value");
    }

    struct Row {
        int year, month;
        double lat, lon, value;
    };
    std::vector<Row> rows;
    std::set<std::pair<int, int>> time_set;
    std::set<double> lat_set, lon_set;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        Row r;
        char trailing = 0;
        if (std::sscanf(line.c_str(), "%d,%d,%lf,%lf,%lf%c", &r.year, &r.month, &r.lat, &r.lon,
                        &r.value, &trailing) < 5 ||
            (trailing != 0 && trailing != '\r'))
            throw runtime_model_error(path + ":" + std::to_string(line_no) + ": malformed row");
        if (r.month < 0 || r.month > 12)
            throw runtime_model_error(path + ":" + std::to_string(line_no) + ": month out of range");
        if (r.lat < -90.0 || r.lat > 90.0)
            throw runtime_model_error(path + ":" + std::to_string(line_no) + ": latitude out of range");
        r.lon = std::fmod(r.lon, 360.0);
        if (r.lon < 0.0) r.lon += 360.0;
        rows.push_back(r);
        time_set.insert({r.year, r.month});
        lat_set.insert(r.lat);
        lon_set.insert(r.lon);
    }
    if (rows.empty()) throw runtime_model_error(path + ": no data rows");

    LatLonSeries s;
    s.lats.assign(lat_set.begin(), lat_set.end());
    s.lons.assign(lon_set.begin(), lon_set.end());
    s.times.assign(time_set.begin(), time_set.end());
    check_regular(s.lats, "latitude");
    check_regular(s.lons, "longitude");

    std::map<double, int> lat_idx, lon_idx;
    for (int i = 0; i < s.n_lat(); ++i) lat_idx[s.lats[i]] = i;
    for (int i = 0; i < s.n_lon(); ++i) lon_idx[s.lons[i]] = i;
    std::map<std::pair<int, int>, int> time_idx;
    for (int i = 0; i < s.n_time(); ++i) time_idx[s.times[i]] = i;

    const std::size_t total = static_cast<std::size_t>(s.n_time()) * s.n_lat() * s.n_lon();
    s.values.assign(total, 0.0);
    std::vector<char> present(total, 0);
    for (const Row &r : rows) {
        const std::size_t idx =
            (static_cast<std::size_t>(time_idx[{r.year, r.month}]) * s.n_lat() + lat_idx[r.lat]) *
                s.n_lon() +
            lon_idx[r.lon];
        if (present[idx])
            throw runtime_model_error(path + ": duplicate cell at " +
                                      cell_name({r.year, r.month}, r.lat, r.lon));
        if (std::isnan(r.value)) continue; // NaN counts as missing
        s.values[idx] = r.value;
        present[idx] = 1;
    }

    std::vector<std::size_t> missing;
    for (std::size_t i = 0; i < total; ++i)
        if (!present[i]) missing.push_back(i);
    if (!missing.empty()) {
        if (!fill_missing) {
            const std::size_t i = missing.front();
            const int t = static_cast<int>(i / (static_cast<std::size_t>(s.n_lat()) * s.n_lon()));
            const int rest = static_cast<int>(i % (static_cast<std::size_t>(s.n_lat()) * s.n_lon()));
            throw runtime_model_error(path + ": missing value at " +
                                      cell_name(s.times[t], s.lats[rest / s.n_lon()],
                                                s.lons[rest % s.n_lon()]) +
                                      " (no fill policy)");
        }
        for (const std::size_t i : missing) {
            const int t = static_cast<int>(i / (static_cast<std::size_t>(s.n_lat()) * s.n_lon()));
            const int rest = static_cast<int>(i % (static_cast<std::size_t>(s.n_lat()) * s.n_lon()));
            fill_one(s, present, t, rest / s.n_lon(), rest % s.n_lon());
        }
    }
    return s;
}

void write_latlon_csv(const LatLonSeries &series, const std::string &path) {
    std::ofstream out(path);
    if (!out) throw runtime_model_error("cannot write " + path);
    out << "year,month,lat,lon,value\n";
    char buf[160];
    for (int t = 0; t < series.n_time(); ++t) {
        for (int i = 0; i < series.n_lat(); ++i) {
            for (int j = 0; j < series.n_lon(); ++j) {
                std::snprintf(buf, sizeof buf, "%d,%d,%.10g,%.10g,%.17g\n", series.times[t].first,
                              series.times[t].second, series.lats[i], series.lons[j],
                              series.at(t, i, j));
                out << buf;
            }
        }
    }
}

AnomalySeries compute_anomalies(const LatLonSeries &series, int base_start, int base_end) {
    if (base_end < base_start)
        throw invalid_argument_error("compute_anomalies: base_end must be >= base_start");
    // base coverage: all 12 months of every base year must be present
    std::set<std::pair<int, int>> have(series.times.begin(), series.times.end());
    for (int y = base_start; y <= base_end; ++y)
        for (int m = 1; m <= 12; ++m)
            if (!have.count({y, m}))
                throw runtime_model_error("base period not covered: missing year " +
                                          std::to_string(y) + " month " + std::to_string(m));

    AnomalySeries out;
    out.series = series;
    out.base_start = base_start;
    out.base_end = base_end;
    const std::size_t cells = static_cast<std::size_t>(series.n_lat()) * series.n_lon();
    const double n_base = base_end - base_start + 1;
    std::vector<double> base_mean(cells);
    for (int month = 1; month <= 12; ++month) {
        std::fill(base_mean.begin(), base_mean.end(), 0.0);
        for (int t = 0; t < series.n_time(); ++t) {
            const auto [y, m] = series.times[t];
            if (m != month || y < base_start || y > base_end) continue;
            const double *slab = series.values.data() + static_cast<std::size_t>(t) * cells;
            for (std::size_t c = 0; c < cells; ++c) base_mean[c] += slab[c];
        }
        for (std::size_t c = 0; c < cells; ++c) base_mean[c] /= n_base;
        for (int t = 0; t < series.n_time(); ++t) {
            if (series.times[t].second != month) continue;
            double *slab = out.series.values.data() + static_cast<std::size_t>(t) * cells;
            for (std::size_t c = 0; c < cells; ++c) slab[c] -= base_mean[c];
        }
    }
    return out;
}

AnnualResult annual_average(const AnomalySeries &anomalies) {
    const LatLonSeries &s = anomalies.series;
    const std::size_t cells = static_cast<std::size_t>(s.n_lat()) * s.n_lon();
    std::map<int, std::vector<int>> by_year; // year -> time indices
    for (int t = 0; t < s.n_time(); ++t) by_year[s.times[t].first].push_back(t);

    AnnualResult result;
    result.yearly.base_start = anomalies.base_start;
    result.yearly.base_end = anomalies.base_end;
    LatLonSeries &y = result.yearly.series;
    y.lats = s.lats;
    y.lons = s.lons;
    for (const auto &[year, idxs] : by_year) {
        if (idxs.size() != 12) {
            result.warnings.push_back("{\"warning\":\"incomplete_year\",\"year\":" +
                                      std::to_string(year) + ",\"months_present\":" +
                                      std::to_string(idxs.size()) + "}");
            continue;
        }
        y.times.emplace_back(year, 0);
        const std::size_t off = y.values.size();
        y.values.resize(off + cells, 0.0);
        for (const int t : idxs) {
            const double *slab = s.values.data() + static_cast<std::size_t>(t) * cells;
            for (std::size_t c = 0; c < cells; ++c) y.values[off + c] += slab[c];
        }
        for (std::size_t c = 0; c < cells; ++c) y.values[off + c] /= 12.0;
    }
    return result;
}

FieldSnapshot regrid_to_cubature(const AnomalySeries &anomalies, const CubatureGrid &grid) {
    const LatLonSeries &s = anomalies.series;
    if (s.n_lat() < 2 || s.n_lon() < 2)
        throw runtime_model_error("regrid: need at least a 2x2 lat-lon grid");
    const double lat0 = s.lats.front(), lat_step = s.lats[1] - s.lats[0];
    const double lon0 = s.lons.front(), lon_step = s.lons[1] - s.lons[0];
    const std::size_t cells = static_cast<std::size_t>(s.n_lat()) * s.n_lon();

    FieldSnapshot field;
    field.grid = &grid;
    field.n_times = s.n_time();
    field.samples.resize(static_cast<std::size_t>(grid.n_points()) * s.n_time());

    for (int k = 0; k < grid.n_points(); ++k) {
        const SphericalPoint p = grid.point(k);
        const double lat = 90.0 - p.theta / kDeg;
        double lon = p.phi / kDeg;
        lon = std::fmod(lon, 360.0);
        if (lon < 0.0) lon += 360.0;

        // latitude bracket with pole clamping
        double fl = (lat - lat0) / lat_step;
        int i0;
        double wlat;
        if (fl <= 0.0) {
            i0 = 0;
            wlat = 0.0;
        } else if (fl >= s.n_lat() - 1) {
            i0 = s.n_lat() - 2;
            wlat = 1.0;
        } else {
            i0 = static_cast<int>(fl);
            wlat = fl - i0;
        }

        // longitude bracket with wraparound
        double fo = (lon - lon0) / lon_step;
        int j0 = static_cast<int>(std::floor(fo));
        double wlon = fo - j0;
        j0 = ((j0 % s.n_lon()) + s.n_lon()) % s.n_lon();
        const int j1 = (j0 + 1) % s.n_lon();

        for (int t = 0; t < s.n_time(); ++t) {
            const double *slab = s.values.data() + static_cast<std::size_t>(t) * cells;
            const double v00 = slab[static_cast<std::size_t>(i0) * s.n_lon() + j0];
            const double v01 = slab[static_cast<std::size_t>(i0) * s.n_lon() + j1];
            const double v10 = slab[static_cast<std::size_t>(i0 + 1) * s.n_lon() + j0];
            const double v11 = slab[static_cast<std::size_t>(i0 + 1) * s.n_lon() + j1];
            const double top = v00 + wlon * (v01 - v00);
            const double bot = v10 + wlon * (v11 - v10);
            field.samples[static_cast<std::size_t>(t) * grid.n_points() + k] =
                top + wlat * (bot - top);
        }
    }
    return field;
}

PipelineResult pipeline(const std::string &path, int base_start, int base_end, int lmax,
                        int lstar, bool fill_missing) {
    if (lmax > lstar) throw invalid_argument_error("pipeline: need lmax <= lstar");
    const LatLonSeries raw = read_latlon_csv(path, fill_missing);
    const AnomalySeries anoms = compute_anomalies(raw, base_start, base_end);
    AnnualResult annual = annual_average(anoms);
    if (annual.yearly.series.n_time() == 0)
        throw runtime_model_error("pipeline: no complete years in input");
    const CubatureGrid grid = build_gauss_grid(lstar);
    const FieldSnapshot field = regrid_to_cubature(annual.yearly, grid);

    PipelineResult result;
    result.panel = analyze(field, lmax);
    result.warnings = std::move(annual.warnings);
    for (const auto &[year, month] : annual.yearly.series.times) {
        (void)month;
        result.years.push_back(year);
    }
    return result;
}

} // namespace sphcusum

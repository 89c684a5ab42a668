#pragma once

#include <string>

#include <json.hpp>

#include "sphcusum/cusum.hpp"
#include "sphcusum/harness.hpp"
#include "sphcusum/panel.hpp"
#include "sphcusum/quantile_table.hpp"

namespace sphcusum {

// Text panel: header `ell,m,t,value`, one row per coefficient, all
// (l, m, t) combinations present exactly once.
void write_panel_csv(const CoefficientPanel &panel, const std::string &path);
CoefficientPanel read_panel_csv(const std::string &path);

// Compact panel: see docs/panel-binary-format.md for the byte layout.
void write_panel_binary(const CoefficientPanel &panel, const std::string &path);
CoefficientPanel read_panel_binary(const std::string &path);

// Dispatch on the magic bytes, falling back to CSV.
CoefficientPanel read_panel_auto(const std::string &path);

nlohmann::json quantile_table_to_json(const QuantileTable &table);
QuantileTable quantile_table_from_json(const nlohmann::json &j);

nlohmann::json read_json_file(const std::string &path);
void write_json_file(const nlohmann::json &j, const std::string &path);

// Matrix of surface values, r-index rows, s-index columns, no header.
void write_surface_csv(const StatisticSurface &surface, const std::string &path);
nlohmann::json surface_meta_json(const StatisticSurface &surface);

nlohmann::json experiment_config_to_json(const ExperimentConfig &config);
ExperimentConfig experiment_config_from_json(const nlohmann::json &j);
nlohmann::json rejection_table_to_json(const RejectionTable &result, const ExperimentConfig &config);

nlohmann::json scan_entries_to_json(const std::vector<ScanEntry> &entries);

} // namespace sphcusum

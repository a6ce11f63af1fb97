#pragma once

#include <string>

#include <json.hpp>

#include "spreadopt/analysis.hpp"
#include "spreadopt/simulate.hpp"

namespace spreadopt {

/// JSON round-trip of an experiment report. Non-finite doubles are encoded
/// as the strings "inf", "-inf" and "nan" so the output stays within the
/// JSON grammar; report_from_json decodes them back.
nlohmann::json report_to_json(const ExperimentReport& rep);
ExperimentReport report_from_json(const nlohmann::json& j);

nlohmann::json market_to_json(const MarketParams& p);
MarketParams market_from_json(const nlohmann::json& j);

/// Human-oriented rendering: aligned tables, one line per verdict and Monte
/// Carlo section, an overall PASS/FAIL footer.
std::string render_text(const ExperimentReport& rep);

/// Plot-ready CSV with 17 significant digits (doubles round-trip exactly).
void write_table_csv(const NumericTable& table, const std::string& path);

/// Simulated paths in long form, one row per (path, node); increment columns
/// hold the increment leading into the node (zero on the first). gzip-
/// compressed when compress is true (append .gz to the path yourself).
void write_path_csv(const PathBundle& bundle, const std::string& path,
                    bool compress = false);

/// Market parameters from a JSON file with keys alpha1, alpha2, sigma1,
/// sigma2, rho, c (all required, all numbers). Throws InputError naming the
/// file, the line and column for parse errors, or the offending key.
MarketParams parse_market_file(const std::string& path);

}  // namespace spreadopt

#include "spreadopt/report_io.hpp"

#include <zlib.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <sstream>
#include <vector>

namespace spreadopt {

namespace {

using nlohmann::json;

json enc_double(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0.0 ? "inf" : "-inf";
}

double dec_double(const json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw InputError(what + " must be a number or one of \"inf\", \"-inf\", "
                          "\"nan\"");
}

const json& require(const json& j, const std::string& key) {
  const auto it = j.find(key);
  if (it == j.end()) {
    throw InputError("missing key '" + key + "'");
  }
  return *it;
}

std::string fmt(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

void render_table(std::ostringstream& out, const NumericTable& t) {
  std::vector<std::vector<std::string>> cells;
  cells.emplace_back(t.columns);
  for (const auto& row : t.rows) {
    auto& line = cells.emplace_back();
    line.reserve(row.size());
    for (double v : row) line.push_back(fmt(v, 10));
  }
  std::vector<std::size_t> width(t.columns.size(), 0);
  for (const auto& line : cells) {
    for (std::size_t c = 0; c < line.size() && c < width.size(); ++c) {
      width[c] = std::max(width[c], line[c].size());
    }
  }
  out << "table " << t.name << ":\n";
  for (const auto& line : cells) {
    out << " ";
    for (std::size_t c = 0; c < line.size(); ++c) {
      out << "  " << std::setw(static_cast<int>(width[c])) << line[c];
    }
    out << "\n";
  }
}

// Writer abstraction shared by the plain and gzip CSV paths.
using LineSink = std::function<void(const char*, std::size_t)>;

void write_path_rows(const PathBundle& b, const LineSink& sink) {
  static const char header[] =
      "path,node,time,z,s1,s2,x,w1_inc,w2_inc,wz_inc\n";
  sink(header, sizeof header - 1);
  char line[512];
  for (std::int64_t p = 0; p < b.n_paths; ++p) {
    for (std::int64_t k = 0; k <= b.n_steps; ++k) {
      const std::size_t n = b.node_index(p, k);
      const bool has_inc = k > 0;
      const std::size_t i = has_inc ? b.inc_index(p, k - 1) : 0;
      const int len = std::snprintf(
          line, sizeof line,
          "%lld,%lld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
          static_cast<long long>(p), static_cast<long long>(k), b.times[k],
          b.z[n], b.s1[n], b.s2[n], b.x[n], has_inc ? b.w1_inc[i] : 0.0,
          has_inc ? b.w2_inc[i] : 0.0, has_inc ? b.wz_inc[i] : 0.0);
      sink(line, static_cast<std::size_t>(len));
    }
  }
}

}  // namespace

json market_to_json(const MarketParams& p) {
  return json{{"alpha1", p.alpha1}, {"alpha2", p.alpha2},
              {"sigma1", p.sigma1}, {"sigma2", p.sigma2},
              {"rho", p.rho},       {"c", p.c}};
}

MarketParams market_from_json(const json& j) {
  if (!j.is_object()) {
    throw InputError("market parameters must be a JSON object");
  }
  const auto field = [&j](const char* key) {
    const json& v = require(j, key);
    if (!v.is_number()) {
      throw InputError(std::string("key '") + key + "' must be a number");
    }
    return v.get<double>();
  };
  MarketParams p;
  p.alpha1 = field("alpha1");
  p.alpha2 = field("alpha2");
  p.sigma1 = field("sigma1");
  p.sigma2 = field("sigma2");
  p.rho = field("rho");
  p.c = field("c");
  return p;
}

json report_to_json(const ExperimentReport& rep) {
  json j;
  j["title"] = rep.title;
  j["params"] = market_to_json(rep.params);
  j["seed"] = rep.seed;
  j["condition"] = {{"holds", rep.condition.holds},
                    {"xi", enc_double(rep.condition.xi)},
                    {"residual", enc_double(rep.condition.residual)},
                    {"gamma0", enc_double(rep.condition.gamma0)}};
  j["verdicts"] = json::array();
  for (const Verdict& v : rep.verdicts) {
    j["verdicts"].push_back({{"name", v.name},
                             {"passed", v.passed},
                             {"residual", enc_double(v.residual)},
                             {"tolerance", enc_double(v.tolerance)}});
  }
  j["tables"] = json::array();
  for (const NumericTable& t : rep.tables) {
    json rows = json::array();
    for (const auto& row : t.rows) {
      json r = json::array();
      for (double v : row) r.push_back(enc_double(v));
      rows.push_back(std::move(r));
    }
    j["tables"].push_back(
        {{"name", t.name}, {"columns", t.columns}, {"rows", std::move(rows)}});
  }
  j["mc_sections"] = json::array();
  for (const McSection& s : rep.mc_sections) {
    j["mc_sections"].push_back({{"name", s.name},
                                {"mean", enc_double(s.estimate.mean)},
                                {"std_error", enc_double(s.estimate.std_error)},
                                {"n_paths", s.estimate.n_paths},
                                {"utility_gamma", s.estimate.utility_gamma},
                                {"reference", enc_double(s.reference)},
                                {"z_score", enc_double(s.z_score)},
                                {"seeds", s.seeds},
                                {"passed", s.passed}});
  }
  j["all_passed"] = rep.all_passed();
  return j;
}

ExperimentReport report_from_json(const json& j) {
  ExperimentReport rep;
  rep.title = require(j, "title").get<std::string>();
  rep.params = market_from_json(require(j, "params"));
  rep.seed = require(j, "seed").get<std::uint64_t>();
  const json& c = require(j, "condition");
  rep.condition.holds = require(c, "holds").get<bool>();
  rep.condition.xi = dec_double(require(c, "xi"), "condition.xi");
  rep.condition.residual =
      dec_double(require(c, "residual"), "condition.residual");
  rep.condition.gamma0 = dec_double(require(c, "gamma0"), "condition.gamma0");
  for (const json& v : require(j, "verdicts")) {
    rep.verdicts.push_back({require(v, "name").get<std::string>(),
                            require(v, "passed").get<bool>(),
                            dec_double(require(v, "residual"), "residual"),
                            dec_double(require(v, "tolerance"), "tolerance")});
  }
  for (const json& t : require(j, "tables")) {
    NumericTable table;
    table.name = require(t, "name").get<std::string>();
    table.columns = require(t, "columns").get<std::vector<std::string>>();
    for (const json& row : require(t, "rows")) {
      auto& r = table.rows.emplace_back();
      for (const json& v : row) r.push_back(dec_double(v, "table cell"));
    }
    rep.tables.push_back(std::move(table));
  }
  for (const json& s : require(j, "mc_sections")) {
    McSection sec;
    sec.name = require(s, "name").get<std::string>();
    sec.estimate.mean = dec_double(require(s, "mean"), "mean");
    sec.estimate.std_error = dec_double(require(s, "std_error"), "std_error");
    sec.estimate.n_paths = require(s, "n_paths").get<std::int64_t>();
    sec.estimate.utility_gamma =
        dec_double(require(s, "utility_gamma"), "utility_gamma");
    sec.reference = dec_double(require(s, "reference"), "reference");
    sec.z_score = dec_double(require(s, "z_score"), "z_score");
    sec.seeds = require(s, "seeds").get<std::vector<std::uint64_t>>();
    sec.passed = require(s, "passed").get<bool>();
    rep.mc_sections.push_back(std::move(sec));
  }
  return rep;
}

std::string render_text(const ExperimentReport& rep) {
  std::ostringstream out;
  out << "== " << rep.title << " ==\n";
  const MarketParams& p = rep.params;
  out << "params: alpha1=" << fmt(p.alpha1, 10) << " alpha2="
      << fmt(p.alpha2, 10) << " sigma1=" << fmt(p.sigma1, 10) << " sigma2="
      << fmt(p.sigma2, 10) << " rho=" << fmt(p.rho, 10) << " c="
      << fmt(p.c, 10) << "\n";
  if (rep.seed != 0) {
    out << "seed: " << rep.seed << " (0x" << std::hex << rep.seed << std::dec
        << ")\n";
  }
  out << "condition: holds=" << (rep.condition.holds ? "yes" : "no")
      << " xi=" << fmt(rep.condition.xi, 10)
      << " residual=" << fmt(rep.condition.residual, 6)
      << " gamma0=" << fmt(rep.condition.gamma0, 10) << "\n";
  if (!rep.verdicts.empty()) {
    out << "verdicts:\n";
    std::size_t w = 0;
    for (const Verdict& v : rep.verdicts) w = std::max(w, v.name.size());
    for (const Verdict& v : rep.verdicts) {
      out << "  [" << (v.passed ? "PASS" : "FAIL") << "] " << std::left
          << std::setw(static_cast<int>(w)) << v.name << std::right
          << "  residual=" << fmt(v.residual, 6)
          << "  tolerance=" << fmt(v.tolerance, 6) << "\n";
    }
  }
  for (const NumericTable& t : rep.tables) render_table(out, t);
  if (!rep.mc_sections.empty()) {
    out << "mc sections:\n";
    for (const McSection& s : rep.mc_sections) {
      out << "  [" << (s.passed ? "PASS" : "FAIL") << "] " << s.name
          << "  mean=" << fmt(s.estimate.mean, 10)
          << "  se=" << fmt(s.estimate.std_error, 6)
          << "  n=" << s.estimate.n_paths
          << "  reference=" << fmt(s.reference, 10)
          << "  z=" << fmt(s.z_score, 6) << "  seeds=[";
      for (std::size_t i = 0; i < s.seeds.size(); ++i) {
        out << (i ? " " : "") << s.seeds[i];
      }
      out << "]\n";
    }
  }
  out << "overall: " << (rep.all_passed() ? "PASS" : "FAIL") << "\n";
  return out.str();
}

void write_table_csv(const NumericTable& table, const std::string& path) {
  std::ofstream f(path);
  if (!f) {
    throw InputError("cannot open '" + path + "' for writing");
  }
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    f << (c ? "," : "") << table.columns[c];
  }
  f << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      f << (c ? "," : "") << fmt(row[c], 17);
    }
    f << "\n";
  }
  if (!f.good()) {
    throw InputError("write to '" + path + "' failed");
  }
}

void write_path_csv(const PathBundle& bundle, const std::string& path,
                    bool compress) {
  if (compress) {
    gzFile gz = gzopen(path.c_str(), "wb");
    if (gz == nullptr) {
      throw InputError("cannot open '" + path + "' for writing");
    }
    bool ok = true;
    write_path_rows(bundle, [gz, &ok](const char* data, std::size_t n) {
      if (ok && gzwrite(gz, data, static_cast<unsigned>(n)) !=
                    static_cast<int>(n)) {
        ok = false;
      }
    });
    const int rc = gzclose(gz);
    if (!ok || rc != Z_OK) {
      throw InputError("write to '" + path + "' failed");
    }
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    throw InputError("cannot open '" + path + "' for writing");
  }
  write_path_rows(bundle, [&f](const char* data, std::size_t n) {
    f.write(data, static_cast<std::streamsize>(n));
  });
  if (!f.good()) {
    throw InputError("write to '" + path + "' failed");
  }
}

MarketParams parse_market_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    throw InputError("cannot open parameter file '" + path + "'");
  }
  std::ostringstream buf;
  buf << f.rdbuf();
  const std::string text = buf.str();
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // e.byte is the 1-based offset of the last processed character.
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min(text.size(), e.byte > 0 ? e.byte - 1 : 0);
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw InputError(path + ":" + std::to_string(line) + ":" +
                     std::to_string(col) + ": " + e.what());
  }
  try {
    return market_from_json(j);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

}  // namespace spreadopt

#pragma once

// JSON configuration, result tables and spec hashing.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "nodalab/experiments.hpp"
#include "nodalab/geometry.hpp"

namespace nodalab {

using json = nlohmann::json;

/// Malformed or invalid configuration. line/column are 1-based; 0 when the
/// problem is not tied to a location in the text.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
      : std::runtime_error(what), line_(line), column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_, column_;
};

inline void to_json(json& j, const DomainSpec& s) {
  j = json{{"a", s.a},
           {"b", s.b},
           {"eps", s.eps},
           {"profile", {{"kind", std::string(to_string(s.profile.kind))}, {"rate", s.profile.rate}}},
           {"L", s.L},
           {"boundary_samples", s.boundary_samples}};
}

inline void from_json(const json& j, DomainSpec& s) {
  s = DomainSpec{};
  if (j.contains("a")) j.at("a").get_to(s.a);
  if (j.contains("b")) j.at("b").get_to(s.b);
  if (j.contains("eps")) j.at("eps").get_to(s.eps);
  if (j.contains("L")) j.at("L").get_to(s.L);
  if (j.contains("boundary_samples")) j.at("boundary_samples").get_to(s.boundary_samples);
  if (j.contains("profile")) {
    const auto& p = j.at("profile");
    if (p.contains("kind")) s.profile.kind = profile_kind_from_string(p.at("kind").get<std::string>());
    if (p.contains("rate")) p.at("rate").get_to(s.profile.rate);
  }
}

inline void to_json(json& j, const Numerics& n) {
  j = json{{"target_h", n.target_h},       {"tube_layers", n.tube_layers}, {"tol", n.tol},
           {"refinements", n.refinements}, {"per_sector", n.per_sector},   {"seed", n.seed}};
}

inline void from_json(const json& j, Numerics& n) {
  n = Numerics{};
  if (j.contains("target_h")) j.at("target_h").get_to(n.target_h);
  if (j.contains("tube_layers")) j.at("tube_layers").get_to(n.tube_layers);
  if (j.contains("tol")) j.at("tol").get_to(n.tol);
  if (j.contains("refinements")) j.at("refinements").get_to(n.refinements);
  if (j.contains("per_sector")) j.at("per_sector").get_to(n.per_sector);
  if (j.contains("seed")) j.at("seed").get_to(n.seed);
  if (j.contains("workers")) j.at("workers").get_to(n.workers);
}

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"spectrum", "bracket", "eps-sweep", "sectors", "verdict"};
  return names;
}

struct RunConfig {
  DomainSpec domain;
  Numerics numerics;
  std::string experiment = "spectrum";
  std::string output_dir = ".";
  std::vector<double> eps_list{0.4, 0.2, 0.1, 0.05};
  std::vector<double> lengths{4.0, 6.0, 8.0};
  int kmax = 3;
};

inline std::vector<std::string> config_violations(const RunConfig& c) {
  auto out = spec_violations(c.domain);
  const auto& n = c.numerics;
  if (n.target_h < 0.0) out.push_back("numerics.target_h must be positive");
  if (n.tube_layers < 1) out.push_back("numerics.tube_layers must be positive");
  if (!(n.tol > 0.0)) out.push_back("numerics.tol must be positive");
  if (n.refinements < 0) out.push_back("numerics.refinements must be nonnegative");
  if (n.per_sector < 1) out.push_back("numerics.per_sector must be positive");
  if (c.kmax < 1) out.push_back("kmax must be positive");
  if (std::find(experiment_names().begin(), experiment_names().end(), c.experiment) == experiment_names().end()) {
    out.push_back("unknown experiment '" + c.experiment + "'");
  }
  if (c.experiment == "eps-sweep" && c.eps_list.empty()) out.push_back("eps-sweep needs a nonempty eps list");
  for (double e : c.eps_list) {
    if (!(e > 0.0)) out.push_back("eps list entries must be positive");
  }
  for (double L : c.lengths) {
    if (!(L > 0.0)) out.push_back("lengths must be positive");
  }
  return out;
}

inline void to_json(json& j, const RunConfig& c) {
  j = json{{"domain", c.domain},     {"numerics", c.numerics}, {"experiment", c.experiment},
           {"output_dir", c.output_dir}, {"eps", c.eps_list},  {"lengths", c.lengths},
           {"kmax", c.kmax}};
}

namespace detail {

inline std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace detail

/// Parses a RunConfig document; missing keys keep their defaults.
inline RunConfig parse_run_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // byte is the 1-based position just past the offending character
    const auto [line, col] = detail::line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ConfigError("malformed JSON at line " + std::to_string(line) + ", column " + std::to_string(col), line, col);
  }
  RunConfig c;
  try {
    if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
    if (j.contains("domain")) c.domain = j.at("domain").get<DomainSpec>();
    if (j.contains("numerics")) c.numerics = j.at("numerics").get<Numerics>();
    if (j.contains("experiment")) c.experiment = j.at("experiment").get<std::string>();
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("eps")) c.eps_list = j.at("eps").get<std::vector<double>>();
    if (j.contains("lengths")) c.lengths = j.at("lengths").get<std::vector<double>>();
    if (j.contains("kmax")) c.kmax = j.at("kmax").get<int>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
  const auto bad = config_violations(c);
  if (!bad.empty()) throw ConfigError("invalid configuration: " + bad.front());
  return c;
}

inline DomainSpec parse_domain_spec(const std::string& text) {
  try {
    return json::parse(text).get<DomainSpec>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid domain: ") + e.what());
  }
}

/// FNV-1a (64 bit) of the canonical JSON form, as 16 hex digits.
inline std::string spec_hash(const DomainSpec& s) {
  const std::string canonical = json(s).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// CSV tables. Numbers use a fixed printf format so identical inputs give
// identical bytes.

inline std::string fmt(double x) {
  if (std::isnan(x)) return "";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

inline std::string sector_cell(const Sector& s) {
  return std::string(to_string(s.parity_x1)) + "/" + std::string(to_string(s.parity_x2));
}

inline void write_spectrum_csv(std::ostream& os, const SpectrumTable& t, bool header = true) {
  if (header) os << "spec_hash,k,sector,lambda,lambda_N,lambda_D,residual\n";
  const std::string hash = spec_hash(t.spec);
  for (const auto& r : t.rows) {
    os << hash << ',' << r.k << ',' << sector_cell(r.sector) << ',' << fmt(r.lambda) << ',' << fmt(r.lambda_N) << ','
       << fmt(r.lambda_D) << ',' << fmt(r.residual) << '\n';
  }
}

inline void write_sweep_csv(std::ostream& os, const SweepResult& s) {
  os << "eps,k,sector,lambda,lambda_N,lambda_D,reference,difference,ratio,certified\n";
  for (const auto& r : s.rows) {
    os << fmt(r.eps) << ',' << r.k << ',' << sector_cell(r.sector) << ',' << fmt(r.lambda) << ',' << fmt(r.lambda_N)
       << ',' << fmt(r.lambda_D) << ',' << fmt(r.reference) << ',' << fmt(r.difference) << ',' << fmt(r.ratio) << ','
       << (r.certified ? 1 : 0) << '\n';
  }
}

inline void write_bracket_csv(std::ostream& os, const std::vector<BracketCertificate>& certs, bool header = true) {
  if (header) os << "sector,L,index,lambda_N,lambda_D,valid,threshold,gap,ground_gap\n";
  for (const auto& c : certs) {
    for (const auto& i : c.intervals) {
      os << sector_cell(c.sector) << ',' << fmt(c.L) << ',' << i.index + 1 << ',' << fmt(i.lambda_N) << ','
         << fmt(i.lambda_D) << ',' << (i.valid ? 1 : 0) << ',' << fmt(c.threshold) << ',' << fmt(c.gap) << ','
         << fmt(c.ground_gap) << '\n';
    }
  }
}

inline void write_competition_csv(std::ostream& os, const Competition& c) {
  os << "rank,contender,lambda\n";
  for (std::size_t i = 0; i < c.contenders.size(); ++i) {
    os << i + 1 << ',' << c.contenders[i].name << ',' << fmt(c.contenders[i].lambda) << '\n';
  }
}

inline json optional_class(const std::optional<NodalClass>& c) {
  return c ? json(std::string(to_string(*c))) : json(nullptr);
}

inline json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline json competition_json(const Competition& c) {
  json contenders = json::array();
  for (const auto& x : c.contenders) contenders.push_back({{"name", x.name}, {"lambda", x.lambda}});
  return json{{"contenders", contenders},
              {"near_crossing", c.near_crossing},
              {"predicted", optional_class(c.predicted)},
              {"measured", optional_class(c.measured)},
              {"agrees", c.agrees()},
              {"nodal_domains", c.nodal_domains},
              {"min_dist", finite_or_null(c.min_dist)},
              {"touches_boundary", c.touches_boundary},
              {"tol_geo", c.tol_geo}};
}

inline json verdict_json(const Verdict& v) {
  json lengths = json::array();
  for (const auto& r : v.lengths) {
    lengths.push_back({{"L", r.L},
                       {"classification", optional_class(r.classification)},
                       {"min_dist", finite_or_null(r.min_dist)},
                       {"expected_dist", r.expected_dist},
                       {"touches_boundary", r.touches_boundary},
                       {"lambda1", r.lambda1},
                       {"lambda2", r.lambda2}});
  }
  json courant = json::array();
  for (const auto& c : v.courant) courant.push_back({{"k", c.k}, {"nodal_domains", c.nodal_domains}, {"bound", c.bound}});
  return json{{"case", v.which == VerdictCase::i ? "i" : "ii"},
              {"domain", v.spec},
              {"owner", v.owner},
              {"nodal_classification", optional_class(v.classification)},
              {"min_dist", finite_or_null(v.min_dist)},
              {"touches_boundary", v.touches_boundary},
              {"tol_geo", v.tol_geo},
              {"nodal_domains", v.nodal_domains},
              {"lambda2", v.lambda2},
              {"threshold", finite_or_null(v.threshold)},
              {"discrete_below_threshold", v.certificate_valid},
              {"lengths", lengths},
              {"courant", courant},
              {"passed", v.passed()},
              {"failures", v.failures}};
}

}  // namespace nodalab

// nodalab: spectra, bracketing, sweeps and nodal-line verdicts for a
// rectangle with thin tubes attached along the x2 axis.
//
// Exit status: 0 success, 1 verdict failure, 2 usage/config error,
// 3 solver failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nodalab/experiments.hpp"
#include "nodalab/io.hpp"
#include "nodalab/svg.hpp"

namespace fs = std::filesystem;
using namespace nodalab;

namespace {

enum Exit { kOk = 0, kVerdictFailed = 1, kUsage = 2, kSolver = 3 };

struct Flags {
  std::string config;
  std::string preset;
  std::vector<double> eps;
  int kmax = 0;
  std::string out;
  std::uint64_t seed = 0;
  bool seed_set = false;
  double target_h = 0.0;
  double L = 0.0;
  bool figure = false;
};

RunConfig preset(const std::string& name) {
  RunConfig c;
  c.domain = DomainSpec{};
  c.domain.a = 2.0;
  c.domain.b = 1.0;
  c.domain.eps = 0.1;
  if (name == "theorem-i") {
    c.domain.profile = {ProfileKind::constant, 1.0};
    c.domain.L = 6.0;
  } else if (name == "theorem-ii") {
    c.domain.profile = {ProfileKind::exp_decay, 1.0};
    c.domain.L = 8.0;
    c.lengths = {4.0, 6.0, 8.0};
  } else {
    throw ConfigError("unknown preset '" + name + "' (known: theorem-i, theorem-ii)");
  }
  return c;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig resolve(const Flags& f, const std::string& experiment) {
  RunConfig c;
  if (!f.config.empty()) c = parse_run_config(read_file(f.config));
  if (!f.preset.empty()) {
    if (!f.config.empty()) throw ConfigError("--config and --preset are mutually exclusive");
    c = preset(f.preset);
  }
  c.experiment = experiment == "render" ? c.experiment : experiment;
  if (!f.eps.empty()) {
    if (experiment == "eps-sweep") {
      c.eps_list = f.eps;
    } else {
      if (f.eps.size() != 1) throw ConfigError("--eps takes a single value outside eps-sweep");
      c.domain.eps = f.eps.front();
    }
  }
  if (f.kmax > 0) c.kmax = f.kmax;
  if (f.seed_set) c.numerics.seed = f.seed;
  if (f.target_h > 0.0) c.numerics.target_h = f.target_h;
  if (f.L > 0.0) {
    c.domain.L = f.L;
    c.lengths = {f.L};
  }
  if (!f.out.empty()) c.output_dir = f.out;
  const auto bad = config_violations(c);
  if (!bad.empty()) throw ConfigError(bad.front());
  return c;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + p.string() + "'");
  out << text;
}

template <class Fn>
std::string capture(Fn&& fn) {
  std::ostringstream ss;
  fn(ss);
  return ss.str();
}

int run_spectrum_cmd(const RunConfig& c, const fs::path& dir) {
  const auto table = merged_spectrum(c.domain, c.numerics, true);
  write_text(dir / "spectrum.csv", capture([&](auto& os) { write_spectrum_csv(os, table); }));
  write_text(dir / "domain.json", json(c.domain).dump(2) + "\n");
  std::printf("spectrum: %zu eigenvalues, lambda_1=%.10g (%s), %d below threshold -> %s\n", table.rows.size(),
              table.rows.empty() ? 0.0 : table.rows[0].lambda,
              table.rows.empty() ? "-" : label(table.rows[0].sector).c_str(), table.certified_count(),
              (dir / "spectrum.csv").string().c_str());
  return kOk;
}

int run_bracket_cmd(const RunConfig& c, const fs::path& dir) {
  std::vector<BracketCertificate> certs;
  const Mesh mesh = mesh_ladder(c.domain, c.numerics).back();
  for (const auto& s : kParitySectors) certs.push_back(bracket(c.domain, s, c.kmax, c.numerics, mesh));
  write_text(dir / "bracket.csv", capture([&](auto& os) { write_bracket_csv(os, certs); }));
  bool valid = true;
  for (const auto& cert : certs) valid &= cert.valid();
  std::printf("bracket: L=%g, (anti,sym) ground gap %.3e, certificates %s -> %s\n", c.domain.L, certs[1].ground_gap,
              valid ? "valid" : "INVALID (above threshold)", (dir / "bracket.csv").string().c_str());
  return kOk;
}

int run_sweep_cmd(const RunConfig& c, const fs::path& dir) {
  const auto sweep = eps_sweep(c.domain, c.eps_list, c.kmax, c.numerics);
  write_text(dir / "sweep.csv", capture([&](auto& os) { write_sweep_csv(os, sweep); }));
  std::printf("eps-sweep: %zu eps values, kmax=%d -> %s\n", c.eps_list.size(), c.kmax,
              (dir / "sweep.csv").string().c_str());
  return kOk;
}

int run_sectors_cmd(const RunConfig& c, const fs::path& dir) {
  const auto comp = sector_competition(c.domain, c.numerics);
  write_text(dir / "sectors.csv", capture([&](auto& os) { write_competition_csv(os, comp); }));
  write_text(dir / "sectors.json", competition_json(comp).dump(2) + "\n");
  std::printf("sectors: lambda_2 owner %s, predicted %s, measured %s%s\n", comp.owner().name.c_str(),
              comp.predicted ? std::string(to_string(*comp.predicted)).c_str() : "-",
              comp.measured ? std::string(to_string(*comp.measured)).c_str() : "-",
              comp.near_crossing ? " (near crossing, not classified)" : "");
  return kOk;
}

Panel verdict_panel(const Verdict& v) {
  std::string caption = v.which == VerdictCase::i ? "(i) constant tube" : "(ii) narrowing tube";
  char buf[64];
  std::snprintf(buf, sizeof buf, ", dist %.3g", v.min_dist);
  return {v.boundary, v.nodal_line, caption + buf};
}

int run_verdict_cmd(const RunConfig& c, const fs::path& dir) {
  const auto v = theorem_verdict(c.domain, c.numerics, c.lengths);
  write_text(dir / "verdict.json", verdict_json(v).dump(2) + "\n");
  write_text(dir / "domain.svg", render_svg(verdict_panel(v)));
  write_text(dir / "nodal.csv", capture([&](auto& os) { write_nodal_csv(os, v.nodal_line); }));
  std::printf("verdict: case %s, %s, min_dist=%.6g, touches_boundary=%s -> %s\n",
              v.which == VerdictCase::i ? "i" : "ii",
              v.classification ? std::string(to_string(*v.classification)).c_str() : "none", v.min_dist,
              v.touches_boundary ? "true" : "false", v.passed() ? "PASSED" : "FAILED");
  for (const auto& f : v.failures) std::fprintf(stderr, "  %s\n", f.c_str());
  return v.passed() ? kOk : kVerdictFailed;
}

int run_render_cmd(const RunConfig& c, const fs::path& dir, bool figure) {
  if (figure) {
    Numerics num = c.numerics;
    num.refinements = 0;
    std::vector<Panel> panels;
    for (const char* name : {"theorem-i", "theorem-ii"}) {
      const auto comp = sector_competition(preset(name).domain, num);
      panels.push_back({comp.boundary, comp.segments,
                        std::string(name) == "theorem-i" ? "(i) constant tube" : "(ii) narrowing tube"});
    }
    write_text(dir / "figure.svg", render_svg(panels));
    std::printf("render: %s\n", (dir / "figure.svg").string().c_str());
    return kOk;
  }
  const auto comp = sector_competition(c.domain, c.numerics);
  write_text(dir / "domain.svg", render_svg(Panel{comp.boundary, comp.segments, "lambda_2 owner " + comp.owner().name}));
  std::printf("render: %s\n", (dir / "domain.svg").string().c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Eigenvalues and nodal lines of a rectangle with thin tubes"};
  app.require_subcommand(1);
  Flags flags;
  std::vector<std::pair<std::string, CLI::App*>> subs;
  for (const char* name : {"spectrum", "bracket", "eps-sweep", "sectors", "verdict", "render"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", flags.config, "RunConfig JSON file");
    sub->add_option("--preset", flags.preset, "theorem-i or theorem-ii");
    sub->add_option("--eps", flags.eps, "tube half-width (comma list for eps-sweep)")->delimiter(',');
    sub->add_option("--kmax", flags.kmax, "eigenpairs per table / sector");
    sub->add_option("--out", flags.out, "output directory");
    sub->add_option_function<std::uint64_t>(
        "--seed", [&](std::uint64_t s) {
          flags.seed = s;
          flags.seed_set = true;
        }, "start-block seed");
    sub->add_option("--target-h", flags.target_h, "base mesh size");
    sub->add_option("--L", flags.L, "truncation length of the tube");
    subs.push_back({name, sub});
  }
  subs.back().second->add_flag("--figure", flags.figure, "two-panel figure of both presets");
  subs[0].second->description("merged four-sector spectrum with Dirichlet/Neumann brackets");
  subs[1].second->description("Dirichlet/Neumann bracketing of the truncation, per sector");
  subs[2].second->description("eigenvalues against eps, with rectangle references");
  subs[3].second->description("which symmetry sector owns lambda_2");
  subs[4].second->description("nodal-line verdict for a constant or decaying tube");
  subs[5].second->description("SVG of the domain and the nodal line of u_2");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  std::string cmd;
  for (const auto& [name, sub] : subs) {
    if (sub->parsed()) cmd = name;
  }
  try {
    const RunConfig c = resolve(flags, cmd);
    const fs::path dir(c.output_dir);
    fs::create_directories(dir);
    if (cmd == "spectrum") return run_spectrum_cmd(c, dir);
    if (cmd == "bracket") return run_bracket_cmd(c, dir);
    if (cmd == "eps-sweep") return run_sweep_cmd(c, dir);
    if (cmd == "sectors") return run_sectors_cmd(c, dir);
    if (cmd == "verdict") return run_verdict_cmd(c, dir);
    return run_render_cmd(c, dir, flags.figure);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n\n%s", e.what(), app.help().c_str());
    return kUsage;
  } catch (const SolverError& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return kSolver;
  } catch (const std::invalid_argument& e) {  // includes GeometryError
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const MeshError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kSolver;
  }
}

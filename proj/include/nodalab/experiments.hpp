#pragma once

// Studies built on the solver: merged sector spectra, Dirichlet/Neumann
// bracketing of the truncation, the small-eps sweep, sector competition for
// the second eigenvalue and the two nodal-line verdicts.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "nodalab/eigensolve.hpp"
#include "nodalab/fem.hpp"
#include "nodalab/geometry.hpp"
#include "nodalab/mesh.hpp"
#include "nodalab/nodal.hpp"

namespace nodalab {

struct Numerics {
  double target_h = 0.0;  // <= 0: 0.05*b
  int tube_layers = 4;
  double tol = 1e-8;
  int refinements = 2;     // levels above the base mesh; the two finest feed Richardson
  int per_sector = 4;      // eigenpairs computed in every parity sector
  std::uint64_t seed = 0x5EED;
  int workers = 0;         // <= 0: hardware concurrency
  int polish_steps = 60;   // inverse-iteration sweeps for tunnelling-gap vectors
  std::size_t factor_memory_cap = std::size_t{2} << 30;

  double mesh_size(const DomainSpec& s) const { return target_h > 0.0 ? target_h : 0.05 * s.b; }

  EigenOptions eigen() const {
    EigenOptions o;
    o.tol = tol;
    o.seed = seed;
    o.factor_memory_cap = factor_memory_cap;
    return o;
  }
};

// ---------------------------------------------------------------------------
// Job pool: results land in caller-owned slots indexed by job, so output
// order never depends on scheduling.

inline void run_jobs(std::size_t count, int workers, const std::function<void(std::size_t)>& job) {
  std::size_t nthreads = workers > 0 ? static_cast<std::size_t>(workers) : std::thread::hardware_concurrency();
  nthreads = std::clamp<std::size_t>(nthreads, 1, std::max<std::size_t>(1, count));
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        job(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// ---------------------------------------------------------------------------
// Rectangle reference

struct RectangleMode {
  int m = 0, n = 0;
  double lambda = 0.0;
  Sector sector;
};

/// Separation of variables on (-a,a)x(-b,b): sin/cos products with
/// lambda_mn = (m pi / 2a)^2 + (n pi / 2b)^2; odd m is even in x1.
inline std::vector<RectangleMode> rectangle_modes(double a, double b, int count) {
  std::vector<RectangleMode> all;
  const int span = count + 2;
  for (int m = 1; m <= span; ++m) {
    for (int n = 1; n <= span; ++n) {
      const double l1 = m * std::numbers::pi / (2.0 * a), l2 = n * std::numbers::pi / (2.0 * b);
      all.push_back({m, n, l1 * l1 + l2 * l2,
                     {m % 2 ? Parity::sym : Parity::anti, n % 2 ? Parity::sym : Parity::anti, CutBC::dirichlet}});
    }
  }
  std::stable_sort(all.begin(), all.end(), [](const auto& x, const auto& y) { return x.lambda < y.lambda; });
  all.resize(std::min<std::size_t>(all.size(), static_cast<std::size_t>(count)));
  return all;
}

inline double richardson(double coarse, double fine) { return (4.0 * fine - coarse) / 3.0; }

// ---------------------------------------------------------------------------
// Multi-level sector solves

/// Base mesh plus `refinements` nested uniform refinements.
inline std::vector<Mesh> mesh_ladder(const DomainSpec& spec, const Numerics& num) {
  validate(spec);
  std::vector<Mesh> levels;
  levels.push_back(generate_mesh(spec, MeshOptions{num.mesh_size(spec), num.tube_layers}));
  for (int r = 0; r < num.refinements; ++r) levels.push_back(refine(levels.back()));
  return levels;
}

struct SpectrumRow {
  int k = 0;                // global index, 1-based
  double lambda = 0.0;      // Richardson value when two levels are available
  double lambda_fine = 0.0;
  double lambda_coarse = std::numeric_limits<double>::quiet_NaN();
  Sector sector;
  int sector_rank = 0;      // 0-based index within the sector
  double residual = 0.0;
  bool degenerate = false;
  double lambda_N = std::numeric_limits<double>::quiet_NaN();
  double lambda_D = std::numeric_limits<double>::quiet_NaN();
  bool certified = false;
};

struct SpectrumTable {
  DomainSpec spec;
  double threshold = std::numeric_limits<double>::infinity();
  std::vector<SpectrumRow> rows;

  int certified_count() const {
    return static_cast<int>(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.certified; }));
  }
};

/// Everything computed for a merged spectrum; kept for nodal post-processing.
struct SpectrumRun {
  std::vector<Mesh> levels;
  std::array<EigenResult, 4> fine;                    // Dirichlet cut, finest level
  std::optional<std::array<EigenResult, 4>> coarse;   // Dirichlet cut, next-finest level
  std::optional<std::array<EigenResult, 4>> neumann;  // Neumann cut, finest level
  SpectrumTable table;

  const Mesh& fine_mesh() const { return levels.back(); }
  const EigenResult& result_for(const SpectrumRow& r) const {
    for (std::size_t s = 0; s < 4; ++s) {
      if (kParitySectors[s].same_parities(r.sector)) return fine[s];
    }
    throw std::logic_error("unknown sector");
  }
};

/// Solves the four parity sectors (and optionally the Neumann-cut variants)
/// on the two finest levels and merges them into one ascending table.
inline SpectrumRun run_spectrum(const std::vector<Mesh>& levels, const DomainSpec& spec, const Numerics& num,
                                bool with_bracket) {
  if (levels.empty()) throw std::invalid_argument("empty mesh ladder");
  SpectrumRun run;
  run.levels = levels;
  const bool two_levels = levels.size() >= 2;

  struct Job {
    std::size_t level;
    Sector sector;
  };
  std::vector<Job> jobs;
  const std::size_t finest = levels.size() - 1;
  for (const auto& s : kParitySectors) jobs.push_back({finest, s});
  if (two_levels) {
    for (const auto& s : kParitySectors) jobs.push_back({finest - 1, s});
  }
  if (with_bracket) {
    for (const auto& s : kParitySectors) jobs.push_back({finest, s.with_cut(CutBC::neumann)});
  }
  std::vector<EigenResult> results(jobs.size());
  const EigenOptions eo = num.eigen();
  run_jobs(jobs.size(), num.workers, [&](std::size_t i) {
    const auto sys = sector_system(levels[jobs[i].level], jobs[i].sector);
    results[i] = smallest_eigenpairs(sys, static_cast<int>(std::min<Eigen::Index>(num.per_sector, sys.dofs())), eo);
  });
  for (std::size_t s = 0; s < 4; ++s) run.fine[s] = std::move(results[s]);
  std::size_t at = 4;
  if (two_levels) {
    run.coarse.emplace();
    for (std::size_t s = 0; s < 4; ++s) (*run.coarse)[s] = std::move(results[at + s]);
    at += 4;
  }
  if (with_bracket) {
    run.neumann.emplace();
    for (std::size_t s = 0; s < 4; ++s) (*run.neumann)[s] = std::move(results[at + s]);
  }

  SpectrumTable& t = run.table;
  t.spec = spec;
  t.threshold = essential_threshold(spec);
  for (std::size_t s = 0; s < 4; ++s) {
    for (std::size_t i = 0; i < run.fine[s].size(); ++i) {
      SpectrumRow r;
      r.sector = kParitySectors[s];
      r.sector_rank = static_cast<int>(i);
      r.lambda_fine = run.fine[s].values[i];
      r.residual = run.fine[s].residuals[i];
      r.lambda = r.lambda_fine;
      if (run.coarse && i < (*run.coarse)[s].size()) {
        r.lambda_coarse = (*run.coarse)[s].values[i];
        r.lambda = richardson(r.lambda_coarse, r.lambda_fine);
      }
      r.lambda_D = r.lambda_fine;
      if (run.neumann && i < (*run.neumann)[s].size()) r.lambda_N = (*run.neumann)[s].values[i];
      r.certified = r.lambda_D < t.threshold;
      t.rows.push_back(r);
    }
  }
  std::stable_sort(t.rows.begin(), t.rows.end(), [](const auto& x, const auto& y) { return x.lambda < y.lambda; });
  std::vector<double> sorted;
  for (const auto& r : t.rows) sorted.push_back(r.lambda);
  const auto cl = degenerate_clusters(sorted, 1e-6);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    t.rows[i].k = static_cast<int>(i + 1);
    t.rows[i].degenerate = (i > 0 && cl[i - 1] == cl[i]) || (i + 1 < cl.size() && cl[i + 1] == cl[i]);
  }
  // Per-sector truncation: beyond the smallest "last computed" value of any
  // sector the merged order may miss eigenvalues, so cut the table there.
  double horizon = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < 4; ++s) {
    if (static_cast<Eigen::Index>(run.fine[s].size()) == num.per_sector) {
      double last = run.fine[s].values.back();
      if (run.coarse) last = richardson((*run.coarse)[s].values.back(), last);
      horizon = std::min(horizon, last);
    }
  }
  while (!t.rows.empty() && t.rows.back().lambda > horizon) t.rows.pop_back();
  return run;
}

inline SpectrumRun run_spectrum(const DomainSpec& spec, const Numerics& num, bool with_bracket) {
  return run_spectrum(mesh_ladder(spec, num), spec, num, with_bracket);
}

inline SpectrumTable merged_spectrum(const DomainSpec& spec, const Numerics& num, bool with_bracket = false) {
  return run_spectrum(spec, num, with_bracket).table;
}

/// Rectangle-only FEM spectrum on every level of the refinement ladder,
/// matched against the separation-of-variables modes.
struct RectangleLevel {
  double h = 0.0;
  std::vector<double> values;  // merged ascending
};

inline std::vector<RectangleLevel> rectangle_spectrum(double a, double b, int count, const Numerics& num) {
  std::vector<Mesh> levels{generate_rectangle_mesh(a, b, num.target_h > 0.0 ? num.target_h : 0.05 * b)};
  for (int r = 0; r < num.refinements; ++r) levels.push_back(refine(levels.back()));
  std::vector<std::vector<double>> per_job(levels.size() * 4);
  const EigenOptions eo = num.eigen();
  run_jobs(per_job.size(), num.workers, [&](std::size_t i) {
    const auto sys = sector_system(levels[i / 4], kParitySectors[i % 4]);
    per_job[i] = smallest_eigenpairs(sys, num.per_sector, eo).values;
  });
  std::vector<RectangleLevel> out;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    RectangleLevel lv;
    lv.h = longest_edge(levels[l]);
    for (std::size_t s = 0; s < 4; ++s) lv.values.insert(lv.values.end(), per_job[4 * l + s].begin(), per_job[4 * l + s].end());
    std::sort(lv.values.begin(), lv.values.end());
    lv.values.resize(std::min<std::size_t>(lv.values.size(), static_cast<std::size_t>(count)));
    out.push_back(std::move(lv));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Bracketing

struct BracketInterval {
  int index = 0;  // 0-based within the sector
  double lambda_N = 0.0;
  double lambda_D = 0.0;
  bool valid = false;  // lambda_D below the threshold
};

struct BracketCertificate {
  Sector sector;
  double L = 0.0;
  double threshold = std::numeric_limits<double>::infinity();
  std::vector<BracketInterval> intervals;
  double gap = 0.0;         // lambda_D - lambda_N of the sector ground state, by subtraction
  double ground_gap = 0.0;  // the same gap from the discrete Green identity on the cut

  bool valid() const {
    return std::all_of(intervals.begin(), intervals.end(), [](const auto& i) { return i.valid; });
  }
  bool tight(double tolerance) const { return std::max(gap, ground_gap) <= tolerance; }
};

/// lambda_D - lambda_N for the lowest pair, from
///   (lambda_D - lambda_N) v_I' M_II u_I = -v_I' (K_IP - lambda_N M_IP) u_P,
/// with I the interior unknowns and P the cut unknowns of the Neumann problem.
/// Every term on the right is nonnegative, so the gap is resolved even when
/// it is far below the rounding level of the eigenvalues themselves.
inline double tunnelling_gap(const Mesh& m, const Assembly& full, const EigenResult& dir, const EigenResult& neu) {
  const std::size_t nv = m.num_vertices();
  const Eigen::VectorXd v = vertex_values(dir, 0, nv);
  const Eigen::VectorXd u = vertex_values(neu, 0, nv);
  std::vector<bool> cut(nv, false);
  for (const auto& be : m.boundary_edges) {
    if (be.tag == EdgeTag::cut) cut[be.v[0]] = cut[be.v[1]] = true;
  }
  Eigen::VectorXd uP = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nv));
  Eigen::VectorXd uI = u;
  for (std::size_t i = 0; i < nv; ++i) {
    if (cut[i]) {
      uP(static_cast<Eigen::Index>(i)) = u(static_cast<Eigen::Index>(i));
      uI(static_cast<Eigen::Index>(i)) = 0.0;
    }
  }
  const double lamN = neu.values[0];
  const Eigen::VectorXd coupling = full.stiffness * uP - lamN * (full.mass * uP);
  const double num = -v.dot(coupling);
  const double den = v.dot(full.mass * uI);
  return num / den;
}

/// Dirichlet (upper) and Neumann (lower) cut conditions for one parity class.
inline BracketCertificate bracket(const DomainSpec& spec, const Sector& parities, int k, const Numerics& num,
                                  std::optional<Mesh> mesh = std::nullopt) {
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  if (!mesh) mesh = mesh_ladder(spec, num).back();
  EigenOptions eo = num.eigen();
  eo.ground_polish_steps = num.polish_steps;
  std::array<EigenResult, 2> res;
  const std::array<CutBC, 2> cuts{CutBC::dirichlet, CutBC::neumann};
  run_jobs(2, num.workers, [&](std::size_t i) {
    res[i] = smallest_eigenpairs(sector_system(*mesh, parities.with_cut(cuts[i])), k, eo);
  });
  BracketCertificate c;
  c.sector = parities;
  c.L = spec.L;
  c.threshold = essential_threshold(spec);
  for (int i = 0; i < k; ++i) {
    c.intervals.push_back({i, res[1].values[i], res[0].values[i], res[0].values[i] < c.threshold});
  }
  c.gap = res[0].values[0] - res[1].values[0];
  c.ground_gap = tunnelling_gap(*mesh, assemble(*mesh), res[0], res[1]);
  return c;
}

// ---------------------------------------------------------------------------
// eps sweep

struct SweepRow {
  double eps = 0.0;
  int k = 0;
  double lambda = 0.0;
  double lambda_N = 0.0;
  double lambda_D = 0.0;
  double reference = 0.0;  // lambda_k of the bare rectangle
  double difference = 0.0; // |lambda - reference|
  double ratio = std::numeric_limits<double>::quiet_NaN();  // difference / previous eps's difference
  bool certified = false;
  Sector sector;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<std::pair<double, int>> certified_counts;  // (eps, count)
  std::vector<SpectrumTable> tables;
};

inline SweepResult eps_sweep(const DomainSpec& base, const std::vector<double>& eps_list, int kmax, const Numerics& num) {
  if (kmax < 1) throw std::invalid_argument("kmax must be at least 1");
  const auto ref = rectangle_modes(base.a, base.b, kmax);
  SweepResult out;
  std::vector<double> prev(kmax, std::numeric_limits<double>::quiet_NaN());
  for (double eps : eps_list) {
    DomainSpec s = base;
    s.eps = eps;
    validate(s);
    auto table = merged_spectrum(s, num, true);
    if (static_cast<int>(table.rows.size()) < kmax) {
      throw std::runtime_error("only " + std::to_string(table.rows.size()) +
                               " eigenvalues resolved; raise per_sector");
    }
    for (int k = 0; k < kmax; ++k) {
      const auto& r = table.rows[k];
      SweepRow row;
      row.eps = eps;
      row.k = k + 1;
      row.lambda = r.lambda;
      row.lambda_N = r.lambda_N;
      row.lambda_D = r.lambda_D;
      row.reference = ref[k].lambda;
      row.difference = std::abs(r.lambda - ref[k].lambda);
      row.ratio = row.difference / prev[k];
      row.certified = r.certified;
      row.sector = r.sector;
      prev[k] = row.difference;
      out.rows.push_back(row);
    }
    out.certified_counts.push_back({eps, table.certified_count()});
    out.tables.push_back(std::move(table));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sector competition for lambda_2

struct Contender {
  std::string name;  // e.g. "(anti,sym)#1"
  Sector sector;
  int rank = 0;      // 0-based within the sector
  double lambda = 0.0;
};

struct Competition {
  std::vector<Contender> contenders;  // ascending
  bool near_crossing = false;         // top two within the degeneracy tolerance
  std::optional<NodalClass> predicted;
  std::optional<NodalClass> measured;
  int nodal_domains = 0;
  double min_dist = std::numeric_limits<double>::infinity();
  bool touches_boundary = false;
  double tol_geo = 0.0;
  std::vector<Polyline> segments;  // nodal set of the lambda_2 owner
  FullBoundary boundary;

  bool agrees() const { return !near_crossing && predicted && measured && *predicted == *measured; }
  const Contender& owner() const { return contenders.front(); }
};

inline std::optional<NodalClass> predicted_class(const Sector& s, int rank) {
  if (s.parity_x1 == Parity::anti && s.parity_x2 == Parity::sym) return NodalClass::axis_r;
  if (s.parity_x1 == Parity::sym && s.parity_x2 == Parity::anti) return NodalClass::segment_r_perp;
  if (s.parity_x1 == Parity::sym && s.parity_x2 == Parity::sym && rank == 1) return NodalClass::closed_loop;
  return std::nullopt;
}

inline Competition sector_competition(const SpectrumRun& run) {
  Competition c;
  for (std::size_t s = 0; s < 4; ++s) {
    const int rank = s == 0 ? 1 : 0;
    const auto& res = run.fine[s];
    if (static_cast<int>(res.size()) <= rank) continue;
    double lam = res.values[rank];
    if (run.coarse) lam = richardson((*run.coarse)[s].values[rank], lam);
    c.contenders.push_back({label(kParitySectors[s]) + "#" + std::to_string(rank + 1), kParitySectors[s], rank, lam});
  }
  std::stable_sort(c.contenders.begin(), c.contenders.end(),
                   [](const auto& x, const auto& y) { return x.lambda < y.lambda; });
  const double l0 = c.contenders[0].lambda, l1 = c.contenders[1].lambda;
  c.near_crossing = std::abs(l1 - l0) <= 1e-6 * (1.0 + std::abs(l0));
  if (c.near_crossing) return c;
  const auto& own = c.owner();
  c.predicted = predicted_class(own.sector, own.rank);
  std::size_t s = 0;
  while (!kParitySectors[s].same_parities(own.sector)) ++s;
  const auto f = reconstruct_full(run.fine_mesh(), run.fine[s], static_cast<std::size_t>(own.rank));
  const auto rep = analyze(f);
  c.measured = rep.classification;
  c.nodal_domains = rep.n_nodal_domains;
  c.min_dist = rep.min_dist_to_boundary;
  c.touches_boundary = rep.touches_boundary;
  c.tol_geo = rep.tol_geo;
  c.segments = rep.segments;
  c.boundary = mesh_boundary(f.mesh);
  return c;
}

inline Competition sector_competition(const DomainSpec& spec, const Numerics& num) {
  return sector_competition(run_spectrum(spec, num, false));
}

// ---------------------------------------------------------------------------
// Verdicts

enum class VerdictCase { i, ii };

struct LengthRow {
  double L = 0.0;
  std::optional<NodalClass> classification;
  double min_dist = 0.0;
  double expected_dist = 0.0;  // eps * h(L), the narrowest tube half-width
  bool touches_boundary = false;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};

struct CourantRow {
  int k = 0;
  int nodal_domains = 0;
  int bound = 0;  // k, or the last index of its degenerate cluster
};

struct Verdict {
  VerdictCase which = VerdictCase::i;
  DomainSpec spec;
  std::string owner;
  std::optional<NodalClass> classification;
  double min_dist = 0.0;
  bool touches_boundary = false;
  double tol_geo = 0.0;
  int nodal_domains = 0;
  double lambda2 = 0.0;
  double threshold = std::numeric_limits<double>::infinity();
  bool certificate_valid = false;
  std::vector<CourantRow> courant;
  std::vector<LengthRow> lengths;  // one row per truncation studied
  std::vector<Polyline> nodal_line;  // at the longest truncation
  FullBoundary boundary;
  std::vector<std::string> failures;

  bool passed() const { return failures.empty(); }
};

namespace detail {

inline std::vector<CourantRow> courant_rows(const SpectrumRun& run, int kmax) {
  std::vector<CourantRow> out;
  const ReflectedMesh full = reflect_mesh(run.fine_mesh());
  const auto& rows = run.table.rows;
  for (int k = 1; k <= kmax && k <= static_cast<int>(rows.size()); ++k) {
    const auto& r = rows[k - 1];
    int bound = k;
    while (bound < static_cast<int>(rows.size()) && rows[bound - 1].degenerate && rows[bound].degenerate &&
           std::abs(rows[bound].lambda - rows[bound - 1].lambda) <= 1e-6 * (1.0 + rows[bound - 1].lambda)) {
      ++bound;
    }
    const auto f = reconstruct_full(full, run.fine_mesh(), run.result_for(r), static_cast<std::size_t>(r.sector_rank));
    out.push_back({k, count_nodal_domains(f), bound});
  }
  return out;
}

}  // namespace detail

/// Case (i): constant profile. Case (ii): decaying profile, studied over the
/// given truncation lengths (ascending).
inline Verdict theorem_verdict(const DomainSpec& spec, const Numerics& num, std::vector<double> lengths = {}) {
  validate(spec);
  Verdict v;
  v.spec = spec;
  v.which = spec.profile.decays() ? VerdictCase::ii : VerdictCase::i;
  if (v.which == VerdictCase::ii && lengths.empty()) lengths = {4.0, 6.0, 8.0};
  if (v.which == VerdictCase::i) lengths = {spec.L};

  for (double L : lengths) {
    DomainSpec s = spec;
    s.L = L;
    const auto run = run_spectrum(s, num, v.which == VerdictCase::i);
    const auto comp = sector_competition(run);
    LengthRow row;
    row.L = L;
    row.classification = comp.measured;
    row.min_dist = comp.min_dist;
    row.expected_dist = s.eps * eval_profile(s.profile, L);
    row.touches_boundary = comp.touches_boundary;
    row.lambda1 = run.fine[0].values[0];
    row.lambda2 = run.table.rows.size() > 1 ? run.table.rows[1].lambda_fine : 0.0;
    v.lengths.push_back(row);

    // The headline quantities come from the last (longest) truncation.
    v.owner = comp.owner().name;
    v.classification = comp.measured;
    v.min_dist = comp.min_dist;
    v.touches_boundary = comp.touches_boundary;
    v.tol_geo = comp.tol_geo;
    v.nodal_domains = comp.nodal_domains;
    v.nodal_line = comp.segments;
    v.boundary = comp.boundary;
    v.lambda2 = run.table.rows.size() > 1 ? run.table.rows[1].lambda : 0.0;
    v.threshold = run.table.threshold;
    v.certificate_valid = run.table.rows.size() > 1 && run.table.rows[1].certified;
    if (comp.near_crossing) v.failures.push_back("near crossing at lambda_2 (L=" + std::to_string(L) + ")");
    if (comp.measured != NodalClass::axis_r) {
      v.failures.push_back("nodal line of u_2 is " +
                           (comp.measured ? std::string(to_string(*comp.measured)) : std::string("empty")) +
                           ", expected axis_r (L=" + std::to_string(L) + ")");
    }
    if (comp.touches_boundary) v.failures.push_back("nodal line touches the boundary (L=" + std::to_string(L) + ")");
    if (v.which == VerdictCase::i) {
      v.courant = detail::courant_rows(run, 6);
      if (std::abs(comp.min_dist - s.eps) > 2.0 * comp.tol_geo) {
        v.failures.push_back("distance " + std::to_string(comp.min_dist) + " differs from eps");
      }
      if (!v.certificate_valid) v.failures.push_back("lambda_2 is not below the essential threshold");
      if (comp.nodal_domains != 2) v.failures.push_back("u_2 has " + std::to_string(comp.nodal_domains) + " nodal domains");
      for (const auto& c : v.courant) {
        if (c.nodal_domains > c.bound) v.failures.push_back("Courant bound violated at k=" + std::to_string(c.k));
      }
    } else if (std::abs(row.min_dist - row.expected_dist) > 0.1 * row.expected_dist) {
      v.failures.push_back("distance at L=" + std::to_string(L) + " is not within 10% of eps*h(L)");
    }
  }
  if (v.which == VerdictCase::ii) {
    for (std::size_t i = 1; i < v.lengths.size(); ++i) {
      if (!(v.lengths[i].min_dist < v.lengths[i - 1].min_dist)) v.failures.push_back("distance is not decreasing in L");
    }
    if (v.lengths.size() >= 2) {
      const auto& p = v.lengths[v.lengths.size() - 2];
      const auto& q = v.lengths.back();
      if (std::abs(p.lambda1 - q.lambda1) >= 1e-6 || std::abs(p.lambda2 - q.lambda2) >= 1e-6) {
        v.failures.push_back("lambda_1 or lambda_2 moves by 1e-6 or more between the two longest truncations");
      }
    }
  }
  return v;
}

}  // namespace nodalab

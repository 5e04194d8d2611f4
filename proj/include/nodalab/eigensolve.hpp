#pragma once

// Smallest eigenpairs of K u = lambda M u for SPD K and M.
//
// Shift-invert subspace iteration at sigma = 0: the block is repeatedly
// mapped through K^{-1} M, M-orthonormalized and Rayleigh-Ritz projected.
// K^{-1} comes from a sparse Cholesky factor, or from preconditioned CG when
// the predicted factor would exceed the memory cap.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include "nodalab/errors.hpp"
#include "nodalab/fem.hpp"

namespace nodalab {

struct EigenOptions {
  double tol = 1e-8;
  int max_iterations = 2000;
  int guard = 5;
  std::uint64_t seed = 0x5EED;
  std::size_t factor_memory_cap = std::size_t{2} << 30;  // bytes
  Eigen::Index dense_limit = 200;
  double cluster_rel = 1e-6;
  /// Extra inverse-iteration sweeps applied to the lowest vector after
  /// convergence; resolves its exponentially small tails componentwise.
  int ground_polish_steps = 0;
};

struct IterationRecord {
  int iteration = 0;
  double max_residual = 0.0;
  int converged = 0;
};

struct EigenResult {
  std::vector<double> values;
  Eigen::MatrixXd vectors;  // one M-orthonormal column per value
  std::vector<double> residuals;
  Sector sector;
  int iterations = 0;
  std::vector<int> dof_to_vertex;
  std::vector<int> cluster;  // degenerate-cluster id per value
  std::vector<IterationRecord> log;
  std::string method;

  std::size_t size() const { return values.size(); }

  bool degenerate(std::size_t i) const {
    const int c = cluster.at(i);
    return (i > 0 && cluster[i - 1] == c) || (i + 1 < cluster.size() && cluster[i + 1] == c);
  }
};

/// Groups sorted values whose neighbours are closer than rel*(1+|lambda|).
inline std::vector<int> degenerate_clusters(const std::vector<double>& sorted, double rel) {
  std::vector<int> id(sorted.size(), 0);
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const bool close = std::abs(sorted[i] - sorted[i - 1]) <= rel * (1.0 + std::abs(sorted[i - 1]));
    id[i] = close ? id[i - 1] : id[i - 1] + 1;
  }
  return id;
}

/// Gram-Schmidt (two passes) in the M inner product.
template <class MassMatrix>
Eigen::MatrixXd mass_orthonormalize(const Eigen::MatrixXd& V, const MassMatrix& M, double drop_tol = 1e-10) {
  const Eigen::Index n = V.rows();
  const Eigen::Index p = V.cols();
  if (M.rows() != n || M.cols() != n) throw std::invalid_argument("mass matrix does not match vector length");
  Eigen::MatrixXd Q(n, p);
  Eigen::MatrixXd MQ(n, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    Eigen::VectorXd v = V.col(j);
    Eigen::VectorXd Mv = M * v;
    const double initial = std::sqrt(std::max(0.0, v.dot(Mv)));
    for (int pass = 0; pass < 2 && j > 0; ++pass) {
      const Eigen::VectorXd coeff = MQ.leftCols(j).transpose() * v;
      v.noalias() -= Q.leftCols(j) * coeff;
    }
    Mv = M * v;
    const double len = std::sqrt(std::max(0.0, v.dot(Mv)));
    if (!(initial > 0.0) || !(len > drop_tol * initial)) {
      throw std::invalid_argument("rank-deficient block: column " + std::to_string(j) +
                                  " is linearly dependent on the preceding columns");
    }
    Q.col(j) = v / len;
    MQ.col(j) = Mv / len;
  }
  return Q;
}

namespace detail {

/// SimplicialLLT exposing the fill predicted by its symbolic analysis.
class CholeskyWithFill : public Eigen::SimplicialLLT<SparseMatrix> {
 public:
  Eigen::Index predicted_factor_nonzeros() const { return this->m_matrix.nonZeros(); }
};

class InverseOperator {
 public:
  InverseOperator(const SparseMatrix& K, const EigenOptions& opt) : tol_(opt.tol) {
    chol_ = std::make_unique<CholeskyWithFill>();
    chol_->analyzePattern(K);
    const auto bytes = static_cast<std::size_t>(chol_->predicted_factor_nonzeros()) *
                       (sizeof(double) + sizeof(SparseMatrix::StorageIndex));
    if (bytes > opt.factor_memory_cap) {
      chol_.reset();
      cg_ = std::make_unique<Cg>();
      cg_->setTolerance(std::min(1e-12, 1e-3 * opt.tol));
      cg_->setMaxIterations(20 * K.rows());
      cg_->compute(K);
      if (cg_->info() != Eigen::Success) throw SolverError("incomplete Cholesky preconditioner failed");
      return;
    }
    chol_->factorize(K);
    if (chol_->info() != Eigen::Success) throw SolverError("stiffness matrix is not positive definite");
  }

  bool direct() const { return static_cast<bool>(chol_); }

  Eigen::MatrixXd solve(const Eigen::MatrixXd& B) const {
    if (chol_) return chol_->solve(B);
    Eigen::MatrixXd X(B.rows(), B.cols());
    for (Eigen::Index j = 0; j < B.cols(); ++j) {
      X.col(j) = cg_->solve(B.col(j));
      if (cg_->info() != Eigen::Success) throw SolverError("conjugate gradient inner solve did not converge");
    }
    return X;
  }

 private:
  using Cg = Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper, Eigen::IncompleteCholesky<double>>;
  double tol_;
  std::unique_ptr<CholeskyWithFill> chol_;
  std::unique_ptr<Cg> cg_;
};

/// Deterministic sign: the largest-magnitude entry of each column is positive.
inline void normalize_signs(Eigen::MatrixXd& X) {
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    Eigen::Index imax = 0;
    X.col(j).cwiseAbs().maxCoeff(&imax);
    if (X(imax, j) < 0.0) X.col(j) *= -1.0;
  }
}

inline std::vector<double> residual_norms(const SparseMatrix& K, const SparseMatrix& M, const Eigen::MatrixXd& X,
                                          const Eigen::VectorXd& theta, Eigen::Index count) {
  std::vector<double> r(count);
  for (Eigen::Index j = 0; j < count; ++j) {
    const Eigen::VectorXd Mx = M * X.col(j);
    const Eigen::VectorXd res = K * X.col(j) - theta(j) * Mx;
    r[j] = res.norm() / Mx.norm();
  }
  return r;
}

inline void finish(EigenResult& out, const EigenOptions& opt) {
  out.cluster = degenerate_clusters(out.values, opt.cluster_rel);
}

}  // namespace detail

/// The k algebraically smallest eigenpairs. Each returned pair satisfies
/// ||K u - lambda M u|| <= tol ||M u||; values ascend; columns are
/// M-orthonormal; the result is a deterministic function of opt.seed.
inline EigenResult smallest_eigenpairs(const SectorSystem& sys, int k, const EigenOptions& opt = {}) {
  const Eigen::Index n = sys.dofs();
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  if (k > n) {
    throw std::invalid_argument("requested " + std::to_string(k) + " eigenpairs but the system has only " +
                                std::to_string(n) + " degrees of freedom");
  }
  if (!(opt.tol > 0.0)) throw std::invalid_argument("tol must be positive");

  EigenResult out;
  out.sector = sys.sector;
  out.dof_to_vertex = sys.dof_to_vertex;
  const Eigen::Index p = std::min<Eigen::Index>(n, k + opt.guard);

  if (n <= opt.dense_limit || p == n) {
    const Eigen::MatrixXd Kd(sys.K);
    const Eigen::MatrixXd Md(sys.M);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(Kd, Md);
    if (ges.info() != Eigen::Success) throw SolverError("dense generalized eigensolver failed");
    Eigen::MatrixXd X = ges.eigenvectors().leftCols(k);
    detail::normalize_signs(X);
    const Eigen::VectorXd theta = ges.eigenvalues().head(k);
    out.values.assign(theta.data(), theta.data() + k);
    out.vectors = std::move(X);
    out.residuals = detail::residual_norms(sys.K, sys.M, out.vectors, theta, k);
    out.method = "dense";
    out.iterations = 1;
    for (double r : out.residuals) {
      if (!(r <= opt.tol)) throw SolverError("dense eigensolver residual above tolerance", out.residuals);
    }
    detail::finish(out, opt);
    return out;
  }

  const detail::InverseOperator inv(sys.K, opt);
  out.method = inv.direct() ? "cholesky" : "pcg";

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Eigen::MatrixXd X(n, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) X(i, j) = uni(rng);
  }
  X = mass_orthonormalize(X, sys.M);

  Eigen::VectorXd theta;
  std::vector<double> best(k, std::numeric_limits<double>::infinity());
  bool converged = false;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    const Eigen::MatrixXd Y = inv.solve(sys.M * X);
    const Eigen::MatrixXd Q = mass_orthonormalize(Y, sys.M);
    const Eigen::MatrixXd KQ = sys.K * Q;
    Eigen::MatrixXd H = Q.transpose() * KQ;
    H = 0.5 * (H + H.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    theta = es.eigenvalues();
    X = Q * es.eigenvectors();

    const auto res = detail::residual_norms(sys.K, sys.M, X, theta, k);
    int nconv = 0;
    double worst = 0.0;
    for (int j = 0; j < k; ++j) {
      best[j] = std::min(best[j], res[j]);
      nconv += res[j] <= opt.tol ? 1 : 0;
      worst = std::max(worst, res[j]);
    }
    out.log.push_back({it, worst, nconv});
    out.iterations = it;
    if (nconv == k) {
      converged = true;
      out.residuals = res;
      break;
    }
  }
  if (!converged) {
    throw SolverError("subspace iteration did not converge in " + std::to_string(opt.max_iterations) +
                          " iterations (sector " + label(sys.sector) + ")",
                      best);
  }

  Eigen::MatrixXd V = X.leftCols(k);
  detail::normalize_signs(V);
  out.values.assign(theta.data(), theta.data() + k);

  if (opt.ground_polish_steps > 0) {
    Eigen::VectorXd x = V.col(0);
    for (int s = 0; s < opt.ground_polish_steps; ++s) {
      x = inv.solve(sys.M * x);
      x /= std::sqrt(x.dot(sys.M * x));
    }
    if (x.sum() < 0.0) x = -x;
    V.col(0) = x;
    out.values[0] = x.dot(sys.K * x);
    out.residuals[0] = detail::residual_norms(sys.K, sys.M, V, Eigen::Map<Eigen::VectorXd>(out.values.data(), k), 1)[0];
  }
  out.vectors = std::move(V);
  detail::finish(out, opt);
  return out;
}

/// Expands a reduced eigenvector to all quarter-mesh vertices (zero on
/// constrained vertices).
inline Eigen::VectorXd vertex_values(const EigenResult& res, std::size_t index, std::size_t num_vertices) {
  if (index >= res.size()) throw std::out_of_range("eigenpair index out of range");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_vertices));
  for (std::size_t d = 0; d < res.dof_to_vertex.size(); ++d) {
    v(res.dof_to_vertex[d]) = res.vectors(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(index));
  }
  return v;
}

}  // namespace nodalab

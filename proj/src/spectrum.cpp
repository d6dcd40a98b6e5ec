#include "latmag/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace latmag {

Eigen::VectorXcd canonical_phase(Eigen::VectorXcd v) {
  Eigen::Index imax = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::norm(v[i]);
    if (a > best) {
      best = a;
      imax = i;
    }
  }
  const std::complex<double> c = v[imax];
  const double mag = std::abs(c);
  if (mag == 0.0) return v;
  v *= std::conj(c) / mag;
  return v;
}

EigenSolution solve_lowest(const HamiltonianMatrix& h, int k, const SolverOptions& opt) {
  const int n = h.dimension();
  if (n < 1) throw std::invalid_argument("empty Hamiltonian");
  if (k < 1 || k > n) throw std::invalid_argument("eigenpair count k out of range");

  // Solve for at least two pairs so the gap and degeneracy flag are defined.
  const int k_solve = std::min(std::max(k, 2), n);

  Eigen::MatrixXcd a = h.m;  // zheevr destroys its input
  std::vector<double> w(static_cast<std::size_t>(n));
  Eigen::MatrixXcd z(n, k_solve);
  std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(k_solve));
  lapack_int found = 0;
  const lapack_int info = LAPACKE_zheevr(
      LAPACK_COL_MAJOR, 'V', 'I', 'L', n, a.data(), n, 0.0, 0.0, 1, k_solve,
      2 * LAPACKE_dlamch('S'), &found, w.data(), z.data(), n, isuppz.data());
  if (info != 0) {
    throw SolverError("zheevr failed to converge (info = " + std::to_string(info) + ")");
  }
  if (found < k_solve) {
    throw SolverError("zheevr returned fewer eigenpairs than requested");
  }

  const double scale = h.m.cwiseAbs().rowwise().sum().maxCoeff();
  double residual = 0.0;
  for (int i = 0; i < k; ++i) {
    residual = std::max(residual, (h.m * z.col(i) - w[static_cast<std::size_t>(i)] * z.col(i)).norm());
  }
  if (residual > opt.residual_tol * std::max(1.0, scale)) {
    throw SolverError("eigenpair residual " + std::to_string(residual) +
                      " exceeds tolerance");
  }

  EigenSolution sol;
  sol.eigenvalues.assign(w.begin(), w.begin() + k);
  Eigen::VectorXcd ground = z.col(0);
  ground /= ground.norm();
  sol.ground_state = canonical_phase(std::move(ground));
  sol.residual = residual;
  sol.gap = (n >= 2) ? w[1] - w[0] : 0.0;
  sol.degenerate = (n >= 2) && sol.gap < opt.degeneracy_rel * std::max(1.0, scale);
  return sol;
}

GapProfile gap_profile(const std::vector<double>& lambdas,
                       const std::vector<EigenSolution>& solutions) {
  if (lambdas.size() != solutions.size()) {
    throw std::invalid_argument("lambda grid and solution list differ in length");
  }
  if (lambdas.size() < 2) {
    throw std::invalid_argument("gap profile needs at least two points");
  }
  GapProfile profile;
  profile.points.reserve(lambdas.size());
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    profile.points.emplace_back(lambdas[i], solutions[i].gap);
  }
  std::size_t imin = 0;
  for (std::size_t i = 1; i < profile.points.size(); ++i) {
    const auto& [lam, gap] = profile.points[i];
    const auto& [best_lam, best_gap] = profile.points[imin];
    if (gap < best_gap || (gap == best_gap && lam < best_lam)) imin = i;
  }
  profile.min_index = imin;
  profile.min_lambda = profile.points[imin].first;
  profile.min_gap = profile.points[imin].second;
  return profile;
}

}  // namespace latmag

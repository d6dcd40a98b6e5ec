#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <utility>
#include <vector>

#include "latmag/hamiltonian.hpp"

namespace latmag {

struct SolverOptions {
  double residual_tol = 1e-10;    // relative to the matrix scale
  double degeneracy_rel = 1e-10;  // gap threshold, relative to the matrix scale
};

struct EigenSolution {
  std::vector<double> eigenvalues;  // k lowest, ascending
  Eigen::VectorXcd ground_state;    // unit norm, canonical phase
  double residual = 0.0;            // max over reported pairs of ||H v - E v||
  double gap = 0.0;                 // E1 - E0
  bool degenerate = false;          // gap below the degeneracy threshold
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dense Hermitian diagonalization of the k lowest eigenpairs. Residuals are
// certified against opt.residual_tol; non-convergence is surfaced as
// SolverError, never truncated. The global phase is fixed by making the
// largest-magnitude component real positive.
EigenSolution solve_lowest(const HamiltonianMatrix& h, int k,
                           const SolverOptions& opt = {});

// Idempotent phase fix: rotate so the largest-magnitude component (first on
// ties) is real positive.
Eigen::VectorXcd canonical_phase(Eigen::VectorXcd v);

struct GapProfile {
  std::vector<std::pair<double, double>> points;  // (lambda, gap)
  double min_lambda = 0.0;
  double min_gap = 0.0;
  std::size_t min_index = 0;
};

// Gap as a function of lambda plus its minimizer; ties break toward the
// smallest lambda. Requires at least two points.
GapProfile gap_profile(const std::vector<double>& lambdas,
                       const std::vector<EigenSolution>& solutions);

}  // namespace latmag

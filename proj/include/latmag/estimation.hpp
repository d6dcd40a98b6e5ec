#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "latmag/lattice_field.hpp"

namespace latmag {

// p(j,k) = |psi(j,k)|^2 in row-major site order; input must be unit norm.
std::vector<double> site_probabilities(const Eigen::VectorXcd& psi);

/// Disjoint cover of the lattice by axis-aligned g x g blocks anchored at
/// site (1,1); trailing blocks at the far edges are truncated.
struct GrainPartition {
  int g = 1;
  int n_x = 0;
  int n_y = 0;
  std::vector<std::vector<int>> grains;  // linear site indices per grain
};

GrainPartition make_partition(const LatticeSpec& spec, int g);

std::vector<double> grain_probabilities(const std::vector<double>& site_p,
                                        const GrainPartition& partition);

// 8 (1 - |<lo|hi>|) / delta^2; both states unit-normalized, delta > 0.
double qfi_from_fidelity(const Eigen::VectorXcd& psi_lo,
                         const Eigen::VectorXcd& psi_hi, double delta);

struct QfiConvergence {
  double qfi = 0.0;
  double delta_used = 0.0;  // full symmetric step, shared with the FI derivative
  bool converged = false;
  int evaluations = 0;
};

// Step-halving protocol: evaluate the fidelity QFI pairing the state at lambda
// with the one at lambda + delta/2, halve delta until successive values agree
// to rel_tol or the floor is reached. ground_state_at must return unit-norm
// phase-canonical states and is free to throw (e.g. on degeneracy).
QfiConvergence qfi_converged(
    const std::function<Eigen::VectorXcd(double)>& ground_state_at, double lambda,
    double delta0, double rel_tol = 1e-2, double delta_floor = 1e-7);

struct FisherResult {
  double value = 0.0;
  double skipped_mass = 0.0;             // total P_mid of skipped grains
  double max_skipped_derivative = 0.0;   // largest |dP| among skipped grains
  bool skipped_warning = false;          // a skipped grain carried |dP| > 1e-10
};

// Central-difference Fisher information from outcome distributions at
// lambda -/+ delta/2. Grains whose midpoint probability falls below p_floor
// are skipped and their mass reported.
FisherResult fisher_information(const std::vector<double>& p_lo,
                                const std::vector<double>& p_hi, double delta,
                                double p_floor = 1e-14);

/// Effective two-level Hamiltonian omega0*I - Delta(lambda) sz + gamma(lambda) sx,
/// used as an analytic cross-check near avoided crossings.
struct TwoLevelModel {
  double omega0 = 0.0;
  std::function<double(double)> delta_fn;
  std::function<double(double)> gamma_fn;
  // Optional analytic derivative of gamma/Delta; central difference otherwise.
  std::function<double(double)> d_gamma_over_delta;
};

std::pair<double, double> two_level_eigenvalues(const TwoLevelModel& model,
                                                double lambda);

// Closed-form QFI 16 (Delta/(h+ - h-))^4 [d(gamma/Delta)/dlambda]^2.
// Rejects Delta(lambda) = 0.
double two_level_qfi(const TwoLevelModel& model, double lambda);

/// Outcome distributions tabulated on an estimation grid, one row per lambda.
struct LikelihoodGrid {
  std::vector<double> lambdas;  // strictly increasing
  std::vector<std::vector<double>> grain_probs;
};

struct CramerRaoCheck {
  double variance = 0.0;
  double bound = 0.0;  // 1 / (M F)
  double mean_estimate = 0.0;
  int edge_hits = 0;   // trials whose ML estimate pinned at a grid endpoint
};

// Repeated-sampling check of the Cramer-Rao bound: per trial draw m_samples
// outcomes from p_true, form the maximum-likelihood estimate over the grid,
// and compare the across-trial variance with 1/(M F). Deterministic under the
// given seed.
CramerRaoCheck cramer_rao_mc(const std::vector<double>& p_true, double fisher,
                             int m_samples, const LikelihoodGrid& grid, int trials,
                             std::uint64_t seed);

}  // namespace latmag

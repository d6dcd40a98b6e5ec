#include "latmag/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace latmag {

namespace {

constexpr double kNormTol = 1e-10;

void require_unit_norm(const Eigen::VectorXcd& psi, const char* who) {
  if (std::abs(psi.norm() - 1.0) > kNormTol) {
    throw std::invalid_argument(std::string(who) + ": state is not unit-normalized");
  }
}

// Uniform double in [0,1) from the top 53 bits; keeps draws identical across
// standard libraries.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

std::vector<double> site_probabilities(const Eigen::VectorXcd& psi) {
  require_unit_norm(psi, "site_probabilities");
  std::vector<double> p(static_cast<std::size_t>(psi.size()));
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    p[static_cast<std::size_t>(i)] = std::norm(psi[i]);
  }
  return p;
}

GrainPartition make_partition(const LatticeSpec& spec, int g) {
  if (g < 1 || g > std::min(spec.n_x, spec.n_y)) {
    throw std::invalid_argument("grain side must lie in [1, min(n_x, n_y)]");
  }
  GrainPartition partition;
  partition.g = g;
  partition.n_x = spec.n_x;
  partition.n_y = spec.n_y;
  const int blocks_x = (spec.n_x + g - 1) / g;
  const int blocks_y = (spec.n_y + g - 1) / g;
  partition.grains.reserve(static_cast<std::size_t>(blocks_x) * blocks_y);
  for (int by = 0; by < blocks_y; ++by) {
    for (int bx = 0; bx < blocks_x; ++bx) {
      std::vector<int> grain;
      const int j_lo = 1 + bx * g;
      const int j_hi = std::min(spec.n_x, (bx + 1) * g);
      const int k_lo = 1 + by * g;
      const int k_hi = std::min(spec.n_y, (by + 1) * g);
      grain.reserve(static_cast<std::size_t>(j_hi - j_lo + 1) * (k_hi - k_lo + 1));
      for (int k = k_lo; k <= k_hi; ++k) {
        for (int j = j_lo; j <= j_hi; ++j) {
          grain.push_back(spec.linear_index(j, k));
        }
      }
      partition.grains.push_back(std::move(grain));
    }
  }
  return partition;
}

std::vector<double> grain_probabilities(const std::vector<double>& site_p,
                                        const GrainPartition& partition) {
  if (site_p.size() != static_cast<std::size_t>(partition.n_x) * partition.n_y) {
    throw std::invalid_argument("site probabilities do not match the partition lattice");
  }
  std::vector<double> out(partition.grains.size(), 0.0);
  for (std::size_t i = 0; i < partition.grains.size(); ++i) {
    double sum = 0.0;
    for (int site : partition.grains[i]) {
      sum += site_p[static_cast<std::size_t>(site)];
    }
    out[i] = sum;
  }
  return out;
}

double qfi_from_fidelity(const Eigen::VectorXcd& psi_lo,
                         const Eigen::VectorXcd& psi_hi, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("qfi_from_fidelity: delta must be positive");
  if (psi_lo.size() != psi_hi.size()) {
    throw std::invalid_argument("qfi_from_fidelity: state dimensions differ");
  }
  require_unit_norm(psi_lo, "qfi_from_fidelity");
  require_unit_norm(psi_hi, "qfi_from_fidelity");
  const double fidelity = std::min(1.0, std::abs(psi_lo.dot(psi_hi)));
  return 8.0 * (1.0 - fidelity) / (delta * delta);
}

QfiConvergence qfi_converged(
    const std::function<Eigen::VectorXcd(double)>& ground_state_at, double lambda,
    double delta0, double rel_tol, double delta_floor) {
  if (!(delta0 > 0.0)) throw std::invalid_argument("qfi_converged: delta0 must be positive");
  const Eigen::VectorXcd psi_center = ground_state_at(lambda);
  const auto evaluate = [&](double delta) {
    return qfi_from_fidelity(psi_center, ground_state_at(lambda + 0.5 * delta),
                             0.5 * delta);
  };

  QfiConvergence result;
  double delta = delta0;
  double qfi = evaluate(delta);
  result.evaluations = 1;
  while (true) {
    const double delta_next = 0.5 * delta;
    if (delta_next < delta_floor) {
      result.qfi = qfi;
      result.delta_used = delta;
      result.converged = false;
      return result;
    }
    const double qfi_next = evaluate(delta_next);
    ++result.evaluations;
    const double scale = std::max({std::abs(qfi_next), std::abs(qfi), 1e-12});
    if (std::abs(qfi_next - qfi) < rel_tol * scale) {
      result.qfi = qfi_next;
      result.delta_used = delta_next;
      result.converged = true;
      return result;
    }
    delta = delta_next;
    qfi = qfi_next;
  }
}

FisherResult fisher_information(const std::vector<double>& p_lo,
                                const std::vector<double>& p_hi, double delta,
                                double p_floor) {
  if (p_lo.size() != p_hi.size()) {
    throw std::invalid_argument("fisher_information: outcome partitions differ");
  }
  if (!(delta > 0.0)) throw std::invalid_argument("fisher_information: delta must be positive");
  FisherResult result;
  for (std::size_t i = 0; i < p_lo.size(); ++i) {
    const double p_mid = 0.5 * (p_hi[i] + p_lo[i]);
    const double dp = (p_hi[i] - p_lo[i]) / delta;
    if (p_mid < p_floor) {
      result.skipped_mass += p_mid;
      result.max_skipped_derivative = std::max(result.max_skipped_derivative, std::abs(dp));
      continue;
    }
    result.value += dp * dp / p_mid;
  }
  result.skipped_warning = result.max_skipped_derivative > 1e-10;
  return result;
}

std::pair<double, double> two_level_eigenvalues(const TwoLevelModel& model,
                                                double lambda) {
  const double delta = model.delta_fn(lambda);
  const double gamma = model.gamma_fn(lambda);
  const double r = std::hypot(delta, gamma);
  return {model.omega0 - r, model.omega0 + r};
}

double two_level_qfi(const TwoLevelModel& model, double lambda) {
  const double delta = model.delta_fn(lambda);
  if (delta == 0.0) {
    throw std::domain_error("two_level_qfi: Delta(lambda) = 0 is singular");
  }
  const double gamma = model.gamma_fn(lambda);
  const double splitting = 2.0 * std::hypot(delta, gamma);

  double slope;
  if (model.d_gamma_over_delta) {
    slope = model.d_gamma_over_delta(lambda);
  } else {
    const double h = 1e-6;
    const double d_plus = model.delta_fn(lambda + h);
    const double d_minus = model.delta_fn(lambda - h);
    if (d_plus == 0.0 || d_minus == 0.0) {
      throw std::domain_error("two_level_qfi: Delta vanishes inside the difference stencil");
    }
    slope = (model.gamma_fn(lambda + h) / d_plus -
             model.gamma_fn(lambda - h) / d_minus) / (2.0 * h);
  }
  const double ratio = delta / splitting;
  return 16.0 * ratio * ratio * ratio * ratio * slope * slope;
}

CramerRaoCheck cramer_rao_mc(const std::vector<double>& p_true, double fisher,
                             int m_samples, const LikelihoodGrid& grid, int trials,
                             std::uint64_t seed) {
  if (!(fisher > 0.0)) {
    throw std::invalid_argument("cramer_rao_mc: Fisher information must be positive");
  }
  if (m_samples < 1 || trials < 2) {
    throw std::invalid_argument("cramer_rao_mc: need m_samples >= 1 and trials >= 2");
  }
  const std::size_t n_lambda = grid.lambdas.size();
  const std::size_t n_outcomes = p_true.size();
  if (n_lambda < 2 || grid.grain_probs.size() != n_lambda) {
    throw std::invalid_argument("cramer_rao_mc: malformed likelihood grid");
  }
  for (const auto& row : grid.grain_probs) {
    if (row.size() != n_outcomes) {
      throw std::invalid_argument("cramer_rao_mc: grid outcome count mismatch");
    }
  }

  // CDF for sampling and log-probability table for the likelihood.
  std::vector<double> cdf(n_outcomes);
  double acc = 0.0;
  for (std::size_t i = 0; i < n_outcomes; ++i) {
    acc += p_true[i];
    cdf[i] = acc;
  }
  if (std::abs(acc - 1.0) > 1e-9) {
    throw std::invalid_argument("cramer_rao_mc: outcome distribution is not normalized");
  }
  cdf.back() = 1.0;

  std::vector<std::vector<double>> logp(n_lambda, std::vector<double>(n_outcomes));
  for (std::size_t l = 0; l < n_lambda; ++l) {
    for (std::size_t i = 0; i < n_outcomes; ++i) {
      const double p = grid.grain_probs[l][i];
      logp[l][i] = p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
    }
  }

  std::mt19937_64 rng(seed);
  std::vector<int> counts(n_outcomes);
  std::vector<double> estimates(static_cast<std::size_t>(trials));
  CramerRaoCheck check;
  check.bound = 1.0 / (static_cast<double>(m_samples) * fisher);

  for (int t = 0; t < trials; ++t) {
    std::fill(counts.begin(), counts.end(), 0);
    for (int m = 0; m < m_samples; ++m) {
      const double u = uniform01(rng);
      const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
      ++counts[static_cast<std::size_t>(it - cdf.begin())];
    }
    double best_ll = -std::numeric_limits<double>::infinity();
    std::size_t best_index = 0;
    bool flat = true;
    double first_ll = 0.0;
    for (std::size_t l = 0; l < n_lambda; ++l) {
      double ll = 0.0;
      for (std::size_t i = 0; i < n_outcomes; ++i) {
        if (counts[i] > 0) ll += counts[i] * logp[l][i];
      }
      if (l == 0) {
        first_ll = ll;
      } else if (ll != first_ll) {
        flat = false;
      }
      if (ll > best_ll) {
        best_ll = ll;
        best_index = l;
      }
    }
    if (flat) {
      throw std::runtime_error(
          "cramer_rao_mc: likelihood is flat across the grid; estimator undefined");
    }
    if (best_index == 0 || best_index == n_lambda - 1) ++check.edge_hits;
    estimates[static_cast<std::size_t>(t)] = grid.lambdas[best_index];
  }

  double mean = 0.0;
  for (double e : estimates) mean += e;
  mean /= static_cast<double>(trials);
  double var = 0.0;
  for (double e : estimates) var += (e - mean) * (e - mean);
  var /= static_cast<double>(trials - 1);

  check.variance = var;
  check.mean_estimate = mean;
  return check;
}

}  // namespace latmag

#include "latmag/hamiltonian.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace latmag {

namespace {

using Complex = std::complex<double>;

constexpr int kMaxDenseDimension = 8192;  // 16 * dim^2 bytes of storage

}  // namespace

HamiltonianMatrix build_hamiltonian(const LatticeSpec& spec,
                                    const VectorPotentialField& potential) {
  if (potential.n_x != spec.n_x || potential.n_y != spec.n_y) {
    throw std::invalid_argument("vector potential was sampled on a different lattice");
  }
  const long long dim_ll = static_cast<long long>(spec.n_x) * spec.n_y;
  if (dim_ll > kMaxDenseDimension) {
    throw std::length_error("lattice too large for dense storage");
  }
  const int dim = static_cast<int>(dim_ll);
  const double j_hop = spec.hopping_energy;

  HamiltonianMatrix h;
  h.n_x = spec.n_x;
  h.n_y = spec.n_y;
  h.m = Eigen::MatrixXcd::Zero(dim, dim);

  // Forward hops only (columns above the diagonal); the conjugates are
  // mirrored in afterwards. Amplitudes carry the sum of the potential at the
  // source and target sites, exactly as the stencil prescribes.
  for (int k = 1; k <= spec.n_y; ++k) {
    for (int j = 1; j <= spec.n_x; ++j) {
      const int row = spec.linear_index(j, k);
      const double ax = potential.ax(j, k);
      const double ay = potential.ay(j, k);
      h.m(row, row) = Complex(j_hop * (5.0 + ax * ax + ay * ay), 0.0);

      if (j + 1 <= spec.n_x) {
        const double s = potential.ax(j + 1, k) + ax;
        h.m(row, spec.linear_index(j + 1, k)) =
            -j_hop * (2.0 / 3.0) * Complex(2.0, -s);
      }
      if (j + 2 <= spec.n_x) {
        const double s = potential.ax(j + 2, k) + ax;
        h.m(row, spec.linear_index(j + 2, k)) =
            j_hop * (1.0 / 12.0) * Complex(1.0, -s);
      }
      if (k + 1 <= spec.n_y) {
        const double s = potential.ay(j, k + 1) + ay;
        h.m(row, spec.linear_index(j, k + 1)) =
            -j_hop * (2.0 / 3.0) * Complex(2.0, -s);
      }
      if (k + 2 <= spec.n_y) {
        const double s = potential.ay(j, k + 2) + ay;
        h.m(row, spec.linear_index(j, k + 2)) =
            j_hop * (1.0 / 12.0) * Complex(1.0, -s);
      }
    }
  }

  for (int col = 0; col < dim; ++col) {
    for (int row = 0; row < col; ++row) {
      h.m(col, row) = std::conj(h.m(row, col));
    }
  }
  return h;
}

double hermiticity_defect(const HamiltonianMatrix& h) {
  const int dim = h.dimension();
  double defect = 0.0;
  for (int col = 0; col < dim; ++col) {
    for (int row = 0; row <= col; ++row) {
      defect = std::max(defect, std::abs(h.m(row, col) - std::conj(h.m(col, row))));
    }
  }
  return defect;
}

Eigen::VectorXcd HamiltonianMatrix::apply(const Eigen::VectorXcd& v) const {
  if (v.size() != dimension()) {
    throw std::invalid_argument("state vector dimension does not match the lattice");
  }
  return m * v;
}

void dump_triplets(const HamiltonianMatrix& h, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open matrix dump path: " + path);
  const int dim = h.dimension();
  char line[128];
  for (int row = 0; row < dim; ++row) {
    for (int col = 0; col < dim; ++col) {
      const Complex entry = h.m(row, col);
      if (entry == Complex(0.0, 0.0)) continue;
      std::snprintf(line, sizeof(line), "%d %d %.17g %.17g\n", row, col,
                    entry.real(), entry.imag());
      out << line;
    }
  }
  if (!out) throw std::runtime_error("failed writing matrix dump: " + path);
}

}  // namespace latmag

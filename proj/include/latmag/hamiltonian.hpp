#pragma once

#include <Eigen/Dense>
#include <string>

#include "latmag/lattice_field.hpp"

namespace latmag {

/// Hermitian hopping matrix on the position basis, in units of J. Dense
/// storage; each row couples at most 9 sites (self, 4 nearest, 4 at
/// distance 2 along an axis), fewer near the boundary.
struct HamiltonianMatrix {
  int n_x = 0;
  int n_y = 0;
  Eigen::MatrixXcd m;

  int dimension() const { return static_cast<int>(m.rows()); }

  // H * v; throws on dimension mismatch.
  Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const;
};

// Five-point-stencil kinetic term with the vector potential entering both the
// on-site energy and the complex hopping amplitudes. Hops that would leave the
// lattice are dropped; nothing else is renormalized. The upper triangle is
// assembled and mirrored, so hermiticity holds bit-exactly.
HamiltonianMatrix build_hamiltonian(const LatticeSpec& spec,
                                    const VectorPotentialField& potential);

// max |H(a,b) - conj(H(b,a))|; zero for every built matrix.
double hermiticity_defect(const HamiltonianMatrix& h);

// Plain-text sparse triplets "row col re im": 0-based indices, full matrix,
// lexicographic row-major order. Intended for diffing against other builders.
void dump_triplets(const HamiltonianMatrix& h, const std::string& path);

}  // namespace latmag

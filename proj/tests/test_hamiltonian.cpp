#include <doctest.h>

#include <complex>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "latmag/hamiltonian.hpp"

using namespace latmag;
using Complex = std::complex<double>;

namespace {

HamiltonianMatrix build_at(const LatticeSpec& spec, double b0, double m_x) {
  const FieldProfile profile = make_profile(spec, b0, m_x);
  return build_hamiltonian(spec, sample_vector_potential(spec, profile));
}

}  // namespace

TEST_CASE("zero-field stencil coefficients") {
  const LatticeSpec spec = make_lattice(7, 7);
  VectorPotentialField zero;
  zero.n_x = spec.n_x;
  zero.n_y = spec.n_y;
  zero.a_x.assign(static_cast<std::size_t>(spec.sites()), 0.0);
  zero.a_y.assign(static_cast<std::size_t>(spec.sites()), 0.0);
  const HamiltonianMatrix h = build_hamiltonian(spec, zero);

  const int c = spec.linear_index(4, 4);  // interior site
  CHECK(h.m(c, c) == Complex(5.0, 0.0));
  CHECK(h.m(c, spec.linear_index(5, 4)) == Complex(-4.0 / 3.0, 0.0));
  CHECK(h.m(c, spec.linear_index(3, 4)) == Complex(-4.0 / 3.0, 0.0));
  CHECK(h.m(c, spec.linear_index(4, 5)) == Complex(-4.0 / 3.0, 0.0));
  CHECK(h.m(c, spec.linear_index(4, 3)) == Complex(-4.0 / 3.0, 0.0));
  CHECK(h.m(c, spec.linear_index(6, 4)) == Complex(1.0 / 12.0, 0.0));
  CHECK(h.m(c, spec.linear_index(2, 4)) == Complex(1.0 / 12.0, 0.0));
  CHECK(h.m(c, spec.linear_index(4, 6)) == Complex(1.0 / 12.0, 0.0));
  CHECK(h.m(c, spec.linear_index(4, 2)) == Complex(1.0 / 12.0, 0.0));

  // zero potential leaves the matrix real
  CHECK(h.m.imag().cwiseAbs().maxCoeff() == 0.0);

  // corner row couples only to the five surviving stencil targets
  const int corner = spec.linear_index(1, 1);
  int nonzero = 0;
  for (int col = 0; col < h.dimension(); ++col) {
    if (h.m(corner, col) != Complex(0.0, 0.0)) ++nonzero;
  }
  CHECK(nonzero == 5);
  CHECK(h.m(corner, spec.linear_index(2, 1)) != Complex(0.0, 0.0));
  CHECK(h.m(corner, spec.linear_index(3, 1)) != Complex(0.0, 0.0));
  CHECK(h.m(corner, spec.linear_index(1, 2)) != Complex(0.0, 0.0));
  CHECK(h.m(corner, spec.linear_index(1, 3)) != Complex(0.0, 0.0));
}

TEST_CASE("row sparsity stays within the stencil") {
  const LatticeSpec spec = make_lattice(9, 7);
  const HamiltonianMatrix h = build_at(spec, 0.6, 0.02);
  for (int row = 0; row < h.dimension(); ++row) {
    int nonzero = 0;
    for (int col = 0; col < h.dimension(); ++col) {
      if (h.m(row, col) != Complex(0.0, 0.0)) ++nonzero;
    }
    CHECK(nonzero <= 9);
  }
}

TEST_CASE("center x-hop with homogeneous field keeps the zero-field amplitude") {
  // On the center row the x-potential vanishes, so the hop coefficient is
  // exactly -4/3 J.
  const LatticeSpec spec = make_lattice(31, 31);
  const HamiltonianMatrix h = build_at(spec, 0.5, 0.0);
  const int row = spec.linear_index(spec.center_x(), spec.center_y());
  const int col = spec.linear_index(spec.center_x() + 1, spec.center_y());
  CHECK(h.m(row, col) == Complex(-4.0 / 3.0, 0.0));
}

TEST_CASE("stencil amplitude matches a direct evaluation off the center row") {
  const LatticeSpec spec = make_lattice(31, 31);
  const double b0 = 0.5;
  const FieldProfile profile = make_profile(spec, b0, 0.0);
  const VectorPotentialField a = sample_vector_potential(spec, profile);
  const HamiltonianMatrix h = build_hamiltonian(spec, a);

  const int j = 10, k = 20;
  const double s = a.ax(j + 1, k) + a.ax(j, k);
  const Complex expected = -(2.0 / 3.0) * Complex(2.0, -s);
  CHECK(h.m(spec.linear_index(j, k), spec.linear_index(j + 1, k)) == expected);

  const double s2 = a.ay(j, k + 2) + a.ay(j, k);
  const Complex expected2 = (1.0 / 12.0) * Complex(1.0, -s2);
  CHECK(h.m(spec.linear_index(j, k), spec.linear_index(j, k + 2)) == expected2);
}

TEST_CASE("diagonal sum rule") {
  const LatticeSpec spec = make_lattice(11, 13);
  const FieldProfile profile = make_profile(spec, 0.8, 0.05);
  const VectorPotentialField a = sample_vector_potential(spec, profile);
  const HamiltonianMatrix h = build_hamiltonian(spec, a);
  for (int k = 1; k <= spec.n_y; ++k) {
    for (int j = 1; j <= spec.n_x; ++j) {
      const double ax = a.ax(j, k);
      const double ay = a.ay(j, k);
      const int i = spec.linear_index(j, k);
      CHECK(h.m(i, i) == Complex(1.0 * (5.0 + ax * ax + ay * ay), 0.0));
    }
  }
}

TEST_CASE("hermiticity is bit-exact across random valid configurations") {
  const LatticeSpec spec = make_lattice(13, 13);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double span = 6.0;  // L for a 13-site axis
  for (int trial = 0; trial < 25; ++trial) {
    const double m_x = u01(rng) / span;
    const double b0 = m_x * span + (1.0 - m_x * span) * std::max(u01(rng), 1e-3);
    const HamiltonianMatrix h = build_at(spec, b0, m_x);
    CHECK(hermiticity_defect(h) == 0.0);
  }
}

TEST_CASE("hermiticity defect detects corruption") {
  const LatticeSpec spec = make_lattice(5, 5);
  HamiltonianMatrix h = build_at(spec, 0.5, 0.0);
  CHECK(hermiticity_defect(h) == 0.0);
  h.m(0, 3) += Complex(0.0, 1e-3);
  CHECK(hermiticity_defect(h) > 0.0);

  HamiltonianMatrix zero;
  zero.n_x = zero.n_y = 5;
  zero.m = Eigen::MatrixXcd::Zero(25, 25);
  CHECK(hermiticity_defect(zero) == 0.0);
}

TEST_CASE("gauge origin shift keeps hermiticity") {
  const LatticeSpec spec = make_lattice(9, 9);
  const FieldProfile profile = make_profile(spec, 0.5, 0.0);
  VectorPotentialField a = sample_vector_potential(spec, profile);
  const HamiltonianMatrix h = build_hamiltonian(spec, a);
  for (double& v : a.a_x) v += 0.3;
  for (double& v : a.a_y) v += 0.3;
  const HamiltonianMatrix shifted = build_hamiltonian(spec, a);
  CHECK(hermiticity_defect(shifted) == 0.0);
  CHECK((shifted.m - h.m).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("apply matches an explicit row-wise product") {
  const LatticeSpec spec = make_lattice(7, 9);
  const HamiltonianMatrix h = build_at(spec, 0.4, 0.01);
  const int dim = h.dimension();

  const Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(dim);
  CHECK(h.apply(zero).norm() == 0.0);

  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXcd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = Complex(gauss(rng), gauss(rng));

  const Eigen::VectorXcd got = h.apply(v);
  Eigen::VectorXcd expected(dim);
  for (int r = 0; r < dim; ++r) {
    Complex acc(0.0, 0.0);
    for (int c = 0; c < dim; ++c) acc += h.m(r, c) * v[c];
    expected[r] = acc;
  }
  CHECK((got - expected).norm() < 1e-12 * expected.norm());

  CHECK_THROWS_AS(h.apply(Eigen::VectorXcd::Zero(dim + 1)), std::invalid_argument);
}

TEST_CASE("matrix dump is parseable and round-trips entries") {
  const LatticeSpec spec = make_lattice(5, 5);
  const HamiltonianMatrix h = build_at(spec, 0.5, 0.05);
  const std::string path = "test_dump_triplets.txt";
  dump_triplets(h, path);

  std::ifstream in(path);
  REQUIRE(in.good());
  Eigen::MatrixXcd rebuilt = Eigen::MatrixXcd::Zero(h.dimension(), h.dimension());
  int row, col;
  double re, im;
  int last_row = -1, last_col = -1;
  while (in >> row >> col >> re >> im) {
    // lexicographic row-major ordering
    CHECK((row > last_row || (row == last_row && col > last_col)));
    last_row = row;
    last_col = col;
    rebuilt(row, col) = Complex(re, im);
  }
  CHECK((rebuilt - h.m).cwiseAbs().maxCoeff() == 0.0);
  std::remove(path.c_str());
}

TEST_CASE("oversized lattice is rejected before allocation") {
  LatticeSpec spec = make_lattice(5, 5);
  spec.n_x = 1000;
  spec.n_y = 1000;
  VectorPotentialField a;
  a.n_x = spec.n_x;
  a.n_y = spec.n_y;
  CHECK_THROWS_AS(build_hamiltonian(spec, a), std::length_error);
}

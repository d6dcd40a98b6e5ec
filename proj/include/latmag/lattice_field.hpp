#pragma once

#include <string>
#include <vector>

namespace latmag {

/// Finite 2D square lattice in natural units (hbar = q = d = 1, m = 1/2, so J = 1).
/// Sites carry 1-based coordinates j = 1..n_x, k = 1..n_y and the row-major
/// linear index (k-1)*n_x + (j-1).
struct LatticeSpec {
  int n_x = 31;
  int n_y = 31;
  double lattice_constant = 1.0;
  double hopping_energy = 1.0;  // J = hbar^2 / (2 m d^2)

  int sites() const { return n_x * n_y; }
  int linear_index(int j, int k) const { return (k - 1) * n_x + (j - 1); }

  // Center site; exact for odd extents, rounded down otherwise.
  int center_x() const { return (n_x + 1) / 2; }
  int center_y() const { return (n_y + 1) / 2; }
  bool canonical_center() const { return n_x % 2 == 1 && n_y % 2 == 1; }
};

// Throws std::invalid_argument unless n_x, n_y >= 5 (the stencil needs two
// neighbors per side somewhere in the interior).
LatticeSpec make_lattice(int n_x, int n_y);

/// Transverse field B(x) = b0 - m_x |x - x0|, constant along y and peaked on
/// the lattice center column.
struct FieldProfile {
  double b0 = 0.5;   // field magnitude on the center column
  double m_x = 0.0;  // gradient per site along x
  double x0 = 16.0;  // center coordinates, site units
  double y0 = 16.0;
};

// Centers the profile on the lattice; throws on b0 <= 0 or m_x < 0.
FieldProfile make_profile(const LatticeSpec& spec, double b0, double m_x);

double field_magnitude(const FieldProfile& profile, double x);

// l_B = 1/sqrt(b) in natural units; throws on b <= 0.
double magnetic_length(double b);

// Largest |x - x0| reachable on the lattice (15 for the 31x31 reference).
double max_center_distance(const LatticeSpec& spec, const FieldProfile& profile);

struct ProfileValidation {
  enum class Failure { none, reversal, magnetic_length };
  bool ok = true;
  Failure failure = Failure::none;
  double reversal_bound = 0.0;  // m_x * L; b0 must not fall below this
  double upper_bound = 1.0;     // b0 above this puts l_B under the lattice constant
  std::string message;
};

// Accepts iff m_x * L <= b0 <= 1 with L computed from the actual lattice extent.
ProfileValidation validate_profile(const LatticeSpec& spec, const FieldProfile& profile);

/// Symmetric-gauge vector potential sampled on every site, row-major storage.
/// Both components vanish at the profile center by construction.
struct VectorPotentialField {
  int n_x = 0;
  int n_y = 0;
  std::vector<double> a_x;
  std::vector<double> a_y;

  double ax(int j, int k) const { return a_x[(k - 1) * n_x + (j - 1)]; }
  double ay(int j, int k) const { return a_y[(k - 1) * n_x + (j - 1)]; }
};

// A_x(j,k) = -f(j)/2 (k - y0), A_y(j,k) = f(j)/2 (j - x0) with
// f(j) = b0 - (2/3) m_x |j - x0|.
VectorPotentialField sample_vector_potential(const LatticeSpec& spec,
                                             const FieldProfile& profile);

}  // namespace latmag

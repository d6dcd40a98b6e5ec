#include "latmag/lattice_field.hpp"

#include <cmath>
#include <stdexcept>

namespace latmag {

LatticeSpec make_lattice(int n_x, int n_y) {
  if (n_x < 5 || n_y < 5) {
    throw std::invalid_argument("lattice extent must be at least 5 sites per axis");
  }
  LatticeSpec spec;
  spec.n_x = n_x;
  spec.n_y = n_y;
  return spec;
}

FieldProfile make_profile(const LatticeSpec& spec, double b0, double m_x) {
  if (!(b0 > 0.0)) throw std::invalid_argument("field magnitude b0 must be positive");
  if (m_x < 0.0) throw std::invalid_argument("field gradient m_x must be nonnegative");
  FieldProfile profile;
  profile.b0 = b0;
  profile.m_x = m_x;
  profile.x0 = static_cast<double>(spec.center_x());
  profile.y0 = static_cast<double>(spec.center_y());
  return profile;
}

double field_magnitude(const FieldProfile& profile, double x) {
  return profile.b0 - profile.m_x * std::abs(x - profile.x0);
}

double magnetic_length(double b) {
  if (!(b > 0.0)) throw std::invalid_argument("magnetic length requires b > 0");
  return 1.0 / std::sqrt(b);
}

double max_center_distance(const LatticeSpec& spec, const FieldProfile& profile) {
  return std::max(std::abs(1.0 - profile.x0),
                  std::abs(static_cast<double>(spec.n_x) - profile.x0));
}

ProfileValidation validate_profile(const LatticeSpec& spec, const FieldProfile& profile) {
  ProfileValidation v;
  v.reversal_bound = profile.m_x * max_center_distance(spec, profile);
  v.upper_bound = 1.0;
  if (profile.b0 < v.reversal_bound) {
    v.ok = false;
    v.failure = ProfileValidation::Failure::reversal;
    v.message = "field reverses sign on the lattice: b0 = " + std::to_string(profile.b0) +
                " < m_x * L = " + std::to_string(v.reversal_bound);
  } else if (profile.b0 > v.upper_bound) {
    v.ok = false;
    v.failure = ProfileValidation::Failure::magnetic_length;
    v.message = "magnetic length below lattice constant: b0 = " +
                std::to_string(profile.b0) + " > 1";
  }
  return v;
}

VectorPotentialField sample_vector_potential(const LatticeSpec& spec,
                                             const FieldProfile& profile) {
  VectorPotentialField field;
  field.n_x = spec.n_x;
  field.n_y = spec.n_y;
  field.a_x.resize(static_cast<std::size_t>(spec.sites()));
  field.a_y.resize(static_cast<std::size_t>(spec.sites()));
  // The field gradient m_x maps to a gauge-function slope of 2/3 its value.
  const double alpha = 2.0 * profile.m_x / 3.0;
  for (int k = 1; k <= spec.n_y; ++k) {
    for (int j = 1; j <= spec.n_x; ++j) {
      const double f = profile.b0 - alpha * std::abs(j - profile.x0);
      const std::size_t idx = static_cast<std::size_t>(spec.linear_index(j, k));
      field.a_x[idx] = -0.5 * f * (k - profile.y0);
      field.a_y[idx] = 0.5 * f * (j - profile.x0);
    }
  }
  return field;
}

}  // namespace latmag

#pragma once

#include "types.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

namespace sectionscope {

/// H(q, p) = |p + A(q)|^2 / 2 - g/|q| + V1(q) at a fixed energy c.
///
/// The CR3BP instance is expressed in coordinates centered on the regularized
/// primary; translating the origin only shifts A by a constant (a gauge
/// change), so V1 and A below differ from the barycentric ones by that shift.
struct StarkZeemanSystem {
  std::string name;
  double g = 0.0;
  std::function<double(const Vec3&)> v1;
  std::function<Vec3(const Vec3&)> v1_gradient;
  std::function<Vec3(const Vec3&)> magnetic;
  double c = 0.0;

  // Set only for the CR3BP instance: mass and position of the other primary.
  std::optional<double> other_mass;
  Vec3 other_position = Vec3::Zero();

  double hamiltonian(const Vec3& q, const Vec3& p) const;
  /// F(q) = g/|q|^3 + (1/q3) dV1/dq3, with the q3 -> 0 limit taken by a
  /// symmetric difference of dV1/dq3.
  double vertical_stiffness(const Vec3& q) const;
  /// omega_p(X_H) = (p3^2 + q3^2 F(q)) / (p3^2 + q3^2). Throws kBinding on q3 = p3 = 0.
  double transversality(const Vec3& q, const Vec3& p) const;
};

/// CR3BP as a Stark-Zeeman system around `primary` (g = its mass). For the
/// Earth chart the frame is first rotated by pi about the q3-axis, which swaps
/// the primaries' roles with mu -> 1 - mu.
StarkZeemanSystem cr3bp_stark_zeeman(const MassRatio& mu, double c, Primary primary = Primary::kMoon);

struct AssumptionReport {
  int samples = 0;
  bool magnetic_ok = true;     ///< A3 == 0 and A1, A2 independent of q3
  bool symmetry_ok = true;     ///< V1(q1, q2, -q3) == V1(q1, q2, q3)
  bool positivity_ok = true;   ///< F > 0
  bool identity_checked = false;
  bool identity_ok = true;     ///< CR3BP: (1/q3) dV1/dq3 == m_other / |q - other|^3
  double identity_max_error = 0.0;
  double min_vertical_stiffness = 0.0;

  std::string failed;          ///< "A2", "A3", "identity" or empty
  Vec3 witness = Vec3::Zero();
  double witness_value = 0.0;

  bool ok() const { return magnetic_ok && symmetry_ok && positivity_ok && identity_ok; }
};

/// Samples `samples` points in the ball of radius `radius` (skipping points
/// closer than 1e-3 to the singularity) and checks the standing assumptions.
AssumptionReport check_assumptions(const StarkZeemanSystem& sys, int samples, std::uint64_t seed = 1,
                                   double radius = 1.0);

}  // namespace sectionscope

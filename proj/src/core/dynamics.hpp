#pragma once

#include "types.hpp"

#include <array>
#include <string>

namespace sectionscope {

// Rotating-frame CR3BP in nondimensional units (primary separation 1, total
// mass 1, angular rate 1):
//
//   H(q, p) = |p|^2/2 - mu/|q - m| - (1 - mu)/|q - e| + p1 q2 - p2 q1
//
// All functions throw ErrorCode::kCollision when q is within
// kCollisionThreshold of a primary.

double hamiltonian_rot(const RotState& s, const MassRatio& mu);

/// dH/dq and dH/dp packed as (dH/dq, dH/dp).
Vec6 hamiltonian_gradient(const RotState& s, const MassRatio& mu);

/// Hamilton's equations: (dH/dp, -dH/dq).
Vec6 hamiltonian_vector_field(const RotState& s, const MassRatio& mu);

/// U(q) = -mu/|q-m| - (1-mu)/|q-e| - (q1^2 + q2^2)/2, the minimum of H over p.
double effective_potential(const Vec3& q, const MassRatio& mu);
Vec3 effective_potential_gradient(const Vec3& q, const MassRatio& mu);
Eigen::Matrix3d effective_potential_hessian(const Vec3& q, const MassRatio& mu);

/// Momentum that makes q an instantaneous rest point of the rotating frame;
/// H(q, rest_momentum(q)) == U(q).
Vec3 rest_momentum(const Vec3& q);

/// Distance from q to the nearer primary, and which one it is.
std::pair<Primary, double> nearest_primary(const Vec3& q, const MassRatio& mu);

struct LagrangePointSet {
  std::array<Vec3, 5> points;      ///< L1..L5 positions
  std::array<double, 5> energies;  ///< H at the equilibria (= U there)
  std::array<double, 5> gradient_norms;

  /// H(L1) < H(L2) < H(L3) < H(L4) = H(L5), equality to `eq_tol`.
  bool ordering_ok(double eq_tol = 1e-12) const;
  RotState state(int index) const;  // 0-based
};

/// Collinear points by bracketed bisection + Newton polish, triangular points
/// by 2-D Newton from the equilateral guesses. Requires 0 < mu < 1.
/// Naming: L1 between the primaries, L2 beyond the Moon, L3 beyond the Earth.
LagrangePointSet lagrange_points(const MassRatio& mu);

/// Root of dU/dq1 on the q1-axis inside (lo, hi), by bisection only.
double collinear_root_bisection(const MassRatio& mu, double lo, double hi, double tol = 1e-15);

/// U(q) <= c.
bool hill_membership(const Vec3& q, double c, const MassRatio& mu);

}  // namespace sectionscope

#pragma once

#include "types.hpp"

#include <complex>

namespace sectionscope {

/// Chart coordinates around a primary: x = -p (plays the role of position on
/// the sphere), y = q - primary (plays the role of momentum).
struct ChartState {
  Vec3 x = Vec3::Zero();
  Vec3 y = Vec3::Zero();
};

/// Stereographic projection from the north pole, (xi, eta) -> (x, y).
/// Throws kCollision when |1 - xi0| < 1e-12.
ChartState stereo_to_chart(const MoserState& m);

/// Inverse projection; total, output satisfies |xi| = 1, <xi, eta> = 0.
MoserState chart_to_stereo(const ChartState& cs);

/// Rotating-frame state <-> Moser state of the chart centered on `primary`.
/// The Earth chart first rotates the frame by pi about the q3-axis, which
/// turns the Earth into the "Moon" of the problem with mu' = 1 - mu.
MoserState rot_to_moser(const RotState& s, const MassRatio& mu, Primary primary);
RotState moser_to_rot(const MoserState& m, const MassRatio& mu, Primary primary);

/// Mass of the primary regularized by the chart (the coupling g).
double chart_coupling(const MassRatio& mu, Primary primary);

struct FbM {
  double f = 0.0;
  double b = 0.0;
  double M = 0.0;
};

/// f, b and M of the regularized problem in the chart of `primary`:
///   b = -(c + 1/2) - (1 - g)/D
///   M = (1 - xi0)(xi2 eta1 - xi1 eta2) - xi2 (1 - g)
///   f = 1 + (1 - xi0) b + M
/// with D = |eta_vec (1 - xi0) + xi_vec eta0 - (1, 0, 0)|, the distance to the
/// other primary. Throws kCollision when D < 1e-12.
FbM moser_fbM(const MoserState& m, double c, const MassRatio& mu, Primary primary = Primary::kMoon);

/// Q = f^2 |eta|^2 / 2. On the chart Q = g^2/2 exactly when H = c.
double regularized_hamiltonian(const MoserState& m, double c, const MassRatio& mu,
                               Primary primary = Primary::kMoon);

/// Analytic (dQ/dxi, dQ/deta) on T*R^4.
Vec8 regularized_gradient(const MoserState& m, double c, const MassRatio& mu, Primary primary = Primary::kMoon);

/// Hamiltonian field of a function on T*R^4 with gradient `grad`, projected
/// onto the tangent space of T*S^3 = {|xi| = 1, <xi, eta> = 0}.
Vec8 project_to_cotangent_sphere(const MoserState& m, const Vec8& grad);

/// Constrained field of Q. Throws kConstraintDrift if the input is more than
/// 1e-6 off T*S^3.
Vec8 regularized_vector_field(const MoserState& m, double c, const MassRatio& mu,
                              Primary primary = Primary::kMoon);

/// Constrained field of Q_round = |eta|^2 / 2 (geodesic flow of the round sphere).
Vec8 round_geodesic_field(const MoserState& m);

/// dt/ds along the regularized flow: g |q - primary| = g (1 - xi0) |eta|.
double physical_time_rate(const MoserState& m, double g);

/// Normalize xi and strip the xi-component of eta.
MoserState project_constraints(const MoserState& m);

// Levi-Civita map (u, v) -> (p, q) = (u / conj(v), 2 v^2) on C x C.
using Complex = std::complex<double>;

struct PlanarPair {
  Complex p;
  Complex q;
};

/// Throws kInvalidArgument when v == 0.
PlanarPair levi_civita(Complex u, Complex v);

/// (|u|^2 + |v|^2 - 1) / 2.
double levi_civita_hamiltonian(Complex u, Complex v);

/// (H_kepler(L(u, v)) + 1/2) |q| - 2 Q(u, v); vanishes identically.
double levi_civita_kepler_residual(Complex u, Complex v);

/// Intermediate Kepler Hamiltonian K(p, q) = ((|p|^2 + 1)|q| / 2)^2 / 2 on the
/// plane and its gradient (dK/dq, dK/dp).
double kepler_k(const Eigen::Vector2d& q, const Eigen::Vector2d& p);
Vec4 kepler_k_gradient(const Eigen::Vector2d& q, const Eigen::Vector2d& p);

}  // namespace sectionscope

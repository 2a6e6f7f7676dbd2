#pragma once

#include "flow.hpp"
#include "types.hpp"

#include <complex>

namespace sectionscope {

/// Physical open book: theta = atan2(p3, q3) in [0, 2 pi). Throws kBinding
/// when q3^2 + p3^2 < 1e-24.
double physical_angle(const RotState& s);

/// The same angle for a chart state. In a Moser chart it is evaluated as
/// atan2(-xi3, (1 - xi0) y3), a positive rescaling of (q3, p3), so it stays
/// finite near the collision fiber.
double physical_angle(Chart chart, const VecX& y);

/// (q3, p3) up to a positive factor; the factor is 1 in the rotating chart.
Eigen::Vector2d physical_angle_pair(Chart chart, const VecX& y);

/// omega_p(X_H) = (p3^2 + q3^2 F) / (p3^2 + q3^2),
/// F = mu/|q - m|^3 + (1 - mu)/|q - e|^3. Throws kBinding on q3 = p3 = 0.
///
/// The flow turns the angle atan2(p3, q3) backwards at exactly this rate:
/// d/dt atan2(p3, q3) = -omega_p(X_H).
double transversality_value(const RotState& s, const MassRatio& mu);

/// Geodesic open book on T*S^n: atan2(xi_n, eta_n) in [0, 2 pi) with n the
/// last index (3 for the spatial problem). Throws kBinding on xi_n = eta_n = 0.
double geodesic_angle(const MoserState& m, int last = 3);

/// (q3, p3) -> (-q3, -p3); fixes the binding, shifts the physical angle by pi.
RotState involution(const RotState& s);
/// (xi3, eta3) -> (-xi3, -eta3).
MoserState involution(const MoserState& m);

/// First complex coordinate of T*S^3 viewed as the affine quadric
/// sum z_j^2 = 1: |q|^2 = (1 + sqrt(1 + 4 |eta|^2)) / 2,
/// z0 = |q| xi0 + i eta0 / |q|.
std::complex<double> leaf_label(const MoserState& m);

/// Leaf label of a rotating state, read in the chart of the primary whose
/// component the state lies in.
std::complex<double> leaf_label(const RotState& s, const MassRatio& mu, Primary primary);

// ---- Ellipsoid oracle --------------------------------------------------

using C2 = Eigen::Vector2cd;

/// pi |z1|^2 / a + pi |z2|^2 / b - 1.
double ellipsoid_defect(double a, double b, const C2& z);

/// Reeb flow (e^{2 pi i a t} z1, e^{2 pi i b t} z2). Throws kOffSurface when
/// |ellipsoid_defect| > 1e-10.
C2 ellipsoid_flow(double a, double b, double t, const C2& z);

/// Point on the page arg z2 = theta above the disk coordinate z1.
C2 ellipsoid_page_point(double a, double b, std::complex<double> z1, double theta);

struct EllipsoidReturn {
  C2 z;
  C2 fz;
  double tau = 0.0;
  double rotation = 0.0;  ///< arg(fz1 / z1) in (-pi, pi], 0 when z1 = 0
};

/// First return to the page arg z2 = theta, located by bisection on the
/// sampled flow. The binding z2 = 0 is rejected with kBinding.
EllipsoidReturn ellipsoid_return(double a, double b, const C2& z, double theta);

/// Hopf map C^2 \ 0 -> S^2.
Vec3 hopf_map(const C2& z);

}  // namespace sectionscope

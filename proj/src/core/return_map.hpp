#pragma once

#include "flow.hpp"
#include "sections.hpp"
#include "types.hpp"

#include <complex>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace sectionscope {

enum class AngleKind { kPhysical, kGeodesic, kEllipsoid };

const char* angle_kind_name(AngleKind k);

struct SectionSpec {
  AngleKind kind = AngleKind::kPhysical;
  double page = 0.0;  ///< page angle in [0, 2 pi)
};

/// Event whose +1 crossings are positive passages through the physical page.
/// The flow turns atan2(p3, q3) backwards, so a positive passage is the angle
/// decreasing through the page value.
EventSpec page_event(const SectionSpec& spec, int occurrence = 1);

/// Signed circular distance angle - page in (-pi, pi].
double angle_offset(double angle, double page);

struct ReturnSample {
  RotState x;
  RotState fx;
  FlowPoint end;  ///< fx in the chart where it was located
  double tau = 0.0;
  int crossings = 0;  ///< sign changes of the page event before the returned one
  double energy_error = 0.0;
  double min_binding = 0.0;  ///< min of q3^2 + p3^2 over the flight
  bool binding_warning = false;  ///< min_binding < 1e-8
  StepLog log;
};

/// First (or `iterates`-th) positive return to the physical page.
/// Throws kInvalidArgument for non-physical specs or a start off the page,
/// kBinding within q3^2 + p3^2 < 1e-12, and the flow errors.
ReturnSample return_map(const Cr3bpFlow& flow, const RotState& x, const SectionSpec& spec, int iterates = 1);

// ---- Symplectic frames ---------------------------------------------------

/// omega(u, v) = u_p . v_q - u_q . v_p, the form sum dp ^ dq.
double omega(const Vec6& u, const Vec6& v);

/// Darboux basis of the omega-complement W of span{X_H, grad H} at a point.
/// Columns (e1, e2, f1, f2) with omega(e_i, f_j) = delta_ij, the rest zero.
struct DarbouxFrame {
  Eigen::Matrix<double, 6, 4> basis;
  Vec6 xh;
  Vec6 grad;
  /// Coordinates (a1, a2, b1, b2) of the W-part of u.
  Eigen::Vector4d coords(const Vec6& u) const;
};
DarbouxFrame darboux_frame(const RotState& x, const MassRatio& mu);

/// [[0, I], [-I, 0]] in Darboux coordinates.
Eigen::Matrix4d omega_matrix4();

/// max_i min_{j != i} |l_i l_j - 1|.
double reciprocal_pair_residual(const std::vector<std::complex<double>>& ev);

/// Central finite-difference derivative of the chart-time flow map along the
/// step log of a reference run, applied to the columns of `dirs`. Perturbed
/// starts are put back on H = c along grad H; a correction above 1e-6 throws
/// kPerturbationEscape.
MatX replay_derivative(const Cr3bpFlow& flow, const RotState& x, double c, const StepLog& log,
                       const MatX& dirs, double h);

struct PageJacobian {
  Eigen::Matrix4d J;
  double symplecticity = 0.0;  ///< Frobenius norm of J^T Omega J - Omega
  std::vector<std::complex<double>> eigenvalues;
  double reciprocal_residual = 0.0;
  double condition = 0.0;
  ReturnSample sample;
};

/// Return-map Jacobian in Darboux coordinates of W at x and at f(x).
PageJacobian return_map_jacobian(const Cr3bpFlow& flow, const RotState& x, const SectionSpec& spec,
                                 double h = 1e-6, int iterates = 1);

// ---- Page chart ----------------------------------------------------------

/// Energy-corrected affine chart of the physical page around a base point:
/// x(s) = base + B s + alpha(s) d with B an orthonormal basis of
/// {l, grad H(base)}^perp (l the page functional) and alpha fixing H = c.
class PageChart {
 public:
  PageChart(const MassRatio& mu, const RotState& base, double c, const SectionSpec& spec);

  RotState point(const Eigen::Vector4d& s) const;
  Eigen::Vector4d coords(const RotState& y) const;
  /// dx/ds, 6 x 4.
  Eigen::Matrix<double, 6, 4> tangent(const Eigen::Vector4d& s) const;
  /// Removes the X_H component of v along the page functional.
  Vec6 to_page(const RotState& at, const Vec6& v) const;

  const RotState& base() const { return base_; }
  const Eigen::Matrix<double, 6, 4>& basis() const { return B_; }

 private:
  MassRatio mu_;
  RotState base_;
  double c_;
  Vec6 ell_;
  Vec6 d_;
  Eigen::Matrix<double, 6, 4> B_;
};

// ---- Exactness -------------------------------------------------------------

struct LoopCheck {
  double residual = 0.0;  ///< |loop integral of f*lambda - loop integral of lambda|
  double loop_length = 0.0;
  double action = 0.0;
  double image_action = 0.0;
  int points = 0;
};

/// Loop integral of p dq over uniformly spaced samples of a smooth closed
/// loop, with dq/ds from the discrete Fourier derivative.
double loop_action(const std::vector<Vec3>& q, const std::vector<Vec3>& p);

/// The loop is given by uniformly spaced samples of a smooth closed curve on
/// the page at energy c.
LoopCheck exactness_loop_check(const Cr3bpFlow& flow, const std::vector<RotState>& loop, const SectionSpec& spec);

/// Circle of radius r in the page chart around `center`, spanned by the
/// first two chart directions.
std::vector<RotState> page_circle(const MassRatio& mu, const RotState& center, double c, const SectionSpec& spec,
                                  double r, int n);

// ---- Ellipsoid page maps ---------------------------------------------------

struct EllipsoidJacobian {
  Eigen::Matrix2d J;
  double symplecticity = 0.0;
};

/// FD Jacobian of z1 -> f(z1) on the page arg z2 = theta, in real
/// coordinates (Re z1, Im z1).
EllipsoidJacobian ellipsoid_return_jacobian(double a, double b, std::complex<double> z1, double theta,
                                            double h = 1e-6);

/// Page coordinate of the k-th return.
std::complex<double> ellipsoid_page_map(double a, double b, std::complex<double> z1, double theta, int k = 1);

/// Loop integral of (x dy - y dx)/2 over a circle in the disk page and over
/// its image.
LoopCheck ellipsoid_loop_check(double a, double b, std::complex<double> center, double r, double theta, int n = 64);

// ---- Sampling ----------------------------------------------------------

/// Radius of a ball around the primary that contains its bounded Hill
/// component: the distance to L1 for 0 < mu < 1, otherwise 1/|c| (Kepler).
double component_radius(const MassRatio& mu, double c, Primary primary);

struct ShellSamplerOptions {
  Primary primary = Primary::kMoon;
  double max_radius = 0.0;  ///< 0: component_radius
  double min_radius = 0.05;  ///< keep outside the chart switch radius
  std::uint64_t seed = 1;
};

/// States with H = c in the bounded component around the primary. A
/// position is kept when the segment to the primary stays in the Hill
/// region; the momentum direction is uniform.
std::vector<RotState> sample_shell(const MassRatio& mu, double c, int n, const ShellSamplerOptions& opt);

/// As sample_shell, restricted to the physical page: (q3, p3) = rho (cos, sin)
/// of the page angle with rho >= min_rho.
std::vector<RotState> sample_page(const MassRatio& mu, double c, const SectionSpec& spec, int n,
                                  const ShellSamplerOptions& opt, double min_rho = 1e-3);

// ---- Scans -------------------------------------------------------------

struct ScanRow {
  int index = 0;
  RotState x;
  RotState fx;
  double tau = 0.0;
  double energy = 0.0;
  double energy_error = 0.0;
  double symplecticity = std::numeric_limits<double>::quiet_NaN();
  double leaf_delta = std::numeric_limits<double>::quiet_NaN();
  double min_binding = 0.0;
  bool binding_warning = false;
  std::string error;  ///< empty on success, else the error code name
};

struct ScanOptions {
  int n = 100;
  std::uint64_t seed = 1;
  SectionSpec section;
  ShellSamplerOptions sampler;
  bool jacobians = false;
  double h = 1e-6;
};

/// Random page points, their returns and diagnostics. Per-point failures
/// become rows with the error tag; rows keep the sample order.
std::vector<ScanRow> section_scan(const Cr3bpFlow& flow, double c, const ScanOptions& opt);

/// Same rows for explicit start points.
std::vector<ScanRow> section_scan_points(const Cr3bpFlow& flow, const std::vector<RotState>& pts,
                                         const ScanOptions& opt);

struct BindingApproachRow {
  double rho = 0.0;
  double condition = 0.0;
  double symplecticity = 0.0;
  double tau = 0.0;
  std::string error;
};

/// Moves a page point towards the binding along the (q3, p3) ray, keeping
/// H = c through the planar momentum, and records Jacobian conditioning.
std::vector<BindingApproachRow> binding_approach_study(const Cr3bpFlow& flow, const RotState& x,
                                                       const SectionSpec& spec, const std::vector<double>& rhos);

}  // namespace sectionscope

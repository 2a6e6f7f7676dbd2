#pragma once

#include "error.hpp"
#include "flow.hpp"
#include "return_map.hpp"
#include "types.hpp"

#include <complex>
#include <limits>
#include <string>
#include <vector>

namespace sectionscope {

enum class OrbitSymmetry { kNone, kPlanar, kSpatial, kVerticalCollision, kSymmetricXAxis };

const char* symmetry_name(OrbitSymmetry s);

struct PeriodicOrbit {
  RotState representative;
  bool page_form = true;  ///< fixed point of the k-th page return, else a full-state orbit
  SectionSpec section;
  int iterates = 1;
  double period = 0.0;
  double energy = 0.0;
  double mu = 0.0;
  Primary primary = Primary::kMoon;  ///< for angular momentum and leaf labels

  OrbitSymmetry symmetry = OrbitSymmetry::kNone;
  double residual = 0.0;  ///< |f^k(x) - x| (page form) or the shooting closure
  double closure_error = std::numeric_limits<double>::quiet_NaN();
  double min_binding = 0.0;  ///< min sqrt(q3^2 + p3^2) along the orbit
  double max_vertical = 0.0;  ///< max |q3| + |p3| along the orbit
  double angular_momentum = 0.0;  ///< time average of ((q - primary) x p)_3
  std::vector<double> newton_history;  ///< residual per iteration

  std::vector<std::complex<double>> floquet;
  double floquet_reciprocal = std::numeric_limits<double>::quiet_NaN();
  bool floquet_ill_conditioned = false;
};

struct NewtonOptions {
  int max_iter = 50;
  double tol = 5e-11;
  double h = 1e-6;
  double singular_tol = 1e-8;  ///< on sigma_min of DG
};

/// Damped Newton on G(s) = chart(f^k(x(s))) - s in the energy-corrected page
/// chart, with the FD Jacobian from replayed step logs and Armijo
/// backtracking. The energy is that of x0. Throws kNoConvergence after
/// max_iter iterations, kJacobianSingular when DG degenerates.
PeriodicOrbit find_periodic_point(const Cr3bpFlow& flow, const RotState& x0, int k, const SectionSpec& spec,
                                  const NewtonOptions& opt = {});

/// Seed (q1, p2): start on the q1-axis with q2 = q3 = p1 = p3 = 0. p2 is
/// re-solved from H = c on the branch closest to the guess. Newton on q1
/// drives p1 = 0 at the next q2 = 0 crossing (a perpendicular crossing);
/// doubling the half orbit closes it.
PeriodicOrbit find_symmetric_planar_orbit(const Cr3bpFlow& flow, double c, double q1, double p2,
                                          Primary primary = Primary::kMoon, const NewtonOptions& opt = {});

/// p1 at the first q2 = 0 crossing after the start (the shooting residual).
double perpendicular_crossing_residual(const Cr3bpFlow& flow, double c, double q1, double p2_sign_hint,
                                       double* half_period = nullptr);

/// Integrates one period: closure error, binding distances, angular momentum.
void analyze_orbit(const Cr3bpFlow& flow, PeriodicOrbit& orbit);

struct FloquetOptions {
  double h = 1e-6;
  double ill_conditioned = 1e10;
};

/// The four nontrivial multipliers from the Darboux-reduced monodromy, and
/// the trivial pair measured along X_H and against the left eigenvector
/// grad H of the full-period map. Fills orbit.floquet and friends and
/// returns the list.
std::vector<std::complex<double>> floquet_multipliers(const Cr3bpFlow& flow, PeriodicOrbit& orbit,
                                                      const FloquetOptions& opt = {});

/// Number of multipliers within tol of 1.
int unit_multiplier_count(const std::vector<std::complex<double>>& m, double tol = 1e-6);

enum class ContinuationParam { kEnergy, kMu };

struct ContinuationOptions {
  ContinuationParam param = ContinuationParam::kMu;
  double step = 1e-3;
  int count = 10;
  int max_halvings = 3;
  /// A re-converged member further than this from its predictor is
  /// treated as a branch jump and the step is halved.
  double max_jump = 0.05;
  NewtonOptions newton;
};

struct ContinuationResult {
  std::vector<PeriodicOrbit> members;  ///< seed first
  bool complete = false;
  ErrorCode stop_code = ErrorCode::kOk;
  std::string stop_reason;
};

/// Natural-parameter continuation. Each target value seed + i * step is
/// reached, halving the sub-step on failure; when the sub-step falls below
/// step / 2^max_halvings the run stops with kFoldDetected.
ContinuationResult continue_family(const PeriodicOrbit& seed, const IntegratorConfig& cfg,
                                   const ContinuationOptions& opt);

// ---- Ellipsoid oracle ------------------------------------------------------

struct EllipsoidPeriodicPoint {
  std::complex<double> z1;
  double residual = 0.0;
  int iterations = 0;
};

/// Newton on z1 -> f^k(z1) - z1 for the ellipsoid page map.
EllipsoidPeriodicPoint find_ellipsoid_periodic_point(double a, double b, std::complex<double> z1, double theta, int k,
                                                     const NewtonOptions& opt = {});

}  // namespace sectionscope

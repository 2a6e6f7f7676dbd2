#pragma once

#include "flow.hpp"
#include "stark_zeeman.hpp"
#include "types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace sectionscope {

struct RoundTripReport {
  int samples = 0;
  double chart_error = 0.0;     ///< chart -> sphere -> chart, relative to 1 + |.|
  double sphere_error = 0.0;    ///< sphere -> chart -> sphere
  double identity_error = 0.0;  ///< 2/(|x|^2+1) = 1 - xi0 and |y| = (1 - xi0)|eta|
  double constraint_error = 0.0;
  double max() const;
};

/// Random chart states in the ball of radius `radius` and random points of
/// T*S^3 (kept away from the north pole by xi0 <= 0.9).
RoundTripReport chart_round_trips(int n, std::uint64_t seed, double radius = 10.0);

struct KeplerOracleReport {
  int orbits = 0;
  double planarity = 0.0;  ///< max over orbits of sigma_3 / sqrt(N) of the xi samples
  double period_spread = 0.0;  ///< (max - min) / mean of the Levi-Civita periods
  double mean_period = 0.0;
};

/// (a) planar K-flow at K = 1/2 mapped to the sphere lies on great circles,
/// (b) the Levi-Civita flow on Q = 0 has one common period.
KeplerOracleReport kepler_oracles(int orbits, std::uint64_t seed);

struct CorrespondenceReport {
  int samples = 0;
  double level_residual = 0.0;  ///< max |Q - g^2/2| over H = c samples
  double hausdorff = 0.0;       ///< Q- vs H-trajectory over one page return
  double return_time = 0.0;
  double min_distance = 0.0;    ///< closest approach to the Moon on the test orbit
};

/// Moon chart. The test orbit is the first sampled page point whose return
/// keeps at least `clearance` from the Moon, flown once with the Moser chart
/// only and once in rotating coordinates only.
CorrespondenceReport regularization_correspondence(const MassRatio& mu, double c, int n, std::uint64_t seed,
                                                   double clearance = 1e-3);

/// Symmetric Hausdorff distance between two curves given as dense point
/// lists. Distances are measured to the polylines, with a sliding window.
double curve_hausdorff(const std::vector<Vec6>& a, const std::vector<Vec6>& b);

struct TransversalitySampleReport {
  std::size_t samples = 0;
  std::size_t nonpositive = 0;
  double min_value = 0.0;
  RotState witness;
};

/// Samples split between the Earth and Moon components (outside the switch radius).
TransversalitySampleReport transversality_sampling(const MassRatio& mu, double c, std::size_t n, std::uint64_t seed);

struct DriftReport {
  int orbits = 0;
  double max_drift = 0.0;  ///< relative
  double duration = 0.0;
  std::vector<double> drifts;
};

/// Random orbits on both bounded components at energy c, `duration` time units each.
DriftReport energy_drift_study(const MassRatio& mu, double c, int orbits, double duration, const IntegratorConfig& cfg,
                               std::uint64_t seed);

/// Stark-Zeeman system with V1 = -1e6 q3^2 and g = 1e-3: F < 0 once |q| > 8e-4.
StarkZeemanSystem a3_violation_fixture();

}  // namespace sectionscope

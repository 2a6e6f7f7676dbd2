#pragma once

#include <Eigen/Dense>

#include <string>

namespace sectionscope {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec8 = Eigen::Matrix<double, 8, 1>;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Earth-Moon mass ratio used throughout the tests and CLI defaults.
inline constexpr double kEarthMoonMu = 0.0121505856;

/// Distance below which a primary counts as a collision in the unregularized chart.
inline constexpr double kCollisionThreshold = 1e-10;

/// Moon mass over total primary mass. The Moon sits at (-1+mu, 0, 0) and the
/// Earth at (mu, 0, 0), so the center of mass is the origin.
class MassRatio {
 public:
  MassRatio() = default;
  explicit MassRatio(double mu);

  double value() const { return mu_; }
  double earth_mass() const { return 1.0 - mu_; }
  double moon_mass() const { return mu_; }
  Vec3 earth() const { return {mu_, 0.0, 0.0}; }
  Vec3 moon() const { return {-1.0 + mu_, 0.0, 0.0}; }

 private:
  double mu_ = 0.0;
};

/// Unregularized rotating-frame phase point.
struct RotState {
  Vec3 q = Vec3::Zero();
  Vec3 p = Vec3::Zero();

  Vec6 packed() const {
    Vec6 s;
    s << q, p;
    return s;
  }
  static RotState unpack(const Eigen::Ref<const VecX>& s) {
    return {s.segment<3>(0), s.segment<3>(3)};
  }
};

/// Regularized phase point on T*S^3, stored in T*R^4.
struct MoserState {
  Vec4 xi = Vec4::Zero();
  Vec4 eta = Vec4::Zero();

  Vec8 packed() const {
    Vec8 s;
    s << xi, eta;
    return s;
  }
  static MoserState unpack(const Eigen::Ref<const VecX>& s) {
    return {s.segment<4>(0), s.segment<4>(4)};
  }
  /// max(| |xi| - 1 |, |<xi, eta>|)
  double constraint_residual() const;
};

enum class Primary { kEarth, kMoon };

const char* primary_name(Primary p);

}  // namespace sectionscope

#pragma once

#include "types.hpp"

#include <functional>

namespace sectionscope {

/// dy/dt = rhs(t, y). May throw; a throwing evaluation rejects the step.
using Rhs = std::function<void(double t, const VecX& y, VecX& dydt)>;

/// 7th-order dense output of a single step.
struct DenseStep {
  double t_old = 0.0;
  double h = 0.0;
  VecX y_old;
  Eigen::MatrixXd F;  // n x 7

  VecX operator()(double t) const;
  double t_new() const { return t_old + h; }
};

/// Dormand-Prince 8(5,3) with step-size control, following the scipy
/// implementation of the same method.
class Dop853 {
 public:
  Dop853(Rhs rhs, double rtol, double atol, double max_step = 0.0);

  /// Start at (t, y). direction is +1 or -1. h0 <= 0 picks the initial step.
  void reset(double t, const VecX& y, int direction = 1, double h0 = 0.0);

  /// One accepted adaptive step. Throws kStepUnderflow when the step size
  /// falls below the floating-point resolution of t.
  void step();

  /// One step of exactly h (signed), no error control. Throws if rhs throws.
  void step_fixed(double h);

  /// Overwrite the current state (e.g. after a projection) and refresh f.
  void set_state(const VecX& y);

  double t() const { return t_; }
  double t_old() const { return t_old_; }
  double last_h() const { return h_prev_; }
  double next_h() const { return h_abs_ * dir_; }
  const VecX& y() const { return y_; }
  const VecX& y_old() const { return y_old_; }
  int rejected() const { return rejected_; }
  int evaluations() const { return nfev_; }

  /// Dense output for the last step.
  DenseStep dense();

 private:
  void eval(double t, const VecX& y, VecX& out);
  bool attempt(double h, double& err_norm);
  double initial_step();

  Rhs rhs_;
  double rtol_, atol_, max_step_;
  int dir_ = 1;
  double t_ = 0.0, t_old_ = 0.0, h_abs_ = 0.0, h_prev_ = 0.0;
  VecX y_, y_old_, f_, f_old_, y_new_, f_new_;
  Eigen::MatrixXd K_;  // 16 x n, rows are stages
  int rejected_ = 0;
  int nfev_ = 0;
};

}  // namespace sectionscope

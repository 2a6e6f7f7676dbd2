#include "dop853.hpp"

#include "dop853_tableau.hpp"
#include "error.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace sectionscope {

namespace tab = dop853;

VecX DenseStep::operator()(double t) const {
  const double x = (t - t_old) / h;
  VecX y = VecX::Zero(y_old.size());
  const int p = static_cast<int>(F.cols());
  for (int i = 0; i < p; ++i) {
    y += F.col(p - 1 - i);
    y *= (i % 2 == 0) ? x : 1.0 - x;
  }
  return y + y_old;
}

Dop853::Dop853(Rhs rhs, double rtol, double atol, double max_step)
    : rhs_(std::move(rhs)), rtol_(rtol), atol_(atol), max_step_(max_step > 0.0 ? max_step : std::numeric_limits<double>::infinity()) {}

void Dop853::eval(double t, const VecX& y, VecX& out) {
  ++nfev_;
  out.resize(y.size());
  rhs_(t, y, out);
  if (!out.allFinite()) fail(ErrorCode::kInternal, "non-finite derivative");
}

void Dop853::reset(double t, const VecX& y, int direction, double h0) {
  dir_ = direction >= 0 ? 1 : -1;
  t_ = t_old_ = t;
  y_ = y_old_ = y;
  eval(t_, y_, f_);
  f_old_ = f_;
  K_.resize(tab::kStagesExtended, y.size());
  rejected_ = 0;
  h_prev_ = 0.0;
  h_abs_ = h0 > 0.0 ? std::min(h0, max_step_) : initial_step();
}

void Dop853::set_state(const VecX& y) {
  y_ = y;
  eval(t_, y_, f_);
}

double Dop853::initial_step() {
  const double n = static_cast<double>(y_.size());
  const VecX scale = (atol_ + y_.array().abs() * rtol_).matrix();
  const double d0 = (y_.array() / scale.array()).matrix().norm() / std::sqrt(n);
  const double d1 = (f_.array() / scale.array()).matrix().norm() / std::sqrt(n);
  const double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  VecX f1;
  try {
    eval(t_ + h0 * dir_, y_ + h0 * dir_ * f_, f1);
  } catch (const Error&) {
    return std::min(h0, max_step_);
  }
  const double d2 = ((f1 - f_).array() / scale.array()).matrix().norm() / std::sqrt(n) / h0;
  double h1;
  if (d1 <= 1e-15 && d2 <= 1e-15) {
    h1 = std::max(1e-6, h0 * 1e-3);
  } else {
    h1 = std::pow(0.01 / std::max(d1, d2), 1.0 / (tab::kInterpolatorPower + 1));
  }
  return std::min({100.0 * h0, h1, max_step_});
}

bool Dop853::attempt(double h, double& err_norm) {
  const Eigen::Index n = y_.size();
  K_.row(0) = f_.transpose();
  VecX dy(n), k(n);
  for (int s = 1; s < tab::kStages; ++s) {
    dy.setZero();
    for (int j = 0; j < s; ++j) {
      if (tab::kA[s][j] != 0.0) dy += tab::kA[s][j] * K_.row(j).transpose();
    }
    eval(t_ + tab::kC[s] * h, y_ + h * dy, k);
    K_.row(s) = k.transpose();
  }
  dy.setZero();
  for (int j = 0; j < tab::kStages; ++j) {
    if (tab::kB[j] != 0.0) dy += tab::kB[j] * K_.row(j).transpose();
  }
  y_new_ = y_ + h * dy;
  eval(t_ + h, y_new_, f_new_);
  K_.row(tab::kStages) = f_new_.transpose();

  VecX e5 = VecX::Zero(n), e3 = VecX::Zero(n);
  for (int j = 0; j <= tab::kStages; ++j) {
    e5 += tab::kE5[j] * K_.row(j).transpose();
    e3 += tab::kE3[j] * K_.row(j).transpose();
  }
  const VecX scale = (atol_ + y_.array().abs().max(y_new_.array().abs()) * rtol_).matrix();
  const double n5 = (e5.array() / scale.array()).matrix().squaredNorm();
  const double n3 = (e3.array() / scale.array()).matrix().squaredNorm();
  if (n5 == 0.0 && n3 == 0.0) {
    err_norm = 0.0;
  } else {
    err_norm = std::abs(h) * n5 / std::sqrt((n5 + 0.01 * n3) * static_cast<double>(n));
  }
  return std::isfinite(err_norm);
}

void Dop853::step() {
  constexpr double kSafety = 0.9, kMinFactor = 0.2, kMaxFactor = 10.0;
  const double exponent = -1.0 / (tab::kInterpolatorPower + 1);
  const double min_step = 10.0 * std::abs(std::nextafter(t_, dir_ * std::numeric_limits<double>::infinity()) - t_);
  double h_abs = std::min(h_abs_, max_step_);
  bool step_rejected = false;
  for (;;) {
    if (h_abs < min_step) {
      std::ostringstream os;
      os << "step size underflow at t = " << t_;
      fail(ErrorCode::kStepUnderflow, os.str());
    }
    const double h = h_abs * dir_;
    double err = 0.0;
    bool ok;
    try {
      ok = attempt(h, err);
    } catch (const Error&) {
      ok = false;
    }
    if (!ok) {
      h_abs *= kMinFactor;
      step_rejected = true;
      ++rejected_;
      continue;
    }
    if (err < 1.0) {
      double factor = err == 0.0 ? kMaxFactor : std::min(kMaxFactor, kSafety * std::pow(err, exponent));
      if (step_rejected) factor = std::min(1.0, factor);
      t_old_ = t_;
      y_old_ = y_;
      f_old_ = f_;
      t_ = t_ + h;
      y_ = y_new_;
      f_ = f_new_;
      h_prev_ = h;
      h_abs_ = std::min(h_abs * factor, max_step_);
      return;
    }
    h_abs *= std::max(kMinFactor, kSafety * std::pow(err, exponent));
    step_rejected = true;
    ++rejected_;
  }
}

void Dop853::step_fixed(double h) {
  double err = 0.0;
  if (!attempt(h, err)) fail(ErrorCode::kInternal, "non-finite error estimate in fixed step");
  t_old_ = t_;
  y_old_ = y_;
  f_old_ = f_;
  t_ = t_ + h;
  y_ = y_new_;
  f_ = f_new_;
  h_prev_ = h;
}

DenseStep Dop853::dense() {
  const Eigen::Index n = y_.size();
  const double h = h_prev_;
  Eigen::MatrixXd K = K_;
  K.row(0) = f_old_.transpose();
  K.row(tab::kStages) = f_.transpose();
  VecX dy(n), k(n);
  for (int s = tab::kStages + 1; s < tab::kStagesExtended; ++s) {
    dy.setZero();
    for (int j = 0; j < s; ++j) {
      if (tab::kA[s][j] != 0.0) dy += tab::kA[s][j] * K.row(j).transpose();
    }
    eval(t_old_ + tab::kC[s] * h, y_old_ + h * dy, k);
    K.row(s) = k.transpose();
  }
  DenseStep d;
  d.t_old = t_old_;
  d.h = h;
  d.y_old = y_old_;
  d.F.resize(n, tab::kInterpolatorPower);
  const VecX delta = y_ - y_old_;
  d.F.col(0) = delta;
  d.F.col(1) = h * f_old_ - delta;
  d.F.col(2) = 2.0 * delta - h * (f_ + f_old_);
  for (int r = 0; r < tab::kInterpolatorPower - 3; ++r) {
    VecX acc = VecX::Zero(n);
    for (int j = 0; j < tab::kStagesExtended; ++j) {
      if (tab::kD[r][j] != 0.0) acc += tab::kD[r][j] * K.row(j).transpose();
    }
    d.F.col(3 + r) = h * acc;
  }
  return d;
}

}  // namespace sectionscope

#include "sarnav/nav_dynamics.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "sarnav/errors.hpp"

namespace sarnav {

namespace {

constexpr std::array<std::string_view, 9> kAxisNames = {
    "at_pos", "ct_pos", "d_pos", "at_vel", "ct_vel", "d_vel", "at_att", "ct_att", "d_att",
};

bool finite(const Vec3& v) { return v.allFinite(); }

// [1; -dtheta/2], normalized.
Quat error_quaternion(const Vec3& dtheta) {
  Quat dq(1.0, -0.5 * dtheta.x(), -0.5 * dtheta.y(), -0.5 * dtheta.z());
  dq.normalize();
  return dq;
}

Mat9 transition_blocks(const Vec3& nu_n, double dt) {
  const Mat3 nu_x = cross_matrix(nu_n);
  Mat9 phi = Mat9::Identity();
  phi.block<3, 3>(0, 3) = Mat3::Identity() * dt;
  phi.block<3, 3>(0, 6) = nu_x * (dt * dt / 2.0);
  phi.block<3, 3>(3, 6) = nu_x * dt;
  return phi;
}

}  // namespace

std::string_view axis_name(ErrorAxis axis) { return kAxisNames[static_cast<int>(axis)]; }

ErrorAxis parse_axis(std::string_view name) {
  for (std::size_t i = 0; i < kAxisNames.size(); ++i) {
    if (kAxisNames[i] == name) return static_cast<ErrorAxis>(i);
  }
  throw ValidationError("unknown error axis '" + std::string(name) +
                        "' (expected one of at_pos, ct_pos, d_pos, at_vel, ct_vel, d_vel, "
                        "at_att, ct_att, d_att)");
}

Vec9 NavError::as_vector() const {
  Vec9 x;
  x << dp_n, dv_n, dtheta_n;
  return x;
}

NavError NavError::from_vector(const Vec9& x) {
  NavError e;
  e.dp_n = x.segment<3>(0);
  e.dv_n = x.segment<3>(3);
  e.dtheta_n = x.segment<3>(6);
  return e;
}

double NavError::component(ErrorAxis axis) const { return as_vector()[static_cast<int>(axis)]; }

void NavError::set_component(ErrorAxis axis, double value) {
  Vec9 x = as_vector();
  x[static_cast<int>(axis)] = value;
  *this = from_vector(x);
}

void NavError::validate() const {
  if (!finite(dp_n) || !finite(dv_n) || !finite(dtheta_n)) {
    throw ValidationError("navigation error has non-finite components");
  }
  if (dtheta_n.norm() >= kSmallAngleLimit) {
    std::ostringstream msg;
    msg << "attitude error |dtheta| = " << dtheta_n.norm()
        << " rad is outside the small-angle regime (< " << kSmallAngleLimit << ")";
    throw ValidationError(msg.str());
  }
}

void Trajectory::validate() const {
  if (samples.empty()) throw ValidationError("trajectory has no samples");
  if (!(dt > 0.0) && samples.size() > 1) throw ValidationError("trajectory dt must be positive");
  if (!finite(nu_n)) throw ValidationError("trajectory specific force is not finite");
  if (samples.front().t < 0.0) throw ValidationError("trajectory epochs must be non-negative");
  for (std::size_t k = 1; k < samples.size(); ++k) {
    const double step = samples[k].t - samples[k - 1].t;
    if (std::abs(step - dt) > 1e-12) {
      std::ostringstream msg;
      msg << "trajectory epoch spacing at sample " << k << " is " << step << " s, expected " << dt;
      throw ValidationError(msg.str());
    }
  }
}

Mat3 cross_matrix(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

TransitionMatrix state_transition(const Vec3& nu_n, double dt) {
  if (!(dt >= 0.0)) throw ValidationError("state_transition: dt must be non-negative");
  return TransitionMatrix{transition_blocks(nu_n, dt)};
}

NavError propagate_error(const NavError& err0, const Vec3& nu_n, double dt) {
  const TransitionMatrix tm = state_transition(nu_n, dt);
  return NavError::from_vector(tm.phi * err0.as_vector());
}

NavError propagate_error_between(const NavError& err, const Vec3& nu_n, double t_from,
                                 double t_to) {
  const double dt = t_to - t_from;
  if (!std::isfinite(dt)) throw ValidationError("propagate_error_between: non-finite interval");
  return NavError::from_vector(transition_blocks(nu_n, dt) * err.as_vector());
}

NavState apply_corrections(const NavState& est, const NavError& err) {
  NavState out = est;
  out.p_n = est.p_n + err.dp_n;
  out.v_n = est.v_n + err.dv_n;
  out.q_bn = error_quaternion(err.dtheta_n) * est.q_bn;
  out.q_bn.normalize();
  return out;
}

NavState remove_corrections(const NavState& truth, const NavError& err) {
  NavState out = truth;
  out.p_n = truth.p_n - err.dp_n;
  out.v_n = truth.v_n - err.dv_n;
  out.q_bn = error_quaternion(err.dtheta_n).conjugate() * truth.q_bn;
  out.q_bn.normalize();
  return out;
}

Trajectory corrupt_trajectory(const Trajectory& truth, const NavError& err0) {
  truth.validate();
  return corrupt_trajectory(truth, err0, truth.start_time());
}

Trajectory corrupt_trajectory(const Trajectory& truth, const NavError& err0,
                              double reference_time) {
  truth.validate();
  Trajectory est = truth;
  for (NavState& s : est.samples) {
    const NavError e = propagate_error_between(err0, truth.nu_n, reference_time, s.t);
    s = remove_corrections(s, e);
  }
  return est;
}

Trajectory generate_level_trajectory(double speed, double altitude, double duration,
                                     double pulse_rate) {
  if (!(speed > 0.0) || !(altitude > 0.0) || !(duration > 0.0) || !(pulse_rate > 0.0)) {
    throw ValidationError(
        "generate_level_trajectory: speed, altitude, duration and pulse_rate must be positive");
  }
  const auto count = static_cast<std::size_t>(std::floor(duration * pulse_rate + 1e-9)) + 1;
  Trajectory traj;
  traj.dt = 1.0 / pulse_rate;
  traj.nu_n = Vec3(0.0, 0.0, -kGravity);
  traj.samples.resize(count);
  const double x0 = -0.5 * speed * duration;
  for (std::size_t k = 0; k < count; ++k) {
    NavState& s = traj.samples[k];
    s.t = static_cast<double>(k) * traj.dt;
    s.p_n = Vec3(x0 + speed * s.t, 0.0, -altitude);
    s.v_n = Vec3(speed, 0.0, 0.0);
    s.q_bn = Quat::Identity();
  }
  return traj;
}

}  // namespace sarnav

#pragma once

// Strapdown navigation state, first-order error propagation for straight and
// level flight, and the correction relations between true and estimated
// trajectories.
//
// Frame: locally level along-track / cross-track / down (AT, CT, D). Down is
// positive along gravity, the ground plane is z = 0 and the aircraft flies at
// negative Down. Quaternions are Hamilton, scalar-first when serialized.

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <cstddef>
#include <string_view>
#include <vector>

namespace sarnav {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec9 = Eigen::Matrix<double, 9, 1>;
using Mat9 = Eigen::Matrix<double, 9, 9>;
using Quat = Eigen::Quaterniond;

inline constexpr double kGravity = 9.80665;

/// Largest attitude error magnitude accepted by the first-order model.
inline constexpr double kSmallAngleLimit = 0.1;

/// The nine initial-error components, in error-vector order.
enum class ErrorAxis : int {
  kAtPosition = 0,
  kCtPosition,
  kDownPosition,
  kAtVelocity,
  kCtVelocity,
  kDownVelocity,
  kAtAttitude,
  kCtAttitude,
  kDownAttitude,
};

inline constexpr std::array<ErrorAxis, 9> kAllErrorAxes = {
    ErrorAxis::kAtPosition,  ErrorAxis::kCtPosition,  ErrorAxis::kDownPosition,
    ErrorAxis::kAtVelocity,  ErrorAxis::kCtVelocity,  ErrorAxis::kDownVelocity,
    ErrorAxis::kAtAttitude,  ErrorAxis::kCtAttitude,  ErrorAxis::kDownAttitude,
};

/// Short machine name, e.g. "ct_pos", "at_vel", "d_att".
std::string_view axis_name(ErrorAxis axis);
/// Inverse of axis_name; throws ValidationError for unknown names.
ErrorAxis parse_axis(std::string_view name);

struct NavState {
  Vec3 p_n = Vec3::Zero();
  Vec3 v_n = Vec3::Zero();
  Quat q_bn = Quat::Identity();
  double t = 0.0;
};

struct NavError {
  Vec3 dp_n = Vec3::Zero();
  Vec3 dv_n = Vec3::Zero();
  Vec3 dtheta_n = Vec3::Zero();

  Vec9 as_vector() const;
  static NavError from_vector(const Vec9& x);

  double component(ErrorAxis axis) const;
  void set_component(ErrorAxis axis, double value);

  /// Throws ValidationError on non-finite values or |dtheta| >= kSmallAngleLimit.
  void validate() const;
};

/// Uniformly sampled trajectory with constant nominal specific force.
struct Trajectory {
  std::vector<NavState> samples;
  double dt = 0.0;
  Vec3 nu_n = Vec3(0.0, 0.0, -kGravity);

  std::size_t size() const { return samples.size(); }
  double start_time() const { return samples.front().t; }
  double end_time() const { return samples.back().t; }
  double mid_time() const { return 0.5 * (start_time() + end_time()); }

  void validate() const;
};

struct TransitionMatrix {
  Mat9 phi = Mat9::Identity();
};

/// Skew-symmetric M with M * w == v x w.
Mat3 cross_matrix(const Vec3& v);

/// Closed-form error transition over an interval dt >= 0 at constant nu_n.
TransitionMatrix state_transition(const Vec3& nu_n, double dt);

/// Phi(dt) applied to err0. Rejects negative dt.
NavError propagate_error(const NavError& err0, const Vec3& nu_n, double dt);

/// Propagates an error known at `t_from` to `t_to`, in either direction.
/// The closed form is exact for constant nu_n, so backward intervals use the
/// same blocks with a negative interval.
NavError propagate_error_between(const NavError& err, const Vec3& nu_n, double t_from,
                                 double t_to);

/// True state from an estimate and the error at the same epoch:
/// p = p_hat + dp, v = v_hat + dv, q = [1; -dtheta/2] (x) q_hat, renormalized.
NavState apply_corrections(const NavState& est, const NavError& err);

/// Exact inverse of apply_corrections: the estimate that `err` corrects to `truth`.
NavState remove_corrections(const NavState& truth, const NavError& err);

/// Estimated trajectory whose per-epoch propagated error is err0 referenced at
/// the first epoch.
Trajectory corrupt_trajectory(const Trajectory& truth, const NavError& err0);

/// As above with err0 referenced at `reference_time` (any epoch inside or
/// outside the trajectory span).
Trajectory corrupt_trajectory(const Trajectory& truth, const NavError& err0,
                              double reference_time);

/// Straight, level, constant-velocity flight along +AT at the given altitude.
/// The aperture is centred on AT = 0 and samples are at t = k / pulse_rate.
Trajectory generate_level_trajectory(double speed, double altitude, double duration,
                                     double pulse_rate);

}  // namespace sarnav

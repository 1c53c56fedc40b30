#include "swaptime/costate.hpp"

#include <cmath>
#include <numbers>

namespace swaptime {

namespace {

constexpr double pi = std::numbers::pi;

double norm3(const Vec3& v) {
  return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

}  // namespace

SystemParams::SystemParams(double omega0_, double gamma_)
    : omega0(omega0_), gamma(gamma_), omega(std::hypot(omega0_, gamma_)) {
  if (!(omega0 > 0.0) || !(gamma > 0.0)) {
    throw std::invalid_argument("SystemParams: omega0 and gamma must be positive");
  }
}

CostateState costate_rhs(const CostateState& s, const Vec3& u, const SystemParams& p) {
  const double w0 = p.omega0;
  const auto& b = s.b;
  const auto& c = s.c;
  CostateState d;
  d.b[0] = -w0 * c[1] - u[2] * b[1] + u[1] * b[2];
  d.b[1] = w0 * c[0] + u[2] * b[0] - u[0] * b[2];
  d.b[2] = u[0] * b[1] - u[1] * b[0];
  d.c[0] = -w0 * b[1] + u[1] * c[2] - u[2] * c[1];
  d.c[1] = w0 * b[0] - u[0] * c[2] + u[2] * c[0];
  d.c[2] = u[0] * c[1] - u[1] * c[0];
  return d;
}

std::optional<Vec3> extremal_controls(const CostateState& s, const SystemParams& p) {
  const double mu = norm3(s.b);
  if (mu < mu_min) {
    return std::nullopt;
  }
  return Vec3{p.gamma * s.b[0] / mu, p.gamma * s.b[1] / mu, p.gamma * s.b[2] / mu};
}

ConservedPair constants_of_motion(const CostateState& s, const SystemParams& p) {
  double q = 0.0;
  double x = 0.0;
  for (int k = 0; k < 3; ++k) {
    q += s.b[k] * s.b[k] + s.c[k] * s.c[k];
    x += s.b[k] * s.c[k];
  }
  return {0.5 * p.omega0 * p.omega0 * q, p.omega0 * x};
}

double pontryagin_h(const CostateState& s, const Vec3& u, const SystemParams& p) {
  return p.omega0 * s.c[2] + u[0] * s.b[0] + u[1] * s.b[1] + u[2] * s.b[2];
}

std::vector<TrajectoryPoint> integrate_costate(const CostateState& s0,
                                               const SystemParams& p,
                                               double horizon, double step) {
  if (horizon < 0.0) {
    throw std::invalid_argument("integrate_costate: horizon must be nonnegative");
  }
  if (!(step > 0.0) || step > 0.01 / p.omega) {
    throw std::invalid_argument("integrate_costate: step must be in (0, 0.01/omega]");
  }

  auto control_of = [&](const CostateState& s) -> Vec3 {
    auto u = extremal_controls(s, p);
    return u ? *u : Vec3{0.0, 0.0, 0.0};
  };
  auto axpy = [](const CostateState& s, double h, const CostateState& d) {
    CostateState r;
    for (int k = 0; k < 3; ++k) {
      r.b[k] = s.b[k] + h * d.b[k];
      r.c[k] = s.c[k] + h * d.c[k];
    }
    return r;
  };

  std::vector<TrajectoryPoint> out;
  out.push_back({0.0, s0});
  if (horizon == 0.0) {
    return out;
  }

  const std::size_t n_full = static_cast<std::size_t>(std::floor(horizon / step));
  const double rem = horizon - static_cast<double>(n_full) * step;
  const std::size_t n_total = n_full + (rem > 1e-15 * horizon ? 1 : 0);
  out.reserve(n_total + 1);

  CostateState s = s0;
  double t = 0.0;
  for (std::size_t i = 0; i < n_total; ++i) {
    const double h = (i < n_full) ? step : rem;
    const CostateState k1 = costate_rhs(s, control_of(s), p);
    const CostateState s2 = axpy(s, 0.5 * h, k1);
    const CostateState k2 = costate_rhs(s2, control_of(s2), p);
    const CostateState s3 = axpy(s, 0.5 * h, k2);
    const CostateState k3 = costate_rhs(s3, control_of(s3), p);
    const CostateState s4 = axpy(s, h, k3);
    const CostateState k4 = costate_rhs(s4, control_of(s4), p);
    CostateState next;
    for (int k = 0; k < 3; ++k) {
      next.b[k] = s.b[k] + (h / 6.0) * (k1.b[k] + 2.0 * k2.b[k] + 2.0 * k3.b[k] + k4.b[k]);
      next.c[k] = s.c[k] + (h / 6.0) * (k1.c[k] + 2.0 * k2.c[k] + 2.0 * k3.c[k] + k4.c[k]);
    }
    s = next;
    t = (i + 1 == n_total) ? horizon : t + h;
    out.push_back({t, s});
  }
  return out;
}

InitialCoefficients initial_coefficients(double bx0, int sign, const SystemParams& p) {
  if (!(bx0 >= 0.0 && bx0 <= 1.0)) {
    throw std::invalid_argument("initial_coefficients: bx0 must lie in [0, 1]");
  }
  if (sign != 1 && sign != -1) {
    throw std::invalid_argument("initial_coefficients: sign must be +1 or -1");
  }
  const double r0 = p.omega0 / p.omega;
  InitialCoefficients ic;
  ic.a0 = r0 * r0 * bx0;
  ic.b0 = static_cast<double>(sign) * r0 * std::sqrt(std::max(0.0, 1.0 - bx0 * bx0));
  ic.c0 = (p.gamma / p.omega) * (p.gamma / p.omega) * bx0;
  return ic;
}

SwitchingTimes switching_times(double bx0, int sign, const SystemParams& p) {
  const InitialCoefficients ic = initial_coefficients(bx0, sign, p);
  const double w = p.omega;

  if (bx0 == 0.0) {
    // Pure harmonic motion about zero: zeros are exactly pi/omega apart and
    // the first one is reached after a half period.
    return {pi / w, pi / w};
  }

  const double r2 = ic.a0 * ic.a0 + ic.b0 * ic.b0;
  double delta = r2 - ic.c0 * ic.c0;
  if (delta < -1e-14 * r2) {
    throw NoSwitchError("switching_times: b_x never vanishes for this initial state");
  }
  delta = std::max(delta, 0.0);
  const double sq = std::sqrt(delta);

  // First zero of b_x: angle in [0, 2 pi).
  double ang_t = std::atan2(-ic.b0 * ic.c0 + ic.a0 * sq, -ic.a0 * ic.c0 - ic.b0 * sq);
  if (ang_t < 0.0) {
    ang_t += 2.0 * pi;
  }
  // Spacing between zeros: angle in (0, 2 pi]; the tangency case delta = 0
  // corresponds to a full period.
  double ang_b = std::atan2(-2.0 * ic.c0 * sq, 2.0 * ic.c0 * ic.c0 - r2);
  if (ang_b <= 0.0) {
    ang_b += 2.0 * pi;
  }
  return {ang_t / w, ang_b / w};
}

double effective_potential(double b, double lambda, const SystemParams& p) {
  return 0.5 * p.omega * p.omega * b * b - p.gamma * lambda * b;
}

}  // namespace swaptime

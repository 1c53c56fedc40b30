#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "swaptime/su2.hpp"

namespace swaptime {

// Pair of two-level systems driven by one shared control field.  The drifts
// have equal magnitude omega0 and opposite signs; the control amplitude is
// bounded by gamma.  omega is the derived modulus sqrt(omega0^2 + gamma^2)
// that sets the natural angular scale of every bang arc.
struct SystemParams {
  double omega0;
  double gamma;
  double omega;

  SystemParams(double omega0_, double gamma_);
};

// Adjoint variables of the maximum-principle boundary value problem.
// b couples to the control, c to the drift mismatch.
struct CostateState {
  Vec3 b{};
  Vec3 c{};
};

// First zero of b_x (t_tilde) and the spacing between consecutive zeros
// (t_bar) along a bang arc started at a zero of b_x' sign structure.
struct SwitchingTimes {
  double t_tilde;
  double t_bar;
};

// Coefficients of the piecewise-harmonic b_x solution on the first bang arc:
// b_x(t) = a0 cos(omega t) + b0 sin(omega t) + sign(b_x) c0.
struct InitialCoefficients {
  double a0;
  double b0;
  double c0;
};

// Quadratic invariants preserved by the adjoint flow under any control.
struct ConservedPair {
  double e;
  double l;
};

// Threshold below which |(b_x, b_y, b_z)| counts as vanishing.  At that point
// the pointwise maximization of the control Hamiltonian no longer determines
// the control (singular-arc signal).
inline constexpr double mu_min = 1e-10;

// Thrown when b_x never reaches zero for the requested initial data, i.e. the
// trajectory stays on one bang forever and no switching structure exists.
struct NoSwitchError : std::domain_error {
  using std::domain_error::domain_error;
};

// Right-hand side of the adjoint equations for control u.
CostateState costate_rhs(const CostateState& s, const Vec3& u, const SystemParams& p);

// Control that maximizes the control Hamiltonian: gamma * b / |b|.
// Returns nullopt when |b| < mu_min (control undetermined there).
std::optional<Vec3> extremal_controls(const CostateState& s, const SystemParams& p);

// e = (omega0^2 / 2) sum_k (b_k^2 + c_k^2),  l = omega0 sum_k b_k c_k.
ConservedPair constants_of_motion(const CostateState& s, const SystemParams& p);

// omega0 c_z + sum_k u_k b_k.
double pontryagin_h(const CostateState& s, const Vec3& u, const SystemParams& p);

struct TrajectoryPoint {
  double t;
  CostateState s;
};

// Classic fixed-step RK4 on the closed adjoint loop: at every stage the
// control is recomputed from the stage state via extremal_controls; while the
// signal is undetermined the control is held at zero.  step must be positive
// and at most 0.01 / omega.  horizon = 0 yields the single initial point.
std::vector<TrajectoryPoint> integrate_costate(const CostateState& s0,
                                               const SystemParams& p,
                                               double horizon, double step);

// bx0 in [0, 1] is b_x(0); sign (+1 / -1) selects the sign of b_x'(0).
InitialCoefficients initial_coefficients(double bx0, int sign, const SystemParams& p);

// First zero t_tilde of b_x and inter-zero spacing t_bar for the arc with the
// given initial data.  Throws NoSwitchError when b_x never vanishes.
SwitchingTimes switching_times(double bx0, int sign, const SystemParams& p);

// (omega^2 / 2) b^2 - gamma lambda b: potential of the one-dimensional
// oscillator obeyed by the planar |b| coordinate at Hamiltonian level lambda.
double effective_potential(double b, double lambda, const SystemParams& p);

}  // namespace swaptime

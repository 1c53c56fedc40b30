#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "swaptime/costate.hpp"
#include "swaptime/propagate.hpp"

namespace swaptime {

// The closed-form extremal families fall into three structural kinds,
// distinguished by which off-diagonal phase the two propagators land on and
// by whether the law contains a drift-only (singular) arc.
enum class FamilyKind { sigma_y, sigma_x, singular };

// Identifies one member of one family.
//  - n counts bang half-oscillations beyond the minimal structure
//    (sigma_y: 0, 1, 2; sigma_x: 0, 1; singular: 0).
//  - branch disambiguates members sharing the same (kind, n):
//      sigma_y n=1:  +1 upper-sign target, -1 lower-sign target
//      sigma_y n=2:  0 = pp, 1 = pm, 2 = mp, 3 = mm, first letter the
//                    target sign, second the inner square-root sign
//      sigma_x n=1:  root index 0..2 of the defining cubic for the upper-sign
//                    target, 4 + root index for the lower-sign target
//      otherwise 0
//  - b0sign is the sign of b_x'(0) along the realizing adjoint trajectory.
struct FamilyId {
  FamilyKind kind = FamilyKind::sigma_y;
  int n = 0;
  int branch = 0;
  int b0sign = +1;

  std::string label() const;
};

// Whether the two final propagators carry equal or opposite signs of the
// common target matrix.
enum class SignPattern { x1_eq_x2, x1_eq_neg_x2 };

// One fully determined strategy candidate at fixed system parameters.
// t_prime is the drift-only arc length (singular kind only, else 0);
// switches counts interior control discontinuities;
// t_f is the total duration;
// target_sign is the sign s in X_1 = s * swap_equivalent(phi);
// dominated marks candidates kept for completeness that can never be optimal.
struct ExtremalCandidate {
  FamilyId family;
  double bx0 = 0.0;
  double t_tilde = 0.0;
  double t_bar = 0.0;
  double t_prime = 0.0;
  int switches = 0;
  double t_f = 0.0;
  SignPattern sign_pattern = SignPattern::x1_eq_neg_x2;
  int target_sign = +1;
  bool dominated = false;
};

// Half-arc rotation split: for tau = t_bar / 2,
//   sin(alpha) = (omega0/omega) sin(omega tau),  alpha in [0, pi/2];
//   beta = atan2((omega/|cos alpha|) terms) in [0, pi].
// Returns {alpha, beta}.
std::pair<double, double> alpha_beta(double t_bar, const SystemParams& p);

// Real roots of z^3 + p z + q = 0, ascending, via the trigonometric /
// hyperbolic closed forms.  Each root satisfies |z^3 + p z + q| < 1e-10.
std::vector<double> cardano_roots(double p, double q);

std::vector<ExtremalCandidate> sigma_y_candidates(const SystemParams& p);
std::vector<ExtremalCandidate> sigma_x_candidates(const SystemParams& p);

// Bang - drift - bang candidate; absent when gamma < omega0.
std::optional<ExtremalCandidate> singular_candidate(const SystemParams& p);
// Companion branch of the singular construction with the longer drift arc;
// flagged dominated.  Absent when gamma < omega0.
std::optional<ExtremalCandidate> dominated_singular_candidate(const SystemParams& p);

// All candidates at these parameters, residual-filtered and deduplicated.
std::vector<ExtremalCandidate> enumerate_candidates(const SystemParams& p);

// Concrete piecewise-constant control law realizing the candidate for the
// requested target phase.  Bang directions live in the plane spanned by
// (cos, -sin) of the phase, rotated by the family's intrinsic quarter-turn
// for sigma_x kinds; the singular law interleaves a zero-control arc.
ControlLaw candidate_schedule(const ExtremalCandidate& c, const TargetSpec& spec,
                              const SystemParams& p);

// Max |r_i| of the trigonometric system that defines sigma_y members with the
// candidate's (n, target_sign, t_tilde, t_bar).
double sigma_y_system_residual(int n, int target_sign, double t_tilde, double t_bar,
                               const SystemParams& p);
// Same for sigma_x members.
double sigma_x_system_residual(int n, int target_sign, double t_tilde, double t_bar,
                               const SystemParams& p);

// Residual of the defining scalar equation in sin(alpha) for the candidate:
// the quartic for sigma_y n=2 members, the cubic for sigma_x n=1 members.
// Returns nullopt for kinds without such an equation.
std::optional<double> scalar_equation_residual(const ExtremalCandidate& c,
                                               const SystemParams& p);

// Max |r_i| of whichever system defines this candidate (0 for singular kind,
// where the construction is explicit rather than a root of a system).
double candidate_residual(const ExtremalCandidate& c, const SystemParams& p);

}  // namespace swaptime

#pragma once

#include <vector>

#include "swaptime/costate.hpp"
#include "swaptime/su2.hpp"

namespace swaptime {

// One piecewise-constant control segment.
struct ControlSegment {
  double duration = 0.0;
  Vec3 u{};
};

// Piecewise-constant shared control.  Construction rejects nonpositive
// segment durations; an empty law is the identity evolution of length zero.
struct ControlLaw {
  std::vector<ControlSegment> segments;

  ControlLaw() = default;
  explicit ControlLaw(std::vector<ControlSegment> segs);

  double total_duration() const;
};

// Final-time propagators of the two systems (opposite drifts, shared u).
struct UnitaryPair {
  Su2Matrix x1;
  Su2Matrix x2;
};

// Outcome of checking a propagated pair against a target up to sign.
struct Verdict {
  bool reached = false;
  int sign1 = 0;
  int sign2 = 0;
  double err = 0.0;
};

// Exact product of segment exponentials.  Validates that every segment
// respects the control bound |u| <= gamma.
UnitaryPair propagate_closed(const ControlLaw& law, const SystemParams& p);

// Fixed-step RK4 on dX = -i H X for both systems followed by one polar
// re-unitarization of each final matrix.  Within each segment the step is
// shrunk so an integer number of steps lands exactly on the switch.
UnitaryPair propagate_numeric(const ControlLaw& law, const SystemParams& p, double step);

// Do both propagators match +/- swap_equivalent(spec), each up to its own
// sign?  err is the larger of the two Frobenius distances.
Verdict verify_target(const UnitaryPair& pair, const TargetSpec& spec, double tol = 1e-8);

// In-plane rotation of a control law by angle phi:
// (u_x, u_y) -> (u_x cos phi + u_y sin phi, -u_x sin phi + u_y cos phi).
// Conjugates the final propagators by exp(-i phi S_z) on the relevant side,
// carrying a law for one target phase to the target phase shifted by phi.
ControlLaw rotate_law(const ControlLaw& law, double phi);

}  // namespace swaptime

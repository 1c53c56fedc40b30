#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "swaptime/extremals.hpp"

namespace swaptime {

// Smallest gamma / omega0 ratio at which the closed-form candidate families
// start to exist; below it enumerate_candidates comes back empty.
inline constexpr double analytic_coverage_ratio = 0.325;

// Thrown by solve when no candidate family exists at the given parameters.
struct NoAnalyticSolutionError : std::runtime_error {
  double coverage_bound;

  explicit NoAnalyticSolutionError(double bound)
      : std::runtime_error(
            "no closed-form candidate exists at these parameters; coverage "
            "starts near gamma/omega0 = " +
            std::to_string(bound)),
        coverage_bound(bound) {}
};

struct OptimalSolution {
  ExtremalCandidate winner;
  ControlLaw law;
  double t_opt = 0.0;
  // True when t_opt lies within the horizon on which the candidate list is
  // provably exhaustive (t_opt <= 5 pi / omega).
  bool certified = false;
  // Remaining non-dominated candidates, sorted by duration.
  std::vector<std::pair<FamilyId, double>> runners_up;
};

// Picks the fastest non-dominated candidate and materializes its control law
// for the requested target phase.  Ties within 1e-9 relative duration prefer
// a bang-bang candidate over a singular one.
OptimalSolution solve(const SystemParams& p, const TargetSpec& spec);

// One row of a gamma sweep at fixed omega0.
struct SweepRow {
  double gamma = 0.0;
  // label -> duration for every candidate present at this gamma.
  std::vector<std::pair<std::string, double>> family_times;
  double t_opt = 0.0;
  std::string winner;  // empty when no candidate family exists
  bool certified = false;
  bool solvable = false;
};

// Inclusive uniform grid of `points` >= 2 gammas; rows computed in parallel.
std::vector<SweepRow> sweep(double omega0, double gamma_lo, double gamma_hi,
                            int points);

// Outcome of a randomized search for any control law reaching the target
// within a duration budget.  `evaluations` counts propagations actually
// spent; `err` is the Frobenius verification error of the best law found.
struct BruteForceResult {
  bool found = false;
  double t = 0.0;
  double err = 0.0;
  ControlLaw law;
  long long evaluations = 0;
};

// Seeded random-restart search over piecewise-constant laws (2..6 segments,
// bang directions drawn from tilted great circles through the target plane,
// optional z component) with local pattern refinement.  Deterministic for a
// given seed regardless of worker count.  A law counts as found when its
// verification error drops below 1e-3 and its duration fits the budget.
BruteForceResult brute_force_check(const SystemParams& p, const TargetSpec& spec,
                                   double t_budget, long long samples,
                                   std::uint64_t seed);

}  // namespace swaptime

#include "swaptime/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "swaptime/parallel.hpp"
#include "swaptime/rng.hpp"

namespace swaptime {

namespace {

constexpr double pi = std::numbers::pi;

// Duration ties below this relative size are resolved structurally.
constexpr double tie_rel = 1e-9;

}  // namespace

OptimalSolution solve(const SystemParams& p, const TargetSpec& spec) {
  std::vector<ExtremalCandidate> cands;
  for (const auto& c : enumerate_candidates(p)) {
    if (!c.dominated) {
      cands.push_back(c);
    }
  }
  if (cands.empty()) {
    throw NoAnalyticSolutionError(analytic_coverage_ratio);
  }

  std::stable_sort(cands.begin(), cands.end(),
                   [](const ExtremalCandidate& a, const ExtremalCandidate& b) {
                     return a.t_f < b.t_f;
                   });

  // Within a duration tie a bang-bang strategy beats a singular one: it needs
  // no exactly-tuned zero-control arc.
  std::size_t best = 0;
  const double t_min = cands.front().t_f;
  const double tol = tie_rel * std::max(1.0, t_min);
  if (cands[best].family.kind == FamilyKind::singular) {
    for (std::size_t i = 1; i < cands.size() && cands[i].t_f <= t_min + tol; ++i) {
      if (cands[i].family.kind != FamilyKind::singular) {
        best = i;
        break;
      }
    }
  }

  OptimalSolution sol;
  sol.winner = cands[best];
  sol.law = candidate_schedule(cands[best], spec, p);
  sol.t_opt = cands[best].t_f;
  sol.certified = sol.t_opt <= 5.0 * pi / p.omega * (1.0 + 1e-12);
  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (i != best) {
      sol.runners_up.emplace_back(cands[i].family, cands[i].t_f);
    }
  }
  return sol;
}

std::vector<SweepRow> sweep(double omega0, double gamma_lo, double gamma_hi,
                            int points) {
  if (points < 2) {
    throw std::invalid_argument("sweep: points must be at least 2");
  }
  if (!(omega0 > 0.0) || !(gamma_lo > 0.0) || !(gamma_hi >= gamma_lo)) {
    throw std::invalid_argument("sweep: need omega0 > 0 and 0 < gamma_lo <= gamma_hi");
  }

  std::vector<SweepRow> rows(static_cast<std::size_t>(points));
  parallel_for(rows.size(), [&](std::size_t i) {
    const double frac =
        static_cast<double>(i) / static_cast<double>(points - 1);
    SweepRow row;
    row.gamma = gamma_lo + (gamma_hi - gamma_lo) * frac;
    const SystemParams p(omega0, row.gamma);
    for (const auto& c : enumerate_candidates(p)) {
      if (!c.dominated) {
        row.family_times.emplace_back(c.family.label(), c.t_f);
      }
    }
    try {
      const OptimalSolution sol = solve(p, TargetSpec{0.0});
      row.t_opt = sol.t_opt;
      row.winner = sol.winner.family.label();
      row.certified = sol.certified;
      row.solvable = true;
    } catch (const NoAnalyticSolutionError&) {
      row.solvable = false;
    }
    rows[i] = std::move(row);
  });
  return rows;
}

namespace {

// Candidate law shape explored by the randomized search: segments alternate
// sign along a tilted great-circle direction.  Segment k carries control
//   u_k = gamma * (cos(psi_k) * sgn_k * (cos(phi + chi0), -sin(phi + chi0), 0)
//          + sin(psi_k) * z_hat),          sgn_k = (-1)^k,
// which keeps |u_k| = gamma exactly for every tilt psi_k.
struct SearchPoint {
  int m = 2;
  std::vector<double> d;
  std::vector<double> psi;
  double chi0 = 0.0;
};

constexpr double found_tol = 1e-3;

class BruteShard {
 public:
  BruteShard(const SystemParams& p, const TargetSpec& spec, double budget,
             long long evals, std::uint64_t seed, bool structured_first)
      : p_(p),
        xf_(swap_equivalent(spec)),
        phi_(spec.phi),
        budget_(budget),
        evals_left_(evals),
        rng_(seed),
        structured_first_(structured_first) {}

  BruteForceResult run() {
    if (structured_first_) {
      run_structured();
    }
    int m_cycle = 0;
    static constexpr int kCycle[5] = {2, 3, 4, 5, 6};
    while (evals_left_ > 0 && !good_enough_) {
      SearchPoint x = random_point(kCycle[m_cycle % 5]);
      ++m_cycle;
      refine(x, 1400);
    }
    result_.evaluations = used_;
    result_.err = result_.found ? law_err_ : min_err_seen_;
    return result_;
  }

 private:
  void run_structured() {
    // Deterministic warm starts: in-plane laws (psi = 0) on a coarse grid of
    // plane angles, with flat and middle-weighted duration splits.
    for (int m : {2, 3}) {
      for (int ic = 0; ic < 8 && evals_left_ > 0 && !good_enough_; ++ic) {
        for (int pat = 0; pat < (m == 3 ? 2 : 1); ++pat) {
          SearchPoint x;
          x.m = m;
          x.chi0 = pi / 4.0 * static_cast<double>(ic);
          x.psi.assign(m, 0.0);
          if (pat == 0) {
            x.d.assign(m, 0.92 * budget_ / static_cast<double>(m));
          } else {
            x.d = {0.18 * budget_, 0.56 * budget_, 0.18 * budget_};
          }
          refine(x, 520);
        }
      }
    }
  }

  SearchPoint random_point(int m) {
    SearchPoint x;
    x.m = m;
    x.chi0 = rng_.uniform(0.0, 2.0 * pi);
    const bool planar = rng_.uniform() < 0.5;
    x.psi.resize(m);
    for (int k = 0; k < m; ++k) {
      x.psi[k] = planar ? 0.0 : rng_.uniform(-pi / 2.0, pi / 2.0);
    }
    x.d.resize(m);
    double total = 0.0;
    for (int k = 0; k < m; ++k) {
      x.d[k] = 0.05 + rng_.uniform();
      total += x.d[k];
    }
    const double target = budget_ * rng_.uniform(0.8, 1.0);
    for (int k = 0; k < m; ++k) {
      x.d[k] *= target / total;
    }
    return x;
  }

  void build_law(const SearchPoint& x) {
    law_.segments.resize(x.m);
    const double cp = std::cos(phi_ + x.chi0);
    const double sp = -std::sin(phi_ + x.chi0);
    for (int k = 0; k < x.m; ++k) {
      const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
      const double inplane = p_.gamma * std::cos(x.psi[k]) * sgn;
      law_.segments[k].duration = x.d[k];
      law_.segments[k].u = {inplane * cp, inplane * sp,
                            p_.gamma * std::sin(x.psi[k])};
    }
  }

  // Projects x onto the feasible set (positive durations summing to at most
  // the budget), evaluates the verification error, and charges one sample.
  double evaluate(SearchPoint& x) {
    if (evals_left_ <= 0) {
      return 1e300;
    }
    --evals_left_;
    ++used_;
    const double dmin = 1e-3 * budget_ / static_cast<double>(x.m);
    double total = 0.0;
    for (auto& dk : x.d) {
      dk = std::max(dk, dmin);
      total += dk;
    }
    if (total > budget_) {
      const double s = budget_ / total;
      for (auto& dk : x.d) {
        dk *= s;
      }
      total = budget_;
    }
    build_law(x);
    const UnitaryPair pair = propagate_closed(law_, p_);
    const double e1 = matches_up_to_sign(pair.x1, xf_, 1e300).distance;
    const double e2 = matches_up_to_sign(pair.x2, xf_, 1e300).distance;
    const double err = std::max(e1, e2);
    note(x, total, err);
    return err;
  }

  void note(const SearchPoint& x, double total, double err) {
    min_err_seen_ = std::min(min_err_seen_, err);
    if (err < found_tol && (!result_.found || total < result_.t)) {
      result_.found = true;
      result_.t = total;
      law_err_ = err;
      build_law(x);
      result_.law = law_;
    }
    if (err < 0.2 * found_tol) {
      good_enough_ = true;
    }
  }

  // Coordinate pattern search with shrinking steps.
  void refine(SearchPoint& x, long long cap) {
    const long long start = used_;
    double f = evaluate(x);
    double hd = 0.15 * budget_ / static_cast<double>(x.m);
    double ha = 0.45;
    const double hd_min = 1e-6 * budget_;
    const double ha_min = 1e-6;
    while ((hd > hd_min || ha > ha_min) && evals_left_ > 0 &&
           used_ - start < cap && !good_enough_) {
      bool improved = false;
      auto attempt = [&](SearchPoint& y) {
        const double fy = evaluate(y);
        if (fy < f - 1e-15) {
          x = y;
          f = fy;
          improved = true;
        }
      };
      for (int j = 0; j < x.m; ++j) {
        for (double delta : {hd, -hd}) {
          SearchPoint y = x;
          y.d[j] = std::max(1e-4 * budget_, y.d[j] + delta);
          attempt(y);
        }
      }
      for (int j = 0; j < x.m; ++j) {
        for (double delta : {ha, -ha}) {
          SearchPoint y = x;
          y.psi[j] = std::clamp(y.psi[j] + delta, -pi / 2.0, pi / 2.0);
          attempt(y);
        }
      }
      for (double delta : {ha, -ha}) {
        SearchPoint y = x;
        y.chi0 += delta;
        attempt(y);
      }
      if (!improved) {
        hd *= 0.5;
        ha *= 0.5;
      }
    }
  }

  const SystemParams p_;
  const Su2Matrix xf_;
  const double phi_;
  const double budget_;
  long long evals_left_;
  long long used_ = 0;
  Rng rng_;
  const bool structured_first_;
  ControlLaw law_;
  BruteForceResult result_;
  double min_err_seen_ = 1e300;
  double law_err_ = 1e300;
  bool good_enough_ = false;
};

}  // namespace

BruteForceResult brute_force_check(const SystemParams& p, const TargetSpec& spec,
                                   double t_budget, long long samples,
                                   std::uint64_t seed) {
  if (!(t_budget > 0.0) || samples <= 0) {
    throw std::invalid_argument("brute_force_check: need positive budget and samples");
  }

  // Fixed shard layout keeps results identical no matter how many worker
  // threads actually execute them.
  constexpr int kShards = 8;
  std::vector<BruteForceResult> partial(kShards);
  for (auto& r : partial) {
    r.err = 1e300;  // shards that get no quota must not look like perfect hits
  }
  parallel_for(kShards, [&](std::size_t i) {
    const long long base = samples / kShards;
    const long long extra = static_cast<long long>(i) < samples % kShards ? 1 : 0;
    const long long quota = base + extra;
    if (quota <= 0) {
      return;
    }
    BruteShard shard(p, spec, t_budget, quota, mix_seed(seed, i),
                     /*structured_first=*/i < 4);
    partial[i] = shard.run();
  });

  // Merge order: shortest found law wins, ties by error then shard index;
  // when nothing was found, report the smallest error encountered anywhere.
  BruteForceResult out;
  double best_unfound_err = 1e300;
  for (const auto& r : partial) {
    out.evaluations += r.evaluations;
    best_unfound_err = std::min(best_unfound_err, r.err);
    if (r.found && (!out.found || r.t < out.t ||
                    (r.t == out.t && r.err < out.err))) {
      out.found = true;
      out.t = r.t;
      out.err = r.err;
      out.law = r.law;
    }
  }
  if (!out.found) {
    out.err = best_unfound_err == 1e300 ? 0.0 : best_unfound_err;
  }
  return out;
}

}  // namespace swaptime

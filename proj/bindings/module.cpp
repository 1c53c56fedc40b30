// Python bindings for the core operations: candidate enumeration, synthesis,
// propagation, verification, sweeps, scans, and the randomized search.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <complex>
#include <vector>

#include "swaptime/optimize.hpp"
#include "swaptime/scan.hpp"

namespace py = pybind11;
using namespace swaptime;

namespace {

using PyMatrix = std::array<std::array<cplx, 2>, 2>;

PyMatrix to_py(const Su2Matrix& m) {
  return {{{m.e[0], m.e[1]}, {m.e[2], m.e[3]}}};
}

ControlLaw law_from_py(const std::vector<std::pair<double, Vec3>>& segments) {
  std::vector<ControlSegment> segs;
  segs.reserve(segments.size());
  for (const auto& [dur, u] : segments) {
    segs.push_back({dur, u});
  }
  return ControlLaw(std::move(segs));
}

std::vector<std::pair<double, Vec3>> law_to_py(const ControlLaw& law) {
  std::vector<std::pair<double, Vec3>> out;
  out.reserve(law.segments.size());
  for (const auto& seg : law.segments) {
    out.emplace_back(seg.duration, seg.u);
  }
  return out;
}

py::dict candidate_to_py(const ExtremalCandidate& c) {
  py::dict d;
  d["family"] = c.family.label();
  d["bx0"] = c.bx0;
  d["t_tilde"] = c.t_tilde;
  d["t_bar"] = c.t_bar;
  d["t_prime"] = c.t_prime;
  d["switches"] = c.switches;
  d["t_f"] = c.t_f;
  d["pattern"] =
      c.sign_pattern == SignPattern::x1_eq_x2 ? "x1_eq_x2" : "x1_eq_neg_x2";
  d["target_sign"] = c.target_sign;
  d["b0sign"] = c.family.b0sign;
  d["dominated"] = c.dominated;
  return d;
}

}  // namespace

PYBIND11_MODULE(swaptime_py, m) {
  m.doc() =
      "Time-optimal shared-control synthesis for a pair of two-level systems "
      "with opposite drifts";

  m.def(
      "swap_equivalent",
      [](double phi) { return to_py(swap_equivalent(TargetSpec{phi})); },
      py::arg("phi") = 0.0,
      "Target unitary [[0, e^{i phi}], [-e^{-i phi}, 0]] as a nested list");

  m.def(
      "enumerate_candidates",
      [](double omega0, double gamma) {
        const SystemParams p(omega0, gamma);
        py::list out;
        for (const auto& c : enumerate_candidates(p)) {
          out.append(candidate_to_py(c));
        }
        return out;
      },
      py::arg("omega0"), py::arg("gamma"),
      "All closed-form strategy candidates at these parameters");

  m.def(
      "solve",
      [](double omega0, double gamma, double phi) {
        const SystemParams p(omega0, gamma);
        const OptimalSolution sol = solve(p, TargetSpec{phi});
        py::dict d;
        d["t_opt"] = sol.t_opt;
        d["family"] = sol.winner.family.label();
        d["certified"] = sol.certified;
        d["winner"] = candidate_to_py(sol.winner);
        d["law"] = law_to_py(sol.law);
        py::list ru;
        for (const auto& [fam, t] : sol.runners_up) {
          ru.append(py::make_tuple(fam.label(), t));
        }
        d["runners_up"] = ru;
        return d;
      },
      py::arg("omega0"), py::arg("gamma"), py::arg("phi") = 0.0,
      "Fastest strategy; raises ValueError when no candidate family exists");

  m.def(
      "propagate",
      [](const std::vector<std::pair<double, Vec3>>& law, double omega0,
         double gamma) {
        const SystemParams p(omega0, gamma);
        const UnitaryPair pair = propagate_closed(law_from_py(law), p);
        return py::make_tuple(to_py(pair.x1), to_py(pair.x2));
      },
      py::arg("law"), py::arg("omega0"), py::arg("gamma"),
      "Closed-form propagators (X1, X2) of a [(duration, (ux, uy, uz)), ...] law");

  m.def(
      "verify",
      [](const std::vector<std::pair<double, Vec3>>& law, double omega0,
         double gamma, double phi, double tol) {
        const SystemParams p(omega0, gamma);
        const UnitaryPair pair = propagate_closed(law_from_py(law), p);
        const Verdict v = verify_target(pair, TargetSpec{phi}, tol);
        py::dict d;
        d["reached"] = v.reached;
        d["sign1"] = v.sign1;
        d["sign2"] = v.sign2;
        d["err"] = v.err;
        return d;
      },
      py::arg("law"), py::arg("omega0"), py::arg("gamma"), py::arg("phi") = 0.0,
      py::arg("tol") = 1e-8,
      "Check a law against the swap-equivalent pair target");

  m.def(
      "sweep",
      [](double omega0, double gamma_lo, double gamma_hi, int points) {
        py::list out;
        for (const auto& row : sweep(omega0, gamma_lo, gamma_hi, points)) {
          py::dict d;
          d["gamma"] = row.gamma;
          py::dict times;
          for (const auto& [label, t] : row.family_times) {
            times[py::str(label)] = t;
          }
          d["times"] = times;
          d["solvable"] = row.solvable;
          if (row.solvable) {
            d["t_opt"] = row.t_opt;
            d["winner"] = row.winner;
            d["certified"] = row.certified;
          } else {
            d["t_opt"] = py::none();
            d["winner"] = py::none();
            d["certified"] = py::none();
          }
          out.append(d);
        }
        return out;
      },
      py::arg("omega0"), py::arg("gamma_lo"), py::arg("gamma_hi"),
      py::arg("points"), "Duration table over an inclusive gamma grid");

  m.def(
      "run_scan",
      [](double omega0, double gamma, double horizon, int grid, double step) {
        ScanConfig cfg{SystemParams(omega0, gamma), horizon, grid, grid, step};
        const ScanField field = run_scan(cfg);
        py::list recs;
        for (const auto& r : field.records) {
          py::dict d;
          d["theta"] = r.theta;
          d["bx0"] = r.bx0;
          d["L"] = r.l_value;
          d["maxFplus"] = r.max_f_plus;
          d["maxFminus"] = r.max_f_minus;
          d["firstHit"] = r.first_hit ? py::cast(*r.first_hit) : py::none();
          recs.append(d);
        }
        const std::size_t am = field_argmin(field);
        py::dict out;
        out["records"] = recs;
        out["argmin_index"] = am;
        out["argmin_on_l0_boundary"] = on_l0_boundary(field.records[am]);
        return out;
      },
      py::arg("omega0"), py::arg("gamma"), py::arg("horizon"),
      py::arg("grid") = 61, py::arg("step") = 0.0,
      "Closed-loop grid scan; step <= 0 selects the default 0.005/omega");

  m.def(
      "scan_trajectory",
      [](double theta, double bx0, double omega0, double gamma, double horizon,
         double step) {
        const SystemParams p(omega0, gamma);
        const double h = step > 0.0 ? step : 0.005 / p.omega;
        const ScanRecord r = scan_trajectory(theta, bx0, p, horizon, h);
        py::dict d;
        d["theta"] = r.theta;
        d["bx0"] = r.bx0;
        d["L"] = r.l_value;
        d["maxFplus"] = r.max_f_plus;
        d["maxFminus"] = r.max_f_minus;
        d["firstHit"] = r.first_hit ? py::cast(*r.first_hit) : py::none();
        return d;
      },
      py::arg("theta"), py::arg("bx0"), py::arg("omega0"), py::arg("gamma"),
      py::arg("horizon"), py::arg("step") = 0.0,
      "Single closed-loop trajectory from one adjoint seed");

  m.def(
      "brute_force_check",
      [](double omega0, double gamma, double phi, double t_budget,
         long long samples, std::uint64_t seed) {
        const SystemParams p(omega0, gamma);
        const BruteForceResult r =
            brute_force_check(p, TargetSpec{phi}, t_budget, samples, seed);
        py::dict d;
        d["found"] = r.found;
        d["t"] = r.t;
        d["err"] = r.err;
        d["evaluations"] = r.evaluations;
        d["law"] = law_to_py(r.law);
        return d;
      },
      py::arg("omega0"), py::arg("gamma"), py::arg("phi"), py::arg("t_budget"),
      py::arg("samples"), py::arg("seed") = 0,
      "Seeded randomized search for any law reaching the target in budget");

  py::register_exception<NoAnalyticSolutionError>(m, "NoAnalyticSolution",
                                                  PyExc_ValueError);
}

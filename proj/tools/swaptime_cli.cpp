// Command-line front end: closed-form synthesis (solve), parameter sweeps
// (sweep), closed-loop grid scans (scan), and control-law checking (verify).
//
// Exit codes: 0 on full success (solve: certified optimum; verify: target
// reached), 2 when the run finished but the result is incomplete (uncertified
// optimum, no closed-form candidate, target not reached), 1 on usage, parse,
// or constraint errors.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "swaptime/optimize.hpp"
#include "swaptime/scan.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace swaptime;

std::string fmt(double v, int digits = 15) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) {
    throw std::runtime_error("cannot open output file " + out_path);
  }
  f << text;
  if (!f) {
    throw std::runtime_error("write failed for " + out_path);
  }
}

json law_to_json(const ControlLaw& law) {
  json arr = json::array();
  for (const auto& seg : law.segments) {
    arr.push_back({{"duration", seg.duration},
                   {"u", {seg.u[0], seg.u[1], seg.u[2]}}});
  }
  return arr;
}

std::string schedule_table(const ControlLaw& law) {
  std::ostringstream os;
  os << "  segment  start         end           ux            uy            uz\n";
  double t = 0.0;
  for (std::size_t i = 0; i < law.segments.size(); ++i) {
    const auto& seg = law.segments[i];
    char line[256];
    std::snprintf(line, sizeof(line),
                  "  %-7zu  %-12.6f  %-12.6f  %-12.6f  %-12.6f  %-12.6f\n", i, t,
                  t + seg.duration, seg.u[0], seg.u[1], seg.u[2]);
    os << line;
    t += seg.duration;
  }
  return os.str();
}

std::string pattern_name(SignPattern pat) {
  return pat == SignPattern::x1_eq_x2 ? "x1_eq_x2" : "x1_eq_neg_x2";
}

// --- solve ---------------------------------------------------------------

int run_solve(double omega0, double gamma, double phi, const std::string& format,
              const std::string& out_path) {
  const SystemParams p(omega0, gamma);
  const TargetSpec spec{phi};

  OptimalSolution sol;
  try {
    sol = solve(p, spec);
  } catch (const NoAnalyticSolutionError& e) {
    std::cerr << "solve: " << e.what() << "\n";
    return 2;
  }

  const UnitaryPair pair = propagate_closed(sol.law, p);
  const Verdict v = verify_target(pair, spec);

  if (format == "json") {
    json doc;
    doc["omega0"] = omega0;
    doc["gamma"] = gamma;
    doc["phi"] = phi;
    doc["t_opt"] = sol.t_opt;
    doc["family"] = sol.winner.family.label();
    doc["certified"] = sol.certified;
    doc["bx0"] = sol.winner.bx0;
    doc["t_tilde"] = sol.winner.t_tilde;
    doc["t_bar"] = sol.winner.t_bar;
    doc["t_prime"] = sol.winner.t_prime;
    doc["switches"] = sol.winner.switches;
    doc["sign_pattern"] = pattern_name(sol.winner.sign_pattern);
    doc["target_sign"] = sol.winner.target_sign;
    doc["verification_error"] = v.err;
    doc["law"] = law_to_json(sol.law);
    json ru = json::array();
    for (const auto& [fam, t] : sol.runners_up) {
      ru.push_back({{"family", fam.label()}, {"t_f", t}});
    }
    doc["runners_up"] = ru;
    emit(doc.dump(2) + "\n", out_path);
  } else if (format == "csv") {
    std::string text = "duration,ux,uy,uz\n";
    for (const auto& seg : sol.law.segments) {
      text += fmt(seg.duration, 17) + "," + fmt(seg.u[0], 17) + "," +
              fmt(seg.u[1], 17) + "," + fmt(seg.u[2], 17) + "\n";
    }
    emit(text, out_path);
  } else {
    std::ostringstream os;
    os << "t_opt        " << fmt(sol.t_opt) << "\n"
       << "family       " << sol.winner.family.label() << "\n"
       << "certified    " << (sol.certified ? "yes" : "no") << "\n"
       << "pattern      " << pattern_name(sol.winner.sign_pattern)
       << " (target sign " << (sol.winner.target_sign > 0 ? "+1" : "-1") << ")\n"
       << "bx0          " << fmt(sol.winner.bx0) << "\n"
       << "t_tilde      " << fmt(sol.winner.t_tilde) << "\n"
       << "t_bar        " << fmt(sol.winner.t_bar) << "\n"
       << "t_prime      " << fmt(sol.winner.t_prime) << "\n"
       << "switches     " << sol.winner.switches << "\n"
       << "verification " << fmt(v.err, 3) << " (signs "
       << (v.sign1 > 0 ? "+1" : v.sign1 < 0 ? "-1" : "none") << "/"
       << (v.sign2 > 0 ? "+1" : v.sign2 < 0 ? "-1" : "none") << ")\n"
       << "schedule\n"
       << schedule_table(sol.law);
    if (!sol.runners_up.empty()) {
      os << "runners_up  ";
      for (std::size_t i = 0; i < sol.runners_up.size(); ++i) {
        os << (i ? ", " : " ") << sol.runners_up[i].first.label() << "="
           << fmt(sol.runners_up[i].second, 10);
      }
      os << "\n";
    }
    emit(os.str(), out_path);
  }
  return sol.certified ? 0 : 2;
}

// --- sweep ---------------------------------------------------------------

const std::vector<std::string>& sweep_labels() {
  static const std::vector<std::string> labels = {
      "sy0",   "sy1u",  "sy1l",  "sy2pp", "sy2pm", "sy2mp", "sy2mm", "sx0",
      "sx1p0", "sx1p1", "sx1p2", "sx1m0", "sx1m1", "sx1m2", "sing"};
  return labels;
}

std::string label_to_column(const std::string& label) {
  if (label.rfind("sy2", 0) == 0 && label.size() > 3) {
    return "t_sy2_" + label.substr(3);
  }
  if (label.rfind("sx1", 0) == 0 && label.size() > 3) {
    return "t_sx1_" + label.substr(3);
  }
  return "t_" + label;
}

int run_sweep(double omega0, double lo, double hi, int points,
              const std::string& format, const std::string& out_path) {
  const auto rows = sweep(omega0, lo, hi, points);

  auto time_of = [](const SweepRow& row, const std::string& label)
      -> std::optional<double> {
    for (const auto& [l, t] : row.family_times) {
      if (l == label) {
        return t;
      }
    }
    return std::nullopt;
  };

  if (format == "json") {
    json arr = json::array();
    for (const auto& row : rows) {
      json obj;
      obj["gamma"] = row.gamma;
      json times;
      for (const auto& [l, t] : row.family_times) {
        times[l] = t;
      }
      obj["times"] = times;
      obj["solvable"] = row.solvable;
      if (row.solvable) {
        obj["t_opt"] = row.t_opt;
        obj["winner"] = row.winner;
        obj["certified"] = row.certified;
      } else {
        obj["t_opt"] = nullptr;
        obj["winner"] = nullptr;
        obj["certified"] = nullptr;
      }
      arr.push_back(std::move(obj));
    }
    emit(arr.dump(2) + "\n", out_path);
  } else if (format == "csv") {
    std::string text = "gamma";
    for (const auto& label : sweep_labels()) {
      text += "," + label_to_column(label);
    }
    text += ",t_opt,winner,certified\n";
    for (const auto& row : rows) {
      text += fmt(row.gamma, 17);
      for (const auto& label : sweep_labels()) {
        text += ",";
        if (auto t = time_of(row, label)) {
          text += fmt(*t, 17);
        }
      }
      if (row.solvable) {
        text += "," + fmt(row.t_opt, 17) + "," + row.winner + "," +
                (row.certified ? "true" : "false");
      } else {
        text += ",,,";
      }
      text += "\n";
    }
    emit(text, out_path);
  } else {
    std::ostringstream os;
    os << "  gamma         t_opt         winner    certified\n";
    for (const auto& row : rows) {
      char line[160];
      if (row.solvable) {
        std::snprintf(line, sizeof(line), "  %-12.6f  %-12.6f  %-8s  %s\n",
                      row.gamma, row.t_opt, row.winner.c_str(),
                      row.certified ? "yes" : "no");
      } else {
        std::snprintf(line, sizeof(line), "  %-12.6f  %-12s  %-8s  %s\n",
                      row.gamma, "-", "-", "-");
      }
      os << line;
    }
    emit(os.str(), out_path);
  }
  return 0;
}

// --- scan ----------------------------------------------------------------

int run_scan_cmd(double omega0, double gamma, double horizon, int grid,
                 double step, const std::string& format,
                 const std::string& out_path) {
  ScanConfig cfg{SystemParams(omega0, gamma), horizon, grid, grid, step};
  const ScanField field = run_scan(cfg);

  const std::size_t am = field_argmin(field);
  const ScanRecord& best = field.records[am];
  std::ostringstream summary;
  summary << "argmin theta=" << fmt(best.theta, 10) << " bx0=" << fmt(best.bx0, 10)
          << (best.first_hit ? " first_hit=" + fmt(*best.first_hit, 10)
                             : " first_hit=none")
          << " maxF=" << fmt(std::max(best.max_f_plus, best.max_f_minus), 10)
          << " on_l0_boundary=" << (on_l0_boundary(best) ? "yes" : "no") << "\n";

  if (format == "human") {
    emit(summary.str(), out_path);
  } else {
    const ExportFormat ef =
        format == "json" ? ExportFormat::json : ExportFormat::csv;
    emit(format_field(field, ef), out_path);
    // Keep the data stream clean: the summary goes to stderr.
    std::cerr << summary.str();
  }
  return 0;
}

// --- verify --------------------------------------------------------------

ControlLaw parse_law_file(const std::string& path, const SystemParams& p) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    throw std::invalid_argument("cannot open law file " + path);
  }
  json doc;
  try {
    doc = json::parse(f);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("law file " + path + ": " + e.what());
  }

  const json* arr = nullptr;
  if (doc.is_array()) {
    arr = &doc;
  } else if (doc.is_object() && doc.contains("law") && doc["law"].is_array()) {
    arr = &doc["law"];
  } else {
    throw std::invalid_argument(
        "law file " + path +
        ": expected a JSON array of segments or an object with a \"law\" array");
  }

  std::vector<ControlSegment> segs;
  for (std::size_t i = 0; i < arr->size(); ++i) {
    const json& e = (*arr)[i];
    if (!e.is_object() || !e.contains("duration") || !e.contains("u") ||
        !e["duration"].is_number() || !e["u"].is_array() || e["u"].size() != 3 ||
        !e["u"][0].is_number() || !e["u"][1].is_number() || !e["u"][2].is_number()) {
      throw std::invalid_argument(
          "law file " + path + ": segment " + std::to_string(i) +
          " must be {\"duration\": number, \"u\": [number, number, number]}");
    }
    ControlSegment seg;
    seg.duration = e["duration"].get<double>();
    seg.u = {e["u"][0].get<double>(), e["u"][1].get<double>(),
             e["u"][2].get<double>()};
    if (!(seg.duration > 0.0)) {
      throw std::invalid_argument("law file " + path + ": segment " +
                                  std::to_string(i) +
                                  " has nonpositive duration");
    }
    const double norm =
        std::sqrt(seg.u[0] * seg.u[0] + seg.u[1] * seg.u[1] + seg.u[2] * seg.u[2]);
    if (norm > p.gamma * (1.0 + 1e-12)) {
      throw std::invalid_argument(
          "law file " + path + ": segment " + std::to_string(i) + " has |u| = " +
          fmt(norm, 10) + " exceeding the bound gamma = " + fmt(p.gamma, 10));
    }
    segs.push_back(seg);
  }
  return ControlLaw(std::move(segs));
}

int run_verify(double omega0, double gamma, double phi, const std::string& law_path,
               double tol, double step, const std::string& format,
               const std::string& out_path) {
  const SystemParams p(omega0, gamma);
  const TargetSpec spec{phi};
  const ControlLaw law = parse_law_file(law_path, p);

  const double numeric_step = step > 0.0 ? step : 1e-4 / p.omega;
  const UnitaryPair closed = propagate_closed(law, p);
  const UnitaryPair numeric = propagate_numeric(law, p, numeric_step);
  const Verdict vc = verify_target(closed, spec, tol);
  const Verdict vn = verify_target(numeric, spec, tol);
  const double agreement =
      std::max(frobenius_distance(closed.x1, numeric.x1),
               frobenius_distance(closed.x2, numeric.x2));

  if (format == "json") {
    json doc;
    doc["omega0"] = omega0;
    doc["gamma"] = gamma;
    doc["phi"] = phi;
    doc["duration"] = law.total_duration();
    doc["tol"] = tol;
    doc["reached"] = vc.reached;
    doc["sign1"] = vc.sign1;
    doc["sign2"] = vc.sign2;
    doc["closed_error"] = vc.err;
    doc["numeric_error"] = vn.err;
    doc["closed_numeric_agreement"] = agreement;
    emit(doc.dump(2) + "\n", out_path);
  } else {
    std::ostringstream os;
    os << "duration              " << fmt(law.total_duration()) << "\n"
       << "reached               " << (vc.reached ? "yes" : "no") << "\n"
       << "signs                 "
       << (vc.sign1 > 0 ? "+1" : vc.sign1 < 0 ? "-1" : "none") << "/"
       << (vc.sign2 > 0 ? "+1" : vc.sign2 < 0 ? "-1" : "none") << "\n"
       << "closed-form error     " << fmt(vc.err, 6) << "\n"
       << "numeric error         " << fmt(vn.err, 6) << "\n"
       << "closed/numeric match  " << fmt(agreement, 6) << "\n";
    emit(os.str(), out_path);
  }
  return vc.reached ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-optimal shared-control synthesis for a pair of two-level "
               "systems with opposite drifts"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  app.add_option("--seed", seed,
                 "seed for randomized components (reserved; current "
                 "subcommands are deterministic)");

  // solve
  auto* solve_cmd =
      app.add_subcommand("solve", "synthesize the fastest strategy");
  double s_omega0 = 1.0, s_gamma = 1.0, s_phi = 0.0;
  std::string s_format = "human", s_out;
  solve_cmd->add_option("--omega0", s_omega0, "drift magnitude (> 0)");
  solve_cmd->add_option("--gamma", s_gamma, "control bound (> 0)")->required();
  solve_cmd->add_option("--phi", s_phi, "target phase in radians");
  solve_cmd->add_option("--format", s_format, "human|json|csv")
      ->check(CLI::IsMember({"human", "json", "csv"}));
  solve_cmd->add_option("--out", s_out, "output file (default stdout)");

  // sweep
  auto* sweep_cmd =
      app.add_subcommand("sweep", "tabulate durations over a gamma range");
  double w_omega0 = 1.0, w_lo = 0.5, w_hi = 2.0;
  int w_points = 16;
  std::string w_format = "csv", w_out;
  sweep_cmd->add_option("--omega0", w_omega0, "drift magnitude (> 0)");
  sweep_cmd->add_option("--gamma-lo", w_lo, "lower end of the gamma grid")
      ->required();
  sweep_cmd->add_option("--gamma-hi", w_hi, "upper end of the gamma grid")
      ->required();
  sweep_cmd->add_option("--points", w_points, "grid points (>= 2)");
  sweep_cmd->add_option("--format", w_format, "human|json|csv")
      ->check(CLI::IsMember({"human", "json", "csv"}));
  sweep_cmd->add_option("--out", w_out, "output file (default stdout)");

  // scan
  auto* scan_cmd = app.add_subcommand(
      "scan", "closed-loop grid scan over adjoint initial conditions");
  double c_omega0 = 1.0, c_gamma = 1.0, c_horizon = 6.0, c_step = 0.0;
  int c_grid = 61;
  std::string c_format = "csv", c_out;
  scan_cmd->add_option("--omega0", c_omega0, "drift magnitude (> 0)");
  scan_cmd->add_option("--gamma", c_gamma, "control bound (> 0)")->required();
  scan_cmd->add_option("--horizon", c_horizon, "integration horizon (> 0)");
  scan_cmd->add_option("--grid", c_grid, "points per axis (>= 2)");
  scan_cmd->add_option("--step", c_step,
                       "integration step (default 0.005/omega, max 0.01/omega)");
  scan_cmd->add_option("--format", c_format, "human|json|csv")
      ->check(CLI::IsMember({"human", "json", "csv"}));
  scan_cmd->add_option("--out", c_out, "output file (default stdout)");

  // verify
  auto* verify_cmd =
      app.add_subcommand("verify", "check a control law against the target");
  double v_omega0 = 1.0, v_gamma = 1.0, v_phi = 0.0, v_tol = 1e-8, v_step = 0.0;
  std::string v_law, v_format = "human", v_out;
  verify_cmd->add_option("--omega0", v_omega0, "drift magnitude (> 0)");
  verify_cmd->add_option("--gamma", v_gamma, "control bound (> 0)")->required();
  verify_cmd->add_option("--phi", v_phi, "target phase in radians");
  verify_cmd->add_option("--law", v_law, "JSON control-law file")->required();
  verify_cmd->add_option("--tol", v_tol, "acceptance tolerance");
  verify_cmd->add_option("--step", v_step,
                         "numeric cross-check step (default 1e-4/omega)");
  verify_cmd->add_option("--format", v_format, "human|json")
      ->check(CLI::IsMember({"human", "json"}));
  verify_cmd->add_option("--out", v_out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (solve_cmd->parsed()) {
      return run_solve(s_omega0, s_gamma, s_phi, s_format, s_out);
    }
    if (sweep_cmd->parsed()) {
      return run_sweep(w_omega0, w_lo, w_hi, w_points, w_format, w_out);
    }
    if (scan_cmd->parsed()) {
      return run_scan_cmd(c_omega0, c_gamma, c_horizon, c_grid, c_step, c_format,
                          c_out);
    }
    if (verify_cmd->parsed()) {
      return run_verify(v_omega0, v_gamma, v_phi, v_law, v_tol, v_step, v_format,
                        v_out);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

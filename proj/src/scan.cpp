#include "swaptime/scan.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "json.hpp"

#include "swaptime/parallel.hpp"

namespace swaptime {

namespace {

constexpr double pi = std::numbers::pi;

double norm3(const Vec3& v) {
  return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

// Combined integration state: adjoint pair plus both propagators.
struct LoopState {
  CostateState s;
  Su2Matrix x1;
  Su2Matrix x2;
};

LoopState loop_axpy(const LoopState& a, double h, const LoopState& d) {
  LoopState r;
  for (int k = 0; k < 3; ++k) {
    r.s.b[k] = a.s.b[k] + h * d.s.b[k];
    r.s.c[k] = a.s.c[k] + h * d.s.c[k];
  }
  const cplx hc{h, 0.0};
  r.x1 = a.x1 + hc * d.x1;
  r.x2 = a.x2 + hc * d.x2;
  return r;
}

Su2Matrix pair_rhs(const Su2Matrix& x, const Vec3& u, double drift,
                   const SystemParams& p) {
  const double hx = 0.5 * u[0];
  const double hy = 0.5 * u[1];
  const double hz = 0.5 * (u[2] + drift * p.omega0);
  const cplx mi{0.0, -1.0};
  const cplx hm{hx, -hy};
  const cplx hp{hx, hy};
  Su2Matrix d;
  d.e[0] = mi * (hz * x.e[0] + hm * x.e[2]);
  d.e[1] = mi * (hz * x.e[1] + hm * x.e[3]);
  d.e[2] = mi * (hp * x.e[0] - hz * x.e[2]);
  d.e[3] = mi * (hp * x.e[1] - hz * x.e[3]);
  return d;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

CostateState initial_costate(double theta, double bx0, const SystemParams& p) {
  (void)p;
  if (!(theta >= 0.0 && theta <= pi)) {
    throw std::invalid_argument("initial_costate: theta must lie in [0, pi]");
  }
  if (!(bx0 >= 0.0 && bx0 <= 1.0)) {
    throw std::invalid_argument("initial_costate: bx0 must lie in [0, 1]");
  }
  const double r = std::sqrt(std::max(0.0, 1.0 - bx0 * bx0));
  CostateState s;
  s.b = {bx0, 0.0, 0.0};
  s.c = {std::sin(theta) * r, -std::cos(theta) * r, 0.0};
  return s;
}

std::pair<double, double> f_plus_minus(const UnitaryPair& pair) {
  const cplx b1 = pair.x1.e[1];
  const cplx b2 = pair.x2.e[1];
  const double fp = 0.25 * std::norm(b1 - b2);
  const double fm = 0.25 * std::norm(b1 + b2);
  return {fp, fm};
}

ScanRecord scan_trajectory(double theta, double bx0, const SystemParams& p,
                           double horizon, double step) {
  if (!(horizon > 0.0)) {
    throw std::invalid_argument("scan_trajectory: horizon must be positive");
  }
  if (!(step > 0.0) || step > 0.01 / p.omega) {
    throw std::invalid_argument("scan_trajectory: step must be in (0, 0.01/omega]");
  }

  LoopState st;
  st.s = initial_costate(theta, bx0, p);
  st.x1 = Su2Matrix::identity();
  st.x2 = Su2Matrix::identity();

  ScanRecord rec;
  rec.theta = theta;
  rec.bx0 = bx0;
  rec.l_value = constants_of_motion(st.s, p).l;

  // Feedback control with memory: wherever |b| dips below mu_min the last
  // determined value is held (zero before the first determined sample).
  Vec3 uprev{0.0, 0.0, 0.0};
  auto control = [&](const CostateState& s) -> Vec3 {
    const double mu = norm3(s.b);
    if (mu < mu_min) {
      return uprev;
    }
    const Vec3 u{p.gamma * s.b[0] / mu, p.gamma * s.b[1] / mu,
                 p.gamma * s.b[2] / mu};
    uprev = u;
    return u;
  };
  auto rhs = [&](const LoopState& x) -> LoopState {
    const Vec3 u = control(x.s);
    LoopState d;
    d.s = costate_rhs(x.s, u, p);
    d.x1 = pair_rhs(x.x1, u, +1.0, p);
    d.x2 = pair_rhs(x.x2, u, -1.0, p);
    return d;
  };

  const std::size_t nsteps =
      static_cast<std::size_t>(std::ceil(horizon / step - 1e-12));
  for (std::size_t k = 0; k < nsteps; ++k) {
    const LoopState k1 = rhs(st);
    const LoopState k2 = rhs(loop_axpy(st, 0.5 * step, k1));
    const LoopState k3 = rhs(loop_axpy(st, 0.5 * step, k2));
    const LoopState k4 = rhs(loop_axpy(st, step, k3));
    LoopState sum = loop_axpy(k1, 2.0, k2);
    sum = loop_axpy(sum, 2.0, k3);
    sum = loop_axpy(sum, 1.0, k4);
    st = loop_axpy(st, step / 6.0, sum);

    const auto [fp, fm] = f_plus_minus({st.x1, st.x2});
    rec.max_f_plus = std::max(rec.max_f_plus, fp);
    rec.max_f_minus = std::max(rec.max_f_minus, fm);
    if (!rec.first_hit &&
        (fp >= 1.0 - hit_threshold || fm >= 1.0 - hit_threshold)) {
      rec.first_hit = static_cast<double>(k + 1) * step;
    }
  }
  return rec;
}

ScanField run_scan(const ScanConfig& cfg) {
  if (cfg.theta_points < 2 || cfg.bx0_points < 2) {
    throw std::invalid_argument("run_scan: grid needs at least 2 points per axis");
  }
  if (!(cfg.horizon > 0.0)) {
    throw std::invalid_argument("run_scan: horizon must be positive");
  }
  const double step = cfg.step > 0.0 ? cfg.step : 0.005 / cfg.p.omega;
  if (step > 0.01 / cfg.p.omega) {
    throw std::invalid_argument("run_scan: step must be at most 0.01/omega");
  }

  ScanField field;
  field.theta_points = cfg.theta_points;
  field.bx0_points = cfg.bx0_points;
  field.records.resize(static_cast<std::size_t>(cfg.theta_points) *
                       static_cast<std::size_t>(cfg.bx0_points));

  parallel_for(field.records.size(), [&](std::size_t idx) {
    const int it = static_cast<int>(idx) / cfg.bx0_points;
    const int ib = static_cast<int>(idx) % cfg.bx0_points;
    const double theta =
        pi * static_cast<double>(it) / static_cast<double>(cfg.theta_points - 1);
    const double bx0 =
        static_cast<double>(ib) / static_cast<double>(cfg.bx0_points - 1);
    field.records[idx] = scan_trajectory(theta, bx0, cfg.p, cfg.horizon, step);
  });
  return field;
}

std::string format_field(const ScanField& field, ExportFormat fmt) {
  if (fmt == ExportFormat::csv) {
    std::string out = "theta,bx0,L,maxFplus,maxFminus,firstHit\n";
    for (const auto& r : field.records) {
      out += format_double(r.theta);
      out += ',';
      out += format_double(r.bx0);
      out += ',';
      out += format_double(r.l_value);
      out += ',';
      out += format_double(r.max_f_plus);
      out += ',';
      out += format_double(r.max_f_minus);
      out += ',';
      if (r.first_hit) {
        out += format_double(*r.first_hit);
      }
      out += '\n';
    }
    return out;
  }
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : field.records) {
    nlohmann::ordered_json obj;
    obj["theta"] = r.theta;
    obj["bx0"] = r.bx0;
    obj["L"] = r.l_value;
    obj["maxFplus"] = r.max_f_plus;
    obj["maxFminus"] = r.max_f_minus;
    if (r.first_hit) {
      obj["firstHit"] = *r.first_hit;
    } else {
      obj["firstHit"] = nullptr;
    }
    arr.push_back(std::move(obj));
  }
  return arr.dump(2) + "\n";
}

void export_field(const ScanField& field, const std::string& path, ExportFormat fmt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("export_field: cannot open " + path);
  }
  out << format_field(field, fmt);
  if (!out) {
    throw std::runtime_error("export_field: write failed for " + path);
  }
}

std::size_t field_argmin(const ScanField& field) {
  if (field.records.empty()) {
    throw std::invalid_argument("field_argmin: empty field");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < field.records.size(); ++i) {
    const auto& a = field.records[i];
    const auto& b = field.records[best];
    const bool a_hit = a.first_hit.has_value();
    const bool b_hit = b.first_hit.has_value();
    bool better = false;
    if (a_hit != b_hit) {
      better = a_hit;
    } else if (a_hit) {
      better = *a.first_hit < *b.first_hit;
    } else {
      better = std::max(a.max_f_plus, a.max_f_minus) >
               std::max(b.max_f_plus, b.max_f_minus);
    }
    if (better) {
      best = i;
    }
  }
  return best;
}

bool on_l0_boundary(const ScanRecord& rec) {
  const double tol = 1e-9;
  return rec.theta < tol || std::abs(rec.theta - pi) < tol || rec.bx0 < tol ||
         std::abs(rec.bx0 - 1.0) < tol;
}

}  // namespace swaptime

#include "swaptime/propagate.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace swaptime {

namespace {

double norm3(const Vec3& v) {
  return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

// Segment propagator exp(-i (drift omega0 S_z + u . S) t) for drift = +/-1.
Su2Matrix segment_exp(const Vec3& u, double drift, double duration,
                      const SystemParams& p) {
  const Vec3 v{u[0], u[1], u[2] + drift * p.omega0};
  const double n = norm3(v);
  if (n * duration < 1e-300) {
    return Su2Matrix::identity();
  }
  return su2_exp({v[0] / n, v[1] / n, v[2] / n}, n * duration);
}

// Derivative -i (drift omega0 S_z + u . S) X, written entrywise.
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

// Nearest unitary in Frobenius norm (polar factor), then det normalized to 1.
// For 2x2 the Hermitian square root has the closed form
// sqrt(H) = (H + sqrt(det H) I) / sqrt(tr H + 2 sqrt(det H)).
Su2Matrix polar_unitary(const Su2Matrix& m) {
  const Su2Matrix h = mul(dagger(m), m);
  const double h00 = h.e[0].real();
  const double h11 = h.e[3].real();
  const cplx h01 = h.e[1];
  const double dh = h00 * h11 - std::norm(h01);
  const double sd = std::sqrt(std::max(dh, 0.0));
  const double tr = h00 + h11;
  const double denom = std::sqrt(tr + 2.0 * sd);
  if (!(denom > 0.0)) {
    throw std::runtime_error("polar_unitary: degenerate matrix");
  }
  // S = sqrt(H); invert the 2x2 directly.
  const double s00 = (h00 + sd) / denom;
  const double s11 = (h11 + sd) / denom;
  const cplx s01 = h01 / denom;
  const cplx dets = cplx{s00 * s11, 0.0} - s01 * std::conj(s01);
  Su2Matrix sinv;
  sinv.e[0] = cplx{s11, 0.0} / dets;
  sinv.e[1] = -s01 / dets;
  sinv.e[2] = -std::conj(s01) / dets;
  sinv.e[3] = cplx{s00, 0.0} / dets;
  Su2Matrix u = mul(m, sinv);
  // Pull the residual determinant phase out symmetrically.
  const cplx d = det(u);
  const double phase = std::arg(d);
  const cplx corr = std::exp(cplx{0.0, -phase / 2.0});
  return corr * u;
}

void validate_law(const ControlLaw& law, const SystemParams& p) {
  for (std::size_t i = 0; i < law.segments.size(); ++i) {
    const auto& seg = law.segments[i];
    if (!(seg.duration > 0.0)) {
      throw std::invalid_argument("control law: nonpositive duration in segment " +
                                  std::to_string(i));
    }
    if (norm3(seg.u) > p.gamma * (1.0 + 1e-12)) {
      throw std::invalid_argument("control law: |u| exceeds gamma in segment " +
                                  std::to_string(i));
    }
  }
}

}  // namespace

ControlLaw::ControlLaw(std::vector<ControlSegment> segs) : segments(std::move(segs)) {
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (!(segments[i].duration > 0.0)) {
      throw std::invalid_argument("ControlLaw: nonpositive duration in segment " +
                                  std::to_string(i));
    }
  }
}

double ControlLaw::total_duration() const {
  double t = 0.0;
  for (const auto& seg : segments) {
    t += seg.duration;
  }
  return t;
}

UnitaryPair propagate_closed(const ControlLaw& law, const SystemParams& p) {
  validate_law(law, p);
  UnitaryPair pair{Su2Matrix::identity(), Su2Matrix::identity()};
  for (const auto& seg : law.segments) {
    pair.x1 = mul(segment_exp(seg.u, +1.0, seg.duration, p), pair.x1);
    pair.x2 = mul(segment_exp(seg.u, -1.0, seg.duration, p), pair.x2);
  }
  return pair;
}

UnitaryPair propagate_numeric(const ControlLaw& law, const SystemParams& p, double step) {
  validate_law(law, p);
  if (!(step > 0.0)) {
    throw std::invalid_argument("propagate_numeric: step must be positive");
  }
  UnitaryPair pair{Su2Matrix::identity(), Su2Matrix::identity()};
  for (const auto& seg : law.segments) {
    const std::size_t n =
        static_cast<std::size_t>(std::ceil(seg.duration / step - 1e-12));
    const std::size_t nsteps = n == 0 ? 1 : n;
    const double h = seg.duration / static_cast<double>(nsteps);
    for (std::size_t i = 0; i < nsteps; ++i) {
      auto rk4 = [&](Su2Matrix& x, double drift) {
        const Su2Matrix k1 = pair_rhs(x, seg.u, drift, p);
        const Su2Matrix k2 = pair_rhs(x + cplx{0.5 * h, 0.0} * k1, seg.u, drift, p);
        const Su2Matrix k3 = pair_rhs(x + cplx{0.5 * h, 0.0} * k2, seg.u, drift, p);
        const Su2Matrix k4 = pair_rhs(x + cplx{h, 0.0} * k3, seg.u, drift, p);
        x = x + cplx{h / 6.0, 0.0} *
                    (k1 + cplx{2.0, 0.0} * k2 + cplx{2.0, 0.0} * k3 + k4);
      };
      rk4(pair.x1, +1.0);
      rk4(pair.x2, -1.0);
    }
  }
  pair.x1 = polar_unitary(pair.x1);
  pair.x2 = polar_unitary(pair.x2);
  return pair;
}

Verdict verify_target(const UnitaryPair& pair, const TargetSpec& spec, double tol) {
  const Su2Matrix xf = swap_equivalent(spec);
  const MatchReport m1 = matches_up_to_sign(pair.x1, xf, tol);
  const MatchReport m2 = matches_up_to_sign(pair.x2, xf, tol);
  Verdict v;
  v.sign1 = m1.sign;
  v.sign2 = m2.sign;
  v.err = std::max(m1.distance, m2.distance);
  v.reached = (m1.sign != 0) && (m2.sign != 0);
  return v;
}

ControlLaw rotate_law(const ControlLaw& law, double phi) {
  const double cp = std::cos(phi);
  const double sp = std::sin(phi);
  ControlLaw out = law;
  for (auto& seg : out.segments) {
    const double ux = seg.u[0];
    const double uy = seg.u[1];
    seg.u[0] = ux * cp + uy * sp;
    seg.u[1] = -ux * sp + uy * cp;
  }
  return out;
}

}  // namespace swaptime

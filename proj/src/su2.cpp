#include "swaptime/su2.hpp"

#include <cmath>
#include <stdexcept>

namespace swaptime {

namespace {

constexpr cplx i_unit{0.0, 1.0};

double norm3(const Vec3& v) {
  return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

}  // namespace

Su2Matrix pauli(Axis k) {
  Su2Matrix m;
  switch (k) {
    case Axis::x:
      m.e = {cplx{0, 0}, cplx{1, 0}, cplx{1, 0}, cplx{0, 0}};
      break;
    case Axis::y:
      m.e = {cplx{0, 0}, cplx{0, -1}, cplx{0, 1}, cplx{0, 0}};
      break;
    case Axis::z:
      m.e = {cplx{1, 0}, cplx{0, 0}, cplx{0, 0}, cplx{-1, 0}};
      break;
  }
  return m;
}

Su2Matrix su2_exp(const Vec3& axis, double angle) {
  const double n = norm3(axis);
  if (std::abs(n - 1.0) > 1e-12) {
    throw std::invalid_argument("su2_exp: axis must be unit length");
  }
  const double c = std::cos(angle / 2.0);
  const double s = std::sin(angle / 2.0);
  // cos(angle/2) I - i sin(angle/2) (axis . sigma), written out entrywise.
  Su2Matrix m;
  m.e[0] = cplx{c, -s * axis[2]};
  m.e[1] = cplx{-s * axis[1], -s * axis[0]};
  m.e[2] = cplx{s * axis[1], -s * axis[0]};
  m.e[3] = cplx{c, s * axis[2]};
  return m;
}

So3Matrix adjoint_so3(const Su2Matrix& u) {
  if (special_unitary_defect(u) > 1e-9) {
    throw std::invalid_argument("adjoint_so3: input is not special unitary");
  }
  const Su2Matrix ud = dagger(u);
  const Su2Matrix sig[3] = {pauli(Axis::x), pauli(Axis::y), pauli(Axis::z)};
  So3Matrix r;
  for (int k = 0; k < 3; ++k) {
    for (int l = 0; l < 3; ++l) {
      // 2 Tr(S_k U S_l U^dagger) = Tr(sigma_k U sigma_l U^dagger) / 2.
      const Su2Matrix t = mul(sig[k], mul(u, mul(sig[l], ud)));
      r(k, l) = 0.5 * (t.e[0] + t.e[3]).real();
    }
  }
  return r;
}

Su2Matrix swap_equivalent(const TargetSpec& spec) {
  Su2Matrix m;
  m.e[0] = cplx{0, 0};
  m.e[1] = std::exp(i_unit * spec.phi);
  m.e[2] = -std::exp(-i_unit * spec.phi);
  m.e[3] = cplx{0, 0};
  return m;
}

MatchReport matches_up_to_sign(const Su2Matrix& u, const Su2Matrix& v, double tol) {
  const double dp = frobenius_distance(u, v);
  Su2Matrix neg = cplx{-1.0, 0.0} * v;
  const double dm = frobenius_distance(u, neg);
  MatchReport rep;
  rep.distance = std::min(dp, dm);
  if (dp <= tol && dp <= dm) {
    rep.sign = +1;
  } else if (dm <= tol) {
    rep.sign = -1;
  } else {
    rep.sign = 0;
  }
  return rep;
}

Su2Matrix mul(const Su2Matrix& a, const Su2Matrix& b) {
  Su2Matrix r;
  r.e[0] = a.e[0] * b.e[0] + a.e[1] * b.e[2];
  r.e[1] = a.e[0] * b.e[1] + a.e[1] * b.e[3];
  r.e[2] = a.e[2] * b.e[0] + a.e[3] * b.e[2];
  r.e[3] = a.e[2] * b.e[1] + a.e[3] * b.e[3];
  return r;
}

Su2Matrix dagger(const Su2Matrix& a) {
  Su2Matrix r;
  r.e[0] = std::conj(a.e[0]);
  r.e[1] = std::conj(a.e[2]);
  r.e[2] = std::conj(a.e[1]);
  r.e[3] = std::conj(a.e[3]);
  return r;
}

cplx det(const Su2Matrix& a) { return a.e[0] * a.e[3] - a.e[1] * a.e[2]; }

double frobenius_distance(const Su2Matrix& a, const Su2Matrix& b) {
  double s = 0.0;
  for (int i = 0; i < 4; ++i) {
    s += std::norm(a.e[i] - b.e[i]);
  }
  return std::sqrt(s);
}

double special_unitary_defect(const Su2Matrix& a) {
  const Su2Matrix g = mul(a, dagger(a));
  double s = 0.0;
  s += std::norm(g.e[0] - cplx{1.0, 0.0});
  s += std::norm(g.e[1]);
  s += std::norm(g.e[2]);
  s += std::norm(g.e[3] - cplx{1.0, 0.0});
  return std::sqrt(s) + std::abs(det(a) - cplx{1.0, 0.0});
}

}  // namespace swaptime

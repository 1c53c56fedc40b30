#pragma once

#include <array>
#include <complex>

namespace swaptime {

using cplx = std::complex<double>;
using Vec3 = std::array<double, 3>;

// Dense 2x2 complex matrix, row major.  All unitaries handled by the library
// live in SU(2), so no general linear-algebra machinery is needed.
struct Su2Matrix {
  std::array<cplx, 4> e{};

  static Su2Matrix identity() {
    Su2Matrix m;
    m.e = {cplx{1.0, 0.0}, cplx{0.0, 0.0}, cplx{0.0, 0.0}, cplx{1.0, 0.0}};
    return m;
  }

  cplx operator()(int r, int c) const { return e[2 * r + c]; }
  cplx& operator()(int r, int c) { return e[2 * r + c]; }
};

// 3x3 real matrix, row major (rotation image of an SU(2) element).
struct So3Matrix {
  std::array<double, 9> e{};

  static So3Matrix identity() {
    So3Matrix m;
    m.e = {1, 0, 0, 0, 1, 0, 0, 0, 1};
    return m;
  }

  double operator()(int r, int c) const { return e[3 * r + c]; }
  double& operator()(int r, int c) { return e[3 * r + c]; }
};

// Target description: the phase of the off-diagonal entries of the desired
// swap-like final operation.
struct TargetSpec {
  double phi = 0.0;
};

// Result of comparing a unitary against a reference up to overall sign.
// sign is +1 or -1 when the input is within tol of +ref or -ref in Frobenius
// norm, 0 when neither sign matches; distance is the smaller of the two.
struct MatchReport {
  int sign = 0;
  double distance = 0.0;
};

enum class Axis { x, y, z };

Su2Matrix pauli(Axis k);

// Closed-form exponential: cos(angle/2) I - i sin(angle/2) (axis . sigma).
// axis must be unit length to 1e-12.
Su2Matrix su2_exp(const Vec3& axis, double angle);

// Rotation matrix R_kl = 2 Tr(S_k U S_l U^dagger) with S_k = sigma_k / 2.
So3Matrix adjoint_so3(const Su2Matrix& u);

// [[0, e^{i phi}], [-e^{-i phi}, 0]]; phi = 0 gives i sigma_y.
Su2Matrix swap_equivalent(const TargetSpec& spec);

MatchReport matches_up_to_sign(const Su2Matrix& u, const Su2Matrix& v, double tol);

// -- small dense helpers shared by the other modules --

Su2Matrix mul(const Su2Matrix& a, const Su2Matrix& b);
Su2Matrix dagger(const Su2Matrix& a);
cplx det(const Su2Matrix& a);
double frobenius_distance(const Su2Matrix& a, const Su2Matrix& b);
// || U U^dagger - I ||_F combined with | det U - 1 |.
double special_unitary_defect(const Su2Matrix& a);

inline Su2Matrix operator+(const Su2Matrix& a, const Su2Matrix& b) {
  Su2Matrix r;
  for (int i = 0; i < 4; ++i) r.e[i] = a.e[i] + b.e[i];
  return r;
}

inline Su2Matrix operator*(cplx s, const Su2Matrix& a) {
  Su2Matrix r;
  for (int i = 0; i < 4; ++i) r.e[i] = s * a.e[i];
  return r;
}

}  // namespace swaptime

#ifndef RANKONE_SU_ORACLE_HPP
#define RANKONE_SU_ORACLE_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "rankone/discriminant.hpp"
#include "rankone/errors.hpp"
#include "rankone/exactpoly.hpp"

namespace rankone {

/// A holonomy torus point of SU(n+1,1) together with a length.
struct SuSample {
  std::vector<double> theta;
  double phi = 0;
  Rational ell;
};

struct SuOracleResult {
  bool ok = false;
  double max_rel_error = 0;
  std::size_t samples = 0;
};

namespace detail {

using CMat = Eigen::MatrixXcd;

// Indices: 0..n-1 carry u, n and n+1 the two copies of x.
inline CMat su_x_v(int n, const std::vector<std::complex<double>> &v) {
  CMat X = CMat::Zero(n + 2, n + 2);
  for (int j = 0; j < n; ++j) {
    X(j, n) = v[j];
    X(j, n + 1) = v[j];
    X(n, j) = -std::conj(v[j]);
    X(n + 1, j) = std::conj(v[j]);
  }
  return X;
}

/// Real basis X_{e_j}, X_{i e_j}, then a generator Y of n_2 with
/// Y(n+1,n+1) = i.
inline std::vector<CMat> su_n_basis(int n) {
  std::vector<CMat> basis;
  const std::complex<double> I(0, 1);
  for (int j = 0; j < n; ++j)
    for (auto c : {std::complex<double>(1), I}) {
      std::vector<std::complex<double>> v(static_cast<std::size_t>(n), 0);
      v[static_cast<std::size_t>(j)] = c;
      basis.push_back(su_x_v(n, v));
    }
  // n_2 is spanned by [n_1, n_1]; the bracket fixes the sign of the block.
  CMat y = basis[0] * basis[1] - basis[1] * basis[0];
  basis.push_back(y / y(n + 1, n + 1).imag());
  return basis;
}

/// Coordinates of Z in the basis above; Z must lie in n.
inline Eigen::VectorXd su_decode(int n, const CMat &Z) {
  Eigen::VectorXd out(2 * n + 1);
  for (int j = 0; j < n; ++j) {
    out(2 * j) = Z(j, n).real();
    out(2 * j + 1) = Z(j, n).imag();
  }
  out(2 * n) = Z(n + 1, n + 1).imag();
  return out;
}

/// Sign c with [H, X_v] = X_v for H = c (E_{n,n+1} + E_{n+1,n}).
inline double su_h_sign(int n) {
  CMat H = CMat::Zero(n + 2, n + 2);
  H(n, n + 1) = 1;
  H(n + 1, n) = 1;
  std::vector<std::complex<double>> v(static_cast<std::size_t>(n), 0);
  v[0] = 1;
  CMat X = su_x_v(n, v);
  CMat comm = H * X - X * H;
  double c;
  if ((comm - X).norm() < 1e-12)
    c = 1;
  else if ((comm + X).norm() < 1e-12)
    c = -1;
  else
    throw LogicError("su_h_sign: X_v is not an eigenvector of ad(H)");
  CMat Y = su_n_basis(n).back();
  if ((c * (H * Y - Y * H) - 2.0 * Y).norm() > 1e-12)
    throw LogicError("su_h_sign: [n_1, n_1] is not in the 2-eigenspace of ad(H)");
  return c;
}

} // namespace detail

/// e^{rho l} |det(Ad(m a_l)^{-1} - I)| on n, from the raw matrices.
inline double su_adjoint_discriminant(int n, const SuSample &s) {
  using detail::CMat;
  const double ell = s.ell.convert_to<double>();
  const double c = detail::su_h_sign(n);
  // a_l = exp(l H) with H = c (E_{n,n+1} + E_{n+1,n}).
  CMat a = CMat::Identity(n + 2, n + 2);
  a(n, n) = a(n + 1, n + 1) = std::cosh(ell);
  a(n, n + 1) = a(n + 1, n) = c * std::sinh(ell);
  CMat m = CMat::Zero(n + 2, n + 2);
  for (int j = 0; j < n; ++j)
    m(j, j) = std::polar(1.0, s.theta[static_cast<std::size_t>(j)]);
  m(n, n) = m(n + 1, n + 1) = std::polar(1.0, s.phi);
  CMat g = m * a;
  CMat ginv = g.inverse();
  auto basis = detail::su_n_basis(n);
  const int dim = 2 * n + 1;
  Eigen::MatrixXd A(dim, dim);
  for (int k = 0; k < dim; ++k) {
    CMat Z = ginv * basis[static_cast<std::size_t>(k)] * g;
    A.col(k) = detail::su_decode(n, Z);
    CMat back = CMat::Zero(n + 2, n + 2);
    for (int i = 0; i < dim; ++i)
      back += A(i, k) * basis[static_cast<std::size_t>(i)];
    if ((back - Z).norm() > 1e-9 * (1 + Z.norm()))
      throw LogicError("su_adjoint_discriminant: Ad(g^-1) does not preserve n");
  }
  double det = (A - Eigen::MatrixXd::Identity(dim, dim)).determinant();
  return std::exp((n + 1) * ell) * std::abs(det);
}

inline SuOracleResult su_oracle(int n, const std::vector<SuSample> &samples) {
  if (n < 2 || n > 4)
    throw DomainError("su_oracle: need 2 <= n <= 4");
  RankOneDescriptor d = descriptor(Family::SU, n);
  LaurentPoly poly = discriminant_poly(d);
  SuOracleResult res;
  res.ok = true;
  for (const auto &s : samples) {
    HolonomyPoint pt{s.theta, s.phi};
    check_holonomy(d, pt);
    if (s.ell < 0)
      throw DomainError("su_oracle: need l >= 0");
    const double ell = s.ell.convert_to<double>();
    double raw = su_adjoint_discriminant(n, s);
    double factored = discriminant_value(d, ell, pt);
    double expanded = evaluate(poly, torus_values(d, ell, pt)).real();
    double scale = std::abs(factored);
    double err = std::max(std::abs(raw - factored), std::abs(expanded - factored));
    // At l = 0 both sides vanish; compare absolutely there.
    double rel = scale > 1e-12 ? err / scale : err;
    res.max_rel_error = std::max(res.max_rel_error, rel);
    if (!(rel <= 1e-9))
      res.ok = false;
    ++res.samples;
  }
  return res;
}

inline bool verify_cor_discriminant_su(int n, const std::vector<SuSample> &samples) {
  return su_oracle(n, samples).ok;
}

/// Random torus points with phi fixed by x^2 det(u) = 1 and l in (1/20, 4].
inline std::vector<SuSample> random_su_samples(int n, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ang(-M_PI, M_PI);
  std::uniform_int_distribution<int> len(1, 80);
  std::vector<SuSample> out;
  for (std::size_t i = 0; i < count; ++i) {
    SuSample s;
    double sum = 0;
    for (int j = 0; j < n; ++j) {
      s.theta.push_back(ang(rng));
      sum += s.theta.back();
    }
    s.phi = -sum / 2;
    s.ell = Rational(len(rng), 20);
    out.push_back(std::move(s));
  }
  return out;
}

} // namespace rankone

#endif // RANKONE_SU_ORACLE_HPP

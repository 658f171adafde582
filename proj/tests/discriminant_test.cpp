#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "rankone/discriminant.hpp"
#include "rankone/su_oracle.hpp"

using namespace rankone;

namespace {

LaurentPoly T(int k) { return LaurentPoly::variable("t", k); }
LaurentPoly Y(int j, int k) { return LaurentPoly::variable(torus_variable(j), k); }

// det(e^{-l/2} I - e^{l/2} u) for the block rotation u, straight from the matrix.
double matrix_f(int n, double ell, const std::vector<double> &theta) {
  Eigen::MatrixXd u = Eigen::MatrixXd::Identity(n, n);
  for (std::size_t j = 0; j < theta.size(); ++j) {
    int i = static_cast<int>(2 * j);
    u(i, i) = std::cos(theta[j]);
    u(i, i + 1) = -std::sin(theta[j]);
    u(i + 1, i) = std::sin(theta[j]);
    u(i + 1, i + 1) = std::cos(theta[j]);
  }
  Eigen::MatrixXd m = std::exp(-ell / 2) * Eigen::MatrixXd::Identity(n, n) -
                      std::exp(ell / 2) * u;
  return std::abs(m.determinant());
}

} // namespace

TEST(Descriptor, FamilyConstants) {
  for (int n = 2; n <= 6; ++n) {
    auto su = descriptor(Family::SU, n);
    EXPECT_EQ(su.rho, Rational(n + 1));
    EXPECT_EQ(su.m, n);
    auto sp = descriptor(Family::Sp, n);
    EXPECT_EQ(sp.rho, Rational(2 * n + 1));
    EXPECT_EQ(sp.m, 2 * n);
    EXPECT_EQ(sp.n1, 4 * (n - 1));
    EXPECT_EQ(sp.n2, 3);
  }
  auto f = descriptor(Family::FII);
  EXPECT_EQ(f.rho, Rational(11));
  EXPECT_EQ(f.m, 10);
  EXPECT_EQ(f.psi, PsiKind::sinh);
}

TEST(Descriptor, OrthogonalThresholds) {
  for (int n = 2; n <= 9; ++n) {
    auto d = descriptor(Family::SO, n);
    EXPECT_EQ(d.rho, Rational(n, 2));
    EXPECT_EQ(d.m, n / 2);
    EXPECT_EQ(d.alpha0, n % 2 == 0 ? Rational(0) : Rational(1, 2));
    EXPECT_EQ(d.psi, n % 2 == 0 ? PsiKind::one : PsiKind::sinh_half);
    EXPECT_EQ(d.rho, Rational(d.n1 + 2 * d.n2, 2));
    EXPECT_EQ(d.rho - d.alpha0, Rational(d.m));
  }
  EXPECT_EQ(descriptor(Family::SO, 4).group_name(), "SO0(5,1)");
}

TEST(Descriptor, InvalidParameters) {
  EXPECT_THROW(descriptor(Family::SO, 1), DomainError);
  EXPECT_THROW(descriptor(Family::SU, 1), DomainError);
  EXPECT_THROW(descriptor(Family::Sp, 1), DomainError);
  EXPECT_THROW(parse_family("G2"), DomainError);
  EXPECT_EQ(parse_family("Sp"), Family::Sp);
}

TEST(FDet, SmallCasesByHand) {
  EXPECT_EQ(f_det(2), T(2) + T(-2) - Y(1, 2) - Y(1, -2));
  EXPECT_EQ(f_det(3), (T(1) - T(-1)) * (T(2) + T(-2) - Y(1, 2) - Y(1, -2)));
  for (int m = 1; m <= 4; ++m) {
    std::vector<std::string> vars;
    for (int j = 1; j <= m; ++j)
      vars.push_back(torus_variable(j));
    EXPECT_EQ(f_det(2 * m).evaluate_at_one(vars), (T(1) - T(-1)).pow(2 * m));
  }
}

TEST(FDet, AgreesWithMatrixDeterminant) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ang(-M_PI, M_PI), len(0.05, 3);
  for (int n = 2; n <= 9; ++n) {
    LaurentPoly f = f_det(n);
    for (int s = 0; s < 20; ++s) {
      double ell = len(rng);
      std::map<std::string, Complex> at{{"t", std::exp(ell / 2)}};
      std::vector<double> theta;
      for (int j = 1; j <= n / 2; ++j) {
        theta.push_back(ang(rng));
        at[torus_variable(j)] = std::polar(1.0, theta.back() / 2);
      }
      Complex v = evaluate(f, at);
      double want = matrix_f(n, ell, theta);
      EXPECT_NEAR(v.real(), want, 1e-9 * want) << "n=" << n;
      EXPECT_NEAR(v.imag(), 0, 1e-9 * want);
    }
  }
}

TEST(FDet, ClassFunctionSymmetry) {
  for (int m = 1; m <= 4; ++m) {
    LaurentPoly f = f_det(2 * m);
    for (const auto &w : weyl_group(RootSystem::B, m))
      EXPECT_EQ(f.substitute(w.substitution()), f) << "m=" << m;
  }
}

TEST(FExpansion, SmallCasesByHand) {
  EXPECT_EQ(f_expansion(2), T(2) + T(-2) - (Y(1, 2) + Y(1, -2)));
  // n=3: (t - 1/t)((t^2 + 1 + t^-2) - chi_tau1), chi_tau1 = y^2 + 1 + y^-2
  EXPECT_EQ(f_expansion(3), (T(1) - T(-1)) * (T(2) + 1 + T(-2) - (Y(1, 2) + 1 + Y(1, -2))));
}

TEST(FExpansion, HoldsUpToEleven) {
  for (int n = 2; n <= 11; ++n)
    EXPECT_TRUE(verify_f_expansion(n)) << "n=" << n;
  EXPECT_THROW(verify_f_expansion(1), DomainError);
  EXPECT_THROW(verify_f_expansion(14), DomainError);
}

TEST(FExpansion, WrongSignIsDetected) {
  // flipping the alternating sign of one term must break the identity
  LaurentPoly broken = f_expansion(4) + LaurentPoly(2) * shift_coefficient(1) * sigma_character(2, 1);
  EXPECT_NE(f_det(4), broken);
}

TEST(EtaTable, OrthogonalEven) {
  for (int n : {2, 4, 6}) {
    auto t = eta_table(descriptor(Family::SO, n));
    ASSERT_EQ(t.entries.size(), static_cast<std::size_t>(n / 2 + 1));
    EXPECT_EQ(t.entries[0], FormalCharSum::symbol("1"));
    for (int q = 1; q <= n / 2; ++q)
      EXPECT_EQ(t.entries[static_cast<std::size_t>(q)],
                FormalCharSum::symbol("sigma_" + std::to_string(q)));
  }
}

TEST(EtaTable, OrthogonalOddRestrictsToSigma) {
  // tau characters and sigma characters share the torus of SO(2m)
  for (int m = 1; m <= 4; ++m) {
    auto t = eta_table(descriptor(Family::SO, 2 * m + 1));
    for (int q = 0; q <= m; ++q)
      EXPECT_EQ(evaluate_formal(t.entries[static_cast<std::size_t>(q)], t.characters),
                sigma_character(m, q))
          << "m=" << m << " q=" << q;
  }
}

TEST(EtaTable, SymplecticLowRows) {
  for (int n = 2; n <= 4; ++n) {
    auto t = eta_table(descriptor(Family::Sp, n));
    ASSERT_EQ(t.entries.size(), static_cast<std::size_t>(2 * n + 1));
    EXPECT_EQ(t.entries[0], FormalCharSum::symbol("1"));
    EXPECT_EQ(t.entries[1], FormalCharSum::symbol("sigma~_1"));
  }
}

TEST(EtaTable, SymplecticAgainstPrintedCaseList) {
  for (int n = 3; n <= 5; ++n) {
    int m = 2 * n;
    auto derived = eta_table(descriptor(Family::Sp, n)).entries;
    auto printed = printed_sp_eta_table(n);
    for (int q = 0; q < m; ++q)
      EXPECT_EQ(derived[static_cast<std::size_t>(q)], printed[static_cast<std::size_t>(q)])
          << "n=" << n << " q=" << q;
    // last row by hand: sigma~_{m-2} + 2 sigma~_{m-4} - sigma~_{m-2}(x)tau~_1
    FormalCharSum last;
    last.add(sp_sigma_symbol(m - 2), 1);
    last.add(sp_sigma_symbol(m - 4), 2);
    last.add(sp_sigma_tau_symbol(m - 2), -1);
    EXPECT_EQ(derived[static_cast<std::size_t>(m)], last);
    EXPECT_NE(printed[static_cast<std::size_t>(m)], last);
    // the printed last row does not satisfy the identity
    auto swapped = derived;
    swapped[static_cast<std::size_t>(m)] = printed[static_cast<std::size_t>(m)];
    EXPECT_NE(shifted_sum(swapped), sp_product_expansion(n));
  }
  EXPECT_THROW(printed_sp_eta_table(2), DomainError);
}

TEST(EtaTable, SymplecticDegenerateCase) {
  auto t = eta_table(descriptor(Family::Sp, 2)).entries;
  ASSERT_EQ(t.size(), 5u);
  // m = 4 by hand from (c2 - c1 s1 + s2)(c2 + 1 - tau)
  FormalCharSum e2, e3, e4;
  e2.add("sigma~_2", 1);
  e2.add("1", 1);
  e2.add("tau~_1", -1);
  e3.add("sigma~_1", 2);
  e3.add("sigma~_1(x)tau~_1", -1);
  e4.add("sigma~_2", 1);
  e4.add("1", 2);
  e4.add("sigma~_2(x)tau~_1", -1);
  EXPECT_EQ(t[2], e2);
  EXPECT_EQ(t[3], e3);
  EXPECT_EQ(t[4], e4);
}

TEST(Regroup, RoundTripOnRandomSums) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> coef(-4, 4), pick(0, 3);
  for (int trial = 0; trial < 50; ++trial) {
    int m = 1 + trial % 6;
    std::vector<FormalCharSum> eta(static_cast<std::size_t>(m) + 1);
    for (auto &row : eta)
      for (int s = 0; s < 3; ++s)
        row.add("s" + std::to_string(pick(rng)), LaurentPoly(coef(rng)));
    FormalCharSum total = shifted_sum(eta);
    EXPECT_EQ(regroup_by_shift(total, m), eta);
  }
}

TEST(Regroup, RejectsNonPalindromic) {
  FormalCharSum bad = FormalCharSum::symbol("a", T(2));
  EXPECT_THROW(regroup_by_shift(bad, 2), LogicError);
  FormalCharSum odd = FormalCharSum::symbol("a", T(1) + T(-1));
  EXPECT_THROW(regroup_by_shift(odd, 2), LogicError);
}

TEST(Discriminant, OrthogonalIdentity) {
  for (int n = 2; n <= 8; ++n)
    EXPECT_TRUE(verify_discriminant_expansion(descriptor(Family::SO, n))) << "n=" << n;
}

TEST(Discriminant, UnitaryIdentity) {
  for (int n = 2; n <= 4; ++n) {
    auto rep = discriminant_report(descriptor(Family::SU, n));
    EXPECT_TRUE(rep.verified) << "n=" << n;
    EXPECT_TRUE(rep.details.failures.empty());
  }
}

TEST(Discriminant, SymplecticIdentity) {
  for (int n = 2; n <= 4; ++n) {
    auto rep = discriminant_report(descriptor(Family::Sp, n));
    EXPECT_TRUE(rep.verified) << "n=" << n;
    if (n >= 3) {
      EXPECT_EQ(rep.printed_mismatch_rows(), std::vector<int>{2 * n});
    } else {
      EXPECT_TRUE(rep.printed_rows.empty());
    }
  }
}

TEST(Discriminant, ExceptionalIdentity) {
  auto rep = discriminant_report(descriptor(Family::FII));
  EXPECT_TRUE(rep.verified);
  ASSERT_EQ(rep.table.entries.size(), 11u);
  EXPECT_EQ(rep.table.entries[0], FormalCharSum::symbol("1"));
  ASSERT_TRUE(rep.printed_spin_factor_matches.has_value());
  EXPECT_FALSE(*rep.printed_spin_factor_matches);
}

TEST(SpinFactor, ElementarySymmetricDimensions) {
  std::map<std::string, LaurentPoly> chars;
  FormalCharSum derived = fii_spin_factor_derived(chars);
  EXPECT_EQ(evaluate_formal(derived, chars), fii_spin_factor_direct());
  // dimension of the t^{2k-8} part is C(8,k)
  const int binom[] = {1, 8, 28, 56, 70, 56, 28, 8, 1};
  std::vector<std::string> vars{"y1", "y2", "y3"};
  LaurentPoly direct = fii_spin_factor_direct();
  for (int k = 0; k <= 8; ++k) {
    LaurentPoly part = evaluate_formal(derived.coefficient_of("t", 2 * k - 8), chars);
    Integer dim = part.evaluate_at_one(vars).constant_term();
    EXPECT_EQ(dim, Integer(k % 2 == 0 ? binom[k] : -binom[k])) << "k=" << k;
  }
}

TEST(SpinFactor, PrintedCombinationDiffers) {
  std::map<std::string, LaurentPoly> chars;
  FormalCharSum derived = fii_spin_factor_derived(chars);
  FormalCharSum printed = fii_spin_factor_printed(&chars);
  EXPECT_NE(printed, derived);
  EXPECT_NE(evaluate_formal(printed, chars), fii_spin_factor_direct());
  // the leading three terms agree
  for (int k : {8, 6})
    EXPECT_EQ(printed.coefficient_of("t", k), derived.coefficient_of("t", k));
  // e_2 = chi_{e1+e2} + chi_{e1} (dimension 28)
  FormalCharSum e2;
  e2.add("chi(1,1,0)", 1);
  e2.add("chi(1,0,0)", 1);
  EXPECT_EQ(derived.coefficient_of("t", -4), e2);
}

TEST(TraceCoefficients, OrthogonalThreeOne) {
  auto c = trace_coefficients(descriptor(Family::SO, 2));
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].q, 0);
  EXPECT_EQ(c[0].shift, 1);
  EXPECT_EQ(c[0].sign, 1);
  EXPECT_EQ(c[0].eta, FormalCharSum::symbol("1"));
  EXPECT_EQ(c[1].shift, 0);
  EXPECT_EQ(c[1].sign, -1);
  EXPECT_EQ(c[1].eta, FormalCharSum::symbol("sigma_1"));
  EXPECT_FALSE(c[1].symmetric_pair);
}

TEST(TraceCoefficients, ShiftsAndSigns) {
  std::vector<RankOneDescriptor> ds{descriptor(Family::SO, 5), descriptor(Family::SU, 3),
                                    descriptor(Family::Sp, 3), descriptor(Family::FII)};
  for (const auto &d : ds) {
    auto c = trace_coefficients(d);
    ASSERT_EQ(c.size(), static_cast<std::size_t>(d.m) + 1);
    for (int q = 0; q <= d.m; ++q) {
      EXPECT_EQ(c[static_cast<std::size_t>(q)].shift, d.m - q);
      EXPECT_EQ(c[static_cast<std::size_t>(q)].sign, q % 2 == 0 ? 1 : -1);
    }
    EXPECT_EQ(c[0].eta, FormalCharSum::symbol("1"));
  }
  EXPECT_EQ(trace_coefficients(descriptor(Family::FII)).size(), 11u);
}

TEST(SigmaLength, ThreeOneAgainstMatrix) {
  auto d = descriptor(Family::SO, 2);
  const double ell = 1, theta = M_PI;
  // e^{rho l} |det(e^{-l} R(-theta) - I)| with rho = 1
  Eigen::Matrix2d r;
  r << std::cos(-theta), -std::sin(-theta), std::sin(-theta), std::cos(-theta);
  double raw = std::exp(ell) * std::abs((std::exp(-ell) * r - Eigen::Matrix2d::Identity()).determinant());
  double v = sigma_length_term(d, ell, 1, {{theta}, 0}, LaurentPoly(1));
  EXPECT_NEAR(v, ell / (2 * raw), 1e-12);
  EXPECT_NEAR(v, 1 / (2 * (2 * std::cosh(1.0) + 2)), 1e-12);
}

TEST(SigmaLength, TrivialCharacterAndIndex) {
  std::mt19937_64 rng(3);
  for (const auto &d : {descriptor(Family::SO, 5), descriptor(Family::SU, 2),
                        descriptor(Family::FII)}) {
    HolonomyPoint pt = random_holonomy(d, rng);
    double ell = 1.7;
    double v1 = sigma_length_term(d, ell, 1, pt, LaurentPoly(1));
    EXPECT_NEAR(v1, ell / (2 * discriminant_value(d, ell, pt)), 1e-12 * std::abs(v1));
    EXPECT_NEAR(sigma_length_term(d, ell, 2, pt, LaurentPoly(1)), v1 / 2, 1e-15 + 1e-12 * v1);
  }
}

TEST(SigmaLength, Errors) {
  auto d = descriptor(Family::SO, 2);
  EXPECT_THROW(sigma_length_term(d, 0, 1, {{0.3}, 0}, LaurentPoly(1)), DomainError);
  EXPECT_THROW(sigma_length_term(d, 1, 0, {{0.3}, 0}, LaurentPoly(1)), DomainError);
  EXPECT_THROW(sigma_length_term(d, 1, 1, {{0.3, 0.1}, 0}, LaurentPoly(1)), DomainError);
  EXPECT_THROW(sigma_length_term(descriptor(Family::Sp, 2), 1, 1, {{0, 0, 0}, 0}, LaurentPoly(1)),
               DomainError);
  EXPECT_THROW(sigma_length_term(descriptor(Family::SU, 2), 1, 1, {{0.5, 0.5}, 0}, LaurentPoly(1)),
               DomainError);
}

TEST(Positivity, SampledPerFamily) {
  std::vector<RankOneDescriptor> ds{descriptor(Family::SO, 2), descriptor(Family::SO, 5),
                                    descriptor(Family::SU, 3), descriptor(Family::Sp, 2),
                                    descriptor(Family::Sp, 3), descriptor(Family::FII)};
  for (const auto &d : ds) {
    auto rep = sample_discriminant_positive(d, 1000, 17);
    EXPECT_TRUE(rep.ok()) << d.group_name() << ": " << rep.failures.size() << " failures";
    EXPECT_EQ(rep.checked, 1000u);
  }
}

TEST(SuOracle, IdentityHolonomy) {
  for (int n = 2; n <= 4; ++n) {
    SuSample s{std::vector<double>(static_cast<std::size_t>(n), 0.0), 0, Rational(1)};
    double raw = su_adjoint_discriminant(n, s);
    double want = std::pow(2 * std::sinh(0.5), 2 * n) * 2 * std::sinh(1.0);
    EXPECT_NEAR(raw, want, 1e-9 * want);
    EXPECT_TRUE(verify_cor_discriminant_su(n, {s}));
  }
}

TEST(SuOracle, RandomSamples) {
  for (int n = 2; n <= 3; ++n) {
    auto res = su_oracle(n, random_su_samples(n, 100, 2024 + n));
    EXPECT_TRUE(res.ok) << "n=" << n << " max rel error " << res.max_rel_error;
    EXPECT_EQ(res.samples, 100u);
    EXPECT_LT(res.max_rel_error, 1e-9);
  }
}

TEST(SuOracle, VanishesAtZeroLength) {
  SuSample s{{0.4, -0.9}, 0.25, Rational(0)};
  EXPECT_NEAR(su_adjoint_discriminant(2, s), 0, 1e-12);
  EXPECT_TRUE(verify_cor_discriminant_su(2, {s}));
}

TEST(SuOracle, RejectsNonTorusInput) {
  EXPECT_THROW(su_oracle(2, {SuSample{{0.4, 0.1}, 0.0, Rational(1)}}), DomainError);
  EXPECT_THROW(su_oracle(2, {SuSample{{0.4}, -0.2, Rational(1)}}), DomainError);
  EXPECT_THROW(su_oracle(5, {}), DomainError);
}

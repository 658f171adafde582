#include <gtest/gtest.h>

#include <boost/math/special_functions/expint.hpp>

#include <cmath>
#include <map>
#include <random>

#include "rankone/lengthsim.hpp"

using namespace rankone;

namespace {

/// Ramanujan's series for li(x).
double li_series(double x) {
  const double gamma = 0.57721566490153286060651209008240243;
  const double L = std::log(x);
  double sum = 0, term = 1, inner = 0;
  for (int n = 1; n < 200; ++n) {
    term *= L / n; // L^n / n!
    if ((n - 1) % 2 == 0)
      inner += 1.0 / n; // sum_{k <= (n-1)/2} 1/(2k+1)
    double t = (n % 2 ? 1 : -1) * term / std::pow(2.0, n - 1) * inner;
    sum += t;
    if (std::abs(t) < 1e-18 * std::abs(sum) && n > 10)
      break;
  }
  return gamma + std::log(L) + std::sqrt(x) * sum;
}

const SyntheticSpectrum &spectrum3() {
  static const SyntheticSpectrum s = generate(3, 6.0, 42);
  return s;
}

PrimitiveClassRecord record(std::int64_t ticks, FrobeniusType t, int d0,
                            NilpotentVariant v = NilpotentVariant::none) {
  PrimitiveClassRecord r;
  r.ticks = ticks;
  r.frobenius.type = t;
  r.frobenius.d0 = d0;
  r.frobenius.variant = v;
  return r;
}

} // namespace

TEST(Li, AgreesWithSeriesAndExponentialIntegral) {
  for (double x : {2.5, std::exp(1.0), 10.0, 1e3, 1e6, 1e9}) {
    double v = li(x);
    EXPECT_NEAR(v / li_series(x), 1.0, 1e-8) << x;
    EXPECT_NEAR(v / boost::math::expint(std::log(x)), 1.0, 1e-8) << x;
  }
  EXPECT_NEAR(li(std::exp(1.0)), 1.8951178163559367555, 1e-12);
}

TEST(Li, DomainAndShape) {
  EXPECT_THROW(li(2.0), DomainError);
  EXPECT_THROW(li(1.0), DomainError);
  double prev = li(2.01);
  for (double x = 3; x < 1e7; x *= 1.7) {
    double v = li(x);
    EXPECT_GT(v, prev);
    prev = v;
  }
  double r = li(1e6) / (1e6 / std::log(1e6));
  EXPECT_GE(r, 1.0);
  EXPECT_LE(r, 1.1);
  EXPECT_EQ(offset_li(2.0), 0.0);
}

TEST(Generate, DeterministicAndValidated) {
  auto a = generate(3, 4.0, 7);
  auto b = generate(3, 4.0, 7);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].ticks, b.records[i].ticks);
    EXPECT_EQ(a.records[i].frobenius.sigma, b.records[i].frobenius.sigma);
  }
  EXPECT_THROW(generate(3, 0.0, 1), DomainError);
  EXPECT_THROW(generate(3, -1.0, 1), DomainError);
  EXPECT_THROW(generate(3, 20.0, 1), ResourceError);
  EXPECT_THROW(generate(5, 1.0, 1), DomainError); // 5 splits in Z[i]
}

TEST(Generate, CountTracksLi) {
  const auto &s = spectrum3();
  double ratio = static_cast<double>(s.records.size()) / expected_count(1.0, s.T);
  EXPECT_GE(ratio, 0.9);
  EXPECT_LE(ratio, 1.1);
  // distinct lengths, all positive and at most T
  std::int64_t last = 0;
  for (const auto &r : s.records) {
    EXPECT_GT(r.ticks, last);
    last = r.ticks;
  }
  EXPECT_LE(s.length_of(last), s.T);
  // the intermediate counts also track Li
  for (double t : {3.0, 4.5}) {
    std::size_t c = 0;
    for (const auto &r : s.records)
      c += s.length_of(r.ticks) <= t;
    EXPECT_NEAR(static_cast<double>(c) / expected_count(1.0, t), 1.0, 0.1) << t;
  }
}

TEST(Generate, FrobeniusFrequenciesMatchClassCensus) {
  // chi-square of (type, variant, d0) cells against exact class masses
  static const GroupTable G = build_group(3, RingKind::gaussian);
  std::map<std::tuple<int, int, int>, double> mass;
  for (const auto &cls : G.classes()) {
    auto f = classify_frobenius(G, cls.front());
    mass[{static_cast<int>(f.type), static_cast<int>(f.variant), f.d0}] +=
        static_cast<double>(cls.size()) / static_cast<double>(G.order());
  }
  Ring R(3, RingKind::gaussian);
  Field F(3, RingKind::gaussian);
  std::mt19937_64 rng(99);
  const int N = 100000;
  std::map<std::tuple<int, int, int>, double> seen;
  for (int k = 0; k < N; ++k) {
    auto f = classify_matrix(R, F, random_sl2(R, rng));
    seen[{static_cast<int>(f.type), static_cast<int>(f.variant), f.d0}] += 1;
  }
  double chi2 = 0;
  int cells = 0;
  double rare = 0, rare_seen = 0;
  for (const auto &[k, m] : mass) {
    double e = m * N;
    double o = seen.count(k) ? seen[k] : 0;
    if (e < 5) {
      rare += e;
      rare_seen += o;
      continue;
    }
    chi2 += (o - e) * (o - e) / e;
    ++cells;
  }
  for (const auto &[k, o] : seen)
    EXPECT_TRUE(mass.count(k)); // nothing outside the census
  // generous bound: mean is cells - 1, sd sqrt(2 (cells - 1))
  EXPECT_LT(chi2, cells + 6 * std::sqrt(2.0 * cells)) << cells;
  EXPECT_NEAR(rare_seen, rare, 6 * std::sqrt(rare) + 3);
}

TEST(Multiplicities, HandCases) {
  const int p = 3;
  const Integer n = closed_form_index(p, Subgroup::B1);
  EXPECT_EQ(n, Integer(9720));
  // trivial record at d0 = 1: n at l_p for B1, p n for B2
  std::vector<PrimitiveClassRecord> rec{record(1000, FrobeniusType::trivial, 1)};
  auto t1 = multiplicities(rec, Subgroup::B1, p);
  auto t2 = multiplicities(rec, Subgroup::B2, p);
  ASSERT_EQ(t1.m.size(), 1u);
  EXPECT_EQ(t1.m.at(1000), n);
  EXPECT_EQ(t2.m.at(1000), 3 * n);
  // quadratic record at d0 = 1: contributions at l_p and p l_p
  rec = {record(1000, FrobeniusType::quadratic, 1)};
  t1 = multiplicities(rec, Subgroup::B1, p);
  EXPECT_EQ(t1.m.at(1000), n * 4 / 30);
  EXPECT_EQ(t1.m.at(3000), n * 26 / 90);
  // empty input
  EXPECT_TRUE(multiplicities({}, Subgroup::B1, p).m.empty());
}

TEST(Multiplicities, ClosedFormSourceMatchesGroupTable) {
  static const GroupTable G = build_group(3, RingKind::gaussian);
  std::vector<PrimitiveClassRecord> recs;
  for (std::size_t c = 0; c < G.classes().size(); ++c) {
    PrimitiveClassRecord r;
    r.ticks = static_cast<std::int64_t>(1000 + 7 * c);
    r.frobenius = classify_frobenius(G, G.classes()[c].front());
    recs.push_back(r);
  }
  for (Subgroup s : {Subgroup::B1, Subgroup::B2}) {
    SplittingSource table_source = [&](const FrobeniusDatum &f) {
      std::map<int, Integer> out;
      for (const auto &[d, v] : frobenius_splitting(G, s, G.index_of(f.sigma)))
        if (v != 0)
          out[d] = numerator(v);
      return out;
    };
    auto a = multiplicities(recs, s, 3);
    auto b = multiplicities(recs, s, 3, table_source);
    EXPECT_EQ(a.m, b.m);
  }
}

TEST(DLength, BasicProperties) {
  MultiplicityTable a, b;
  a.m = {{1, 5}, {2, 3}};
  b.m = {{3, 4}};
  EXPECT_EQ(d_length(a, a, 100), 0);
  EXPECT_EQ(d_length(a, b, 100), 12);
  EXPECT_EQ(d_length(a, b, 2), 8);
  b.m = {{2, 7}};
  EXPECT_EQ(d_length(a, b, 100), 5 + 4);
}

TEST(DLength, ManualSumOnSmallSample) {
  const auto &s = spectrum3();
  std::vector<PrimitiveClassRecord> sample(s.records.begin(), s.records.begin() + 20);
  auto t1 = multiplicities(sample, Subgroup::B1, 3);
  auto t2 = multiplicities(sample, Subgroup::B2, 3);
  const std::int64_t T = s.ticks_of(s.T);
  // per-length manual summation over every candidate length d * l_p
  std::map<std::int64_t, Integer> diff;
  for (const auto &r : sample) {
    for (const auto &[d, v] : closed_form_splitting(3, Subgroup::B1, r.frobenius))
      diff[r.ticks * d] -= v;
    for (const auto &[d, v] : closed_form_splitting(3, Subgroup::B2, r.frobenius))
      diff[r.ticks * d] += v;
  }
  Integer manual = 0;
  for (const auto &[l, v] : diff)
    if (l <= T)
      manual += abs(v);
  EXPECT_EQ(d_length(t1, t2, T), manual);
}

TEST(Difference, AllTrivialData) {
  std::vector<PrimitiveClassRecord> recs;
  for (int k = 1; k <= 50; ++k)
    recs.push_back(record(100 * k, FrobeniusType::trivial, 1 + k % 3));
  auto t1 = multiplicities(recs, Subgroup::B1, 3);
  auto t2 = multiplicities(recs, Subgroup::B2, 3);
  for (std::int64_t T : {50, 1000, 4000, 20000}) {
    auto d = diff_closed_form(recs, 3, T);
    const CounterKey tr{FrobeniusType::trivial, NilpotentVariant::none};
    EXPECT_EQ(d.value, 2 * d.pi.plain.at(tr));
    EXPECT_EQ(d.value, Rational(brute_force_difference(t1, t2, T)));
    EXPECT_EQ(d.printed_value, d.value);
  }
}

TEST(Difference, AllQuadraticData) {
  std::vector<PrimitiveClassRecord> recs;
  for (int k = 1; k <= 50; ++k)
    recs.push_back(record(100 * k, FrobeniusType::quadratic, 1));
  auto t1 = multiplicities(recs, Subgroup::B1, 3);
  auto t2 = multiplicities(recs, Subgroup::B2, 3);
  const CounterKey qr{FrobeniusType::quadratic, NilpotentVariant::none};
  // below the first p d0 echo only the -2/(p^3+p) term is present
  auto d = diff_closed_form(recs, 3, 250);
  EXPECT_EQ(d.value, Rational(-2, 30) * d.pi.plain.at(qr));
  EXPECT_EQ(d.value, Rational(brute_force_difference(t1, t2, 250)));
  // with echoes the derived coefficient p (c2 - c1) is needed
  d = diff_closed_form(recs, 3, 20000);
  EXPECT_EQ(d.value, Rational(brute_force_difference(t1, t2, 20000)));
  EXPECT_NE(d.printed_value, d.value);
}

TEST(Difference, PrintedCoefficientsAreTheUnscaledDifferences) {
  // printed tilde coefficients = c2 - c1 at p d0 (without the factor p); plain
  // ones agree except for nilpotent data
  for (int p : {3, 7, 11}) {
    auto printed = printed_difference_coefficients(p);
    auto derived = derived_difference_coefficients(p);
    for (const auto &k : counter_keys()) {
      if (k.first == FrobeniusType::nilpotent)
        continue;
      EXPECT_EQ(printed.plain.at(k), derived.plain.at(k)) << counter_name(k);
      EXPECT_EQ(printed.tilde.at(k) * p, derived.tilde.at(k)) << counter_name(k);
    }
    // nilpotent: class average of the derived coefficients
    const Rational P(p);
    Rational avg_plain = (derived.plain.at({FrobeniusType::nilpotent, NilpotentVariant::split}) +
                          derived.plain.at({FrobeniusType::nilpotent, NilpotentVariant::inert})) /
                         2;
    Rational avg_tilde = (derived.tilde.at({FrobeniusType::nilpotent, NilpotentVariant::split}) +
                          derived.tilde.at({FrobeniusType::nilpotent, NilpotentVariant::inert})) /
                         2;
    EXPECT_EQ(avg_plain, (P - 1) * (P - 1) / (P * P * P * P - 1));
    EXPECT_EQ(avg_tilde,
              P * printed.tilde.at({FrobeniusType::nilpotent, NilpotentVariant::split}));
    EXPECT_NE(avg_plain, printed.plain.at({FrobeniusType::nilpotent, NilpotentVariant::split}));
  }
}

TEST(Difference, ExactOnSyntheticSampleForEveryT) {
  const auto &s = spectrum3();
  std::vector<PrimitiveClassRecord> recs(s.records.begin(), s.records.begin() + 1000);
  auto t1 = multiplicities(recs, Subgroup::B1, 3);
  auto t2 = multiplicities(recs, Subgroup::B2, 3);
  // every breakpoint of either table
  std::vector<std::int64_t> Ts;
  for (const auto &[l, v] : t1.m)
    Ts.push_back(l);
  for (std::size_t i = 0; i < Ts.size(); i += 37) {
    auto T = Ts[i];
    auto d = diff_closed_form(recs, 3, T);
    Integer brute = brute_force_difference(t1, t2, T);
    ASSERT_EQ(d.value, Rational(brute)) << T;
    EXPECT_TRUE(verify_piqr(d, 3, brute));
    Integer dl = d_length(t1, t2, T);
    EXPECT_LE(abs(brute), dl);
    EXPECT_LE(Rational(dl), absolute_bound(derived_difference_coefficients(3), d.pi));
  }
}

TEST(Difference, SweepAgreesWithPointwiseChecks) {
  const auto &s = spectrum3();
  std::vector<PrimitiveClassRecord> recs(s.records.begin(), s.records.begin() + 1000);
  auto sweep = verify_difference_every_cutoff(recs, 3);
  EXPECT_TRUE(sweep.ok()) << sweep.first_mismatch;
  EXPECT_GT(sweep.cutoffs, recs.size());
  // The printed coefficients drift once p d0 echoes fall below the cutoff.
  auto bad = verify_difference_every_cutoff(recs, 3, printed_difference_coefficients(3));
  EXPECT_FALSE(bad.ok());
  EXPECT_GT(bad.first_mismatch, 0);
}

TEST(Difference, CollisionModeKeepsIdentities) {
  LengthModel m;
  m.collisions = true;
  m.collision_rate = 0.3;
  auto s = generate(3, 4.0, 5, m);
  std::map<std::int64_t, int> seen;
  int shared = 0;
  for (const auto &r : s.records)
    shared += seen[r.ticks]++ > 0;
  EXPECT_GT(shared, 0);
  auto rep = density_report(s);
  EXPECT_TRUE(rep.diff_identity);
  EXPECT_TRUE(rep.piqr_identity);
  EXPECT_TRUE(rep.triangle);
  EXPECT_TRUE(rep.same_length_sets);
}

TEST(Difference, ScalingAllSplittingDataScalesDL) {
  const auto &s = spectrum3();
  const std::int64_t T = s.ticks_of(s.T);
  auto doubled = [](Subgroup b) {
    return SplittingSource([b](const FrobeniusDatum &f) {
      auto a = closed_form_splitting(3, b, f);
      for (auto &[d, v] : a)
        v *= 2;
      return a;
    });
  };
  auto t1 = multiplicities(s.records, Subgroup::B1, 3);
  auto t2 = multiplicities(s.records, Subgroup::B2, 3);
  auto u1 = multiplicities(s.records, Subgroup::B1, 3, doubled(Subgroup::B1));
  auto u2 = multiplicities(s.records, Subgroup::B2, 3, doubled(Subgroup::B2));
  EXPECT_EQ(d_length(u1, u2, T), 2 * d_length(t1, t2, T));
}

TEST(Density, ReportAtP3) {
  // at T = 6 the identities are exact; the ratio is still dominated by
  // short classes of small d0 (checked at larger T by the acceptance run)
  auto rep = density_report(spectrum3());
  EXPECT_TRUE(rep.diff_identity);
  EXPECT_TRUE(rep.piqr_identity);
  EXPECT_TRUE(rep.triangle);
  EXPECT_TRUE(rep.same_length_sets);
  EXPECT_FALSE(rep.printed_diff_identity);
  EXPECT_GT(rep.d_l, 0);
  EXPECT_EQ(rep.bound, 1.0);
  EXPECT_EQ(rep.record_count, spectrum3().records.size());
  EXPECT_EQ(rep.pass, rep.ratio <= 1.25);
}

TEST(Density, IdenticalSubgroupsGiveZero) {
  const auto &s = spectrum3();
  auto t1 = multiplicities(s.records, Subgroup::B1, 3);
  EXPECT_EQ(d_length(t1, t1, s.ticks_of(s.T)), 0);
}

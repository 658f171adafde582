#ifndef RANKONE_LENGTHSIM_HPP
#define RANKONE_LENGTHSIM_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rankone/covers.hpp"
#include "rankone/errors.hpp"
#include "rankone/exactpoly.hpp"

namespace rankone {

// ---------------------------------------------------------------------------
// Logarithmic integral

constexpr double kLi2 = 1.045163780117492784844588889194613136522615578151;

/// li(x) = li(2) + int_2^x dt / ln t by adaptive Gauss-Kronrod quadrature.
inline double li(double x) {
  if (!(x > 2))
    throw DomainError("li: need x > 2");
  // t = e^u turns the integrand into e^u / u on [ln 2, ln x]
  auto f = [](double u) { return std::exp(u) / u; };
  double err = 0;
  double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, std::log(2.0), std::log(x), 20, 1e-14, &err);
  return kLi2 + v;
}

/// Li(x) = li(x) - li(2), the prime-geodesic counting main term.
inline double offset_li(double x) {
  if (x == 2)
    return 0;
  return li(x) - kLi2;
}

// ---------------------------------------------------------------------------
// Synthetic primitive classes

struct LengthModel {
  double rho = 1.0;      // exponent 2 rho in Li(e^{2 rho T})
  double tick = 1e-9;    // lengths are integer multiples of tick
  bool collisions = false;
  double collision_rate = 0.05; // fraction of records reusing an earlier length
};

constexpr double kDefaultRecordCap = 1'000'000;

struct PrimitiveClassRecord {
  std::int64_t ticks = 0; // length l_p = ticks * tick
  FrobeniusDatum frobenius;
  std::uint64_t id = 0;
};

struct SyntheticSpectrum {
  int p = 0;
  double T = 0;
  std::uint64_t seed = 0;
  LengthModel model;
  std::vector<PrimitiveClassRecord> records;

  std::int64_t ticks_of(double length) const {
    return static_cast<std::int64_t>(std::floor(length / model.tick + 1e-6));
  }
  double length_of(std::int64_t ticks) const { return static_cast<double>(ticks) * model.tick; }
};

/// Expected number of primitive classes of length <= T.
inline double expected_count(double rho, double T) {
  double x = std::exp(2 * rho * T);
  return x > 2 ? offset_li(x) : 0.0;
}

/// Poisson lengths with mean count Li(e^{2 rho l}) below l, each carrying the
/// Frobenius datum of a uniform element of PSL_2(Z[i]/p^2).
inline SyntheticSpectrum generate(int p, double T, std::uint64_t seed, const LengthModel &model = {},
                                  double record_cap = kDefaultRecordCap) {
  if (!(T > 0))
    throw DomainError("generate: need T > 0");
  if (!(model.rho > 0) || !(model.tick > 0))
    throw DomainError("generate: need rho > 0 and tick > 0");
  const double expected = expected_count(model.rho, T);
  if (expected > record_cap)
    throw ResourceError("generate: about " + std::to_string(static_cast<long long>(expected)) +
                        " records exceed the cap " +
                        std::to_string(static_cast<long long>(record_cap)));
  Ring R(p, RingKind::gaussian);
  Field F(p, RingKind::gaussian);
  SyntheticSpectrum out;
  out.p = p;
  out.T = T;
  out.seed = seed;
  out.model = model;

  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> gap(1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double rho = model.rho;
  auto density = [rho](double l) { return std::exp(2 * rho * l) / l; };
  // Lambda(l) = Li(e^{2 rho l}), advanced by short fixed-order quadratures
  double l = std::log(2.0) / (2 * rho);
  double lambda = 0;
  double target = gap(rng);
  const double total = expected;
  std::int64_t last = -1;
  std::uint64_t next_id = 0;
  while (target <= total) {
    // Newton steps on Lambda(l) = target from the current point
    double x = l, lx = lambda;
    for (int it = 0; it < 50; ++it) {
      double step = (target - lx) / density(x);
      double nx = std::min(std::max(x + step, x * 0.5 + l * 0.5), T + 1);
      lx += boost::math::quadrature::gauss<double, 20>::integrate(density, x, nx);
      x = nx;
      if (std::abs(target - lx) <= 1e-12 * std::max(1.0, target))
        break;
    }
    l = x;
    lambda = lx;
    if (l > T)
      break;
    PrimitiveClassRecord rec;
    rec.id = next_id++;
    rec.ticks = out.ticks_of(l);
    if (rec.ticks <= last)
      rec.ticks = last + 1; // distinct primitive lengths
    last = rec.ticks;
    if (model.collisions && !out.records.empty() && unit(rng) < model.collision_rate) {
      std::uniform_int_distribution<std::size_t> pick(0, out.records.size() - 1);
      rec.ticks = out.records[pick(rng)].ticks;
    }
    rec.frobenius = classify_matrix(R, F, random_sl2(R, rng));
    out.records.push_back(std::move(rec));
    target += gap(rng);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Multiplicities of the covers

using SplittingSource = std::function<std::map<int, Integer>(const FrobeniusDatum &)>;

inline SplittingSource closed_form_source(int p, Subgroup s) {
  return [p, s](const FrobeniusDatum &f) { return closed_form_splitting(p, s, f); };
}

struct MultiplicityTable {
  Subgroup subgroup = Subgroup::B1;
  int p = 0;
  std::map<std::int64_t, Integer> m; // length in ticks -> m(l)

  Integer total_up_to(std::int64_t T) const {
    Integer s = 0;
    for (auto it = m.begin(); it != m.end() && it->first <= T; ++it)
      s += it->second;
    return s;
  }
};

/// m(l) = sum_d sum_{l_p = l/d} A_B(p, d).
inline MultiplicityTable multiplicities(const std::vector<PrimitiveClassRecord> &records,
                                        Subgroup s, int p, const SplittingSource &source) {
  MultiplicityTable t;
  t.subgroup = s;
  t.p = p;
  for (const auto &r : records)
    for (const auto &[d, a] : source(r.frobenius)) {
      if (a < 0)
        throw NonIntegralSplitting("multiplicities: negative splitting count");
      if (a != 0)
        t.m[r.ticks * d] += a;
    }
  return t;
}

inline MultiplicityTable multiplicities(const std::vector<PrimitiveClassRecord> &records,
                                        Subgroup s, int p) {
  return multiplicities(records, s, p, closed_form_source(p, s));
}

/// D_L = sum_{l <= T} |m_A(l) - m_B(l)| over the union of the supports.
inline Integer d_length(const MultiplicityTable &a, const MultiplicityTable &b, std::int64_t T) {
  Integer s = 0;
  auto ia = a.m.begin(), ib = b.m.begin();
  while (true) {
    bool has_a = ia != a.m.end() && ia->first <= T;
    bool has_b = ib != b.m.end() && ib->first <= T;
    if (!has_a && !has_b)
      break;
    if (has_a && (!has_b || ia->first < ib->first)) {
      s += abs(ia->second);
      ++ia;
    } else if (has_b && (!has_a || ib->first < ia->first)) {
      s += abs(ib->second);
      ++ib;
    } else {
      s += abs(ia->second - ib->second);
      ++ia;
      ++ib;
    }
  }
  return s;
}

/// sum_{l <= T} (m_2(l) - m_1(l)).
inline Integer brute_force_difference(const MultiplicityTable &t1, const MultiplicityTable &t2,
                                      std::int64_t T) {
  return t2.total_up_to(T) - t1.total_up_to(T);
}

/// m_1(l) > 0 iff m_2(l) > 0 on the union of supports.
inline bool same_length_sets(const MultiplicityTable &a, const MultiplicityTable &b) {
  for (const auto &[l, v] : a.m)
    if ((v > 0) != (b.m.count(l) && b.m.at(l) > 0))
      return false;
  for (const auto &[l, v] : b.m)
    if ((v > 0) != (a.m.count(l) && a.m.at(l) > 0))
      return false;
  return true;
}

// ---------------------------------------------------------------------------
// The explicit difference in counting functions

/// Type key for the counting functions; nilpotent data split by class.
using CounterKey = std::pair<FrobeniusType, NilpotentVariant>;

inline std::string counter_name(const CounterKey &k) {
  std::string s = frobenius_type_name(k.first);
  if (k.first == FrobeniusType::nilpotent)
    s += std::string("/") + nilpotent_variant_name(k.second);
  return s;
}

inline std::vector<CounterKey> counter_keys() {
  return {{FrobeniusType::trivial, NilpotentVariant::none},
          {FrobeniusType::irregular, NilpotentVariant::none},
          {FrobeniusType::quadratic, NilpotentVariant::none},
          {FrobeniusType::nonquadratic, NilpotentVariant::none},
          {FrobeniusType::nilpotent, NilpotentVariant::split},
          {FrobeniusType::nilpotent, NilpotentVariant::inert}};
}

/// pi_I(T) = sum over classes of type I with d0 l_p <= T of n/d0, and
/// pi~_I(T) = sum over those with p d0 l_p <= T of n/(p d0).
struct PiCounters {
  std::map<CounterKey, Rational> plain;
  std::map<CounterKey, Rational> tilde;
};

inline PiCounters pi_counters(const std::vector<PrimitiveClassRecord> &records, int p,
                              std::int64_t T) {
  PiCounters pi;
  for (const auto &k : counter_keys()) {
    pi.plain[k] = 0;
    pi.tilde[k] = 0;
  }
  const Rational n(closed_form_index(p, Subgroup::B1));
  for (const auto &r : records) {
    const auto &f = r.frobenius;
    CounterKey k{f.type, f.variant};
    if (r.ticks * f.d0 <= T)
      pi.plain[k] += n / f.d0;
    if (r.ticks * f.d0 * p <= T)
      pi.tilde[k] += n / (p * f.d0);
  }
  return pi;
}

/// Coefficients of pi_I and pi~_I in sum_{l<=T} (m_2 - m_1).
struct DifferenceCoefficients {
  std::map<CounterKey, Rational> plain;
  std::map<CounterKey, Rational> tilde;
};

/// From the per-class splitting tables: c2 - c1 at d0 and p (c2 - c1) at p d0,
/// the factor p converting the n/d0 weight of the tables to the n/(p d0)
/// weight of pi~.
inline DifferenceCoefficients derived_difference_coefficients(int p) {
  DifferenceCoefficients c;
  for (const auto &k : counter_keys()) {
    auto b1 = derived_coefficients(p, Subgroup::B1, k.first, k.second);
    auto b2 = derived_coefficients(p, Subgroup::B2, k.first, k.second);
    c.plain[k] = b2.at_d0 - b1.at_d0;
    c.tilde[k] = Rational(p) * (b2.at_pd0 - b1.at_pd0);
  }
  return c;
}

/// The printed coefficients, nilpotent classes sharing one entry.
inline DifferenceCoefficients printed_difference_coefficients(int p) {
  const Rational P(p);
  const Rational p2 = P * P, p3 = p2 * P, p4 = p3 * P;
  DifferenceCoefficients c;
  for (const auto &k : counter_keys()) {
    c.plain[k] = 0;
    c.tilde[k] = 0;
  }
  const CounterKey tr{FrobeniusType::trivial, NilpotentVariant::none};
  const CounterKey ir{FrobeniusType::irregular, NilpotentVariant::none};
  const CounterKey qr{FrobeniusType::quadratic, NilpotentVariant::none};
  const CounterKey nq{FrobeniusType::nonquadratic, NilpotentVariant::none};
  c.plain[tr] = P - 1;
  c.plain[qr] = -2 / (p3 + P);
  c.tilde[ir] = (P - 1) / P;
  c.tilde[qr] = (p4 - p3 + p2 - P + 2) / (p4 + p2);
  c.tilde[nq] = (p4 - p3 + p2 - P) / (p4 + p2);
  for (auto v : {NilpotentVariant::split, NilpotentVariant::inert}) {
    CounterKey ni{FrobeniusType::nilpotent, v};
    c.plain[ni] = (p3 - p2 - P + 1) / (p4 - 1);
    c.tilde[ni] = (p4 - p3 - P + 1) / (p4 - 1);
  }
  return c;
}

inline Rational apply_coefficients(const DifferenceCoefficients &c, const PiCounters &pi) {
  Rational s = 0;
  for (const auto &[k, v] : pi.plain)
    s += c.plain.at(k) * v;
  for (const auto &[k, v] : pi.tilde)
    s += c.tilde.at(k) * v;
  return s;
}

/// Sum of |coefficient| * counter: the type-wise bound on D_L.
inline Rational absolute_bound(const DifferenceCoefficients &c, const PiCounters &pi) {
  Rational s = 0;
  for (const auto &[k, v] : pi.plain)
    s += abs(c.plain.at(k)) * v;
  for (const auto &[k, v] : pi.tilde)
    s += abs(c.tilde.at(k)) * v;
  return s;
}

struct DiffClosedForm {
  PiCounters pi;
  Rational value;         // derived coefficients
  Rational printed_value; // printed coefficients
};

inline DiffClosedForm diff_closed_form(const std::vector<PrimitiveClassRecord> &records, int p,
                                       std::int64_t T) {
  DiffClosedForm out;
  out.pi = pi_counters(records, p, T);
  out.value = apply_coefficients(derived_difference_coefficients(p), out.pi);
  out.printed_value = apply_coefficients(printed_difference_coefficients(p), out.pi);
  return out;
}

/// The rearrangement: -c_qr pi_qr = (sum of the other terms) - sum (m_2 - m_1).
inline bool verify_piqr(const DiffClosedForm &d, int p, const Integer &brute) {
  auto c = derived_difference_coefficients(p);
  const CounterKey qr{FrobeniusType::quadratic, NilpotentVariant::none};
  Rational rest = apply_coefficients(c, d.pi) - c.plain.at(qr) * d.pi.plain.at(qr);
  return -c.plain.at(qr) * d.pi.plain.at(qr) == rest - Rational(brute);
}

/// Both sides of the explicit difference change only at lengths d0 l and
/// p d0 l; compares them after every such cutoff.
struct EveryCutoffCheck {
  std::size_t cutoffs = 0;
  std::size_t mismatches = 0;
  std::int64_t first_mismatch = -1; // ticks
  bool ok() const { return mismatches == 0; }
};

inline EveryCutoffCheck verify_difference_every_cutoff(
    const std::vector<PrimitiveClassRecord> &records, int p, const DifferenceCoefficients &c) {
  struct Event {
    std::int64_t ticks;
    Rational closed;
    Integer brute;
  };
  const Rational n(closed_form_index(p, Subgroup::B1));
  std::vector<Event> events;
  events.reserve(4 * records.size());
  for (const auto &r : records) {
    const auto &f = r.frobenius;
    CounterKey k{f.type, f.variant};
    events.push_back({r.ticks * f.d0, c.plain.at(k) * n / f.d0, 0});
    events.push_back({r.ticks * f.d0 * p, c.tilde.at(k) * n / (p * f.d0), 0});
    auto a1 = closed_form_splitting(p, Subgroup::B1, f);
    auto a2 = closed_form_splitting(p, Subgroup::B2, f);
    for (const auto &[d, v] : a2)
      events.push_back({r.ticks * d, 0, v});
    for (const auto &[d, v] : a1)
      events.push_back({r.ticks * d, 0, -v});
  }
  std::sort(events.begin(), events.end(),
            [](const Event &a, const Event &b) { return a.ticks < b.ticks; });
  EveryCutoffCheck out;
  Rational closed = 0;
  Integer brute = 0;
  for (std::size_t i = 0; i < events.size();) {
    std::size_t j = i;
    for (; j < events.size() && events[j].ticks == events[i].ticks; ++j) {
      closed += events[j].closed;
      brute += events[j].brute;
    }
    ++out.cutoffs;
    if (closed != Rational(brute)) {
      if (out.mismatches++ == 0)
        out.first_mismatch = events[i].ticks;
    }
    i = j;
  }
  return out;
}

inline EveryCutoffCheck verify_difference_every_cutoff(
    const std::vector<PrimitiveClassRecord> &records, int p) {
  return verify_difference_every_cutoff(records, p, derived_difference_coefficients(p));
}

// ---------------------------------------------------------------------------
// Density report

struct DensityReport {
  int p = 0;
  double T = 0;
  std::uint64_t seed = 0;
  LengthModel model;
  std::size_t record_count = 0;
  Integer d_l = 0;
  double li_value = 0; // Li(e^{2 rho T})
  double ratio = 0;
  double bound = 0; // 4/(p+1)
  double slack = 1.25;
  bool pass = false;
  // exact identities on the synthetic data
  bool diff_identity = false;      // closed form = brute force
  bool printed_diff_identity = false;
  bool piqr_identity = false;
  bool triangle = false;           // |sum diff| <= D_L <= type-wise bound
  bool same_length_sets = false;
  Rational closed_form_diff;
  Rational printed_closed_form_diff;
  Integer brute_diff = 0;
  Integer count_gamma1 = 0; // sum_{l<=T} m_1(l)
};

inline DensityReport density_report(const SyntheticSpectrum &spec, double slack = 1.25) {
  const int p = spec.p;
  DensityReport rep;
  rep.p = p;
  rep.T = spec.T;
  rep.seed = spec.seed;
  rep.model = spec.model;
  rep.slack = slack;
  rep.record_count = spec.records.size();
  const std::int64_t T = spec.ticks_of(spec.T);
  auto t1 = multiplicities(spec.records, Subgroup::B1, p);
  auto t2 = multiplicities(spec.records, Subgroup::B2, p);
  rep.d_l = d_length(t1, t2, T);
  rep.li_value = expected_count(spec.model.rho, spec.T);
  rep.ratio = rep.li_value > 0 ? rep.d_l.convert_to<double>() / rep.li_value : 0.0;
  rep.bound = 4.0 / (p + 1);
  rep.pass = rep.ratio <= rep.bound * slack;
  auto closed = diff_closed_form(spec.records, p, T);
  rep.brute_diff = brute_force_difference(t1, t2, T);
  rep.closed_form_diff = closed.value;
  rep.printed_closed_form_diff = closed.printed_value;
  rep.diff_identity = closed.value == Rational(rep.brute_diff);
  rep.printed_diff_identity = closed.printed_value == Rational(rep.brute_diff);
  rep.piqr_identity = verify_piqr(closed, p, rep.brute_diff);
  Rational type_bound = absolute_bound(derived_difference_coefficients(p), closed.pi);
  rep.triangle = abs(rep.brute_diff) <= rep.d_l && Rational(rep.d_l) <= type_bound;
  rep.same_length_sets = same_length_sets(t1, t2);
  rep.count_gamma1 = t1.total_up_to(T);
  return rep;
}

inline DensityReport density_report(int p, double T, std::uint64_t seed,
                                    const LengthModel &model = {}, double slack = 1.25,
                                    double record_cap = kDefaultRecordCap) {
  return density_report(generate(p, T, seed, model, record_cap), slack);
}

} // namespace rankone

#endif // RANKONE_LENGTHSIM_HPP

#ifndef RANKONE_EXACTPOLY_HPP
#define RANKONE_EXACTPOLY_HPP

// Exact multivariate Laurent polynomials with arbitrary precision integer
// coefficients, and a formal character ring keyed by opaque symbols.
//
// Half-integer exponents are never stored. Callers use the doubling
// convention: a variable y stands for exp(i*theta/2) and t for exp(l/2), so
// every exponent that appears is an integer.

#include <algorithm>
#include <array>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "rankone/errors.hpp"

namespace rankone {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline constexpr std::size_t kMaxVariables = 8;
inline constexpr int kMaxExponent = 30000;

using Exponents = std::array<std::int16_t, kMaxVariables>;

/// Natural ordering of variable names: alphabetic prefix, then numeric
/// suffix compared as a number, so y2 < y10.
inline bool variable_less(const std::string &a, const std::string &b) {
  auto split = [](const std::string &s) {
    std::size_t pos = s.size();
    while (pos > 0 && std::isdigit(static_cast<unsigned char>(s[pos - 1])))
      --pos;
    std::string head = s.substr(0, pos);
    std::string tail = s.substr(pos);
    return std::make_pair(head, tail);
  };
  auto [ha, ta] = split(a);
  auto [hb, tb] = split(b);
  if (ha != hb)
    return ha < hb;
  if (ta.size() != tb.size())
    return ta.size() < tb.size();
  return ta < tb;
}

/// A single Laurent monomial given by variable name -> exponent.
using MonomialSpec = std::map<std::string, int>;

class LaurentPoly {
public:
  using TermMap = std::map<Exponents, Integer>;

  LaurentPoly() = default;

  LaurentPoly(long long c) { // NOLINT(google-explicit-constructor)
    if (c != 0)
      terms_.emplace(Exponents{}, Integer(c));
  }

  explicit LaurentPoly(const Integer &c) {
    if (c != 0)
      terms_.emplace(Exponents{}, c);
  }

  static LaurentPoly variable(const std::string &name, int power = 1) {
    return monomial(Integer(1), {{name, power}});
  }

  static LaurentPoly monomial(const Integer &coeff, const MonomialSpec &powers) {
    LaurentPoly out;
    if (coeff == 0)
      return out;
    for (const auto &[name, e] : powers)
      if (e != 0)
        out.vars_.push_back(name);
    std::sort(out.vars_.begin(), out.vars_.end(), variable_less);
    if (out.vars_.size() > kMaxVariables)
      throw DomainError("LaurentPoly: too many variables");
    Exponents ex{};
    for (std::size_t i = 0; i < out.vars_.size(); ++i)
      ex[i] = checked_exponent(powers.at(out.vars_[i]));
    out.terms_.emplace(ex, coeff);
    return out;
  }

  const std::vector<std::string> &variables() const { return vars_; }
  const TermMap &terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  bool is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && vars_.empty());
  }

  Integer constant_term() const {
    auto it = terms_.find(Exponents{});
    return it == terms_.end() ? Integer(0) : it->second;
  }

  /// Sum of all coefficients, i.e. the value at every variable equal to 1.
  Integer coefficient_sum() const {
    Integer s = 0;
    for (const auto &[e, c] : terms_)
      s += c;
    return s;
  }

  Integer coefficient(const MonomialSpec &mono) const {
    Exponents ex{};
    for (const auto &[name, e] : mono) {
      if (e == 0)
        continue;
      auto pos = index_of(name);
      if (pos < 0)
        return 0;
      ex[static_cast<std::size_t>(pos)] = checked_exponent(e);
    }
    auto it = terms_.find(ex);
    return it == terms_.end() ? Integer(0) : it->second;
  }

  /// Exponent of `name` in each term, as a (min, max) pair; (0, 0) when the
  /// variable does not occur.
  std::pair<int, int> degree_range(const std::string &name) const {
    auto pos = index_of(name);
    if (pos < 0 || terms_.empty())
      return {0, 0};
    int lo = kMaxExponent, hi = -kMaxExponent;
    for (const auto &[e, c] : terms_) {
      lo = std::min<int>(lo, e[static_cast<std::size_t>(pos)]);
      hi = std::max<int>(hi, e[static_cast<std::size_t>(pos)]);
    }
    return {lo, hi};
  }

  /// Coefficient of name^k, as a polynomial in the remaining variables.
  LaurentPoly coefficient_of(const std::string &name, int k) const {
    auto pos = index_of(name);
    if (pos < 0)
      return k == 0 ? *this : LaurentPoly{};
    LaurentPoly out;
    out.vars_ = vars_;
    for (const auto &[e, c] : terms_) {
      if (e[static_cast<std::size_t>(pos)] != k)
        continue;
      Exponents f = e;
      f[static_cast<std::size_t>(pos)] = 0;
      out.terms_.emplace(f, c);
    }
    out.normalize();
    return out;
  }

  /// Simultaneous substitution of variables by Laurent monomials. Variables
  /// not named in `subs` are kept. An empty monomial substitutes 1.
  LaurentPoly substitute(const std::map<std::string, MonomialSpec> &subs) const {
    std::vector<std::string> universe;
    for (std::size_t i = 0; i < vars_.size(); ++i)
      if (!subs.count(vars_[i]))
        universe.push_back(vars_[i]);
    for (const auto &[v, mono] : subs)
      for (const auto &[name, e] : mono)
        if (e != 0)
          universe.push_back(name);
    std::sort(universe.begin(), universe.end(), variable_less);
    universe.erase(std::unique(universe.begin(), universe.end()),
                   universe.end());
    if (universe.size() > kMaxVariables)
      throw DomainError("LaurentPoly::substitute: too many variables");
    auto where = [&](const std::string &name) {
      return static_cast<std::size_t>(
          std::find(universe.begin(), universe.end(), name) - universe.begin());
    };
    // Column i of the substitution matrix: the image of variable i.
    std::vector<std::vector<std::pair<std::size_t, int>>> image(vars_.size());
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      auto it = subs.find(vars_[i]);
      if (it == subs.end()) {
        image[i].push_back({where(vars_[i]), 1});
      } else {
        for (const auto &[name, e] : it->second)
          if (e != 0)
            image[i].push_back({where(name), e});
      }
    }
    LaurentPoly out;
    out.vars_ = universe;
    for (const auto &[e, c] : terms_) {
      std::array<int, kMaxVariables> acc{};
      for (std::size_t i = 0; i < vars_.size(); ++i)
        for (const auto &[j, w] : image[i])
          acc[j] += w * e[i];
      Exponents f{};
      for (std::size_t j = 0; j < universe.size(); ++j)
        f[j] = checked_exponent(acc[j]);
      add_term(out.terms_, f, c);
    }
    out.normalize();
    return out;
  }

  /// Replace `name` by `name^factor` (e.g. l -> 2l becomes t -> t^2).
  LaurentPoly scale_variable(const std::string &name, int factor) const {
    return substitute({{name, {{name, factor}}}});
  }

  /// Set each listed variable to 1.
  LaurentPoly evaluate_at_one(const std::vector<std::string> &names) const {
    std::map<std::string, MonomialSpec> subs;
    for (const auto &n : names)
      subs[n] = {};
    return substitute(subs);
  }

  LaurentPoly pow(unsigned k) const {
    LaurentPoly result(1);
    LaurentPoly base = *this;
    while (k) {
      if (k & 1U)
        result = result * base;
      k >>= 1U;
      if (k)
        base = base * base;
    }
    return result;
  }

  friend LaurentPoly operator+(const LaurentPoly &a, const LaurentPoly &b) {
    auto universe = merge_variables(a.vars_, b.vars_);
    LaurentPoly out;
    out.vars_ = universe;
    out.terms_ = a.remapped(universe);
    for (auto &[e, c] : b.remapped(universe))
      add_term(out.terms_, e, c);
    out.normalize();
    return out;
  }

  friend LaurentPoly operator-(const LaurentPoly &a) {
    LaurentPoly out = a;
    for (auto &[e, c] : out.terms_)
      c = -c;
    return out;
  }

  friend LaurentPoly operator-(const LaurentPoly &a, const LaurentPoly &b) {
    return a + (-b);
  }

  friend LaurentPoly operator*(const LaurentPoly &a, const LaurentPoly &b) {
    if (a.is_zero() || b.is_zero())
      return {};
    auto universe = merge_variables(a.vars_, b.vars_);
    auto ta = a.remapped(universe);
    auto tb = b.remapped(universe);
    LaurentPoly out;
    out.vars_ = universe;
    for (const auto &[ea, ca] : ta)
      for (const auto &[eb, cb] : tb)
        add_term(out.terms_, add_exponents(ea, eb, universe.size()), ca * cb);
    out.normalize();
    return out;
  }

  LaurentPoly &operator+=(const LaurentPoly &b) { return *this = *this + b; }
  LaurentPoly &operator-=(const LaurentPoly &b) { return *this = *this - b; }
  LaurentPoly &operator*=(const LaurentPoly &b) { return *this = *this * b; }

  friend bool operator==(const LaurentPoly &a, const LaurentPoly &b) {
    return a.vars_ == b.vars_ && a.terms_ == b.terms_;
  }
  friend bool operator!=(const LaurentPoly &a, const LaurentPoly &b) {
    return !(a == b);
  }

  /// Canonical text: terms in descending lexicographic order of exponent
  /// vectors (variables in natural order), explicit signs, `*` between
  /// factors and `^` for any exponent other than 1.
  std::string to_string() const {
    if (terms_.empty())
      return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      const auto &[e, c] = *it;
      Integer mag = c < 0 ? Integer(-c) : c;
      if (first) {
        if (c < 0)
          os << "-";
      } else {
        os << (c < 0 ? " - " : " + ");
      }
      first = false;
      std::string mono;
      for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (e[i] == 0)
          continue;
        if (!mono.empty())
          mono += "*";
        mono += vars_[i];
        if (e[i] != 1)
          mono += "^" + std::to_string(e[i]);
      }
      if (mono.empty()) {
        os << mag;
      } else {
        if (mag != 1)
          os << mag << "*";
        os << mono;
      }
    }
    return os.str();
  }

  // Exposed for the exact divider.
  friend LaurentPoly poly_exact_div(const LaurentPoly &num,
                                    const LaurentPoly &den);

private:
  std::vector<std::string> vars_;
  TermMap terms_;

  static std::int16_t checked_exponent(long long e) {
    if (e > kMaxExponent || e < -kMaxExponent)
      throw DomainError("LaurentPoly: exponent out of range");
    return static_cast<std::int16_t>(e);
  }

  static Exponents add_exponents(const Exponents &a, const Exponents &b,
                                 std::size_t n) {
    Exponents r{};
    for (std::size_t i = 0; i < n; ++i)
      r[i] = checked_exponent(static_cast<long long>(a[i]) + b[i]);
    return r;
  }

  static Exponents sub_exponents(const Exponents &a, const Exponents &b,
                                 std::size_t n) {
    Exponents r{};
    for (std::size_t i = 0; i < n; ++i)
      r[i] = checked_exponent(static_cast<long long>(a[i]) - b[i]);
    return r;
  }

  static void add_term(TermMap &m, const Exponents &e, const Integer &c) {
    if (c == 0)
      return;
    auto [it, inserted] = m.try_emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0)
        m.erase(it);
    }
  }

  static std::vector<std::string>
  merge_variables(const std::vector<std::string> &a,
                  const std::vector<std::string> &b) {
    if (a == b)
      return a;
    std::vector<std::string> u;
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(u),
               variable_less);
    u.erase(std::unique(u.begin(), u.end()), u.end());
    if (u.size() > kMaxVariables)
      throw DomainError("LaurentPoly: too many variables");
    return u;
  }

  int index_of(const std::string &name) const {
    auto it = std::find(vars_.begin(), vars_.end(), name);
    return it == vars_.end() ? -1 : static_cast<int>(it - vars_.begin());
  }

  TermMap remapped(const std::vector<std::string> &universe) const {
    if (universe == vars_)
      return terms_;
    std::vector<std::size_t> pos(vars_.size());
    for (std::size_t i = 0; i < vars_.size(); ++i)
      pos[i] = static_cast<std::size_t>(
          std::find(universe.begin(), universe.end(), vars_[i]) -
          universe.begin());
    TermMap out;
    for (const auto &[e, c] : terms_) {
      Exponents f{};
      for (std::size_t i = 0; i < vars_.size(); ++i)
        f[pos[i]] = e[i];
      out.emplace(f, c);
    }
    return out;
  }

  // Drops variables that no longer occur so equal polynomials compare equal.
  void normalize() {
    if (vars_.empty())
      return;
    std::vector<bool> used(vars_.size(), false);
    for (const auto &[e, c] : terms_)
      for (std::size_t i = 0; i < vars_.size(); ++i)
        if (e[i] != 0)
          used[i] = true;
    if (std::all_of(used.begin(), used.end(), [](bool u) { return u; }))
      return;
    std::vector<std::string> kept;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < vars_.size(); ++i)
      if (used[i]) {
        kept.push_back(vars_[i]);
        idx.push_back(i);
      }
    TermMap out;
    for (const auto &[e, c] : terms_) {
      Exponents f{};
      for (std::size_t j = 0; j < idx.size(); ++j)
        f[j] = e[idx[j]];
      out.emplace(f, c);
    }
    vars_ = std::move(kept);
    terms_ = std::move(out);
  }
};

inline LaurentPoly poly_add(const LaurentPoly &a, const LaurentPoly &b) {
  return a + b;
}
inline LaurentPoly poly_mul(const LaurentPoly &a, const LaurentPoly &b) {
  return a * b;
}
inline LaurentPoly poly_neg(const LaurentPoly &a) { return -a; }

/// Exact quotient num/den in the Laurent ring.
///
/// Leading-term elimination under the lexicographic order. Every exponent of
/// a true quotient lies in the box [min(num)-min(den), max(num)-max(den)]
/// per variable, so a candidate term outside the box, or a non-integral
/// coefficient ratio, proves that den does not divide num.
inline LaurentPoly poly_exact_div(const LaurentPoly &num,
                                  const LaurentPoly &den) {
  if (den.is_zero())
    throw NotDivisible("poly_exact_div: division by zero polynomial");
  if (num.is_zero())
    return {};
  auto universe = LaurentPoly::merge_variables(num.vars_, den.vars_);
  const std::size_t nv = universe.size();
  auto r = num.remapped(universe);
  auto d = den.remapped(universe);

  std::array<int, kMaxVariables> lo{}, hi{};
  for (std::size_t i = 0; i < nv; ++i) {
    int nlo = kMaxExponent, nhi = -kMaxExponent;
    int dlo = kMaxExponent, dhi = -kMaxExponent;
    for (const auto &[e, c] : r) {
      nlo = std::min<int>(nlo, e[i]);
      nhi = std::max<int>(nhi, e[i]);
    }
    for (const auto &[e, c] : d) {
      dlo = std::min<int>(dlo, e[i]);
      dhi = std::max<int>(dhi, e[i]);
    }
    lo[i] = nlo - dlo;
    hi[i] = nhi - dhi;
    if (lo[i] > hi[i])
      throw NotDivisible("poly_exact_div: degree bounds are inconsistent");
  }

  const auto &[dlead, dcoeff] = *d.rbegin();
  LaurentPoly q;
  q.vars_ = universe;
  while (!r.empty()) {
    const auto [rlead, rcoeff] = *r.rbegin();
    Exponents qe = LaurentPoly::sub_exponents(rlead, dlead, nv);
    for (std::size_t i = 0; i < nv; ++i)
      if (qe[i] < lo[i] || qe[i] > hi[i])
        throw NotDivisible("poly_exact_div: remainder is nonzero");
    Integer rem;
    Integer qc;
    boost::multiprecision::divide_qr(rcoeff, dcoeff, qc, rem);
    if (rem != 0)
      throw NotDivisible("poly_exact_div: coefficient not divisible");
    q.terms_.emplace(qe, qc);
    for (const auto &[de, dc] : d)
      LaurentPoly::add_term(r, LaurentPoly::add_exponents(qe, de, nv), -qc * dc);
  }
  q.normalize();
  return q;
}

// ---------------------------------------------------------------------------
// Formal character sums

/// Finite sum of opaque character symbols with Laurent coefficients. A
/// symbol like "sigma_2(x)tau_1" is atomic: nothing here decomposes it.
class FormalCharSum {
public:
  using TermMap = std::map<std::string, LaurentPoly>;

  FormalCharSum() = default;

  static FormalCharSum symbol(const std::string &name,
                              const LaurentPoly &coeff = LaurentPoly(1)) {
    FormalCharSum out;
    out.add(name, coeff);
    return out;
  }

  const TermMap &terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  LaurentPoly coefficient(const std::string &name) const {
    auto it = terms_.find(name);
    return it == terms_.end() ? LaurentPoly{} : it->second;
  }

  void add(const std::string &name, const LaurentPoly &coeff) {
    if (coeff.is_zero())
      return;
    auto [it, inserted] = terms_.try_emplace(name, coeff);
    if (!inserted) {
      it->second += coeff;
      if (it->second.is_zero())
        terms_.erase(it);
    }
  }

  friend FormalCharSum operator+(FormalCharSum a, const FormalCharSum &b) {
    for (const auto &[s, c] : b.terms_)
      a.add(s, c);
    return a;
  }

  friend FormalCharSum operator-(const FormalCharSum &a) {
    FormalCharSum out;
    for (const auto &[s, c] : a.terms_)
      out.terms_.emplace(s, -c);
    return out;
  }

  friend FormalCharSum operator-(const FormalCharSum &a,
                                 const FormalCharSum &b) {
    return a + (-b);
  }

  friend FormalCharSum operator*(const LaurentPoly &k, const FormalCharSum &a) {
    FormalCharSum out;
    for (const auto &[s, c] : a.terms_)
      out.add(s, k * c);
    return out;
  }

  /// Product of two sums where the symbol of each product term is given by
  /// `combine(lhs_symbol, rhs_symbol)`.
  template <typename Combine>
  FormalCharSum tensor(const FormalCharSum &other, Combine combine) const {
    FormalCharSum out;
    for (const auto &[sa, ca] : terms_)
      for (const auto &[sb, cb] : other.terms_)
        out.add(combine(sa, sb), ca * cb);
    return out;
  }

  /// Coefficient of var^k in every symbol's coefficient.
  FormalCharSum coefficient_of(const std::string &var, int k) const {
    FormalCharSum out;
    for (const auto &[s, c] : terms_)
      out.add(s, c.coefficient_of(var, k));
    return out;
  }

  friend bool operator==(const FormalCharSum &a, const FormalCharSum &b) {
    return a.terms_ == b.terms_;
  }
  friend bool operator!=(const FormalCharSum &a, const FormalCharSum &b) {
    return !(a == b);
  }

  /// Symbols in ascending natural order; constant coefficients are printed
  /// inline, others in parentheses.
  std::string to_string() const {
    if (terms_.empty())
      return "0";
    std::vector<std::string> names;
    for (const auto &[s, c] : terms_)
      names.push_back(s);
    std::sort(names.begin(), names.end(), variable_less);
    std::ostringstream os;
    bool first = true;
    for (const auto &s : names) {
      const LaurentPoly &c = terms_.at(s);
      if (c.is_constant()) {
        Integer v = c.constant_term();
        Integer mag = v < 0 ? Integer(-v) : v;
        if (first)
          os << (v < 0 ? "-" : "");
        else
          os << (v < 0 ? " - " : " + ");
        if (mag != 1)
          os << mag << "*";
        os << s;
      } else {
        os << (first ? "" : " + ") << "(" << c.to_string() << ")*" << s;
      }
      first = false;
    }
    return os.str();
  }

private:
  TermMap terms_;
};

struct FormalPart {
  int sign;
  LaurentPoly coeff;
  std::string symbol;
};

inline FormalCharSum formal_combine(const std::vector<FormalPart> &parts) {
  FormalCharSum out;
  for (const auto &p : parts)
    out.add(p.symbol, p.sign < 0 ? -p.coeff : p.coeff);
  return out;
}

} // namespace rankone

#endif // RANKONE_EXACTPOLY_HPP

#ifndef RANKONE_WEYLCHAR_HPP
#define RANKONE_WEYLCHAR_HPP

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "rankone/check.hpp"
#include "rankone/errors.hpp"
#include "rankone/exactpoly.hpp"

namespace rankone {

enum class RootSystem { B, D };

inline const char *root_system_name(RootSystem t) {
  return t == RootSystem::B ? "B" : "D";
}

/// Name of the torus variable for coordinate j (1-based): y_j = e^{i theta_j/2}.
inline std::string torus_variable(int j) { return "y" + std::to_string(j); }

/// Highest weight sum a_j e_j, stored with doubled coordinates 2a_j.
class Weight {
public:
  Weight(RootSystem type, const std::vector<Rational> &coords)
      : type_(type), twice_(coords.size()) {
    for (std::size_t j = 0; j < coords.size(); ++j) {
      Rational d = coords[j] * 2;
      if (denominator(d) != 1)
        throw DomainError("Weight: coordinate is not a half-integer");
      twice_[j] = static_cast<int>(numerator(d));
    }
    validate();
  }

  static Weight from_doubled(RootSystem type, std::vector<int> twice) {
    Weight w;
    w.type_ = type;
    w.twice_ = std::move(twice);
    w.validate();
    return w;
  }

  static Weight zero(RootSystem type, int m) {
    return from_doubled(type, std::vector<int>(static_cast<std::size_t>(m), 0));
  }

  /// e_1 + ... + e_q; for type D with q = m, `last_sign` picks sigma_m^+ or ^-.
  static Weight fundamental(RootSystem type, int m, int q, int last_sign = 1) {
    if (q < 0 || q > m)
      throw DomainError("Weight::fundamental: need 0 <= q <= m");
    std::vector<int> tw(static_cast<std::size_t>(m), 0);
    for (int j = 0; j < q; ++j)
      tw[static_cast<std::size_t>(j)] = 2;
    if (q == m && q > 0 && last_sign < 0)
      tw[static_cast<std::size_t>(m - 1)] = -2;
    return from_doubled(type, std::move(tw));
  }

  RootSystem type() const { return type_; }
  int rank() const { return static_cast<int>(twice_.size()); }
  const std::vector<int> &doubled() const { return twice_; }

  std::vector<Rational> coords() const {
    std::vector<Rational> out;
    for (int v : twice_)
      out.emplace_back(v, 2);
    return out;
  }

  /// True iff the representation factors through SO(n).
  bool integral() const {
    return std::all_of(twice_.begin(), twice_.end(),
                       [](int v) { return v % 2 == 0; });
  }

  std::string to_string() const {
    std::string s = "(";
    for (std::size_t j = 0; j < twice_.size(); ++j) {
      if (j)
        s += ",";
      int v = twice_[j];
      s += (v % 2 == 0) ? std::to_string(v / 2) : std::to_string(v) + "/2";
    }
    return s + ")";
  }

  friend bool operator==(const Weight &a, const Weight &b) {
    return a.type_ == b.type_ && a.twice_ == b.twice_;
  }
  friend bool operator<(const Weight &a, const Weight &b) {
    return std::tie(a.type_, a.twice_) < std::tie(b.type_, b.twice_);
  }

private:
  Weight() = default;

  void validate() const {
    if (twice_.empty())
      throw DomainError("Weight: rank must be at least 1");
    const int parity = ((twice_[0] % 2) + 2) % 2;
    for (int v : twice_)
      if (((v % 2) + 2) % 2 != parity)
        throw DomainError("Weight: coordinates must differ by integers");
    const std::size_t m = twice_.size();
    for (std::size_t j = 0; j + 1 < m; ++j) {
      int next = twice_[j + 1];
      if (type_ == RootSystem::D && j + 2 == m)
        next = std::abs(next);
      if (twice_[j] < next)
        throw DomainError("Weight: not dominant");
    }
    if (type_ == RootSystem::B && twice_[m - 1] < 0)
      throw DomainError("Weight: not dominant");
  }

  RootSystem type_ = RootSystem::D;
  std::vector<int> twice_;
};

/// Signed permutation w(e_j) = signs[j] e_{perm[j]} (0-based indices).
struct WeylGroupElement {
  std::vector<int> perm;
  std::vector<int> signs;
  int sign = 1; // determinant of the signed permutation matrix

  std::vector<int> apply(const std::vector<int> &v) const {
    std::vector<int> out(v.size(), 0);
    for (std::size_t j = 0; j < v.size(); ++j)
      out[static_cast<std::size_t>(perm[j])] = signs[j] * v[j];
    return out;
  }

  /// Substitution y_j -> y_{perm[j]}^{signs[j]}, the action on characters.
  std::map<std::string, MonomialSpec> substitution() const {
    std::map<std::string, MonomialSpec> s;
    for (std::size_t j = 0; j < perm.size(); ++j)
      s[torus_variable(static_cast<int>(j) + 1)] = {
          {torus_variable(perm[j] + 1), signs[j]}};
    return s;
  }
};

inline int permutation_parity(const std::vector<int> &perm) {
  int sign = 1;
  std::vector<bool> seen(perm.size(), false);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (seen[i])
      continue;
    std::size_t len = 0;
    for (std::size_t j = i; !seen[j]; j = static_cast<std::size_t>(perm[j])) {
      seen[j] = true;
      ++len;
    }
    if (len % 2 == 0)
      sign = -sign;
  }
  return sign;
}

inline std::vector<WeylGroupElement> weyl_group(RootSystem type, int m) {
  if (m < 1)
    throw DomainError("weyl_group: m must be at least 1");
  std::vector<WeylGroupElement> out;
  std::vector<int> perm(static_cast<std::size_t>(m));
  std::iota(perm.begin(), perm.end(), 0);
  do {
    const int psign = permutation_parity(perm);
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
      std::vector<int> signs(static_cast<std::size_t>(m), 1);
      int prod = 1;
      for (int j = 0; j < m; ++j)
        if (mask & (1u << j)) {
          signs[static_cast<std::size_t>(j)] = -1;
          prod = -prod;
        }
      if (type == RootSystem::D && prod < 0)
        continue;
      out.push_back({perm, std::move(signs), psign * prod});
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

/// Doubled half-sum of positive roots: 2(m-j) for D_m, 2(m-j)+1 for B_m.
inline std::vector<int> doubled_rho(RootSystem type, int m) {
  std::vector<int> d(static_cast<std::size_t>(m));
  for (int j = 1; j <= m; ++j)
    d[static_cast<std::size_t>(j - 1)] = 2 * (m - j) + (type == RootSystem::B ? 1 : 0);
  return d;
}

/// Positive roots as doubled exponent vectors.
inline std::vector<std::vector<int>> positive_roots(RootSystem type, int m) {
  std::vector<std::vector<int>> roots;
  auto zero = std::vector<int>(static_cast<std::size_t>(m), 0);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      auto a = zero, b = zero;
      a[static_cast<std::size_t>(i)] = 2;
      a[static_cast<std::size_t>(j)] = -2;
      b[static_cast<std::size_t>(i)] = 2;
      b[static_cast<std::size_t>(j)] = 2;
      roots.push_back(a);
      roots.push_back(b);
    }
  if (type == RootSystem::B)
    for (int i = 0; i < m; ++i) {
      auto a = zero;
      a[static_cast<std::size_t>(i)] = 2;
      roots.push_back(a);
    }
  return roots;
}

/// xi_mu for a doubled weight mu: prod_j y_j^{2 mu_j}.
inline LaurentPoly xi(const std::vector<int> &doubled, const Integer &coeff = 1) {
  MonomialSpec spec;
  for (std::size_t j = 0; j < doubled.size(); ++j)
    spec[torus_variable(static_cast<int>(j) + 1)] = doubled[j];
  return LaurentPoly::monomial(coeff, spec);
}

/// The alternating sum over W of sgn(w) xi_{w(mu)}.
inline LaurentPoly alternant(RootSystem type, const std::vector<int> &mu) {
  LaurentPoly out;
  for (const auto &w : weyl_group(type, static_cast<int>(mu.size())))
    out += xi(w.apply(mu), w.sign);
  return out;
}

/// Weyl denominator in product form, xi_delta prod (1 - xi_{-alpha}).
inline LaurentPoly weyl_denominator(RootSystem type, int m) {
  LaurentPoly d = xi(doubled_rho(type, m));
  for (const auto &a : positive_roots(type, m)) {
    std::vector<int> neg(a.size());
    std::transform(a.begin(), a.end(), neg.begin(), [](int v) { return -v; });
    d *= LaurentPoly(1) - xi(neg);
  }
  return d;
}

namespace detail {

/// Dominant representative of a doubled weight under W.
inline std::vector<int> dominant_image(RootSystem type, std::vector<int> v) {
  if (type == RootSystem::D && v.size() == 1)
    return v;
  int negatives = 0;
  bool has_zero = false;
  for (int &x : v) {
    if (x < 0) {
      ++negatives;
      x = -x;
    }
    has_zero = has_zero || x == 0;
  }
  std::sort(v.begin(), v.end(), std::greater<>());
  if (type == RootSystem::D && !has_zero && negatives % 2 == 1)
    v.back() = -v.back();
  return v;
}

/// True iff lam - mu is a nonnegative integer combination of simple roots.
inline bool dominated_by(RootSystem type, const std::vector<int> &lam,
                         const std::vector<int> &mu) {
  const std::size_t m = lam.size();
  if (type == RootSystem::D && m == 1)
    return lam == mu;
  std::vector<long long> s(m);
  long long acc = 0;
  for (std::size_t j = 0; j < m; ++j) {
    long long v = lam[j] - mu[j];
    if (v % 2 != 0)
      return false;
    acc += v / 2;
    s[j] = acc;
  }
  if (type == RootSystem::B)
    return std::all_of(s.begin(), s.end(), [](long long c) { return c >= 0; });
  for (std::size_t k = 0; k + 2 < m; ++k)
    if (s[k] < 0)
      return false;
  const long long vm = (lam[m - 1] - mu[m - 1]) / 2;
  const long long two_cm = s[m - 1];       // 2 c_m
  const long long two_cm1 = s[m - 2] - vm; // 2 c_{m-1}
  return two_cm >= 0 && two_cm % 2 == 0 && two_cm1 >= 0 && two_cm1 % 2 == 0;
}

inline void dominant_below(RootSystem type, const std::vector<int> &lam,
                           std::vector<int> &cur, std::size_t j,
                           std::vector<std::vector<int>> &out) {
  const std::size_t m = lam.size();
  if (j == m) {
    if (dominated_by(type, lam, cur))
      out.push_back(cur);
    return;
  }
  const int parity = ((lam[0] % 2) + 2) % 2;
  const int hi = j == 0 ? lam[0] : cur[j - 1];
  const bool signed_last = type == RootSystem::D && j + 1 == m && m > 1;
  const int lo = signed_last ? -hi : 0;
  for (int v = hi; v >= lo; --v) {
    if (((v % 2) + 2) % 2 != parity)
      continue;
    cur[j] = v;
    dominant_below(type, lam, cur, j + 1, out);
  }
}

/// Weight multiplicities from chi * D = alternant, compared at the strictly
/// dominant exponents mu + delta.
inline LaurentPoly compute_weyl_character(const Weight &lam) {
  const int m = lam.rank();
  const RootSystem type = lam.type();
  const auto &top = lam.doubled();
  if (type == RootSystem::D && m == 1)
    return xi(top);
  std::vector<std::vector<int>> dominants;
  std::vector<int> cur(top.size());
  dominant_below(type, top, cur, 0, dominants);
  // Lexicographically decreasing order refines the dominance order.
  std::sort(dominants.begin(), dominants.end(), std::greater<>());
  const auto group = weyl_group(type, m);
  const auto rho = doubled_rho(type, m);
  std::vector<std::vector<int>> shifts; // delta - w(delta), w != 1
  std::vector<int> signs;
  for (const auto &w : group) {
    auto wr = w.apply(rho);
    std::vector<int> d(rho.size());
    bool zero = true;
    for (std::size_t j = 0; j < rho.size(); ++j) {
      d[j] = rho[j] - wr[j];
      zero = zero && d[j] == 0;
    }
    if (!zero) {
      shifts.push_back(std::move(d));
      signs.push_back(w.sign);
    }
  }
  std::map<std::vector<int>, Integer> mult;
  for (const auto &mu : dominants) {
    Integer acc = (mu == top) ? 1 : 0;
    std::vector<int> nu(mu.size());
    for (std::size_t i = 0; i < shifts.size(); ++i) {
      for (std::size_t j = 0; j < mu.size(); ++j)
        nu[j] = mu[j] + shifts[i][j];
      auto it = mult.find(dominant_image(type, nu));
      if (it != mult.end())
        acc -= signs[i] * it->second;
    }
    if (acc < 0)
      throw NotDivisible("weyl_character: negative weight multiplicity");
    mult.emplace(mu, acc);
  }
  LaurentPoly chi;
  for (const auto &[mu, c] : mult) {
    if (c == 0)
      continue;
    std::set<std::vector<int>> orbit;
    for (const auto &w : group)
      orbit.insert(w.apply(mu));
    for (const auto &v : orbit)
      chi += xi(v, c);
  }
  return chi;
}

} // namespace detail

/// chi_lambda as a Laurent polynomial in y_1..y_m. Results are memoized.
inline LaurentPoly weyl_character(RootSystem type, int m, const Weight &lam) {
  if (lam.type() != type || lam.rank() != m)
    throw DomainError("weyl_character: weight does not match group");
  static std::mutex mu;
  static std::map<Weight, LaurentPoly> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(lam);
    if (it != cache.end())
      return it->second;
  }
  LaurentPoly chi = detail::compute_weyl_character(lam);
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(lam, chi);
  return chi;
}

/// chi_lambda as the exact quotient of the alternant by the factored
/// denominator. Slow beyond rank 4; kept as an independent route.
inline LaurentPoly weyl_character_by_division(RootSystem type, int m,
                                              const Weight &lam) {
  if (lam.type() != type || lam.rank() != m)
    throw DomainError("weyl_character: weight does not match group");
  auto rho = doubled_rho(type, m);
  std::vector<int> top(rho.size()), neg_rho(rho.size());
  for (std::size_t j = 0; j < rho.size(); ++j) {
    top[j] = lam.doubled()[j] + rho[j];
    neg_rho[j] = -rho[j];
  }
  LaurentPoly q = alternant(type, top) * xi(neg_rho);
  for (const auto &a : positive_roots(type, m)) {
    std::vector<int> neg(a.size());
    std::transform(a.begin(), a.end(), neg.begin(), [](int v) { return -v; });
    q = poly_exact_div(q, LaurentPoly(1) - xi(neg));
  }
  return q;
}

/// chi_{sigma_q} of SO(2m); for q = m this is sigma_m^+ plus sigma_m^-.
inline LaurentPoly sigma_character(int m, int q) {
  if (q < 0 || q > m)
    throw DomainError("sigma_character: need 0 <= q <= m");
  if (q < m || m == 0)
    return weyl_character(RootSystem::D, m, Weight::fundamental(RootSystem::D, m, q));
  return weyl_character(RootSystem::D, m, Weight::fundamental(RootSystem::D, m, m, 1)) +
         weyl_character(RootSystem::D, m, Weight::fundamental(RootSystem::D, m, m, -1));
}

/// chi_{tau_q} of SO(2m+1) on its maximal torus.
inline LaurentPoly tau_character(int m, int q) {
  if (q < 0 || q > m)
    throw DomainError("tau_character: need 0 <= q <= m");
  return weyl_character(RootSystem::B, m, Weight::fundamental(RootSystem::B, m, q));
}

/// Doubled exponent vector of a term, with respect to y_1..y_m.
inline std::vector<int> torus_exponents(const LaurentPoly &p, const Exponents &e,
                                        int m) {
  std::vector<int> out(static_cast<std::size_t>(m), 0);
  const auto &vars = p.variables();
  for (std::size_t i = 0; i < vars.size(); ++i) {
    int j = 0;
    for (int k = 1; k <= m; ++k)
      if (vars[i] == torus_variable(k))
        j = k;
    if (j == 0)
      throw DomainError("torus_exponents: unexpected variable " + vars[i]);
    out[static_cast<std::size_t>(j - 1)] = e[i];
  }
  return out;
}

/// Writes a W-invariant polynomial as an integer combination of irreducible
/// characters, highest weights in descending order.
inline std::vector<std::pair<Weight, Integer>>
decompose_characters(const LaurentPoly &poly, RootSystem type, int m) {
  std::vector<std::pair<Weight, Integer>> out;
  LaurentPoly rest = poly;
  while (!rest.is_zero()) {
    std::vector<int> lead;
    Integer coeff;
    bool first = true;
    for (const auto &[e, c] : rest.terms()) {
      auto v = torus_exponents(rest, e, m);
      if (first || v > lead) {
        lead = v;
        coeff = c;
        first = false;
      }
    }
    Weight w = Weight::from_doubled(type, lead); // throws if not dominant
    out.emplace_back(w, coeff);
    rest -= LaurentPoly(coeff) * weyl_character(type, m, w);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Gap-constrained tuple counts

/// Number of k-tuples in {1..n-1} with consecutive gaps of at least 2, by
/// direct enumeration.
inline Integer n0_comb(int n, int k) {
  if (k < 0)
    throw DomainError("n0_comb: k must be nonnegative");
  // count(start, left): tuples with all entries >= start.
  std::map<std::pair<int, int>, Integer> memo;
  auto count = [&](auto &&self, int start, int left) -> Integer {
    if (left == 0)
      return 1;
    auto key = std::make_pair(start, left);
    auto it = memo.find(key);
    if (it != memo.end())
      return it->second;
    Integer total = 0;
    for (int j = start; j <= n - 1; ++j)
      total += self(self, j + 2, left - 1);
    memo.emplace(key, total);
    return total;
  };
  return count(count, 1, k);
}

inline Integer n_comb(int n, int k) {
  if (k < 0)
    throw DomainError("n_comb: k must be nonnegative");
  if (2 * k > n)
    throw DomainError("n_comb: need 2k <= n");
  if (k == 0)
    return 1;
  return n0_comb(n, k) + n0_comb(n - 2, k - 1);
}

/// Source of N(n,k) values for the identity checks. Individual entries can be
/// overridden to exercise failure reporting.
class NTable {
public:
  Integer operator()(int n, int k) const {
    auto it = overrides_.find({n, k});
    return it != overrides_.end() ? it->second : n_comb(n, k);
  }
  void set(int n, int k, const Integer &v) { overrides_[{n, k}] = v; }
  bool corrupted() const { return !overrides_.empty(); }

private:
  std::map<std::pair<int, int>, Integer> overrides_;
};

/// 2cosh(a l) in t = e^{l/2}.
inline LaurentPoly two_cosh(int a) {
  return LaurentPoly::variable("t", 2 * a) + LaurentPoly::variable("t", -2 * a);
}

inline CheckReport verify_n_recursion(int n_max, const NTable &table = {}) {
  if (n_max < 3)
    throw DomainError("verify_n_recursion: n_max must be at least 3");
  CheckReport rep("N recursion");
  for (int n = 3; n <= n_max; ++n)
    for (int k = 1; 2 * k <= n - 1; ++k) {
      Integer lhs = table(n, k);
      Integer rhs = table(n - 1, k) + table(n - 2, k - 1);
      rep.expect(lhs == rhs, "N(" + std::to_string(n) + "," + std::to_string(k) +
                                 ") != N(n-1,k) + N(n-2,k-1)");
    }
  for (int k = 1; 2 * k <= n_max; ++k)
    rep.expect(table(2 * k, k) == 2, "N(2k,k) != 2 at k=" + std::to_string(k));
  const LaurentPoly c1 = two_cosh(1);
  for (int k = 1; k <= n_max; ++k) {
    LaurentPoly sum;
    for (int j = 0; 2 * j <= k; ++j) {
      LaurentPoly term = LaurentPoly(table(k, j)) * c1.pow(static_cast<unsigned>(k - 2 * j));
      sum += (j % 2 == 0) ? term : -term;
    }
    rep.expect(sum == two_cosh(k), "2cosh identity fails at k=" + std::to_string(k));
  }
  return rep;
}

/// S_{m,k}: sum over j_1 < ... < j_k of prod 2cos(theta_{j_i}).
inline LaurentPoly s_poly(int m, int k) {
  if (k < 0 || k > m)
    throw DomainError("s_poly: need 0 <= k <= m");
  // Elementary symmetric polynomials by the usual recurrence.
  std::vector<LaurentPoly> e(static_cast<std::size_t>(k) + 1);
  e[0] = LaurentPoly(1);
  for (int j = 1; j <= m; ++j) {
    LaurentPoly c = LaurentPoly::variable(torus_variable(j), 2) +
                    LaurentPoly::variable(torus_variable(j), -2);
    for (int r = std::min(j, k); r >= 1; --r)
      e[static_cast<std::size_t>(r)] += c * e[static_cast<std::size_t>(r - 1)];
  }
  return e[static_cast<std::size_t>(k)];
}

inline bool verify_smk_decomposition(int m, int k, const NTable &table = {}) {
  if (k < 0 || k > m || m > 6)
    throw DomainError("verify_smk_decomposition: need 0 <= k <= m <= 6");
  if (m == 0)
    return true;
  LaurentPoly rhs;
  for (int j = 0; 2 * j <= k; ++j) {
    LaurentPoly term = LaurentPoly(table(m + 2 * j - k, j)) * sigma_character(m, k - 2 * j);
    rhs += (j % 2 == 0) ? term : -term;
  }
  return rhs == s_poly(m, k);
}

/// tau_k restricted to SO(2m) equals sigma_k + sigma_{k-1} (tau_0 = sigma_0).
inline bool branch_check_km(int m, int k) {
  if (k < 0 || k > m)
    throw DomainError("branch_check_km: need 0 <= k <= m");
  LaurentPoly expected = sigma_character(m, k);
  if (k >= 1)
    expected += sigma_character(m, k - 1);
  return tau_character(m, k) == expected;
}

} // namespace rankone

#endif // RANKONE_WEYLCHAR_HPP

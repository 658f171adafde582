#ifndef RANKONE_ARITHFIELDS_HPP
#define RANKONE_ARITHFIELDS_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rankone/covers.hpp"
#include "rankone/errors.hpp"
#include "rankone/exactpoly.hpp"

namespace rankone::arith {

using Perm = std::vector<std::uint32_t>;

constexpr std::size_t kDefaultOrderCap = 10'000;
constexpr std::size_t kTableLimit = 2048;

/// Characteristic vector of a subset of a finite group.
struct ElementSet {
  std::vector<char> member;
  std::size_t size() const {
    return static_cast<std::size_t>(std::count(member.begin(), member.end(), 1));
  }
  bool contains(std::size_t i) const { return member.at(i) != 0; }
  std::vector<std::uint32_t> elements() const {
    std::vector<std::uint32_t> out;
    for (std::size_t i = 0; i < member.size(); ++i)
      if (member[i])
        out.push_back(static_cast<std::uint32_t>(i));
    return out;
  }
  bool operator==(const ElementSet &) const = default;
  bool operator<(const ElementSet &o) const { return member < o.member; }
};

/// A finite group stored as permutations of {0..deg-1}, indexed, with a
/// multiplication table when small. mul(a, b) applies b first.
class FiniteGroup {
public:
  using Index = std::uint32_t;

  /// Closure of a set of permutations of a common degree.
  static FiniteGroup from_generators(const std::vector<Perm> &gens,
                                     std::size_t cap = kDefaultOrderCap) {
    if (gens.empty())
      throw DomainError("from_generators: no generators");
    const std::size_t deg = gens.front().size();
    for (const auto &g : gens) {
      if (g.size() != deg)
        throw DomainError("from_generators: generators of different degree");
      std::vector<char> seen(deg, 0);
      for (auto v : g) {
        if (v >= deg || seen[v])
          throw DomainError("from_generators: not a permutation");
        seen[v] = 1;
      }
    }
    Perm id(deg);
    std::iota(id.begin(), id.end(), 0u);
    FiniteGroup G;
    G.elems_.push_back(id);
    G.index_.emplace(id, 0);
    for (std::size_t head = 0; head < G.elems_.size(); ++head) {
      for (const auto &g : gens) {
        Perm x = compose(G.elems_[head], g);
        if (G.index_.count(x))
          continue;
        if (G.elems_.size() >= cap)
          throw ResourceError("from_generators: group order exceeds cap " +
                              std::to_string(cap));
        G.index_.emplace(x, static_cast<Index>(G.elems_.size()));
        G.elems_.push_back(std::move(x));
      }
    }
    for (const auto &g : gens)
      G.gens_.push_back(G.index_.at(g));
    G.finish();
    return G;
  }

  /// A group given by its multiplication table; table[a][b] = a*b.
  /// Validates the Latin property, a two-sided identity and associativity.
  static FiniteGroup from_table(const std::vector<std::vector<std::uint32_t>> &table,
                                std::size_t cap = kDefaultOrderCap) {
    const std::size_t n = table.size();
    if (n == 0)
      throw DomainError("from_table: empty table");
    if (n > cap)
      throw ResourceError("from_table: group order exceeds cap " + std::to_string(cap));
    for (const auto &row : table) {
      if (row.size() != n)
        throw DomainError("from_table: table is not square");
      std::vector<char> seen(n, 0);
      for (auto v : row) {
        if (v >= n || seen[v])
          throw DomainError("from_table: row is not a permutation");
        seen[v] = 1;
      }
    }
    for (std::size_t b = 0; b < n; ++b) {
      std::vector<char> seen(n, 0);
      for (std::size_t a = 0; a < n; ++a) {
        if (seen[table[a][b]])
          throw DomainError("from_table: column is not a permutation");
        seen[table[a][b]] = 1;
      }
    }
    std::size_t e = n;
    for (std::size_t a = 0; a < n && e == n; ++a) {
      bool left = true;
      for (std::size_t b = 0; b < n && left; ++b)
        left = table[a][b] == b && table[b][a] == b;
      if (left)
        e = a;
    }
    if (e == n)
      throw DomainError("from_table: no identity element");
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        for (std::size_t c = 0; c < n; ++c)
          if (table[table[a][b]][c] != table[a][table[b][c]])
            throw DomainError("from_table: not associative at (" + std::to_string(a) + "," +
                              std::to_string(b) + "," + std::to_string(c) + ")");
    // Left regular representation; element order follows the table with the
    // identity moved to index 0.
    std::vector<std::uint32_t> relabel(n);
    std::iota(relabel.begin(), relabel.end(), 0u);
    std::swap(relabel[0], relabel[e]);
    FiniteGroup G;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t g = relabel[i];
      Perm x(n);
      for (std::size_t j = 0; j < n; ++j)
        x[j] = table[g][j];
      G.index_.emplace(x, static_cast<Index>(i));
      G.elems_.push_back(std::move(x));
      G.label_.push_back(static_cast<std::uint32_t>(g));
    }
    G.finish();
    G.gens_ = G.greedy_generators();
    return G;
  }

  std::size_t order() const { return elems_.size(); }
  std::size_t degree() const { return elems_.front().size(); }
  Index identity() const { return 0; }
  const Perm &element(Index i) const { return elems_.at(i); }
  const std::vector<Index> &generators() const { return gens_; }

  /// Input label of an element: the table row for table groups, the index otherwise.
  std::uint32_t label(Index i) const { return label_.empty() ? i : label_.at(i); }
  Index from_label(std::uint32_t l) const {
    if (label_.empty()) {
      if (l >= order())
        throw DomainError("from_label: no such element");
      return l;
    }
    auto it = std::find(label_.begin(), label_.end(), l);
    if (it == label_.end())
      throw DomainError("from_label: no such element");
    return static_cast<Index>(it - label_.begin());
  }

  Index index_of(const Perm &x) const {
    auto it = index_.find(x);
    if (it == index_.end())
      throw DomainError("index_of: permutation not in group");
    return it->second;
  }

  Index mul(Index a, Index b) const {
    if (!table_.empty())
      return table_[static_cast<std::size_t>(a) * order() + b];
    return index_of(compose(elems_[a], elems_[b]));
  }
  Index inverse(Index a) const { return inv_.at(a); }
  Index conjugate(Index g, Index a) const { return mul(mul(g, a), inv_[g]); }
  std::uint64_t element_order(Index a) const { return powers_.at(a).size(); }

  /// a^k, reduced mod the order of a.
  Index power(Index a, std::uint64_t k) const {
    const auto &pw = powers_.at(a);
    return pw[k % pw.size()];
  }

  std::uint64_t exponent() const {
    std::uint64_t e = 1;
    for (const auto &pw : powers_)
      e = std::lcm(e, static_cast<std::uint64_t>(pw.size()));
    return e;
  }

  const std::vector<std::vector<Index>> &classes() const { return classes_; }
  std::size_t class_of(Index a) const { return class_id_.at(a); }
  std::size_t class_size(std::size_t c) const { return classes_.at(c).size(); }

  /// Subgroup generated by the given elements.
  ElementSet generated(const std::vector<Index> &gens) const {
    ElementSet H{std::vector<char>(order(), 0)};
    std::vector<Index> queue{identity()};
    H.member[identity()] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head)
      for (Index g : gens) {
        Index x = mul(queue[head], g);
        if (!H.member[x]) {
          H.member[x] = 1;
          queue.push_back(x);
        }
      }
    return H;
  }

  /// Contains the identity and is closed under multiplication (hence a subgroup).
  bool is_subgroup(const ElementSet &H) const {
    if (H.member.size() != order() || !H.contains(identity()))
      return false;
    auto el = H.elements();
    for (auto a : el)
      for (auto b : el)
        if (!H.member[mul(a, b)])
          return false;
    return true;
  }

  ElementSet subset(const std::vector<Index> &el) const {
    ElementSet S{std::vector<char>(order(), 0)};
    for (auto a : el)
      S.member.at(a) = 1;
    return S;
  }

  ElementSet filter(const std::function<bool(const Perm &)> &pred) const {
    ElementSet S{std::vector<char>(order(), 0)};
    for (std::size_t i = 0; i < order(); ++i)
      S.member[i] = pred(elems_[i]) ? 1 : 0;
    return S;
  }

  static Perm compose(const Perm &a, const Perm &b) {
    Perm out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
      out[i] = a[b[i]];
    return out;
  }

private:
  std::vector<Perm> elems_;
  std::map<Perm, Index> index_;
  std::vector<std::uint32_t> label_;
  std::vector<Index> gens_;
  std::vector<Index> table_;
  std::vector<Index> inv_;
  std::vector<std::vector<Index>> powers_;
  std::vector<std::vector<Index>> classes_;
  std::vector<std::size_t> class_id_;

  void finish() {
    const std::size_t n = order();
    if (n <= kTableLimit) {
      table_.assign(n * n, 0);
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
          table_[a * n + b] = index_of(compose(elems_[a], elems_[b]));
    }
    powers_.assign(n, {});
    inv_.assign(n, 0);
    for (std::size_t a = 0; a < n; ++a) {
      auto &pw = powers_[a];
      Index x = identity();
      do {
        pw.push_back(x);
        x = mul(x, static_cast<Index>(a));
      } while (x != identity());
      inv_[a] = pw.back();
    }
    build_classes();
  }

  std::vector<Index> greedy_generators() const {
    std::vector<Index> gens;
    ElementSet H{std::vector<char>(order(), 0)};
    H.member[identity()] = 1;
    for (std::size_t a = 0; a < order(); ++a)
      if (!H.member[a]) {
        gens.push_back(static_cast<Index>(a));
        H = generated(gens);
      }
    if (gens.empty())
      gens.push_back(identity());
    return gens;
  }

  void build_classes() {
    const std::size_t n = order();
    class_id_.assign(n, n);
    classes_.clear();
    // Orbits under conjugation by every element; classes of a finite group.
    for (std::size_t a = 0; a < n; ++a) {
      if (class_id_[a] != n)
        continue;
      std::vector<Index> cls{static_cast<Index>(a)};
      class_id_[a] = classes_.size();
      for (std::size_t head = 0; head < cls.size(); ++head)
        for (std::size_t g = 0; g < n; ++g) {
          Index y = conjugate(static_cast<Index>(g), cls[head]);
          if (class_id_[y] == n) {
            class_id_[y] = classes_.size();
            cls.push_back(y);
          }
        }
      std::sort(cls.begin(), cls.end());
      classes_.push_back(std::move(cls));
    }
  }
};

/// (A, B1, B2) with B1, B2 subgroups of A.
struct GroupTriple {
  std::string name;
  std::shared_ptr<const FiniteGroup> A;
  ElementSet B1, B2;
};

inline GroupTriple make_triple(std::string name, std::shared_ptr<const FiniteGroup> A,
                               ElementSet B1, ElementSet B2) {
  if (!A)
    throw DomainError("make_triple: no group");
  if (!A->is_subgroup(B1) || !A->is_subgroup(B2))
    throw DomainError("make_triple: B1 and B2 must be subgroups of A");
  return {std::move(name), std::move(A), std::move(B1), std::move(B2)};
}

/// Permutation character of A on A/B at a, counted by fixed cosets:
/// #{x : x^-1 a x in B} / |B|.
inline std::int64_t chi_fixed_points(const FiniteGroup &A, const ElementSet &B,
                                     FiniteGroup::Index a) {
  std::size_t count = 0;
  for (std::size_t x = 0; x < A.order(); ++x) {
    auto xi = static_cast<FiniteGroup::Index>(x);
    if (B.member[A.mul(A.mul(A.inverse(xi), a), xi)])
      ++count;
  }
  std::size_t b = B.size();
  if (count % b != 0)
    throw LogicError("chi_fixed_points: count not divisible by |B|");
  return static_cast<std::int64_t>(count / b);
}

/// |[c] cap B| for every class c.
inline std::vector<std::size_t> class_intersections(const FiniteGroup &A, const ElementSet &B) {
  std::vector<std::size_t> out(A.classes().size(), 0);
  for (auto b : B.elements())
    ++out[A.class_of(b)];
  return out;
}

// ---------------------------------------------------------------------------
// Class-level data: all that the density argument needs

/// Class sizes, power maps and both permutation characters on classes.
struct ClassTriple {
  std::string name;
  std::uint64_t order = 0;
  std::uint64_t index1 = 0, index2 = 0;
  std::uint64_t exponent = 1;
  std::vector<std::uint64_t> class_sizes;
  /// power_map[c][k] = class of rep(c)^k for 0 <= k < order of rep(c).
  std::vector<std::vector<std::size_t>> power_map;
  std::vector<std::uint64_t> meets1, meets2;
  std::vector<std::int64_t> chi1, chi2;

  std::size_t class_count() const { return class_sizes.size(); }
  std::size_t power_class(std::size_t c, std::uint64_t m) const {
    const auto &pm = power_map.at(c);
    return pm[m % pm.size()];
  }
};

inline std::int64_t chi_from_meets(std::uint64_t order, std::uint64_t class_size,
                                   std::uint64_t meets, std::uint64_t b) {
  // chi_B(a) = |C_A(a)| |[a] cap B| / |B|
  Integer num = Integer(order / class_size) * meets;
  if (num % b != 0)
    throw LogicError("chi_from_meets: value is not an integer");
  return static_cast<std::int64_t>(num / b);
}

/// Class data of an element-level triple, with chi checked against fixed
/// points on every element (so chi is verified to be a class function).
inline ClassTriple class_triple(const GroupTriple &t, bool verify_elements = true) {
  const FiniteGroup &A = *t.A;
  ClassTriple ct;
  ct.name = t.name;
  ct.order = A.order();
  std::size_t b1 = t.B1.size(), b2 = t.B2.size();
  ct.index1 = ct.order / b1;
  ct.index2 = ct.order / b2;
  ct.exponent = A.exponent();
  auto m1 = class_intersections(A, t.B1), m2 = class_intersections(A, t.B2);
  for (std::size_t c = 0; c < A.classes().size(); ++c) {
    const auto &cls = A.classes()[c];
    ct.class_sizes.push_back(cls.size());
    auto rep = cls.front();
    std::vector<std::size_t> pm;
    for (std::uint64_t k = 0; k < A.element_order(rep); ++k)
      pm.push_back(A.class_of(A.power(rep, k)));
    ct.power_map.push_back(std::move(pm));
    ct.meets1.push_back(m1[c]);
    ct.meets2.push_back(m2[c]);
    ct.chi1.push_back(chi_from_meets(ct.order, cls.size(), m1[c], b1));
    ct.chi2.push_back(chi_from_meets(ct.order, cls.size(), m2[c], b2));
    if (verify_elements)
      for (auto a : cls)
        if (chi_fixed_points(A, t.B1, a) != ct.chi1[c] ||
            chi_fixed_points(A, t.B2, a) != ct.chi2[c])
          throw LogicError("class_triple: permutation character is not constant on a class");
  }
  return ct;
}

/// Class data of (PSL_2(R), B1, B2) from an enumerated covers table.
inline ClassTriple class_triple(const GroupTable &G, Subgroup s1, Subgroup s2) {
  ClassTriple ct;
  ct.name = std::string("PSL2(") + ring_kind_name(G.kind()) + ", p=" + std::to_string(G.p()) +
            "): " + subgroup_name(s1) + ", " + subgroup_name(s2);
  ct.order = G.order();
  ct.index1 = G.index_of_subgroup(s1);
  ct.index2 = G.index_of_subgroup(s2);
  const auto &m1 = G.intersections(s1), &m2 = G.intersections(s2);
  for (std::size_t c = 0; c < G.classes().size(); ++c) {
    auto rep = G.classes()[c].front();
    ct.class_sizes.push_back(G.class_size(c));
    Mat2 x = G.element(rep), acc = G.identity_mat();
    auto ord = static_cast<std::uint64_t>(G.element_order(rep));
    ct.exponent = std::lcm(ct.exponent, ord);
    std::vector<std::size_t> pm;
    for (std::uint64_t k = 0; k < ord; ++k) {
      pm.push_back(G.class_of(G.index_of(acc)));
      acc = G.mul(acc, x);
    }
    ct.power_map.push_back(std::move(pm));
    ct.meets1.push_back(m1[c]);
    ct.meets2.push_back(m2[c]);
    ct.chi1.push_back(chi_from_meets(ct.order, G.class_size(c), m1[c], G.subgroup(s1).size()));
    ct.chi2.push_back(chi_from_meets(ct.order, G.class_size(c), m2[c], G.subgroup(s2).size()));
  }
  return ct;
}

inline bool gassmann_check(const ClassTriple &t) { return t.meets1 == t.meets2; }

inline bool lmnr_check(const ClassTriple &t) {
  for (std::size_t c = 0; c < t.class_count(); ++c)
    if ((t.meets1[c] == 0) != (t.meets2[c] == 0))
      return false;
  return true;
}

/// sum_{m | d} mu(d/m) chi(c^m): d times the number of degree-d orbits of <a>.
inline std::int64_t mobius_sum(const ClassTriple &t, const std::vector<std::int64_t> &chi,
                               std::size_t c, std::uint64_t d) {
  std::int64_t s = 0;
  for (auto m : divisors(static_cast<long long>(d)))
    s += mobius(static_cast<long long>(d) / m) * chi[t.power_class(c, static_cast<std::uint64_t>(m))];
  return s;
}

/// Classes making up S_bad(d).
inline std::vector<std::size_t> s_bad_classes(const ClassTriple &t, std::uint64_t d) {
  if (d < 1)
    throw DomainError("s_bad: d must be >= 1");
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < t.class_count(); ++c)
    if (mobius_sum(t, t.chi1, c, d) != mobius_sum(t, t.chi2, c, d))
      out.push_back(c);
  return out;
}

inline std::uint64_t s_bad_size(const ClassTriple &t, std::uint64_t d) {
  std::uint64_t n = 0;
  for (auto c : s_bad_classes(t, d))
    n += t.class_sizes[c];
  return n;
}

// ---------------------------------------------------------------------------
// Element-level S_bad

/// Per-element sums sum_{m|d} mu(d/m) chi_B(a^m) for d = 1..d_max, from
/// fixed-point characters on every element.
struct SplittingProfile {
  std::uint64_t d_max = 0;
  std::vector<std::int64_t> chi;              // per element
  std::vector<std::vector<std::int64_t>> sum; // sum[d-1][a]
};

inline SplittingProfile splitting_profile(const FiniteGroup &A, const ElementSet &B,
                                          std::uint64_t d_max) {
  SplittingProfile P;
  P.d_max = d_max;
  P.chi.resize(A.order());
  for (std::size_t a = 0; a < A.order(); ++a)
    P.chi[a] = chi_fixed_points(A, B, static_cast<FiniteGroup::Index>(a));
  P.sum.assign(d_max, std::vector<std::int64_t>(A.order(), 0));
  for (std::uint64_t d = 1; d <= d_max; ++d) {
    auto divs = divisors(static_cast<long long>(d));
    for (std::size_t a = 0; a < A.order(); ++a) {
      std::int64_t s = 0;
      for (auto m : divs)
        s += mobius(static_cast<long long>(d) / m) *
             P.chi[A.power(static_cast<FiniteGroup::Index>(a), static_cast<std::uint64_t>(m))];
      P.sum[d - 1][a] = s;
    }
  }
  return P;
}

/// S_bad(d) from two profiles; asserts it is a union of conjugacy classes.
inline std::vector<FiniteGroup::Index> s_bad(const FiniteGroup &A, const SplittingProfile &P1,
                                             const SplittingProfile &P2, std::uint64_t d) {
  if (d < 1 || d > P1.d_max || d > P2.d_max)
    throw DomainError("s_bad: d outside the profile range");
  std::vector<FiniteGroup::Index> out;
  for (std::size_t a = 0; a < A.order(); ++a)
    if (P1.sum[d - 1][a] != P2.sum[d - 1][a])
      out.push_back(static_cast<FiniteGroup::Index>(a));
  std::vector<std::size_t> hits(A.classes().size(), 0);
  for (auto a : out)
    ++hits[A.class_of(a)];
  for (std::size_t c = 0; c < hits.size(); ++c)
    if (hits[c] != 0 && hits[c] != A.class_size(c))
      throw LogicError("s_bad: S_bad(" + std::to_string(d) + ") is not conjugation-closed");
  return out;
}

inline std::vector<FiniteGroup::Index> s_bad(const GroupTriple &t, std::uint64_t d) {
  if (d < 1)
    throw DomainError("s_bad: d must be >= 1");
  return s_bad(*t.A, splitting_profile(*t.A, t.B1, d), splitting_profile(*t.A, t.B2, d), d);
}

// ---------------------------------------------------------------------------
// Density dichotomy

enum class DensityVerdict { empty, nonempty };

inline const char *density_verdict_name(DensityVerdict v) {
  return v == DensityVerdict::empty ? "empty" : "nonempty";
}

struct DensityResult {
  std::uint64_t d = 0;
  Rational density;
  Rational threshold;   // 1/|A|
  Rational class_bound; // smallest class size in S_bad(d) over |A|, 0 if empty
  DensityVerdict verdict = DensityVerdict::empty;
};

/// density = |S_bad(d)|/|A|. Throws LogicError if S_bad(d) is nonempty with
/// density below 1/|A| or below its smallest class density.
inline DensityResult density_check(const ClassTriple &t, std::uint64_t d) {
  DensityResult r;
  r.d = d;
  auto cls = s_bad_classes(t, d);
  std::uint64_t size = 0, smallest = 0;
  for (auto c : cls) {
    size += t.class_sizes[c];
    smallest = smallest == 0 ? t.class_sizes[c] : std::min(smallest, t.class_sizes[c]);
  }
  const auto order = static_cast<long long>(t.order);
  r.density = Rational(static_cast<long long>(size), order);
  r.threshold = Rational(1, order);
  r.class_bound = Rational(static_cast<long long>(smallest), order);
  r.verdict = cls.empty() ? DensityVerdict::empty : DensityVerdict::nonempty;
  if (r.verdict == DensityVerdict::nonempty &&
      (r.density < r.threshold || r.density < r.class_bound))
    throw LogicError("density_check: nonempty S_bad below the class density bound");
  return r;
}

inline DensityResult density_check(const GroupTriple &t, std::uint64_t d) {
  return density_check(class_triple(t), d);
}

// ---------------------------------------------------------------------------
// Degree-one reduction

/// S_bad(1) empty => chi_B1 = chi_B2 => S_bad(d) empty for d <= exponent(A);
/// also S_bad(1) empty <=> Gassmann. Throws LogicError if any link fails.
inline bool degree_one_reduction(const ClassTriple &t) {
  bool empty1 = s_bad_classes(t, 1).empty();
  if (empty1 != gassmann_check(t))
    throw LogicError("degree_one_reduction: S_bad(1) empty disagrees with the Gassmann test");
  if (!empty1)
    return true;
  if (t.chi1 != t.chi2)
    throw LogicError("degree_one_reduction: S_bad(1) empty but characters differ");
  for (std::uint64_t d = 2; d <= t.exponent; ++d)
    if (!s_bad_classes(t, d).empty())
      throw LogicError("degree_one_reduction: S_bad(" + std::to_string(d) + ") nonempty");
  return true;
}

inline bool degree_one_reduction(const GroupTriple &t) {
  return degree_one_reduction(class_triple(t));
}

// ---------------------------------------------------------------------------
// Reports and scans

struct TripleReport {
  std::string name;
  std::uint64_t order = 0, index1 = 0, index2 = 0, exponent = 0;
  std::vector<DensityResult> densities; // d = 1..exponent
  bool gassmann = false, lmnr = false, degree_one_reduction = false;
  std::size_t nonempty_degrees() const {
    return static_cast<std::size_t>(
        std::count_if(densities.begin(), densities.end(),
                      [](const DensityResult &r) { return r.verdict == DensityVerdict::nonempty; }));
  }
};

inline TripleReport triple_report(const ClassTriple &t) {
  TripleReport r;
  r.name = t.name;
  r.order = t.order;
  r.index1 = t.index1;
  r.index2 = t.index2;
  r.exponent = t.exponent;
  for (std::uint64_t d = 1; d <= t.exponent; ++d)
    r.densities.push_back(density_check(t, d));
  r.gassmann = gassmann_check(t);
  r.lmnr = lmnr_check(t);
  r.degree_one_reduction = degree_one_reduction(t);
  return r;
}

/// Every subgroup of A, as joins of cyclic subgroups.
inline std::vector<ElementSet> all_subgroups(const FiniteGroup &A, std::size_t cap = 5000) {
  std::set<ElementSet> cyclic_set;
  for (std::size_t a = 0; a < A.order(); ++a)
    cyclic_set.insert(A.generated({static_cast<FiniteGroup::Index>(a)}));
  std::vector<ElementSet> cyclic(cyclic_set.begin(), cyclic_set.end());
  std::vector<std::vector<FiniteGroup::Index>> cyc_gen;
  for (const auto &C : cyclic) {
    FiniteGroup::Index g = A.identity();
    for (auto x : C.elements())
      if (A.generated({x}) == C) {
        g = x;
        break;
      }
    cyc_gen.push_back({g});
  }
  std::set<ElementSet> found(cyclic.begin(), cyclic.end());
  std::vector<std::pair<ElementSet, std::vector<FiniteGroup::Index>>> queue;
  for (std::size_t i = 0; i < cyclic.size(); ++i)
    queue.emplace_back(cyclic[i], cyc_gen[i]);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    for (std::size_t i = 0; i < cyclic.size(); ++i) {
      if (queue[head].first.contains(cyc_gen[i].front()))
        continue;
      auto gens = queue[head].second;
      gens.push_back(cyc_gen[i].front());
      ElementSet J = A.generated(gens);
      if (found.insert(J).second) {
        if (found.size() > cap)
          throw ResourceError("all_subgroups: more than " + std::to_string(cap) + " subgroups");
        queue.emplace_back(std::move(J), std::move(gens));
      }
    }
  }
  return {found.begin(), found.end()};
}

struct ScanSummary {
  std::string group;
  std::uint64_t order = 0;
  std::size_t subgroups = 0;
  std::size_t pairs = 0;
  std::size_t gassmann_pairs = 0;      // unordered, B1 != B2
  std::size_t lmnr_pairs = 0;          // unordered, B1 != B2
  std::size_t closure_checks = 0;      // element-level S_bad sets checked
  std::size_t dichotomy_checks = 0;
  std::size_t reduction_true = 0;
  std::size_t logic_errors = 0;
  std::vector<std::string> errors;
  bool ok() const { return logic_errors == 0 && reduction_true == pairs; }
};

/// All unordered pairs (B1, B2) of subgroups of A, d = 1..exponent(A):
/// element-level S_bad closure, the density dichotomy and the degree-one
/// reduction. LogicErrors are counted, not propagated.
inline ScanSummary scan_subgroup_pairs(const std::string &name, const FiniteGroup &A) {
  ScanSummary s;
  s.group = name;
  s.order = A.order();
  auto subs = all_subgroups(A);
  s.subgroups = subs.size();
  const std::uint64_t E = A.exponent();
  std::vector<SplittingProfile> prof;
  prof.reserve(subs.size());
  for (const auto &H : subs)
    prof.push_back(splitting_profile(A, H, E));
  auto shared = std::make_shared<const FiniteGroup>(A);
  for (std::size_t i = 0; i < subs.size(); ++i)
    for (std::size_t j = i; j < subs.size(); ++j) {
      ++s.pairs;
      try {
        GroupTriple t{name, shared, subs[i], subs[j]};
        ClassTriple ct = class_triple(t, false);
        // Element-level characters must agree with the class formula.
        for (std::size_t a = 0; a < A.order(); ++a) {
          auto c = A.class_of(static_cast<FiniteGroup::Index>(a));
          if (prof[i].chi[a] != ct.chi1[c] || prof[j].chi[a] != ct.chi2[c])
            throw LogicError("permutation character is not a class function");
        }
        for (std::uint64_t d = 1; d <= E; ++d) {
          auto S = s_bad(A, prof[i], prof[j], d);
          ++s.closure_checks;
          if (S.size() != s_bad_size(ct, d))
            throw LogicError("element and class S_bad disagree at d=" + std::to_string(d));
          density_check(ct, d);
          ++s.dichotomy_checks;
        }
        if (i != j) {
          s.gassmann_pairs += gassmann_check(ct) ? 1 : 0;
          s.lmnr_pairs += lmnr_check(ct) ? 1 : 0;
        }
        if (degree_one_reduction(ct))
          ++s.reduction_true;
      } catch (const LogicError &e) {
        ++s.logic_errors;
        s.errors.push_back(e.what());
      }
    }
  return s;
}

// ---------------------------------------------------------------------------
// Fixture groups

inline Perm perm_from_cycles(std::size_t deg, const std::vector<std::vector<std::uint32_t>> &cycles) {
  Perm p(deg);
  std::iota(p.begin(), p.end(), 0u);
  for (const auto &c : cycles)
    for (std::size_t i = 0; i < c.size(); ++i)
      p.at(c[i]) = c[(i + 1) % c.size()];
  return p;
}

inline FiniteGroup symmetric_group(std::size_t n) {
  if (n < 2)
    throw DomainError("symmetric_group: n must be >= 2");
  std::vector<std::uint32_t> cyc(n);
  std::iota(cyc.begin(), cyc.end(), 0u);
  return FiniteGroup::from_generators({perm_from_cycles(n, {{0, 1}}), perm_from_cycles(n, {cyc})});
}

/// GL(3, 2) acting on the 7 nonzero vectors of F_2^3 (vector v <-> point v - 1).
inline FiniteGroup gl32() {
  std::vector<Perm> gens;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (i == j)
        continue;
      // Transvection x_i += x_j.
      Perm p(7);
      for (std::uint32_t v = 1; v <= 7; ++v) {
        std::uint32_t w = v ^ (((v >> j) & 1u) << i);
        p[v - 1] = w - 1;
      }
      gens.push_back(p);
    }
  return FiniteGroup::from_generators(gens);
}

/// Stabilizer of the vector e_1 and of the plane x_3 = 0 in gl32(): index-7
/// subgroups, Gassmann equivalent and not conjugate.
inline std::pair<ElementSet, ElementSet> gl32_point_line(const FiniteGroup &G) {
  auto point = G.filter([](const Perm &p) { return p[0] == 0; });
  auto line = G.filter([](const Perm &p) {
    for (std::uint32_t v = 1; v <= 7; ++v)
      if (!(v & 4u) && ((p[v - 1] + 1) & 4u))
        return false;
    return true;
  });
  return {point, line};
}

inline bool conjugate_subgroups(const FiniteGroup &A, const ElementSet &H, const ElementSet &K) {
  if (H.size() != K.size())
    return false;
  auto el = H.elements();
  for (std::size_t g = 0; g < A.order(); ++g) {
    bool all = true;
    for (auto h : el)
      if (!K.member[A.conjugate(static_cast<FiniteGroup::Index>(g), h)]) {
        all = false;
        break;
      }
    if (all)
      return true;
  }
  return false;
}

/// The covers triple (PSL_2(Z[i]/p^2), B1, B2) at class level.
inline ClassTriple builtin_psl2_triple(int p = 3, std::uint64_t cap = kDefaultGroupCap) {
  GroupTable G = build_group(p, RingKind::gaussian, cap);
  return class_triple(G, Subgroup::B1, Subgroup::B2);
}

} // namespace rankone::arith

#endif // RANKONE_ARITHFIELDS_HPP

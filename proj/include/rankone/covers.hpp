#ifndef RANKONE_COVERS_HPP
#define RANKONE_COVERS_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "rankone/check.hpp"
#include "rankone/errors.hpp"
#include "rankone/exactpoly.hpp"

namespace rankone {

// ---------------------------------------------------------------------------
// Number theory helpers

inline bool is_prime(long long n) {
  if (n < 2)
    return false;
  for (long long d = 2; d * d <= n; ++d)
    if (n % d == 0)
      return false;
  return true;
}

inline int mobius(long long n) {
  if (n < 1)
    throw DomainError("mobius: need n >= 1");
  int mu = 1;
  for (long long d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      n /= d;
      if (n % d == 0)
        return 0;
      mu = -mu;
    }
  }
  if (n > 1)
    mu = -mu;
  return mu;
}

inline std::vector<long long> divisors(long long n) {
  std::vector<long long> out;
  for (long long d = 1; d <= n; ++d)
    if (n % d == 0)
      out.push_back(d);
  return out;
}

inline long long mod_pow(long long b, long long e, long long m) {
  long long r = 1 % m;
  b %= m;
  if (b < 0)
    b += m;
  while (e > 0) {
    if (e & 1)
      r = r * b % m;
    b = b * b % m;
    e >>= 1;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Rings Z/p^2 and Z[i]/p^2

enum class RingKind { rational, gaussian };

inline const char *ring_kind_name(RingKind k) {
  return k == RingKind::rational ? "rational" : "gaussian";
}

inline RingKind parse_ring_kind(const std::string &s) {
  if (s == "rational")
    return RingKind::rational;
  if (s == "gaussian")
    return RingKind::gaussian;
  throw DomainError("unknown ring kind '" + s + "' (expected rational or gaussian)");
}

/// a + b i modulo p^2 (b = 0 in the rational ring).
struct RingElem {
  int a = 0;
  int b = 0;
  friend bool operator==(const RingElem &x, const RingElem &y) {
    return x.a == y.a && x.b == y.b;
  }
};

class Ring {
public:
  Ring(int p, RingKind kind) : p_(p), kind_(kind), mod_(p * p) {
    if (p < 3 || !is_prime(p))
      throw DomainError("Ring: p must be an odd prime");
    if (kind == RingKind::gaussian && p % 4 != 3)
      throw DomainError("Ring: gaussian ring needs p = 3 mod 4 (p inert in Z[i])");
  }

  int p() const { return p_; }
  RingKind kind() const { return kind_; }
  int modulus() const { return mod_; }
  int size() const { return kind_ == RingKind::rational ? mod_ : mod_ * mod_; }

  RingElem make(long long a, long long b = 0) const {
    if (kind_ == RingKind::rational && b % mod_ != 0)
      throw DomainError("Ring: imaginary part in the rational ring");
    return {norm(a), norm(b)};
  }
  RingElem zero() const { return {0, 0}; }
  RingElem one() const { return {1, 0}; }

  RingElem add(RingElem x, RingElem y) const { return {norm(x.a + y.a), norm(x.b + y.b)}; }
  RingElem sub(RingElem x, RingElem y) const { return {norm(x.a - y.a), norm(x.b - y.b)}; }
  RingElem neg(RingElem x) const { return {norm(-x.a), norm(-x.b)}; }
  RingElem mul(RingElem x, RingElem y) const {
    long long re = 1LL * x.a * y.a - 1LL * x.b * y.b;
    long long im = 1LL * x.a * y.b + 1LL * x.b * y.a;
    return {norm(re), norm(im)};
  }

  /// Units are the elements outside the maximal ideal (p).
  bool is_unit(RingElem x) const {
    long long n = 1LL * x.a * x.a + 1LL * x.b * x.b;
    return n % p_ != 0;
  }

  RingElem inv(RingElem x) const {
    if (!is_unit(x))
      throw DomainError("Ring: element is not a unit");
    long long n = (1LL * x.a * x.a + 1LL * x.b * x.b) % mod_;
    long long ninv = mod_inverse(n);
    return mul({x.a, norm(-x.b)}, {static_cast<int>(ninv), 0});
  }

  int encode(RingElem x) const { return x.a + mod_ * x.b; }
  RingElem decode(int code) const { return {code % mod_, code / mod_}; }

  std::vector<RingElem> elements() const {
    std::vector<RingElem> out;
    for (int c = 0; c < size(); ++c)
      out.push_back(decode(c));
    return out;
  }

  /// Additive generators of the ring.
  std::vector<RingElem> additive_generators() const {
    if (kind_ == RingKind::rational)
      return {one()};
    return {one(), {0, 1}};
  }

private:
  int norm(long long v) const {
    long long r = v % mod_;
    return static_cast<int>(r < 0 ? r + mod_ : r);
  }
  long long mod_inverse(long long n) const {
    for (long long k = 1; k < mod_; ++k)
      if (n * k % mod_ == 1)
        return k;
    throw LogicError("Ring: no inverse");
  }

  int p_;
  RingKind kind_;
  int mod_;
};

/// 2x2 matrix [[m[0], m[1]], [m[2], m[3]]].
struct Mat2 {
  std::array<RingElem, 4> m{};
  friend bool operator==(const Mat2 &x, const Mat2 &y) { return x.m == y.m; }
};

// ---------------------------------------------------------------------------
// The residue field F_q = O/pO and sl_2(F_q)

/// a + b i modulo p (b = 0 over F_p).
struct Fq {
  int a = 0;
  int b = 0;
  bool is_zero() const { return a == 0 && b == 0; }
  friend bool operator==(const Fq &x, const Fq &y) { return x.a == y.a && x.b == y.b; }
  friend bool operator<(const Fq &x, const Fq &y) {
    return std::pair(x.a, x.b) < std::pair(y.a, y.b);
  }
};

/// Trace-zero matrix [[x, y], [z, -x]] over F_q.
struct SlMat {
  Fq x, y, z;
  bool is_zero() const { return x.is_zero() && y.is_zero() && z.is_zero(); }
  friend bool operator==(const SlMat &u, const SlMat &v) {
    return u.x == v.x && u.y == v.y && u.z == v.z;
  }
};

class Field {
public:
  Field(int p, RingKind kind) : p_(p), kind_(kind) {}
  int p() const { return p_; }
  int q() const { return kind_ == RingKind::rational ? p_ : p_ * p_; }
  RingKind kind() const { return kind_; }

  Fq make(long long a, long long b = 0) const { return {norm(a), norm(b)}; }
  Fq add(Fq u, Fq v) const { return {norm(u.a + v.a), norm(u.b + v.b)}; }
  Fq mul(Fq u, Fq v) const {
    return {norm(1LL * u.a * v.a - 1LL * u.b * v.b), norm(1LL * u.a * v.b + 1LL * u.b * v.a)};
  }
  Fq pow(Fq u, long long e) const {
    Fq r{1, 0};
    while (e > 0) {
      if (e & 1)
        r = mul(r, u);
      u = mul(u, u);
      e >>= 1;
    }
    return r;
  }
  bool in_prime_field(Fq u) const { return u.b == 0; }

  /// Euler's criterion in F_q*.
  bool is_square(Fq u) const {
    if (u.is_zero())
      throw DomainError("Field::is_square: zero");
    return pow(u, (q() - 1) / 2) == Fq{1, 0};
  }
  /// Euler's criterion in F_p* (u must lie in F_p).
  bool is_square_in_prime_field(Fq u) const {
    if (u.is_zero() || !in_prime_field(u))
      throw DomainError("Field::is_square_in_prime_field: need u in F_p*");
    return mod_pow(u.a, (p_ - 1) / 2, p_) == 1;
  }

  std::vector<Fq> elements() const {
    std::vector<Fq> out;
    for (int b = 0; b < (kind_ == RingKind::rational ? 1 : p_); ++b)
      for (int a = 0; a < p_; ++a)
        out.push_back({a, b});
    return out;
  }

  /// Q = -det X = x^2 + yz.
  Fq minus_det(const SlMat &X) const { return add(mul(X.x, X.x), mul(X.y, X.z)); }

private:
  int norm(long long v) const {
    long long r = v % p_;
    return static_cast<int>(r < 0 ? r + p_ : r);
  }
  int p_;
  RingKind kind_;
};

/// Frobenius types of the final splitting analysis.
enum class FrobeniusType { trivial, nilpotent, irregular, quadratic, nonquadratic };

inline const char *frobenius_type_name(FrobeniusType t) {
  switch (t) {
  case FrobeniusType::trivial:
    return "trivial";
  case FrobeniusType::nilpotent:
    return "nilpotent";
  case FrobeniusType::irregular:
    return "irregular";
  case FrobeniusType::quadratic:
    return "quadratic";
  case FrobeniusType::nonquadratic:
    return "nonquadratic";
  }
  return "?";
}

inline const std::array<FrobeniusType, 5> &all_frobenius_types() {
  static const std::array<FrobeniusType, 5> types{
      FrobeniusType::trivial, FrobeniusType::irregular, FrobeniusType::quadratic,
      FrobeniusType::nonquadratic, FrobeniusType::nilpotent};
  return types;
}

inline FrobeniusType classify_x(const Field &F, const SlMat &X) {
  if (X.is_zero())
    return FrobeniusType::trivial;
  Fq Q = F.minus_det(X);
  if (Q.is_zero())
    return FrobeniusType::nilpotent;
  if (!F.in_prime_field(Q))
    return FrobeniusType::irregular;
  return F.is_square_in_prime_field(Q) ? FrobeniusType::quadratic
                                       : FrobeniusType::nonquadratic;
}

/// Conjugacy-class type of X in sl_2(F_q) under PSL_2(F_q).
enum class XClassType { zero, square, nonsquare, nilpotent };

inline const char *x_class_type_name(XClassType t) {
  switch (t) {
  case XClassType::zero:
    return "zero";
  case XClassType::square:
    return "square";
  case XClassType::nonsquare:
    return "nonsquare";
  case XClassType::nilpotent:
    return "nilpotent";
  }
  return "?";
}

inline XClassType x_class_type(const Field &F, const SlMat &X) {
  if (X.is_zero())
    return XClassType::zero;
  Fq Q = F.minus_det(X);
  if (Q.is_zero())
    return XClassType::nilpotent;
  return F.is_square(Q) ? XClassType::square : XClassType::nonsquare;
}

/// Class sizes in V_q predicted by the classification of sl_2(F_q) orbits.
inline long long expected_vq_class_size(int q, XClassType t) {
  switch (t) {
  case XClassType::zero:
    return 1;
  case XClassType::square:
    return 1LL * q * (q + 1);
  case XClassType::nonsquare:
    return 1LL * q * (q - 1);
  case XClassType::nilpotent:
    return (1LL * q * q - 1) / 2;
  }
  return 0;
}

/// Which of the two nilpotent classes of sl_2(F_q) a nilpotent X lies in.
/// Over F_{p^2} every element of F_p* is a square, so all nonzero nilpotents
/// of sl_2(F_p) land in the `split` class; the `inert` class misses sl_2(F_p).
enum class NilpotentVariant { none, split, inert };

inline const char *nilpotent_variant_name(NilpotentVariant v) {
  switch (v) {
  case NilpotentVariant::none:
    return "none";
  case NilpotentVariant::split:
    return "split";
  case NilpotentVariant::inert:
    return "inert";
  }
  return "?";
}

inline NilpotentVariant nilpotent_variant(const Field &F, const SlMat &X) {
  if (X.is_zero() || !F.minus_det(X).is_zero())
    return NilpotentVariant::none;
  // X ~ [[0, 0], [c, 0]] with c = z, or c = -y when z = 0
  Fq c = !X.z.is_zero() ? X.z : F.mul(F.make(-1), X.y);
  return F.is_square(c) ? NilpotentVariant::split : NilpotentVariant::inert;
}

/// |[X] cap B_1| and |[X] cap B_2| as printed: by type only, the nilpotent
/// entries being (p^2 - 1)/2 and p - 1.
inline long long printed_b1_intersection(int p, FrobeniusType t) {
  switch (t) {
  case FrobeniusType::irregular:
    return 0;
  case FrobeniusType::trivial:
    return 1;
  case FrobeniusType::quadratic:
    return 1LL * p * (p + 1);
  case FrobeniusType::nonquadratic:
    return 1LL * p * (p - 1);
  case FrobeniusType::nilpotent:
    return (1LL * p * p - 1) / 2;
  }
  return 0;
}

inline long long printed_b2_intersection(int p, FrobeniusType t) {
  switch (t) {
  case FrobeniusType::irregular:
    return 0;
  case FrobeniusType::trivial:
    return 1;
  default:
    return p - 1;
  }
}

/// The same counts per class: the split nilpotent class carries all p^2 - 1
/// nilpotents of sl_2(F_p) and all 2(p - 1) of R-perp, the inert one none.
inline long long derived_b1_intersection(int p, FrobeniusType t, NilpotentVariant v) {
  if (t != FrobeniusType::nilpotent)
    return printed_b1_intersection(p, t);
  return v == NilpotentVariant::split ? 1LL * p * p - 1 : 0;
}

inline long long derived_b2_intersection(int p, FrobeniusType t, NilpotentVariant v) {
  if (t != FrobeniusType::nilpotent)
    return printed_b2_intersection(p, t);
  return v == NilpotentVariant::split ? 2LL * (p - 1) : 0;
}

// ---------------------------------------------------------------------------
// Matrix arithmetic over the ring and Frobenius data

inline Mat2 mat_identity(const Ring &R) { return {{R.one(), R.zero(), R.zero(), R.one()}}; }

inline Mat2 mat_mul(const Ring &R, const Mat2 &x, const Mat2 &y) {
  return {{R.add(R.mul(x.m[0], y.m[0]), R.mul(x.m[1], y.m[2])),
           R.add(R.mul(x.m[0], y.m[1]), R.mul(x.m[1], y.m[3])),
           R.add(R.mul(x.m[2], y.m[0]), R.mul(x.m[3], y.m[2])),
           R.add(R.mul(x.m[2], y.m[1]), R.mul(x.m[3], y.m[3]))}};
}

inline Mat2 mat_neg(const Ring &R, const Mat2 &x) {
  Mat2 out;
  for (int k = 0; k < 4; ++k)
    out.m[k] = R.neg(x.m[k]);
  return out;
}

/// X with x = +-(I + pX), if x = +-I mod p.
inline std::optional<SlMat> x_parameter_of(const Ring &R, const Field &F, Mat2 x) {
  const int p = R.p();
  // pick the sign with x = I mod p
  if (x.m[0].a % p != 1 % p)
    x = mat_neg(R, x);
  Mat2 d = x;
  d.m[0] = R.sub(d.m[0], R.one());
  d.m[3] = R.sub(d.m[3], R.one());
  for (const auto &e : d.m)
    if (e.a % p != 0 || e.b % p != 0)
      return std::nullopt;
  auto f = [&](RingElem e) { return F.make(e.a / p, e.b / p); };
  SlMat X{f(d.m[0]), f(d.m[1]), f(d.m[2])};
  if (!(F.add(X.x, f(d.m[3])).is_zero()))
    throw LogicError("x_parameter: trace is not zero");
  return X;
}

struct FrobeniusDatum {
  Mat2 sigma;
  int d0 = 1;
  SlMat x0;
  FrobeniusType type = FrobeniusType::trivial;
  NilpotentVariant variant = NilpotentVariant::none;
};

/// d0 = least d with sigma^d in V_q, X0 from sigma^d0 = I + pX0, and the type.
inline FrobeniusDatum classify_matrix(const Ring &R, const Field &F, const Mat2 &sigma) {
  FrobeniusDatum f;
  f.sigma = sigma;
  Mat2 acc = sigma;
  // the image in PSL_2(F_q) has order at most p (q + 1)
  const int bound = R.p() * (F.q() + 1);
  for (int d = 1;; ++d) {
    if (d > bound)
      throw LogicError("classify_matrix: no power lands in V_q");
    if (auto X = x_parameter_of(R, F, acc)) {
      f.d0 = d;
      f.x0 = *X;
      break;
    }
    acc = mat_mul(R, acc, sigma);
  }
  f.type = classify_x(F, f.x0);
  f.variant = nilpotent_variant(F, f.x0);
  return f;
}

/// Uniform element of SL_2(O/p^2): uniform unimodular first column, then a
/// uniform point of the affine line of completions.
template <class Rng> Mat2 random_sl2(const Ring &R, Rng &rng) {
  std::uniform_int_distribution<int> pick(0, R.size() - 1);
  RingElem a, c;
  do {
    a = R.decode(pick(rng));
    c = R.decode(pick(rng));
  } while (!R.is_unit(a) && !R.is_unit(c));
  RingElem b0 = R.zero(), d0 = R.zero();
  if (R.is_unit(a))
    d0 = R.inv(a);
  else
    b0 = R.neg(R.inv(c));
  RingElem k = R.decode(pick(rng));
  return {{a, R.add(b0, R.mul(k, a)), c, R.add(d0, R.mul(k, c))}};
}

// ---------------------------------------------------------------------------
// PSL_2 group table

enum class Subgroup { Vq, B1, B2 };

inline const char *subgroup_name(Subgroup s) {
  switch (s) {
  case Subgroup::Vq:
    return "Vq";
  case Subgroup::B1:
    return "B1";
  case Subgroup::B2:
    return "B2";
  }
  return "?";
}

/// Default cap on |PSL_2| for build_group.
constexpr std::uint64_t kDefaultGroupCap = 3'000'000;

inline std::uint64_t predicted_psl_order(int p, RingKind kind) {
  std::uint64_t q = kind == RingKind::rational ? static_cast<std::uint64_t>(p)
                                               : static_cast<std::uint64_t>(p) * p;
  return q * q * q * q * (q * q - 1) / 2;
}

class GroupTable {
public:
  using Index = std::uint32_t;

  static GroupTable build(int p, RingKind kind, std::uint64_t cap = kDefaultGroupCap) {
    if (p % 2 == 0)
      throw DomainError("build_group: p must be odd");
    Ring ring(p, kind); // validates p and the inert condition
    std::uint64_t predicted = predicted_psl_order(p, kind);
    if (predicted > cap)
      throw ResourceError("build_group: |PSL_2| = " + std::to_string(predicted) +
                          " exceeds the cap " + std::to_string(cap));
    GroupTable g(ring);
    g.enumerate();
    if (g.order() != predicted)
      throw LogicError("build_group: enumerated order differs from the closed form");
    g.verify_axioms();
    g.compute_classes();
    g.mark_subgroups();
    return g;
  }

  const Ring &ring() const { return ring_; }
  const Field &field() const { return field_; }
  int p() const { return ring_.p(); }
  int q() const { return field_.q(); }
  RingKind kind() const { return ring_.kind(); }
  std::size_t order() const { return keys_.size(); }
  std::size_t sl_order() const { return 2 * keys_.size(); }

  Mat2 element(Index i) const { return decode(keys_.at(i)); }
  Index identity() const { return index_of(identity_mat()); }

  Mat2 identity_mat() const { return mat_identity(ring_); }

  Mat2 mul(const Mat2 &x, const Mat2 &y) const { return mat_mul(ring_, x, y); }
  /// Inverse in SL_2 (adjugate).
  Mat2 inverse(const Mat2 &x) const {
    return {{x.m[3], ring_.neg(x.m[1]), ring_.neg(x.m[2]), x.m[0]}};
  }
  Mat2 neg(const Mat2 &x) const { return mat_neg(ring_, x); }
  Mat2 power(Mat2 x, long long k) const {
    if (k < 0) {
      x = inverse(x);
      k = -k;
    }
    Mat2 r = identity_mat();
    while (k > 0) {
      if (k & 1)
        r = mul(r, x);
      x = mul(x, x);
      k >>= 1;
    }
    return r;
  }
  RingElem det(const Mat2 &x) const {
    return ring_.sub(ring_.mul(x.m[0], x.m[3]), ring_.mul(x.m[1], x.m[2]));
  }

  Index index_of(const Mat2 &x) const {
    std::uint64_t k = canonical_key(x);
    auto it = std::lower_bound(keys_.begin(), keys_.end(), k);
    if (it == keys_.end() || *it != k)
      throw DomainError("GroupTable: matrix is not in SL_2");
    return static_cast<Index>(it - keys_.begin());
  }
  Index mul(Index i, Index j) const { return index_of(mul(element(i), element(j))); }
  Index inverse(Index i) const { return index_of(inverse(element(i))); }
  Index power(Index i, long long k) const { return index_of(power(element(i), k)); }
  Index conjugate(Index g, Index x) const {
    Mat2 G = element(g);
    return index_of(mul(mul(G, element(x)), inverse(G)));
  }

  /// Order of an element of PSL_2.
  long long element_order(Index i) const {
    Mat2 x = element(i), acc = x;
    const std::uint64_t id = canonical_key(identity_mat());
    for (long long k = 1;; ++k) {
      if (canonical_key(acc) == id)
        return k;
      acc = mul(acc, x);
    }
  }

  const std::vector<std::vector<Index>> &classes() const { return classes_; }
  std::size_t class_of(Index i) const { return class_id_.at(i); }
  std::size_t class_size(std::size_t c) const { return classes_.at(c).size(); }
  std::size_t centralizer_order(Index i) const { return order() / class_size(class_of(i)); }

  const std::vector<Index> &subgroup(Subgroup s) const { return members_.at(s); }
  bool contains(Subgroup s, Index i) const { return membership_.at(s)[i]; }
  std::size_t index_of_subgroup(Subgroup s) const { return order() / subgroup(s).size(); }

  /// |[a] cap B| for every class.
  const std::vector<std::size_t> &intersections(Subgroup s) const { return meets_.at(s); }

  /// X with x = +-(I + pX), if x lies in V_q.
  std::optional<SlMat> x_parameter(Index i) const {
    return x_parameter_of(ring_, field_, element(i));
  }

  /// I + pX as a group element.
  Index from_x(const SlMat &X) const {
    const int p = ring_.p();
    auto lift = [&](Fq u) { return ring_.make(1LL * p * u.a, 1LL * p * u.b); };
    Fq mx{(p - X.x.a) % p, (p - X.x.b) % p};
    Mat2 m{{ring_.add(ring_.one(), lift(X.x)), lift(X.y), lift(X.z),
            ring_.add(ring_.one(), lift(mx))}};
    return index_of(m);
  }

  std::vector<SlMat> sl2_elements() const {
    std::vector<SlMat> out;
    auto els = field_.elements();
    for (const auto &x : els)
      for (const auto &y : els)
        for (const auto &z : els)
          out.push_back({x, y, z});
    return out;
  }

private:
  explicit GroupTable(const Ring &ring) : ring_(ring), field_(ring.p(), ring.kind()) {}

  std::uint64_t raw_key(const Mat2 &x) const {
    const std::uint64_t S = static_cast<std::uint64_t>(ring_.size());
    std::uint64_t k = 0;
    for (int j = 3; j >= 0; --j)
      k = k * S + static_cast<std::uint64_t>(ring_.encode(x.m[j]));
    return k;
  }
  std::uint64_t canonical_key(const Mat2 &x) const {
    return std::min(raw_key(x), raw_key(neg(x)));
  }
  Mat2 decode(std::uint64_t k) const {
    const std::uint64_t S = static_cast<std::uint64_t>(ring_.size());
    Mat2 x;
    for (int j = 0; j < 4; ++j) {
      x.m[j] = ring_.decode(static_cast<int>(k % S));
      k /= S;
    }
    return x;
  }

  void enumerate() {
    auto els = ring_.elements();
    std::vector<std::uint64_t> keys;
    keys.reserve(predicted_psl_order(ring_.p(), ring_.kind()) * 2);
    for (const auto &a : els)
      for (const auto &c : els) {
        if (!ring_.is_unit(a) && !ring_.is_unit(c))
          continue;
        // particular solution of a d0 - c b0 = 1, then (b0 + k a, d0 + k c)
        RingElem b0 = ring_.zero(), d0 = ring_.zero();
        if (ring_.is_unit(a))
          d0 = ring_.inv(a);
        else
          b0 = ring_.neg(ring_.inv(c));
        for (const auto &k : els) {
          Mat2 m{{a, ring_.add(b0, ring_.mul(k, a)), c, ring_.add(d0, ring_.mul(k, c))}};
          keys.push_back(canonical_key(m));
        }
      }
    if (keys.size() != 2 * predicted_psl_order(ring_.p(), ring_.kind()))
      throw LogicError("build_group: |SL_2| differs from the closed form");
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    keys_ = std::move(keys);
  }

  std::vector<Mat2> generators() const {
    std::vector<Mat2> gens;
    for (const auto &u : ring_.additive_generators()) {
      gens.push_back({{ring_.one(), u, ring_.zero(), ring_.one()}});
      gens.push_back({{ring_.one(), ring_.zero(), u, ring_.one()}});
    }
    return gens;
  }

  void verify_axioms() const {
    // closure and inverses on the generators and a spread of elements
    const std::size_t step = std::max<std::size_t>(1, order() / 500);
    for (std::size_t i = 0; i < order(); i += step) {
      Mat2 x = element(static_cast<Index>(i));
      if (!(det(x) == ring_.one()))
        throw LogicError("GroupTable: determinant is not 1");
      Index xi = index_of(inverse(x));
      if (mul(static_cast<Index>(i), xi) != identity())
        throw LogicError("GroupTable: inverse check failed");
      for (const auto &g : generators())
        (void)index_of(mul(g, x)); // throws if not closed
    }
  }

  void compute_classes() {
    auto gens = generators();
    std::vector<Mat2> gens_inv;
    for (const auto &g : gens)
      gens_inv.push_back(inverse(g));
    const std::size_t none = static_cast<std::size_t>(-1);
    class_id_.assign(order(), none);
    std::vector<Index> stack;
    for (std::size_t start = 0; start < order(); ++start) {
      if (class_id_[start] != none)
        continue;
      std::size_t cid = classes_.size();
      classes_.emplace_back();
      class_id_[start] = cid;
      stack.push_back(static_cast<Index>(start));
      while (!stack.empty()) {
        Index x = stack.back();
        stack.pop_back();
        classes_[cid].push_back(x);
        Mat2 X = element(x);
        for (std::size_t g = 0; g < gens.size(); ++g) {
          Index y = index_of(mul(mul(gens[g], X), gens_inv[g]));
          if (class_id_[y] == none) {
            class_id_[y] = cid;
            stack.push_back(y);
          }
        }
      }
      std::sort(classes_[cid].begin(), classes_[cid].end());
    }
    std::size_t total = 0;
    for (const auto &c : classes_) {
      if (order() % c.size() != 0)
        throw LogicError("GroupTable: class size does not divide |G|");
      total += c.size();
    }
    if (total != order())
      throw LogicError("GroupTable: classes do not partition the group");
  }

  void mark_subgroups() {
    const int p = ring_.p();
    for (Subgroup s : {Subgroup::Vq, Subgroup::B1, Subgroup::B2}) {
      membership_[s].assign(order(), false);
      members_[s].clear();
    }
    for (std::size_t i = 0; i < order(); ++i) {
      auto X = x_parameter(static_cast<Index>(i));
      if (!X)
        continue;
      auto add = [&](Subgroup s) {
        membership_[s][i] = true;
        members_[s].push_back(static_cast<Index>(i));
      };
      add(Subgroup::Vq);
      bool over_fp = field_.in_prime_field(X->x) && field_.in_prime_field(X->y) &&
                     field_.in_prime_field(X->z);
      if (over_fp)
        add(Subgroup::B1);
      // R-perp: [[x, y], [-y, -x]] with x, y in F_p
      if (over_fp && field_.add(X->y, X->z).is_zero())
        add(Subgroup::B2);
    }
    const std::size_t q = static_cast<std::size_t>(field_.q());
    const std::size_t pp = static_cast<std::size_t>(p);
    if (members_[Subgroup::Vq].size() != q * q * q || members_[Subgroup::B1].size() != pp * pp * pp ||
        members_[Subgroup::B2].size() != pp * pp)
      throw LogicError("GroupTable: subgroup orders differ from q^3, p^3, p^2");
    for (Subgroup s : {Subgroup::Vq, Subgroup::B1, Subgroup::B2}) {
      auto &m = meets_[s];
      m.assign(classes_.size(), 0);
      for (Index i : members_[s])
        ++m[class_id_[i]];
    }
  }

  Ring ring_;
  Field field_;
  std::vector<std::uint64_t> keys_;
  std::vector<std::vector<Index>> classes_;
  std::vector<std::size_t> class_id_;
  std::map<Subgroup, std::vector<Index>> members_;
  std::map<Subgroup, std::vector<bool>> membership_;
  std::map<Subgroup, std::vector<std::size_t>> meets_;
};

inline GroupTable build_group(int p, RingKind kind, std::uint64_t cap = kDefaultGroupCap) {
  return GroupTable::build(p, kind, cap);
}

// ---------------------------------------------------------------------------
// Classes inside V_q

struct VqClassInfo {
  std::size_t class_id = 0;
  std::size_t size = 0;
  SlMat x;
  XClassType x_type = XClassType::zero;
  FrobeniusType type = FrobeniusType::trivial;
  NilpotentVariant variant = NilpotentVariant::none;
  long long expected_size = 0;
  std::size_t meets_b1 = 0;
  std::size_t meets_b2 = 0;
};

inline std::vector<VqClassInfo> vq_classes(const GroupTable &G) {
  std::vector<VqClassInfo> out;
  const auto &F = G.field();
  for (std::size_t c = 0; c < G.classes().size(); ++c) {
    auto rep = G.classes()[c].front();
    if (!G.contains(Subgroup::Vq, rep))
      continue;
    VqClassInfo info;
    info.class_id = c;
    info.size = G.class_size(c);
    info.x = *G.x_parameter(rep);
    info.x_type = x_class_type(F, info.x);
    info.type = classify_x(F, info.x);
    info.variant = nilpotent_variant(F, info.x);
    info.expected_size = expected_vq_class_size(G.q(), info.x_type);
    info.meets_b1 = G.intersections(Subgroup::B1)[c];
    info.meets_b2 = G.intersections(Subgroup::B2)[c];
    out.push_back(info);
  }
  return out;
}

struct VqLemmaReport {
  CheckReport sizes{"Vq class sizes"};
  CheckReport printed_intersections{"intersections as printed"};
  CheckReport derived_intersections{"intersections per class"};
};

/// Class sizes in V_q, and the intersection counts with B_1, B_2 both against
/// the printed lemma and against the per-class counts.
inline VqLemmaReport verify_vq_lemmas(const GroupTable &G) {
  VqLemmaReport rep;
  const auto &F = G.field();
  const int p = G.p();
  std::size_t covered = 0;
  for (const auto &info : vq_classes(G)) {
    std::string tag = std::string(x_class_type_name(info.x_type)) + " class " +
                      std::to_string(info.class_id);
    rep.sizes.expect(static_cast<long long>(info.size) == info.expected_size,
                     "size of " + tag + ": " + std::to_string(info.size) + " vs " +
                         std::to_string(info.expected_size));
    covered += info.size;
    if (G.kind() != RingKind::gaussian)
      continue;
    auto line = [&](const char *b, std::size_t got, long long want) {
      return std::string("|[X] cap ") + b + "| for " + tag + " (" +
             nilpotent_variant_name(info.variant) + "): " + std::to_string(got) + " vs " +
             std::to_string(want);
    };
    long long pb1 = printed_b1_intersection(p, info.type);
    long long pb2 = printed_b2_intersection(p, info.type);
    long long db1 = derived_b1_intersection(p, info.type, info.variant);
    long long db2 = derived_b2_intersection(p, info.type, info.variant);
    rep.printed_intersections.expect(static_cast<long long>(info.meets_b1) == pb1,
                                     line("B1", info.meets_b1, pb1));
    rep.printed_intersections.expect(static_cast<long long>(info.meets_b2) == pb2,
                                     line("B2", info.meets_b2, pb2));
    rep.derived_intersections.expect(static_cast<long long>(info.meets_b1) == db1,
                                     line("B1", info.meets_b1, db1));
    rep.derived_intersections.expect(static_cast<long long>(info.meets_b2) == db2,
                                     line("B2", info.meets_b2, db2));
  }
  rep.sizes.expect(covered == G.subgroup(Subgroup::Vq).size(), "V_q is a union of classes");
  if (G.kind() == RingKind::gaussian) {
    for (int a = 1; a < p; ++a)
      rep.sizes.expect(F.is_square(F.make(a)), "F_p* inside (F_q*)^2");
  }
  return rep;
}

inline std::map<std::size_t, std::size_t> intersection_counts(const GroupTable &G, Subgroup s) {
  std::map<std::size_t, std::size_t> out;
  const auto &m = G.intersections(s);
  for (std::size_t c = 0; c < m.size(); ++c)
    out[c] = m[c];
  return out;
}

// ---------------------------------------------------------------------------
// Permutation characters and splitting

/// chi_B(a) = |Z_A(a)| |[a] cap B| / |B|, asserted to be a nonnegative integer.
inline Integer chi_perm(const GroupTable &G, Subgroup s, GroupTable::Index a) {
  std::size_t c = G.class_of(a);
  Rational v(static_cast<long long>(G.centralizer_order(a) * G.intersections(s)[c]),
             static_cast<long long>(G.subgroup(s).size()));
  if (denominator(v) != 1 || v < 0)
    throw LogicError("chi_perm: value is not a nonnegative integer");
  return numerator(v);
}

/// Fixed points of a on A/B by direct count: #{x : x^-1 a x in B} / |B|.
inline Integer chi_perm_by_fixed_points(const GroupTable &G, Subgroup s, GroupTable::Index a) {
  Mat2 A = G.element(a);
  std::size_t count = 0;
  for (std::size_t i = 0; i < G.order(); ++i) {
    Mat2 x = G.element(static_cast<GroupTable::Index>(i));
    if (G.contains(s, G.index_of(G.mul(G.mul(G.inverse(x), A), x))))
      ++count;
  }
  if (count % G.subgroup(s).size() != 0)
    throw LogicError("chi_perm_by_fixed_points: count not divisible by |B|");
  return Integer(count / G.subgroup(s).size());
}

inline bool gassmann_check(const GroupTable &G, Subgroup b1, Subgroup b2) {
  return G.intersections(b1) == G.intersections(b2);
}

inline bool lmnr_check(const GroupTable &G, Subgroup b1, Subgroup b2) {
  const auto &x = G.intersections(b1);
  const auto &y = G.intersections(b2);
  for (std::size_t c = 0; c < x.size(); ++c)
    if ((x[c] == 0) != (y[c] == 0))
      return false;
  return true;
}

/// A_B(m) = (1/m) sum_{d | m} mu(m/d) chi_B(sigma^d) for m = 1..m_max.
inline std::map<int, Rational> splitting_type(const std::map<int, Rational> &chi_values,
                                              int m_max) {
  if (m_max < 1)
    throw DomainError("splitting_type: need m_max >= 1");
  std::map<int, Rational> out;
  for (int m = 1; m <= m_max; ++m) {
    Rational sum = 0;
    for (long long d : divisors(m)) {
      auto it = chi_values.find(static_cast<int>(d));
      if (it == chi_values.end())
        throw DomainError("splitting_type: missing chi value at d = " + std::to_string(d));
      sum += Rational(mobius(m / d)) * it->second;
    }
    Rational a = sum / m;
    if (a < 0 || denominator(a) != 1)
      throw NonIntegralSplitting("splitting_type: A(" + std::to_string(m) + ") = " +
                                 a.str() + " is not a nonnegative integer");
    out[m] = a;
  }
  return out;
}

inline FrobeniusDatum classify_frobenius(const GroupTable &G, GroupTable::Index sigma) {
  return classify_matrix(G.ring(), G.field(), G.element(sigma));
}

/// Splitting of the class of sigma in the cover for B, by Moebius inversion
/// over all degrees up to the order of sigma.
inline std::map<int, Rational> frobenius_splitting(const GroupTable &G, Subgroup s,
                                                   GroupTable::Index sigma) {
  int ord = static_cast<int>(G.element_order(sigma));
  std::map<int, Rational> chi;
  Mat2 x = G.element(sigma), acc = x;
  for (int d = 1; d <= ord; ++d) {
    chi[d] = Rational(chi_perm(G, s, G.index_of(acc)));
    acc = G.mul(acc, x);
  }
  return splitting_type(chi, ord);
}

/// The closed form of the splitting lemma for sigma with datum f.
inline std::map<int, Rational> splitting_closed_form(const GroupTable &G, Subgroup s,
                                                     const FrobeniusDatum &f) {
  std::map<int, Rational> out;
  Rational index(static_cast<long long>(G.index_of_subgroup(s)));
  if (f.type == FrobeniusType::trivial) {
    out[f.d0] = index / f.d0;
    return out;
  }
  Rational chi(chi_perm(G, s, G.index_of(G.power(f.sigma, f.d0))));
  if (chi != 0)
    out[f.d0] = chi / f.d0;
  Rational rest = (index - chi) / (G.p() * f.d0);
  if (rest != 0)
    out[G.p() * f.d0] = rest;
  return out;
}

inline std::map<int, Rational> nonzero_entries(const std::map<int, Rational> &m) {
  std::map<int, Rational> out;
  for (const auto &[k, v] : m)
    if (v != 0)
      out[k] = v;
  return out;
}

/// Moebius inversion against the closed form, for every class representative
/// and (if `exhaustive_vq`) for every I + pX in V_q.
inline CheckReport verify_splitting_lemma(const GroupTable &G, bool exhaustive_vq) {
  CheckReport rep("splitting lemma");
  std::vector<GroupTable::Index> sigmas;
  for (const auto &c : G.classes())
    sigmas.push_back(c.front());
  if (exhaustive_vq)
    for (const auto &X : G.sl2_elements())
      sigmas.push_back(G.from_x(X));
  for (auto sigma : sigmas) {
    FrobeniusDatum f = classify_frobenius(G, sigma);
    for (Subgroup s : {Subgroup::B1, Subgroup::B2}) {
      auto a = frobenius_splitting(G, s, sigma);
      Rational total = 0;
      for (const auto &[m, v] : a)
        total += v * m;
      rep.expect(total == Rational(static_cast<long long>(G.index_of_subgroup(s))),
                 std::string("sum d A(d) = [A:") + subgroup_name(s) + "] at element " +
                     std::to_string(sigma));
      rep.expect(nonzero_entries(a) == splitting_closed_form(G, s, f),
                 std::string("closed form for ") + subgroup_name(s) + " at element " +
                     std::to_string(sigma) + " (" + frobenius_type_name(f.type) + ")");
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// The two splitting tables by type

/// Coefficients (c_{d0}, c_{p d0}) with A_B(d) = (n/d0)(c_{d0} delta_{d,d0} +
/// c_{pd0} delta_{d,pd0}).
struct TypeCoefficients {
  Rational at_d0;
  Rational at_pd0;
  friend bool operator==(const TypeCoefficients &a, const TypeCoefficients &b) {
    return a.at_d0 == b.at_d0 && a.at_pd0 == b.at_pd0;
  }
  friend bool operator!=(const TypeCoefficients &a, const TypeCoefficients &b) {
    return !(a == b);
  }
};

/// The printed tables, transcribed.
inline TypeCoefficients printed_coefficients(int p, Subgroup s, FrobeniusType t) {
  const Rational P(p);
  const Rational p2 = P * P, p3 = p2 * P, p4 = p3 * P;
  if (s == Subgroup::B1) {
    switch (t) {
    case FrobeniusType::trivial:
      return {1, 0};
    case FrobeniusType::irregular:
      return {0, 1 / P};
    case FrobeniusType::quadratic:
      return {(P + 1) / (p3 + P), (p3 - 1) / (p4 + p2)};
    case FrobeniusType::nonquadratic:
      return {(P - 1) / (p3 + P), (p3 + 1) / (p4 + p2)};
    case FrobeniusType::nilpotent:
      return {(p2 - 1) / (p4 - 1), (p3 - P) / (p4 - 1)};
    }
  }
  if (s == Subgroup::B2) {
    switch (t) {
    case FrobeniusType::trivial:
      return {P, 0};
    case FrobeniusType::irregular:
      return {0, 1};
    case FrobeniusType::quadratic:
    case FrobeniusType::nonquadratic:
      return {(P - 1) / (p3 + P), (p4 + p2 - P + 1) / (p4 + p2)};
    case FrobeniusType::nilpotent:
      return {(p3 - P) / (p4 - 1), (p4 - 2 * P + 1) / (p4 - 1)};
    }
  }
  throw DomainError("printed_coefficients: only B1 and B2 are tabulated");
}

/// Coefficients per class, from the per-class intersection counts and the
/// splitting lemma. The inert nilpotent class splits like an irregular one.
inline TypeCoefficients derived_coefficients(int p, Subgroup s, FrobeniusType t,
                                             NilpotentVariant v) {
  if (t != FrobeniusType::nilpotent)
    return printed_coefficients(p, s, t);
  if (v == NilpotentVariant::inert)
    return printed_coefficients(p, s, FrobeniusType::irregular);
  const Rational P(p);
  const Rational p2 = P * P, p4 = p2 * p2;
  if (s == Subgroup::B1)
    return {2 / (p2 + 1), (p2 - 1) / (p2 * P + P)};
  return {4 * P * (P - 1) / (p4 - 1), (p4 - 4 * P + 3) / (p4 - 1)};
}

/// Class-size weighted average over the type (the two nilpotent classes
/// have equal weight).
inline TypeCoefficients derived_average_coefficients(int p, Subgroup s, FrobeniusType t) {
  if (t != FrobeniusType::nilpotent)
    return printed_coefficients(p, s, t);
  auto a = derived_coefficients(p, s, t, NilpotentVariant::split);
  auto b = derived_coefficients(p, s, t, NilpotentVariant::inert);
  return {(a.at_d0 + b.at_d0) / 2, (a.at_pd0 + b.at_pd0) / 2};
}

struct TypeObservation {
  FrobeniusType type;
  Subgroup subgroup;
  int d0 = 0;
  std::size_t classes = 0;
  Integer weight = 0; // total size of the classes
  std::map<NilpotentVariant, TypeCoefficients> by_variant;
  TypeCoefficients average; // class-size weighted
  TypeCoefficients printed;
  TypeCoefficients derived_average;
  bool consistent = true; // classes of one variant agree and live on {d0, p d0}

  /// One value for the whole type, equal to the printed one.
  bool matches_printed() const {
    return consistent && by_variant.size() == 1 && average == printed;
  }
  bool average_matches_printed() const { return consistent && average == printed; }
  bool matches_derived(int p) const {
    if (!consistent || average != derived_average)
      return false;
    for (const auto &[v, c] : by_variant)
      if (c != derived_coefficients(p, subgroup, type, v))
        return false;
    return true;
  }
};

struct SplittingTable {
  int p = 0;
  Integer n_computed;
  Integer n_printed;
  std::vector<TypeObservation> rows;

  bool all_match_printed() const {
    return std::all_of(rows.begin(), rows.end(), [](const auto &r) { return r.matches_printed(); });
  }
  bool all_match_derived() const {
    return std::all_of(rows.begin(), rows.end(),
                       [this](const auto &r) { return r.matches_derived(p); });
  }
  std::vector<const TypeObservation *> printed_mismatches() const {
    std::vector<const TypeObservation *> out;
    for (const auto &r : rows)
      if (!r.matches_printed())
        out.push_back(&r);
    return out;
  }
};

/// Classifies every class of A and records A_B(d0), A_B(p d0), normalized
/// by n/d0 with n = [A : B_1].
inline SplittingTable splitting_table(const GroupTable &G) {
  if (G.kind() != RingKind::gaussian)
    throw DomainError("splitting_table: needs the gaussian ring");
  SplittingTable table;
  const int p = G.p();
  table.p = p;
  table.n_computed = Integer(static_cast<long long>(G.index_of_subgroup(Subgroup::B1)));
  table.n_printed = Integer(1LL * p * p * p * p * (p * p - 1) / 2);
  const Rational n(table.n_computed);
  std::map<std::tuple<int, int, int>, std::size_t> where;
  std::vector<Rational> sum_d0, sum_pd0;
  for (const auto &cls : G.classes()) {
    FrobeniusDatum f = classify_frobenius(G, cls.front());
    const Integer size(static_cast<long long>(cls.size()));
    for (Subgroup s : {Subgroup::B1, Subgroup::B2}) {
      auto a = frobenius_splitting(G, s, cls.front());
      auto get = [&](int d) { return a.count(d) ? a[d] : Rational(0); };
      TypeCoefficients obs{get(f.d0) * f.d0 / n, get(p * f.d0) * f.d0 / n};
      bool elsewhere = false;
      for (const auto &[m, v] : a)
        if (m != f.d0 && m != p * f.d0 && v != 0)
          elsewhere = true;
      auto key = std::tuple(static_cast<int>(s), static_cast<int>(f.type), f.d0);
      auto it = where.find(key);
      if (it == where.end()) {
        TypeObservation row;
        row.type = f.type;
        row.subgroup = s;
        row.d0 = f.d0;
        row.printed = printed_coefficients(p, s, f.type);
        row.derived_average = derived_average_coefficients(p, s, f.type);
        it = where.emplace(key, table.rows.size()).first;
        table.rows.push_back(row);
        sum_d0.emplace_back(0);
        sum_pd0.emplace_back(0);
      }
      auto &row = table.rows[it->second];
      ++row.classes;
      row.weight += size;
      sum_d0[it->second] += Rational(size) * obs.at_d0;
      sum_pd0[it->second] += Rational(size) * obs.at_pd0;
      auto [vit, fresh] = row.by_variant.emplace(f.variant, obs);
      if (elsewhere || (!fresh && vit->second != obs))
        row.consistent = false;
    }
  }
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    Rational w(table.rows[i].weight);
    table.rows[i].average = {sum_d0[i] / w, sum_pd0[i] / w};
  }
  std::sort(table.rows.begin(), table.rows.end(), [](const auto &a, const auto &b) {
    return std::tuple(static_cast<int>(a.subgroup), static_cast<int>(a.type), a.d0) <
           std::tuple(static_cast<int>(b.subgroup), static_cast<int>(b.type), b.d0);
  });
  return table;
}

// ---------------------------------------------------------------------------
// Closed-form splitting for any inert p

/// n = [A : B_1] = p^5 (p^4 - 1)/2 in PSL_2(Z[i]/p^2); [A : B_2] = p n;
/// [A : V_q] = |PSL_2(F_q)| = p^2 (p^4 - 1)/2.
inline Integer closed_form_index(int p, Subgroup s) {
  Integer P(p);
  Integer n = P * P * P * P * P * (P * P * P * P - 1) / 2;
  switch (s) {
  case Subgroup::B1:
    return n;
  case Subgroup::B2:
    return P * n;
  case Subgroup::Vq:
    return P * P * (P * P * P * P - 1) / 2;
  }
  return 0;
}

/// A_B(d) for a Frobenius datum, from the per-class coefficients.
inline std::map<int, Integer> closed_form_splitting(int p, Subgroup s, const FrobeniusDatum &f) {
  if (s == Subgroup::Vq)
    throw DomainError("closed_form_splitting: tabulated for B1 and B2 only");
  const Rational n(closed_form_index(p, Subgroup::B1));
  TypeCoefficients c = derived_coefficients(p, s, f.type, f.variant);
  std::map<int, Integer> out;
  auto put = [&](int d, const Rational &coef) {
    Rational v = n / f.d0 * coef;
    if (v < 0 || denominator(v) != 1)
      throw NonIntegralSplitting("closed_form_splitting: A(" + std::to_string(d) + ") = " +
                                 v.str());
    if (v != 0)
      out[d] = numerator(v);
  };
  put(f.d0, c.at_d0);
  put(p * f.d0, c.at_pd0);
  return out;
}

} // namespace rankone

#endif // RANKONE_COVERS_HPP

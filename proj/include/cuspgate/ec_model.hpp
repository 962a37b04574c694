#pragma once

// Exact elliptic-curve machinery over Q: Weierstrass models and their
// invariants, coordinate changes, the chord-tangent group law, duplication,
// rational 2-torsion, reduction mod 2, Tate's algorithm and the conductor.

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cuspgate/core_arith.hpp"

namespace cuspgate {

/// y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6
template <class T>
struct Weierstrass {
  T a1{}, a2{}, a3{}, a4{}, a6{};

  std::array<T, 5> coefficients() const { return {a1, a2, a3, a4, a6}; }
  friend bool operator==(const Weierstrass&, const Weierstrass&) = default;
};

using WeierstrassModel = Weierstrass<BigInt>;
using RationalModel = Weierstrass<Rat>;

inline WeierstrassModel make_model(long long a1, long long a2, long long a3, long long a4, long long a6) {
  return {BigInt(a1), BigInt(a2), BigInt(a3), BigInt(a4), BigInt(a6)};
}

inline RationalModel to_rational(const WeierstrassModel& e) {
  return {Rat(e.a1), Rat(e.a2), Rat(e.a3), Rat(e.a4), Rat(e.a6)};
}

/// Integral model when every coefficient is an integer.
inline std::optional<WeierstrassModel> to_integral(const RationalModel& e) {
  for (const auto& a : e.coefficients()) {
    if (!a.is_integer()) return std::nullopt;
  }
  return WeierstrassModel{e.a1.numerator(), e.a2.numerator(), e.a3.numerator(), e.a4.numerator(),
                          e.a6.numerator()};
}

inline std::string to_string(const WeierstrassModel& e) {
  return "[" + e.a1.str() + "," + e.a2.str() + "," + e.a3.str() + "," + e.a4.str() + "," + e.a6.str() + "]";
}

/// Parses "a1,a2,a3,a4,a6" (optionally bracketed) into an integral model.
inline WeierstrassModel parse_model(std::string_view text) {
  std::string s(text);
  if (!s.empty() && s.front() == '[') s.erase(0, 1);
  if (!s.empty() && s.back() == ']') s.pop_back();
  std::vector<BigInt> parts;
  std::size_t start = 0;
  for (;;) {
    auto comma = s.find(',', start);
    parts.push_back(parse_bigint(std::string_view(s).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (parts.size() != 5) throw std::invalid_argument("curve must have exactly 5 coefficients a1,a2,a3,a4,a6");
  return {parts[0], parts[1], parts[2], parts[3], parts[4]};
}

template <class T>
struct BInvariantsT {
  T b2, b4, b6, b8, disc;
  bool singular() const { return disc == T(0); }
};
using BInvariants = BInvariantsT<BigInt>;

template <class T>
BInvariantsT<T> b_invariants(const Weierstrass<T>& e) {
  BInvariantsT<T> b;
  b.b2 = e.a1 * e.a1 + T(4) * e.a2;
  b.b4 = T(2) * e.a4 + e.a1 * e.a3;
  b.b6 = e.a3 * e.a3 + T(4) * e.a6;
  b.b8 = e.a1 * e.a1 * e.a6 + T(4) * e.a2 * e.a6 - e.a1 * e.a3 * e.a4 + e.a2 * e.a3 * e.a3 - e.a4 * e.a4;
  b.disc = -b.b2 * b.b2 * b.b8 - T(8) * b.b4 * b.b4 * b.b4 - T(27) * b.b6 * b.b6 + T(9) * b.b2 * b.b4 * b.b6;
  return b;
}

template <class T>
T discriminant(const Weierstrass<T>& e) {
  return b_invariants(e).disc;
}

// ---------------------------------------------------------------------------
// Coordinate changes x = u^2 x' + r, y = u^3 y' + u^2 s x' + t

struct Transform {
  Rat u{1}, r{}, s{}, t{};

  static Transform identity() { return {}; }
  static Transform scaling(const Rat& u) { return {u, 0, 0, 0}; }

  /// Apply *this, then `next`.
  Transform then(const Transform& next) const {
    Transform c;
    c.u = u * next.u;
    c.r = r + u * u * next.r;
    c.s = s + u * next.s;
    c.t = t + u * u * s * next.r + u * u * u * next.t;
    return c;
  }

  Transform inverse() const {
    if (u.is_zero()) throw std::domain_error("transform with u = 0");
    const Rat ui = u.inverse();
    return {ui, -r * ui * ui, -s * ui, (r * s - t) * ui * ui * ui};
  }

  friend bool operator==(const Transform&, const Transform&) = default;
};

inline RationalModel apply_transform(const RationalModel& e, const Transform& tr) {
  if (tr.u.is_zero()) throw std::domain_error("apply_transform: u must be nonzero");
  const Rat& u = tr.u;
  const Rat& r = tr.r;
  const Rat& s = tr.s;
  const Rat& t = tr.t;
  const Rat u2 = u * u;
  const Rat u3 = u2 * u;
  RationalModel o;
  o.a1 = (e.a1 + 2 * s) / u;
  o.a2 = (e.a2 - s * e.a1 + 3 * r - s * s) / u2;
  o.a3 = (e.a3 + r * e.a1 + 2 * t) / u3;
  o.a4 = (e.a4 - s * e.a3 + 2 * r * e.a2 - (t + r * s) * e.a1 + 3 * r * r - 2 * s * t) / (u2 * u2);
  o.a6 = (e.a6 + r * e.a4 + r * r * e.a2 + r * r * r - t * e.a3 - t * t - r * t * e.a1) / (u3 * u3);
  return o;
}

inline RationalModel apply_transform(const WeierstrassModel& e, const Transform& tr) {
  return apply_transform(to_rational(e), tr);
}

/// Clears denominators with u = 1/d, d the lcm of the coefficient denominators.
inline std::pair<WeierstrassModel, Transform> integral_model(const RationalModel& e) {
  BigInt d = 1;
  for (const auto& a : e.coefficients()) d = lcm(d, a.denominator());
  Transform tr = Transform::scaling(Rat(1, d));
  return {*to_integral(apply_transform(e, tr)), tr};
}

// ---------------------------------------------------------------------------
// Group law

struct Point {
  bool infinity = true;
  Rat x, y;

  static Point at_infinity() { return {}; }
  static Point affine(Rat x, Rat y) { return {false, std::move(x), std::move(y)}; }
  friend bool operator==(const Point&, const Point&) = default;
};

inline bool on_curve(const RationalModel& e, const Point& p) {
  if (p.infinity) return true;
  const Rat& x = p.x;
  const Rat& y = p.y;
  return y * y + e.a1 * x * y + e.a3 * y == x * x * x + e.a2 * x * x + e.a4 * x + e.a6;
}
inline bool on_curve(const WeierstrassModel& e, const Point& p) { return on_curve(to_rational(e), p); }

inline Point negate(const RationalModel& e, const Point& p) {
  if (p.infinity) return p;
  return Point::affine(p.x, -p.y - e.a1 * p.x - e.a3);
}

inline Point group_law_add(const RationalModel& e, const Point& p, const Point& q) {
  if (p.infinity) return q;
  if (q.infinity) return p;
  Rat lambda, nu;
  if (p.x == q.x) {
    if (p.y + q.y + e.a1 * q.x + e.a3 == Rat(0)) return Point::at_infinity();
    const Rat den = 2 * p.y + e.a1 * p.x + e.a3;
    lambda = (3 * p.x * p.x + 2 * e.a2 * p.x + e.a4 - e.a1 * p.y) / den;
    nu = (-p.x * p.x * p.x + e.a4 * p.x + 2 * e.a6 - e.a3 * p.y) / den;
  } else {
    const Rat dx = q.x - p.x;
    lambda = (q.y - p.y) / dx;
    nu = (p.y * q.x - q.y * p.x) / dx;
  }
  Rat x3 = lambda * lambda + e.a1 * lambda - e.a2 - p.x - q.x;
  Rat y3 = -(lambda + e.a1) * x3 - nu - e.a3;
  return Point::affine(std::move(x3), std::move(y3));
}
inline Point group_law_add(const WeierstrassModel& e, const Point& p, const Point& q) {
  return group_law_add(to_rational(e), p, q);
}

inline Point multiply(const RationalModel& e, BigInt n, Point p) {
  if (n < 0) {
    n = -n;
    p = negate(e, p);
  }
  Point acc = Point::at_infinity();
  while (n > 0) {
    if (n & 1) acc = group_law_add(e, acc, p);
    n >>= 1;
    if (n > 0) p = group_law_add(e, p, p);
  }
  return acc;
}

/// Points of E with the given x-coordinate (zero, one or two of them).
inline std::vector<Point> points_with_x(const RationalModel& e, const Rat& x) {
  // y^2 + (a1 x + a3) y - rhs = 0
  const Rat lin = e.a1 * x + e.a3;
  const Rat rhs = x * x * x + e.a2 * x * x + e.a4 * x + e.a6;
  const Rat disc = lin * lin + 4 * rhs;
  auto root = rational_sqrt(disc);
  if (!root) return {};
  std::vector<Point> out{Point::affine(x, (-lin + *root) / 2)};
  if (!root->is_zero()) out.push_back(Point::affine(x, (-lin - *root) / 2));
  return out;
}

/// x([2]Q) = (x^4 - b4 x^2 - 2 b6 x - b8) / (4x^3 + b2 x^2 + 2 b4 x + b6).
/// Throws std::domain_error when the denominator vanishes (Q is 2-torsion).
inline Rat double_x(const RationalModel& e, const Rat& x) {
  const auto b = b_invariants(e);
  const Rat x2 = x * x;
  const Rat den = 4 * x2 * x + b.b2 * x2 + 2 * b.b4 * x + b.b6;
  if (den.is_zero()) throw std::domain_error("double_x: x is the abscissa of a 2-torsion point");
  return (x2 * x2 - b.b4 * x2 - 2 * b.b6 * x - b.b8) / den;
}
inline Rat double_x(const WeierstrassModel& e, const Rat& x) { return double_x(to_rational(e), x); }

// ---------------------------------------------------------------------------
// Rational 2-torsion

/// Distinct integer roots of X^3 + a X^2 + b X + c in increasing order.
inline std::vector<BigInt> integer_roots_monic_cubic(const BigInt& a, const BigInt& b, const BigInt& c) {
  auto f = [&](const BigInt& x) { return ((x + a) * x + b) * x + c; };
  std::vector<BigInt> roots;
  if (c == 0) {
    roots.push_back(0);
    // X^2 + a X + b
    BigInt disc = a * a - 4 * b;
    if (auto s = is_square(disc)) {
      for (const BigInt& num : {BigInt(-a - *s), BigInt(-a + *s)}) {
        if (num % 2 == 0) roots.push_back(num / 2);
      }
    }
  } else {
    const BigInt bound = 1 + std::max({abs(a), abs(b), abs(c)});
    // Search an interval on which f is monotone (increasing if `up`).
    auto search = [&](BigInt lo, BigInt hi, bool up) {
      if (lo > hi) return;
      auto sgn = [&](const BigInt& x) {
        BigInt v = f(x);
        return up ? v : BigInt(-v);
      };
      if (sgn(lo) > 0 || sgn(hi) < 0) return;
      while (lo < hi) {
        BigInt mid = floor_div(lo + hi, 2);
        if (sgn(mid) < 0) {
          lo = mid + 1;
        } else {
          hi = mid;
        }
      }
      if (f(lo) == 0) roots.push_back(lo);
    };
    // f' = 3X^2 + 2aX + b; critical points (-2a -+ sqrt(D)) / 6 with D = 4a^2 - 12b.
    const BigInt dd = 4 * a * a - 12 * b;
    if (dd <= 0) {
      search(-bound, bound, true);
    } else {
      // floor of the smaller critical point: largest n with 6n + 2a <= -sqrt(D)
      auto below_lo = [&](const BigInt& n) {
        BigInt v = -2 * a - 6 * n;
        return v >= 0 && v * v >= dd;
      };
      // ceiling of the larger critical point: smallest n with 6n + 2a >= sqrt(D)
      auto above_hi = [&](const BigInt& n) {
        BigInt v = 6 * n + 2 * a;
        return v >= 0 && v * v >= dd;
      };
      const BigInt sd = isqrt(dd);
      BigInt lo_crit = floor_div(-2 * a - sd, 6) + 1;
      while (!below_lo(lo_crit)) --lo_crit;
      while (below_lo(lo_crit + 1)) ++lo_crit;
      BigInt hi_crit = floor_div(-2 * a + sd, 6) - 1;
      while (!above_hi(hi_crit)) ++hi_crit;
      while (above_hi(hi_crit - 1)) --hi_crit;
      search(-bound, lo_crit, true);
      search(lo_crit + 1, hi_crit - 1, false);
      search(hi_crit, bound, true);
    }
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  return roots;
}

/// x-coordinates of the rational 2-torsion points: rational roots of
/// 4x^3 + b2 x^2 + 2 b4 x + b6.
inline std::vector<Rat> two_torsion_x(const WeierstrassModel& e) {
  const auto b = b_invariants(e);
  // With X = 4x the cubic becomes X^3 + b2 X^2 + 8 b4 X + 16 b6.
  std::vector<Rat> out;
  for (const auto& r : integer_roots_monic_cubic(b.b2, 8 * b.b4, 16 * b.b6)) out.emplace_back(r, 4);
  return out;
}

enum class TwoTorsion { Trivial, Z2, Z2xZ2 };

inline std::string to_string(TwoTorsion t) {
  switch (t) {
    case TwoTorsion::Trivial: return "trivial";
    case TwoTorsion::Z2: return "Z/2";
    case TwoTorsion::Z2xZ2: return "Z/2xZ/2";
  }
  return "?";
}

inline TwoTorsion two_torsion_structure(const WeierstrassModel& e) {
  if (b_invariants(e).singular()) throw std::domain_error("two_torsion_structure: singular model");
  switch (two_torsion_x(e).size()) {
    case 0: return TwoTorsion::Trivial;
    case 1: return TwoTorsion::Z2;
    default: return TwoTorsion::Z2xZ2;
  }
}

// ---------------------------------------------------------------------------
// Tate's algorithm

enum class Kodaira { I0, In, II, III, IV, I0star, Instar, IVstar, IIIstar, IIstar };

/// Number of irreducible components of the special fibre.
inline int component_count(Kodaira k, int n) {
  switch (k) {
    case Kodaira::I0: return 1;
    case Kodaira::In: return n;
    case Kodaira::II: return 1;
    case Kodaira::III: return 2;
    case Kodaira::IV: return 3;
    case Kodaira::I0star: return 5;
    case Kodaira::Instar: return 5 + n;
    case Kodaira::IVstar: return 7;
    case Kodaira::IIIstar: return 8;
    case Kodaira::IIstar: return 9;
  }
  return 0;
}

inline std::string kodaira_symbol(Kodaira k, int n) {
  switch (k) {
    case Kodaira::I0: return "I0";
    case Kodaira::In: return "I" + std::to_string(n);
    case Kodaira::II: return "II";
    case Kodaira::III: return "III";
    case Kodaira::IV: return "IV";
    case Kodaira::I0star: return "I0*";
    case Kodaira::Instar: return "I" + std::to_string(n) + "*";
    case Kodaira::IVstar: return "IV*";
    case Kodaira::IIIstar: return "III*";
    case Kodaira::IIstar: return "II*";
  }
  return "?";
}

struct TateResult {
  BigInt prime;
  Kodaira kodaira = Kodaira::I0;
  int n = 0;  ///< n of I_n / I_n*, otherwise 0
  int f = 0;  ///< conductor exponent
  int c = 1;  ///< Tamagawa number
  bool minimal = true;
  unsigned disc_valuation = 0;  ///< v_p of the minimal discriminant
  WeierstrassModel minimal_model;
  Transform to_minimal;  ///< input model -> minimal_model (the Tate-normalised one)

  std::string symbol() const { return kodaira_symbol(kodaira, n); }
  int components() const { return component_count(kodaira, n); }
};

namespace detail {

using PolyModP = std::vector<BigInt>;  // coefficients, lowest degree first

inline void trim(PolyModP& f) {
  while (!f.empty() && f.back() == 0) f.pop_back();
}

inline PolyModP reduce(PolyModP f, const BigInt& p) {
  for (auto& c : f) c = mod(c, p);
  trim(f);
  return f;
}

inline PolyModP poly_rem(PolyModP a, const PolyModP& b, const BigInt& p) {
  const BigInt lead_inv = invmod(b.back(), p);
  while (a.size() >= b.size()) {
    const BigInt q = a.back() * lead_inv % p;
    const std::size_t shift = a.size() - b.size();
    for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] = mod(a[shift + i] - q * b[i], p);
    trim(a);
  }
  return a;
}

inline PolyModP poly_gcd(PolyModP a, PolyModP b, const BigInt& p) {
  a = reduce(std::move(a), p);
  b = reduce(std::move(b), p);
  while (!b.empty()) {
    PolyModP r = poly_rem(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.empty()) {
    const BigInt inv = invmod(a.back(), p);
    for (auto& c : a) c = c * inv % p;
  }
  return a;
}

inline PolyModP derivative(const PolyModP& f, const BigInt& p) {
  PolyModP d;
  for (std::size_t i = 1; i < f.size(); ++i) d.push_back(mod(f[i] * BigInt(i), p));
  trim(d);
  return d;
}

inline PolyModP poly_mulmod(const PolyModP& a, const PolyModP& b, const PolyModP& m, const BigInt& p) {
  if (a.empty() || b.empty()) return {};
  PolyModP prod(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) prod[i + j] = (prod[i + j] + a[i] * b[j]) % p;
  }
  trim(prod);
  return poly_rem(std::move(prod), m, p);
}

/// Number of distinct roots in F_p of a nonzero polynomial f.
inline int count_roots_mod_p(PolyModP f, const BigInt& p) {
  f = reduce(std::move(f), p);
  if (f.size() <= 1) return 0;
  if (p < 50) {
    int count = 0;
    for (BigInt x = 0; x < p; ++x) {
      BigInt v = 0;
      for (std::size_t i = f.size(); i-- > 0;) v = (v * x + f[i]) % p;
      if (v == 0) ++count;
    }
    return count;
  }
  // deg gcd(f, T^p - T)
  PolyModP acc{1}, base{0, 1};
  base = poly_rem(base, f, p);
  for (BigInt e = p; e > 0; e >>= 1) {
    if (e & 1) acc = poly_mulmod(acc, base, f, p);
    base = poly_mulmod(base, base, f, p);
  }
  // acc = T^p mod f; subtract T
  if (acc.size() < 2) acc.resize(2);
  acc[1] = mod(acc[1] - 1, p);
  trim(acc);
  if (acc.empty()) return static_cast<int>(f.size()) - 1;
  return static_cast<int>(poly_gcd(f, acc, p).size()) - 1;
}

enum class RootShape { Distinct, Double, Triple };

// Classifies a monic cubic mod p; for Double/Triple also returns the repeated root.
inline std::pair<RootShape, BigInt> cubic_root_shape(const PolyModP& monic_cubic, const BigInt& p) {
  PolyModP f = reduce(monic_cubic, p);
  if (p <= 3) {
    // A repeated root is Galois-invariant, hence in F_p: count multiplicities directly.
    for (BigInt x = 0; x < p; ++x) {
      PolyModP q = f;
      int mult = 0;
      while (q.size() > 1) {
        // synthetic division by (T - x)
        PolyModP quot(q.size() - 1);
        BigInt carry = 0;
        for (std::size_t i = q.size(); i-- > 1;) {
          carry = mod(carry * x + q[i], p);
          quot[i - 1] = carry;
        }
        if (mod(carry * x + q[0], p) != 0) break;
        q = std::move(quot);
        ++mult;
      }
      if (mult == 2) return {RootShape::Double, x};
      if (mult == 3) return {RootShape::Triple, x};
    }
    return {RootShape::Distinct, 0};
  }
  PolyModP df = derivative(f, p);
  if (df.empty()) {
    // Only possible for p = 3: f = T^3 + c = (T + c)^3.
    return {RootShape::Triple, mod(-f[0], p)};
  }
  PolyModP g = poly_gcd(f, df, p);
  if (g.size() <= 1) return {RootShape::Distinct, 0};
  if (g.size() == 2) return {RootShape::Double, mod(-g[0], p)};
  // g = (T - rho)^2 = T^2 - 2 rho T + rho^2
  if (p == 2) return {RootShape::Triple, g[0]};
  return {RootShape::Triple, mod(-g[1] * invmod(2, p), p)};
}

struct QuadraticInfo {
  bool distinct = false;  ///< separable over the algebraic closure
  bool split = false;     ///< has a root in F_p
  BigInt double_root;     ///< the repeated root when !distinct
};

// a X^2 + b X + c with a != 0 mod p.
inline QuadraticInfo quadratic_mod_p(const BigInt& a, const BigInt& b, const BigInt& c, const BigInt& p) {
  QuadraticInfo q;
  if (p == 2) {
    q.distinct = mod(b, 2) != 0;
    int roots = 0;
    for (int x = 0; x < 2; ++x) {
      if (mod(a * x * x + b * x + c, 2) == 0) ++roots;
    }
    q.split = roots > 0;
    if (!q.distinct) q.double_root = mod(c, 2);  // x^2 == x on F_2
    return q;
  }
  const BigInt disc = mod(b * b - 4 * a * c, p);
  q.distinct = disc != 0;
  q.split = disc == 0 || jacobi(disc, p) == 1;
  if (!q.distinct) q.double_root = mod(-b * invmod(2 * a, p), p);
  return q;
}

inline unsigned val(const BigInt& x, const BigInt& p) {
  return x == 0 ? 1000000u : valuation(x, p);
}

inline void shift(WeierstrassModel& e, Transform& total, const Transform& step) {
  e = *to_integral(apply_transform(e, step));
  total = total.then(step);
}

// A lift of the singular point of E mod p.
inline std::pair<BigInt, BigInt> singular_point_mod_p(const WeierstrassModel& e, const BigInt& p) {
  if (p == 2) {
    for (int x = 0; x < 2; ++x) {
      for (int y = 0; y < 2; ++y) {
        BigInt fv = y * y + e.a1 * x * y + e.a3 * y - (x * x * x + e.a2 * x * x + e.a4 * x + e.a6);
        BigInt fx = e.a1 * y - 3 * x * x - 2 * e.a2 * x - e.a4;
        BigInt fy = 2 * y + e.a1 * x + e.a3;
        if (mod(fv, 2) == 0 && mod(fx, 2) == 0 && mod(fy, 2) == 0) return {x, y};
      }
    }
    throw std::logic_error("no singular point mod 2");
  }
  const auto b = b_invariants(e);
  // Repeated root of 4x^3 + b2 x^2 + 2 b4 x + b6, made monic.
  const BigInt inv4 = invmod(4, p);
  PolyModP g{mod(b.b6 * inv4, p), mod(2 * b.b4 * inv4, p), mod(b.b2 * inv4, p), 1};
  auto [shape, x0] = cubic_root_shape(g, p);
  if (shape == RootShape::Distinct) throw std::logic_error("no singular point mod p");
  BigInt y0 = mod(-(e.a1 * x0 + e.a3) * invmod(2, p), p);
  return {x0, y0};
}

}  // namespace detail

/// Tate's algorithm at the prime p. Non-minimal models are rescaled by u = p
/// and the algorithm restarts; `minimal` records whether the input was minimal.
inline TateResult tate_algorithm(const WeierstrassModel& input, const BigInt& p) {
  using detail::val;
  if (!is_prime(p)) throw std::domain_error("tate_algorithm: " + p.str() + " is not prime");
  if (b_invariants(input).singular()) throw std::domain_error("tate_algorithm: singular model");

  WeierstrassModel e = input;
  Transform total;
  bool minimal = true;
  const BigInt p2 = p * p;
  const BigInt p3 = p2 * p;
  const BigInt p4 = p3 * p;

  for (;;) {
    TateResult res;
    res.prime = p;
    const unsigned vd = val(b_invariants(e).disc, p);
    auto finish = [&](Kodaira k, int n, int f, int c) {
      res.kodaira = k;
      res.n = n;
      res.f = f;
      res.c = c;
      res.minimal = minimal;
      res.disc_valuation = vd;
      res.minimal_model = e;
      res.to_minimal = total;
      return res;
    };

    if (vd == 0) return finish(Kodaira::I0, 0, 0, 1);

    auto [x0, y0] = detail::singular_point_mod_p(e, p);
    detail::shift(e, total, {1, Rat(x0), 0, Rat(y0)});
    if (e.a3 % p != 0 || e.a4 % p != 0 || e.a6 % p != 0) throw std::logic_error("tate: singular point not at origin");

    auto b = b_invariants(e);
    if (b.b2 % p != 0) {
      const bool split = detail::quadratic_mod_p(1, e.a1, -e.a2, p).split;
      const int n = static_cast<int>(vd);
      return finish(Kodaira::In, n, 1, split ? n : (n % 2 ? 1 : 2));
    }
    if (val(e.a6, p) < 2) return finish(Kodaira::II, 0, static_cast<int>(vd), 1);
    if (val(b.b8, p) < 3) return finish(Kodaira::III, 0, static_cast<int>(vd) - 1, 2);
    if (val(b.b6, p) < 3) {
      const bool split = detail::quadratic_mod_p(1, e.a3 / p, -e.a6 / p2, p).split;
      return finish(Kodaira::IV, 0, static_cast<int>(vd) - 2, split ? 3 : 1);
    }

    // Make p | a1, a2; p^2 | a3, a4; p^3 | a6.
    BigInt s, t;
    if (p == 2) {
      s = mod(e.a2, 2);
      t = 2 * mod(e.a6 / 4, 2);
    } else {
      const BigInt half = invmod(2, p);
      s = mod(-e.a1 * half, p);
      t = mod(-e.a3 * half, p2);
    }
    detail::shift(e, total, {1, 0, Rat(s), Rat(t)});
    if (e.a1 % p != 0 || e.a2 % p != 0 || e.a3 % p2 != 0 || e.a4 % p2 != 0 || e.a6 % p3 != 0) {
      throw std::logic_error("tate: step 6 normalisation failed");
    }

    const detail::PolyModP cubic{e.a6 / p3, e.a4 / p2, e.a2 / p, 1};
    auto [shape, rho] = detail::cubic_root_shape(cubic, p);

    if (shape == detail::RootShape::Distinct) {
      return finish(Kodaira::I0star, 0, static_cast<int>(vd) - 4, 1 + detail::count_roots_mod_p(cubic, p));
    }

    if (shape == detail::RootShape::Double) {
      detail::shift(e, total, {1, Rat(rho * p), 0, 0});
      for (int n = 1;; ++n) {
        detail::QuadraticInfo q;
        if (n % 2 == 1) {
          const BigInt my = pow(p, static_cast<unsigned>((n + 3) / 2));
          const BigInt mx = pow(p, static_cast<unsigned>(n + 3));
          q = detail::quadratic_mod_p(1, e.a3 / my, -e.a6 / mx, p);
          if (!q.distinct) {
            detail::shift(e, total, {1, 0, 0, Rat(q.double_root * my)});
            continue;
          }
        } else {
          const BigInt m4 = pow(p, static_cast<unsigned>((n + 4) / 2));
          const BigInt m6 = pow(p, static_cast<unsigned>(n + 3));
          q = detail::quadratic_mod_p(e.a2 / p, e.a4 / m4, e.a6 / m6, p);
          if (!q.distinct) {
            detail::shift(e, total, {1, Rat(q.double_root * pow(p, static_cast<unsigned>((n + 2) / 2))), 0, 0});
            continue;
          }
        }
        return finish(Kodaira::Instar, n, static_cast<int>(vd) - 4 - n, q.split ? 4 : 2);
      }
    }

    // Triple root.
    detail::shift(e, total, {1, Rat(rho * p), 0, 0});
    if (e.a2 % p2 != 0 || e.a4 % p3 != 0 || e.a6 % p4 != 0) throw std::logic_error("tate: triple root normalisation failed");
    auto q = detail::quadratic_mod_p(1, e.a3 / p2, -e.a6 / p4, p);
    if (q.distinct) return finish(Kodaira::IVstar, 0, static_cast<int>(vd) - 6, q.split ? 3 : 1);
    detail::shift(e, total, {1, 0, 0, Rat(q.double_root * p2)});
    if (val(e.a4, p) < 4) return finish(Kodaira::IIIstar, 0, static_cast<int>(vd) - 7, 2);
    if (val(e.a6, p) < 6) return finish(Kodaira::IIstar, 0, static_cast<int>(vd) - 8, 1);

    // Non-minimal: divide out u = p and start over.
    detail::shift(e, total, Transform::scaling(Rat(p)));
    minimal = false;
  }
}

/// Tate data at every prime dividing the discriminant, in increasing prime order.
inline std::vector<TateResult> local_data(const WeierstrassModel& e) {
  const auto disc = b_invariants(e).disc;
  if (disc == 0) throw std::domain_error("local_data: singular model");
  std::vector<TateResult> out;
  for (const auto& t : factor(abs(disc)).terms) out.push_back(tate_algorithm(e, t.prime));
  return out;
}

/// prod p^{f_p} over the primes of bad reduction.
inline BigInt conductor(const WeierstrassModel& e) {
  BigInt n = 1;
  for (const auto& r : local_data(e)) n *= pow(r.prime, static_cast<unsigned>(r.f));
  return n;
}

/// Discriminant of a global minimal model (Z has class number one).
inline BigInt minimal_discriminant(const WeierstrassModel& e) {
  BigInt disc = b_invariants(e).disc;
  for (const auto& r : local_data(e)) {
    const unsigned v = valuation(disc, r.prime);
    disc /= pow(r.prime, v - r.disc_valuation);
  }
  return disc;
}

// ---------------------------------------------------------------------------
// Reduction mod 2

/// #E(F_2) of a model with good reduction at 2 (the model itself must reduce smoothly).
inline int points_mod_2(const WeierstrassModel& e) {
  int count = 1;  // point at infinity
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      BigInt v = y * y + e.a1 * x * y + e.a3 * y - (x * x * x + e.a2 * x * x + e.a4 * x + e.a6);
      if (mod(v, 2) == 0) ++count;
    }
  }
  return count;
}

/// Whether a torsion subgroup of order `claimed_order` that injects under
/// reduction mod 2 fits in E(F_2), i.e. claimed_order | #E(F_2). Requires good
/// reduction at 2; the count uses a model that is minimal at 2.
inline bool hasse_bound_check_at_2(const WeierstrassModel& e, const BigInt& claimed_order) {
  if (claimed_order < 1) throw std::invalid_argument("claimed torsion order must be positive");
  const auto local = tate_algorithm(e, 2);
  if (local.kodaira != Kodaira::I0) throw std::domain_error("hasse_bound_check_at_2: bad reduction at 2");
  return BigInt(points_mod_2(local.minimal_model)) % claimed_order == 0;
}

}  // namespace cuspgate

#pragma once

// Cusps of X0(N) for square-free N, the tensor isomorphism between eta
// exponent vectors and cusp divisors, and the principality / order / group
// structure computations built on it.
//
// Indexing: a level N = p_1 ... p_t has 2^t cusps. Slot `mask` (bit i set iff
// p_i divides the label) holds the cusp P_r with r = prod of those primes, and
// P_r is the cusp with denominator r, i.e. the class of 1/r. With this
// labelling the Lambda map below agrees exactly with the order formula for
// eta_M at cusps (see eta_quotient.hpp), and w_r(P_1) = P_r.

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cuspgate/core_arith.hpp"
#include "cuspgate/lattice.hpp"

namespace cuspgate {

/// Square-free N > 1 with its increasing prime factors.
class SquarefreeLevel {
 public:
  explicit SquarefreeLevel(std::uint64_t n) : n_(n) {
    if (n < 2) throw std::domain_error("level must be > 1");
    auto f = factor(BigInt(n));
    if (!f.squarefree()) throw std::domain_error("level " + std::to_string(n) + " is not square-free");
    for (const auto& t : f.terms) primes_.push_back(static_cast<std::uint64_t>(t.prime));
    if (primes_.size() > kMaxPrimes) throw std::domain_error("level has too many prime factors");
  }

  static constexpr std::size_t kMaxPrimes = 6;

  std::uint64_t N() const { return n_; }
  const std::vector<std::uint64_t>& primes() const { return primes_; }
  std::size_t t() const { return primes_.size(); }
  std::size_t cusp_count() const { return std::size_t{1} << primes_.size(); }

  /// Divisor of N encoded by a slot mask.
  std::uint64_t divisor(std::size_t mask) const {
    std::uint64_t r = 1;
    for (std::size_t i = 0; i < primes_.size(); ++i) {
      if (mask >> i & 1u) r *= primes_[i];
    }
    return r;
  }

  /// Slot mask of a divisor r | N; throws if r does not divide N.
  std::size_t mask_of(std::uint64_t r) const {
    if (r == 0 || n_ % r != 0) throw std::domain_error(std::to_string(r) + " does not divide " + std::to_string(n_));
    std::size_t mask = 0;
    for (std::size_t i = 0; i < primes_.size(); ++i) {
      if (r % primes_[i] == 0) mask |= std::size_t{1} << i;
    }
    return mask;
  }

  /// Divisors of N in increasing order.
  std::vector<std::uint64_t> divisors() const {
    std::vector<std::uint64_t> out;
    for (std::size_t m = 0; m < cusp_count(); ++m) out.push_back(divisor(m));
    std::sort(out.begin(), out.end());
    return out;
  }

  friend bool operator==(const SquarefreeLevel& a, const SquarefreeLevel& b) { return a.n_ == b.n_; }

 private:
  std::uint64_t n_;
  std::vector<std::uint64_t> primes_;
};

/// A rational vector with one entry per divisor of a square-free level.
/// The tag keeps cusp divisors and eta exponent vectors apart.
template <class Tag>
class LevelVector {
 public:
  explicit LevelVector(SquarefreeLevel level) : level_(std::move(level)), coeffs_(level_.cusp_count()) {}
  LevelVector(SquarefreeLevel level, std::vector<Rat> by_mask) : level_(std::move(level)), coeffs_(std::move(by_mask)) {
    if (coeffs_.size() != level_.cusp_count()) throw std::invalid_argument("coefficient count must be 2^t");
  }

  /// Builds from coefficients listed in increasing divisor order.
  static LevelVector from_divisor_order(const SquarefreeLevel& level, std::span<const Rat> values) {
    if (values.size() != level.cusp_count()) throw std::invalid_argument("coefficient count must be 2^t");
    LevelVector v(level);
    auto divs = level.divisors();
    for (std::size_t i = 0; i < divs.size(); ++i) v[level.mask_of(divs[i])] = values[i];
    return v;
  }

  const SquarefreeLevel& level() const { return level_; }
  std::size_t size() const { return coeffs_.size(); }

  Rat& operator[](std::size_t mask) { return coeffs_[mask]; }
  const Rat& operator[](std::size_t mask) const { return coeffs_[mask]; }

  /// Coefficient at divisor label r.
  const Rat& at(std::uint64_t r) const { return coeffs_[level_.mask_of(r)]; }
  Rat& at(std::uint64_t r) { return coeffs_[level_.mask_of(r)]; }

  const std::vector<Rat>& by_mask() const { return coeffs_; }

  /// Coefficients listed in increasing divisor order.
  std::vector<Rat> in_divisor_order() const {
    std::vector<Rat> out;
    for (auto r : level_.divisors()) out.push_back(at(r));
    return out;
  }

  Rat degree() const {
    Rat s;
    for (const auto& c : coeffs_) s += c;
    return s;
  }

  bool is_integral() const {
    for (const auto& c : coeffs_) {
      if (!c.is_integer()) return false;
    }
    return true;
  }

  bool is_zero() const {
    for (const auto& c : coeffs_) {
      if (!c.is_zero()) return false;
    }
    return true;
  }

  LevelVector& operator+=(const LevelVector& o) {
    check_level(o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
  }
  LevelVector& operator-=(const LevelVector& o) {
    check_level(o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
    return *this;
  }
  LevelVector& operator*=(const Rat& k) {
    for (auto& c : coeffs_) c *= k;
    return *this;
  }
  friend LevelVector operator+(LevelVector a, const LevelVector& b) { return a += b; }
  friend LevelVector operator-(LevelVector a, const LevelVector& b) { return a -= b; }
  friend LevelVector operator*(const Rat& k, LevelVector a) { return a *= k; }

  friend bool operator==(const LevelVector& a, const LevelVector& b) {
    return a.level_ == b.level_ && a.coeffs_ == b.coeffs_;
  }

  std::string str() const {
    std::string s;
    for (auto r : level_.divisors()) {
      const Rat& c = at(r);
      if (c.is_zero()) continue;
      if (!s.empty()) s += " ";
      s += (c.sign() < 0 ? "- " : (s.empty() ? "" : "+ "));
      Rat mag = c.sign() < 0 ? -c : c;
      if (mag != Rat(1)) s += mag.str() + "*";
      s += Tag::symbol() + std::to_string(r);
    }
    return s.empty() ? "0" : s;
  }

 private:
  void check_level(const LevelVector& o) const {
    if (!(level_ == o.level_)) throw std::invalid_argument("level mismatch");
  }

  SquarefreeLevel level_;
  std::vector<Rat> coeffs_;
};

struct CuspTag {
  static std::string symbol() { return "P"; }
};
struct EtaTag {
  static std::string symbol() { return "eta"; }
};

/// Rational combination of the cusps P_r.
using CuspDivisor = LevelVector<CuspTag>;
/// Exponent family (r_delta) of an eta quotient prod eta_delta^{r_delta}.
using EtaVector = LevelVector<EtaTag>;

/// The divisor P_r as a vector.
inline CuspDivisor cusp(const SquarefreeLevel& level, std::uint64_t r) {
  CuspDivisor d(level);
  d.at(r) = 1;
  return d;
}

namespace detail {

// Applies the 2x2 block [[a, b], [b, a]] on every tensor axis i, with (a, b)
// supplied per prime.
template <class From, class To, class Blocks>
LevelVector<To> apply_symmetric_tensor(const LevelVector<From>& v, Blocks&& block_for_prime, const Rat& scale) {
  const auto& level = v.level();
  std::vector<Rat> x = v.by_mask();
  for (std::size_t i = 0; i < level.t(); ++i) {
    auto [a, b] = block_for_prime(level.primes()[i]);
    const std::size_t bit = std::size_t{1} << i;
    for (std::size_t m = 0; m < x.size(); ++m) {
      if (m & bit) continue;
      Rat lo = x[m];
      Rat hi = x[m | bit];
      x[m] = a * lo + b * hi;
      x[m | bit] = b * lo + a * hi;
    }
  }
  for (auto& c : x) c *= scale;
  return LevelVector<To>(level, std::move(x));
}

// Contraction of an exponent vector against (1,1) x ... x (0,1) x ... x (1,1)
// with (0,1) at axis i: the sum of entries whose label is divisible by p_i.
inline Rat prime_contraction(const EtaVector& v, std::size_t i) {
  Rat s;
  for (std::size_t m = 0; m < v.size(); ++m) {
    if (m >> i & 1u) s += v[m];
  }
  return s;
}

inline bool is_even_integer(const Rat& x) { return x.is_integer() && x.numerator() % 2 == 0; }

}  // namespace detail

/// (1/24) (Lambda_1 x ... x Lambda_t)(v) with Lambda_k = [[p_k, 1], [1, p_k]].
inline CuspDivisor lambda_forward(const EtaVector& v) {
  return detail::apply_symmetric_tensor<EtaTag, CuspTag>(
      v, [](std::uint64_t p) { return std::pair<Rat, Rat>{Rat(BigInt(p)), Rat(1)}; }, Rat(1, 24));
}

/// Exact inverse of lambda_forward: 24 (x) Lambda_k^{-1}.
inline EtaVector lambda_inverse(const CuspDivisor& w) {
  return detail::apply_symmetric_tensor<CuspTag, EtaTag>(
      w,
      [](std::uint64_t p) {
        BigInt d = BigInt(p) * p - 1;
        return std::pair<Rat, Rat>{Rat(BigInt(p), d), Rat(-1, d)};
      },
      Rat(24));
}

/// Whether an integral cusp divisor is linearly equivalent to zero:
/// Lambda^{-1} w integral, degree 0, and every prime contraction even.
inline bool is_principal(const CuspDivisor& w) {
  if (!w.is_integral()) throw std::invalid_argument("is_principal: divisor must be integral");
  if (!w.degree().is_zero()) return false;
  EtaVector v = lambda_inverse(w);
  if (!v.is_integral()) return false;
  for (std::size_t i = 0; i < w.level().t(); ++i) {
    if (!detail::is_even_integer(detail::prime_contraction(v, i))) return false;
  }
  return true;
}

/// Order of an integral degree-0 divisor class in the cuspidal group.
inline BigInt divisor_order(const CuspDivisor& w) {
  if (!w.is_integral()) throw std::invalid_argument("divisor_order: divisor must be integral");
  if (!w.degree().is_zero()) throw std::invalid_argument("divisor_order: divisor must have degree 0");
  EtaVector v = lambda_inverse(w);
  BigInt n0 = 1;
  for (const auto& c : v.by_mask()) n0 = lcm(n0, c.denominator());
  for (std::size_t i = 0; i < w.level().t(); ++i) {
    Rat c = detail::prime_contraction(v, i) * Rat(n0);
    if (!detail::is_even_integer(c)) return 2 * n0;
  }
  return n0;
}

/// z = sum_{d | N} (prod_{p_k | d} b_k) P_d for a sign vector b aligned with the primes.
inline CuspDivisor ogg_divisor(const SquarefreeLevel& level, std::span<const int> signs) {
  if (signs.size() != level.t()) throw std::invalid_argument("sign vector length must equal the number of primes");
  CuspDivisor z(level);
  for (std::size_t m = 0; m < z.size(); ++m) {
    int s = 1;
    for (std::size_t i = 0; i < level.t(); ++i) {
      if (signs[i] != 1 && signs[i] != -1) throw std::invalid_argument("signs must be +1 or -1");
      if (m >> i & 1u) s *= signs[i];
    }
    z[m] = s;
  }
  return z;
}

/// Closed-form order of ogg_divisor(level, signs): num((p-1)/12) at prime
/// level, num(prod(p_k + b_k)/24) otherwise. Requires some b_k = -1.
inline BigInt ogg_order(const SquarefreeLevel& level, std::span<const int> signs) {
  if (signs.size() != level.t()) throw std::invalid_argument("sign vector length must equal the number of primes");
  bool any_minus = false;
  for (int s : signs) {
    if (s != 1 && s != -1) throw std::invalid_argument("signs must be +1 or -1");
    any_minus = any_minus || s == -1;
  }
  if (!any_minus) throw std::invalid_argument("ogg_order: at least one sign must be -1");
  if (level.t() == 1) return num(Rat(BigInt(level.primes()[0]) - 1, 12));
  BigInt prod = 1;
  for (std::size_t i = 0; i < level.t(); ++i) prod *= BigInt(level.primes()[i]) + signs[i];
  return num(Rat(prod, 24));
}

namespace detail {

// Principal degree-0 divisors in the coordinates x_j of sum_j x_j (P_{d_j} - P_1),
// j over nonzero masks, as a basis of a full-rank sublattice of Z^{2^t - 1}.
inline IntMatrix principal_sublattice(const SquarefreeLevel& level) {
  const std::size_t n = level.cusp_count();
  const std::size_t dim = n - 1;
  // Column j of `image` is Lambda^{-1}(P_{d_j} - P_1) scaled to integers.
  BigInt den = 1;
  std::vector<EtaVector> cols;
  for (std::size_t j = 1; j < n; ++j) {
    CuspDivisor e(level);
    e[j] = 1;
    e[0] = -1;
    cols.push_back(lambda_inverse(e));
    for (const auto& c : cols.back().by_mask()) den = lcm(den, c.denominator());
  }
  // Conditions: den * v == 0 mod den (integrality) and den * contraction_i == 0 mod 2 den.
  const std::size_t conditions = n + level.t();
  IntMatrix system(conditions, dim + conditions);
  for (std::size_t j = 0; j < dim; ++j) {
    for (std::size_t m = 0; m < n; ++m) {
      system(m, j) = (cols[j][m] * Rat(den)).numerator();
    }
    for (std::size_t i = 0; i < level.t(); ++i) {
      system(n + i, j) = (prime_contraction(cols[j], i) * Rat(den)).numerator();
    }
  }
  for (std::size_t m = 0; m < n; ++m) system(m, dim + m) = den;
  for (std::size_t i = 0; i < level.t(); ++i) system(n + i, dim + n + i) = 2 * den;
  IntMatrix kernel = kernel_basis(std::move(system));
  IntMatrix basis(dim, kernel.cols());
  for (std::size_t c = 0; c < kernel.cols(); ++c) {
    for (std::size_t r = 0; r < dim; ++r) basis(r, c) = kernel(r, c);
  }
  return basis;
}

}  // namespace detail

/// Invariant factors d_1 | d_2 | ... (all > 1) of the cuspidal group
/// (degree-0 cusp divisors modulo principal ones). Empty for the trivial group.
inline std::vector<BigInt> cuspidal_group_structure(const SquarefreeLevel& level) {
  std::vector<BigInt> out;
  for (auto& d : smith_invariants(detail::principal_sublattice(level))) {
    if (d != 1) out.push_back(std::move(d));
  }
  return out;
}

/// Index of the principal sublattice in the degree-0 lattice, via a determinant.
inline BigInt cuspidal_group_order(const SquarefreeLevel& level) {
  return abs(determinant(detail::principal_sublattice(level)));
}

/// Pushforward along the degeneracy map X0(N) -> X0(N/2): P_{2s} and P_s both
/// map to P_s. Requires N even with N/2 > 1.
inline CuspDivisor apply_2_old_projection(const CuspDivisor& w) {
  const auto& level = w.level();
  if (level.N() % 2 != 0) throw std::domain_error("2-old projection needs an even level");
  if (level.N() == 2) throw std::domain_error("2-old projection: level 1 has no cusp lattice");
  SquarefreeLevel half(level.N() / 2);
  CuspDivisor out(half);
  for (std::size_t m = 0; m < w.size(); ++m) {
    std::uint64_t r = level.divisor(m);
    if (r % 2 == 0) r /= 2;
    out.at(r) += w[m];
  }
  return out;
}

}  // namespace cuspgate

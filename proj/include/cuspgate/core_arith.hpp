#pragma once

// Exact integer and rational arithmetic plus the small number-theoretic
// primitives (valuations, square tests, quadratic residues, factoring)
// shared by every other cuspgate header.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace cuspgate {

using BigInt = boost::multiprecision::cpp_int;

inline BigInt abs(const BigInt& x) { return x < 0 ? BigInt(-x) : x; }

inline BigInt gcd(const BigInt& a, const BigInt& b) {
  return boost::multiprecision::gcd(abs(a), abs(b));
}

inline BigInt lcm(const BigInt& a, const BigInt& b) {
  if (a == 0 || b == 0) return 0;
  return abs(a) / gcd(a, b) * abs(b);
}

/// Floor division (rounds toward negative infinity), b != 0.
inline BigInt floor_div(const BigInt& a, const BigInt& b) {
  BigInt q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

/// Least nonnegative residue of a modulo m (m > 0).
inline BigInt mod(const BigInt& a, const BigInt& m) {
  BigInt r = a % m;
  if (r < 0) r += m;
  return r;
}

inline BigInt pow(BigInt base, unsigned e) {
  BigInt result = 1;
  while (e) {
    if (e & 1u) result *= base;
    e >>= 1;
    if (e) base *= base;
  }
  return result;
}

inline BigInt powmod(BigInt base, BigInt e, const BigInt& m) {
  BigInt result = 1 % m;
  base = mod(base, m);
  while (e > 0) {
    if (e & 1) result = result * base % m;
    e >>= 1;
    base = base * base % m;
  }
  return result;
}

/// Inverse of a modulo m; throws std::domain_error if gcd(a, m) != 1.
inline BigInt invmod(const BigInt& a, const BigInt& m) {
  BigInt r0 = mod(a, m), r1 = m, s0 = 1, s1 = 0;
  while (r1 != 0) {
    BigInt q = r0 / r1;
    BigInt tmp = r0 - q * r1;
    r0 = r1;
    r1 = tmp;
    tmp = s0 - q * s1;
    s0 = s1;
    s1 = tmp;
  }
  if (r0 != 1) throw std::domain_error("invmod: not invertible");
  return mod(s0, m);
}

inline std::string to_string(const BigInt& x) { return x.str(); }

/// Parses a decimal integer with optional sign; throws std::invalid_argument.
inline BigInt parse_bigint(std::string_view text) {
  std::string s(text);
  auto first = s.find_first_not_of(" \t");
  auto last = s.find_last_not_of(" \t");
  if (first == std::string::npos) throw std::invalid_argument("empty integer");
  s = s.substr(first, last - first + 1);
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) throw std::invalid_argument("malformed integer: " + s);
  for (std::size_t j = i; j < s.size(); ++j) {
    if (s[j] < '0' || s[j] > '9') throw std::invalid_argument("malformed integer: " + s);
  }
  BigInt v(s.substr(i));
  return s[0] == '-' ? BigInt(-v) : v;
}

// ---------------------------------------------------------------------------
// Rat

/// Exact rational number, always in lowest terms with positive denominator.
class Rat {
 public:
  Rat() : num_(0), den_(1) {}
  Rat(BigInt n) : num_(std::move(n)), den_(1) {}  // NOLINT(google-explicit-constructor)
  Rat(long long n) : num_(n), den_(1) {}           // NOLINT(google-explicit-constructor)
  Rat(int n) : num_(n), den_(1) {}                 // NOLINT(google-explicit-constructor)
  Rat(BigInt n, BigInt d) : num_(std::move(n)), den_(std::move(d)) {
    if (den_ == 0) throw std::domain_error("Rat: zero denominator");
    normalize();
  }

  const BigInt& numerator() const { return num_; }
  const BigInt& denominator() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }
  int sign() const { return num_ < 0 ? -1 : (num_ > 0 ? 1 : 0); }

  Rat inverse() const {
    if (num_ == 0) throw std::domain_error("Rat: inverse of zero");
    return Rat(den_, num_);
  }

  Rat operator-() const { return Rat(-num_, den_, Normalized{}); }

  Rat& operator+=(const Rat& o) {
    if (den_ == o.den_) {
      num_ += o.num_;
    } else {
      num_ = num_ * o.den_ + o.num_ * den_;
      den_ *= o.den_;
    }
    normalize();
    return *this;
  }
  Rat& operator-=(const Rat& o) { return *this += -o; }
  Rat& operator*=(const Rat& o) {
    num_ *= o.num_;
    den_ *= o.den_;
    normalize();
    return *this;
  }
  Rat& operator/=(const Rat& o) { return *this *= o.inverse(); }

  friend Rat operator+(Rat a, const Rat& b) { return a += b; }
  friend Rat operator-(Rat a, const Rat& b) { return a -= b; }
  friend Rat operator*(Rat a, const Rat& b) { return a *= b; }
  friend Rat operator/(Rat a, const Rat& b) { return a /= b; }

  friend bool operator==(const Rat& a, const Rat& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rat& a, const Rat& b) {
    BigInt lhs = a.num_ * b.den_;
    BigInt rhs = b.num_ * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  std::string str() const {
    return den_ == 1 ? num_.str() : num_.str() + "/" + den_.str();
  }
  friend std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.str(); }

  /// Parses "p", "-p" or "p/q".
  static Rat parse(std::string_view text) {
    auto slash = text.find('/');
    if (slash == std::string_view::npos) return Rat(parse_bigint(text));
    return Rat(parse_bigint(text.substr(0, slash)), parse_bigint(text.substr(slash + 1)));
  }

 private:
  struct Normalized {};
  Rat(BigInt n, BigInt d, Normalized) : num_(std::move(n)), den_(std::move(d)) {}

  void normalize() {
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    if (num_ == 0) {
      den_ = 1;
      return;
    }
    BigInt g = gcd(num_, den_);
    if (g != 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  BigInt num_;
  BigInt den_;
};

/// |numerator| of x in lowest terms; num(0) == 0.
inline BigInt num(const Rat& x) { return abs(x.numerator()); }

// ---------------------------------------------------------------------------
// Valuations, squares, residues

/// Largest e with p^e | n. Throws for n == 0 or p < 2.
inline unsigned valuation(BigInt n, const BigInt& p) {
  if (n == 0) throw std::domain_error("valuation of zero");
  if (p < 2) throw std::domain_error("valuation base must be >= 2");
  unsigned e = 0;
  while (n % p == 0) {
    n /= p;
    ++e;
  }
  return e;
}

/// floor(sqrt(n)) for n >= 0.
inline BigInt isqrt(const BigInt& n) {
  if (n < 0) throw std::domain_error("isqrt of negative");
  return boost::multiprecision::sqrt(n);
}

/// Integer square root when n is a perfect square; negative n is never a square.
inline std::optional<BigInt> is_square(const BigInt& n) {
  if (n < 0) return std::nullopt;
  BigInt r = isqrt(n);
  if (r * r == n) return r;
  return std::nullopt;
}

/// Square root of a rational when it is the square of a rational.
inline std::optional<Rat> rational_sqrt(const Rat& x) {
  auto n = is_square(x.numerator());
  if (!n) return std::nullopt;
  auto d = is_square(x.denominator());
  if (!d) return std::nullopt;
  return Rat(*n, *d);
}

/// Jacobi symbol (a/n) for odd positive n.
inline int jacobi(BigInt a, BigInt n) {
  if (n <= 0 || n % 2 == 0) throw std::domain_error("jacobi: n must be odd positive");
  a = mod(a, n);
  int result = 1;
  while (a != 0) {
    while (a % 2 == 0) {
      a /= 2;
      int r = static_cast<int>(n % 8);
      if (r == 3 || r == 5) result = -result;
    }
    std::swap(a, n);
    if (a % 4 == 3 && n % 4 == 3) result = -result;
    a %= n;
  }
  return n == 1 ? result : 0;
}

// ---------------------------------------------------------------------------
// Primality and factoring

namespace detail {

inline constexpr unsigned kSmallPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23,
                                            29, 31, 37, 41, 43, 47, 53, 59, 61};

inline bool miller_rabin_round(const BigInt& n, const BigInt& d, unsigned s, const BigInt& a) {
  BigInt x = powmod(a, d, n);
  if (x == 1 || x == n - 1) return true;
  for (unsigned r = 1; r < s; ++r) {
    x = x * x % n;
    if (x == n - 1) return true;
  }
  return false;
}

}  // namespace detail

/// Miller-Rabin with the first 13 prime bases: deterministic for n < 3.3e24,
/// and the extra bases make larger inputs a strong probable-prime test.
inline bool is_prime(const BigInt& n) {
  if (n < 2) return false;
  for (unsigned p : detail::kSmallPrimes) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  BigInt d = n - 1;
  unsigned s = 0;
  while (d % 2 == 0) {
    d /= 2;
    ++s;
  }
  for (unsigned p : detail::kSmallPrimes) {
    if (!detail::miller_rabin_round(n, d, s, BigInt(p))) return false;
  }
  return true;
}

struct PrimePower {
  BigInt prime;
  unsigned exponent = 0;
  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// Prime factorization with strictly increasing primes.
struct Factorization {
  std::vector<PrimePower> terms;

  BigInt value() const {
    BigInt v = 1;
    for (const auto& t : terms) v *= pow(t.prime, t.exponent);
    return v;
  }
  bool squarefree() const {
    return std::all_of(terms.begin(), terms.end(), [](const PrimePower& t) { return t.exponent == 1; });
  }
  std::vector<BigInt> primes() const {
    std::vector<BigInt> out;
    for (const auto& t : terms) out.push_back(t.prime);
    return out;
  }
  friend bool operator==(const Factorization&, const Factorization&) = default;
};

namespace detail {

// Brent's variant of Pollard rho; n composite, odd, not a prime power of a small prime.
inline BigInt pollard_brent(const BigInt& n) {
  for (BigInt c = 1;; ++c) {
    BigInt y = 2, x = 2, g = 1, q = 1, ys;
    auto f = [&](const BigInt& v) { return (v * v + c) % n; };
    std::uint64_t r = 1;
    const std::uint64_t m = 64;
    while (g == 1) {
      x = y;
      for (std::uint64_t i = 0; i < r; ++i) y = f(y);
      std::uint64_t k = 0;
      while (k < r && g == 1) {
        ys = y;
        for (std::uint64_t i = 0; i < std::min(m, r - k); ++i) {
          y = f(y);
          q = q * abs(x - y) % n;
        }
        g = gcd(q, n);
        k += m;
      }
      r *= 2;
    }
    if (g == n) {
      do {
        ys = f(ys);
        g = gcd(abs(x - ys), n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

inline void factor_into(const BigInt& n, std::vector<BigInt>& out) {
  if (n == 1) return;
  if (is_prime(n)) {
    out.push_back(n);
    return;
  }
  if (auto r = is_square(n)) {
    factor_into(*r, out);
    factor_into(*r, out);
    return;
  }
  BigInt d = pollard_brent(n);
  factor_into(d, out);
  factor_into(n / d, out);
}

}  // namespace detail

/// Factors n >= 1. Trial division to 2^16, then Pollard-Brent rho.
inline Factorization factor(BigInt n) {
  if (n < 1) throw std::domain_error("factor: n must be positive");
  std::vector<BigInt> primes;
  for (unsigned p = 2; p < 65536 && BigInt(p) * p <= n; p += (p == 2 ? 1 : 2)) {
    while (n % p == 0) {
      primes.emplace_back(p);
      n /= p;
    }
  }
  if (n > 1) detail::factor_into(n, primes);
  std::sort(primes.begin(), primes.end());
  Factorization f;
  for (const auto& p : primes) {
    if (!f.terms.empty() && f.terms.back().prime == p) {
      ++f.terms.back().exponent;
    } else {
      f.terms.push_back({p, 1});
    }
  }
  return f;
}

inline bool is_squarefree(const BigInt& n) { return n >= 1 && factor(n).squarefree(); }

/// Whether x^2 == a (mod m) has a solution; m == 1 is vacuously true.
inline bool is_qr(const BigInt& a, const BigInt& m) {
  if (m < 1) throw std::domain_error("is_qr: modulus must be positive");
  if (m == 1) return true;
  for (const auto& [p, e] : factor(m).terms) {
    BigInt pe = pow(p, e);
    BigInt r = mod(a, pe);
    if (r == 0) continue;
    unsigned v = valuation(r, p);
    if (v % 2 != 0) return false;
    BigInt u = r / pow(p, v);
    unsigned k = e - v;
    if (p == 2) {
      if (k == 2 && u % 4 != 1) return false;
      if (k >= 3 && u % 8 != 1) return false;
    } else if (jacobi(u, p) != 1) {
      return false;
    }
  }
  return true;
}

/// Positive divisors of n in increasing order.
inline std::vector<BigInt> divisors(const BigInt& n) {
  std::vector<BigInt> out{1};
  for (const auto& [p, e] : factor(n).terms) {
    const std::size_t base = out.size();
    BigInt pk = 1;
    for (unsigned k = 1; k <= e; ++k) {
      pk *= p;
      for (std::size_t i = 0; i < base; ++i) out.push_back(out[i] * pk);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// If n = p^k for a prime p and k >= 1, returns {p, k}.
inline std::optional<PrimePower> as_prime_power(const BigInt& n) {
  if (n < 2) return std::nullopt;
  auto f = factor(n);
  if (f.terms.size() != 1) return std::nullopt;
  return f.terms.front();
}

}  // namespace cuspgate

#pragma once

// Atkin-Lehner involutions w_r on the cusps of X0(N), their fixed-point
// criterion, the sign constraints they impose on an optimal quotient with odd
// congruence number, and expansion of products of (1 +- w) operators.

#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "cuspgate/core_arith.hpp"
#include "cuspgate/cusp_lattice.hpp"

namespace cuspgate {

struct ALElement {
  SquarefreeLevel level;
  std::uint64_t r;

  ALElement(SquarefreeLevel lvl, std::uint64_t rr) : level(std::move(lvl)), r(rr) {
    level.mask_of(r);  // validates r | N
  }
};

/// w_s(P_r) = P_{s r / gcd(s, r)^2}.
inline std::uint64_t al_act_on_cusp(const ALElement& w, std::uint64_t r) {
  w.level.mask_of(r);
  const std::uint64_t g = std::gcd(w.r, r);
  return (w.r / g) * (r / g);
}

/// w_r has a fixed point on X0(N) iff -p is a square modulo N/r for every prime p | r.
inline bool al_fixed_point_exists(const ALElement& w) {
  const BigInt cofactor(w.level.N() / w.r);
  for (auto p : w.level.primes()) {
    if (w.r % p != 0) continue;
    if (!is_qr(-BigInt(p), cofactor)) return false;
  }
  return true;
}

/// Eigenvalue +-1 of (w_p)_* for each prime p | N, aligned with level.primes().
struct SignAssignment {
  std::vector<int> eps;
  friend bool operator==(const SignAssignment&, const SignAssignment&) = default;
};

/// Sign maps compatible with odd congruence number: the product is -1 (w_N
/// acts as -1), eps_p = -1 whenever w_p has a fixed point, and eps_2 = +1
/// when N = 2 * odd. Enumerated in lexicographic order with -1 before +1.
inline std::vector<SignAssignment> admissible_sign_assignments(const SquarefreeLevel& level) {
  const std::size_t t = level.t();
  std::vector<bool> forced_minus(t);
  for (std::size_t i = 0; i < t; ++i) {
    forced_minus[i] = al_fixed_point_exists(ALElement(level, level.primes()[i]));
  }
  const bool even = level.N() % 2 == 0;
  std::vector<SignAssignment> out;
  for (std::size_t bits = 0; bits < (std::size_t{1} << t); ++bits) {
    SignAssignment a;
    int product = 1;
    bool ok = true;
    for (std::size_t i = 0; i < t; ++i) {
      // bit set means +1; the highest prime varies fastest
      const int e = (bits >> (t - 1 - i) & 1u) ? 1 : -1;
      a.eps.push_back(e);
      product *= e;
      if (forced_minus[i] && e != -1) ok = false;
      if (even && level.primes()[i] == 2 && e != 1) ok = false;
    }
    if (ok && product == -1) out.push_back(std::move(a));
  }
  return out;
}

/// One factor (1 + sign * w_r) of an operator product.
struct ALFactor {
  std::uint64_t r;
  int sign;
};

/// Expands prod_k (1 + s_k w_{r_k}) applied to the cusp P_base as a signed sum of cusps.
inline CuspDivisor sign_divisor(const SquarefreeLevel& level, std::span<const ALFactor> factors,
                                std::uint64_t base = 1) {
  CuspDivisor d = cusp(level, base);
  for (const auto& f : factors) {
    if (f.sign != 1 && f.sign != -1) throw std::invalid_argument("sign_divisor: signs must be +1 or -1");
    ALElement w(level, f.r);
    CuspDivisor image(level);
    for (std::size_t m = 0; m < d.size(); ++m) {
      if (d[m].is_zero()) continue;
      image.at(al_act_on_cusp(w, level.divisor(m))) += d[m];
    }
    d += Rat(f.sign) * image;
  }
  return d;
}

/// prod_i (1 + s_i w_{p_i}) P_1 with one sign per prime of the level.
inline CuspDivisor sign_divisor(const SquarefreeLevel& level, std::span<const int> per_prime_signs) {
  if (per_prime_signs.size() != level.t()) throw std::invalid_argument("sign vector length must equal the number of primes");
  std::vector<ALFactor> factors;
  for (std::size_t i = 0; i < level.t(); ++i) factors.push_back({level.primes()[i], per_prime_signs[i]});
  return sign_divisor(level, factors);
}

}  // namespace cuspgate

#pragma once

// Necessary-condition gates on the level of an elliptic curve with odd
// congruence number / modular degree, and exhaustive searches over the
// diophantine families that survive them. Every constructed curve is
// re-verified with Tate's algorithm.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "cuspgate/core_arith.hpp"
#include "cuspgate/ec_model.hpp"

namespace cuspgate {

// ---------------------------------------------------------------------------
// Gates

struct GateReason {
  std::string rule;
  std::string detail;
};

struct GateVerdict {
  BigInt level;
  bool pass = false;
  std::vector<GateReason> reasons;
  /// gate_pq_refined: orders of D^{+-}, D^{-+}, D^{--}.
  std::vector<BigInt> orders;
  /// gate_nonsemistable: label when the level is on the CM whitelist.
  std::optional<std::string> whitelist_label;

  std::string status() const { return pass ? "pass" : "fail"; }
};

namespace detail {
inline std::string residue_text(const BigInt& p, int m) { return p.str() + " = " + mod(p, m).str() + " mod " + std::to_string(m); }
}  // namespace detail

/// Gate for square-free levels: prime; pq with p = +-3 (mod 8), q = 3 (mod 4)
/// in some ordering; or 2p with p = 5, 7, 13 (mod 16).
inline GateVerdict gate_squarefree(const BigInt& n) {
  if (n < 1) throw std::invalid_argument("level must be positive");
  if (!is_squarefree(n)) throw std::domain_error("level " + n.str() + " is not square-free; use gate_nonsemistable");
  GateVerdict v;
  v.level = n;
  const auto primes = factor(n).primes();
  if (primes.empty()) {
    v.reasons.push_back({"trivial-level", "N = 1 carries no elliptic curve"});
    return v;
  }
  if (primes.size() == 1) {
    v.pass = true;
    v.reasons.push_back({"prime-level", "N = " + n.str() + " is prime"});
    return v;
  }
  if (primes.size() > 2) {
    v.reasons.push_back({"too-many-primes", std::to_string(primes.size()) + " prime factors; at most 2 allowed"});
    return v;
  }
  const BigInt& p = primes[0];
  const BigInt& q = primes[1];
  if (p == 2) {
    const BigInt r = mod(q, 16);
    v.pass = r == 5 || r == 7 || r == 13;
    v.reasons.push_back({"2p-mod-16", detail::residue_text(q, 16) + (v.pass ? " is in {5,7,13}" : " is not in {5,7,13}")});
    return v;
  }
  auto fits = [](const BigInt& a, const BigInt& b) {
    const BigInt a8 = mod(a, 8);
    return (a8 == 3 || a8 == 5) && mod(b, 4) == 3;
  };
  if (fits(p, q)) {
    v.pass = true;
    v.reasons.push_back({"pq-congruence", detail::residue_text(p, 8) + ", " + detail::residue_text(q, 4)});
  } else if (fits(q, p)) {
    v.pass = true;
    v.reasons.push_back({"pq-congruence", detail::residue_text(q, 8) + ", " + detail::residue_text(p, 4)});
  } else {
    v.reasons.push_back({"pq-congruence", "no ordering has one prime = +-3 mod 8 and the other = 3 mod 4 (" +
                                              detail::residue_text(p, 8) + ", " + detail::residue_text(q, 8) + ")"});
  }
  return v;
}

/// Refined pq gate for pq > 21: pass iff p = q = 3 (mod 8). The three orders
/// num((p+a)(q+b)/24) for (a,b) = (+,-), (-,+), (-,-) are attached.
inline GateVerdict gate_pq_refined(const BigInt& p, const BigInt& q) {
  if (p == q) throw std::invalid_argument("p and q must be distinct");
  if (p == 2 || q == 2 || !is_prime(p) || !is_prime(q)) throw std::invalid_argument("p and q must be odd primes");
  if (p * q <= 21) throw std::invalid_argument("gate_pq_refined requires pq > 21");
  GateVerdict v;
  v.level = p * q;
  for (auto [a, b] : {std::pair{1, -1}, std::pair{-1, 1}, std::pair{-1, -1}}) {
    v.orders.push_back(num(Rat((p + a) * (q + b), 24)));
  }
  v.pass = mod(p, 8) == 3 && mod(q, 8) == 3;
  v.reasons.push_back({"pq-mod-8", detail::residue_text(p, 8) + ", " + detail::residue_text(q, 8) +
                                       (v.pass ? "" : "; both must be 3 mod 8")});
  return v;
}

/// Conductors of the CM curves with odd modular degree, with their labels.
inline const std::map<BigInt, std::string>& cm_whitelist() {
  static const std::map<BigInt, std::string> list{
      {27, "27A"}, {32, "32A"}, {36, "36A"}, {49, "49A"}, {243, "243B"}};
  return list;
}

/// Shape gate for non-square-free levels: N = 2^a, p^s, 4p^s or 8p^s.
inline GateVerdict gate_nonsemistable(const BigInt& n) {
  if (n < 1) throw std::invalid_argument("level must be positive");
  if (is_squarefree(n)) throw std::domain_error("level " + n.str() + " is square-free; use gate_squarefree");
  GateVerdict v;
  v.level = n;
  const auto f = factor(n);
  unsigned e2 = 0;
  std::vector<PrimePower> odd;
  for (const auto& t : f.terms) {
    if (t.prime == 2) {
      e2 = t.exponent;
    } else {
      odd.push_back(t);
    }
  }
  if (odd.empty()) {
    v.pass = true;
    v.reasons.push_back({"shape-2^a", "N = 2^" + std::to_string(e2)});
  } else if (odd.size() > 1) {
    v.reasons.push_back({"two-odd-primes", "N has " + std::to_string(odd.size()) + " odd prime factors"});
  } else if (e2 == 0 || e2 == 2 || e2 == 3) {
    v.pass = true;
    const std::string pp = odd[0].prime.str() + "^" + std::to_string(odd[0].exponent);
    v.reasons.push_back({e2 == 0 ? "shape-p^s" : (e2 == 2 ? "shape-4p^s" : "shape-8p^s"),
                         "N = " + (e2 == 0 ? std::string() : std::to_string(1u << e2) + "*") + pp});
  } else {
    v.reasons.push_back({"bad-2-exponent", "v_2(N) = " + std::to_string(e2) + " with an odd prime present; need 0, 2 or 3"});
  }
  if (auto it = cm_whitelist().find(n); it != cm_whitelist().end()) {
    v.whitelist_label = it->second;
    v.reasons.push_back({"cm-whitelist", it->second});
  }
  return v;
}

/// Dispatches to the square-free or the non-semistable gate.
inline GateVerdict gate_level(const BigInt& n) {
  return is_squarefree(n) ? gate_squarefree(n) : gate_nonsemistable(n);
}

// ---------------------------------------------------------------------------
// Searches

/// A constructed curve together with its verification record.
struct CurveRecord {
  std::string label;
  WeierstrassModel model;
  BigInt conductor;
  std::vector<TateResult> local;
  TwoTorsion two_torsion = TwoTorsion::Trivial;
  std::string gate_status;

  const TateResult* at(const BigInt& p) const {
    for (const auto& r : local) {
      if (r.prime == p) return &r;
    }
    return nullptr;
  }
};

inline CurveRecord verify_curve(std::string label, const WeierstrassModel& e) {
  CurveRecord c;
  c.label = std::move(label);
  c.model = e;
  c.local = local_data(e);
  c.conductor = 1;
  for (const auto& r : c.local) c.conductor *= pow(r.prime, static_cast<unsigned>(r.f));
  c.two_torsion = two_torsion_structure(e);
  c.gate_status = gate_level(c.conductor).status();
  return c;
}

struct SearchHit {
  std::string family;
  std::map<std::string, BigInt> params;
  std::map<std::string, bool> flags;
  std::vector<CurveRecord> curves;
  std::vector<std::string> notes;

  /// Sort key: the ordered parameter tuple.
  friend bool operator<(const SearchHit& a, const SearchHit& b) { return a.params < b.params; }
};

struct SearchOptions {
  unsigned jobs = 1;
};

namespace detail {

// Runs fn(i) for i in [0, count) on `jobs` threads (strided), then
// concatenates the per-index results in index order.
inline std::vector<SearchHit> parallel_collect(std::size_t count, unsigned jobs,
                                               const std::function<std::vector<SearchHit>(std::size_t)>& fn) {
  std::vector<std::vector<SearchHit>> slots(count);
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) slots[i] = fn(i);
  } else {
    std::vector<std::exception_ptr> errors(jobs);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < jobs; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < count; i += jobs) slots[i] = fn(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  std::vector<SearchHit> out;
  for (auto& s : slots) {
    for (auto& h : s) out.push_back(std::move(h));
  }
  return out;
}

inline std::vector<std::uint64_t> primes_up_to(std::uint64_t n) {
  std::vector<bool> composite(n + 1);
  std::vector<std::uint64_t> out;
  for (std::uint64_t i = 2; i <= n; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (std::uint64_t j = i * i; j <= n; j += i) composite[j] = true;
  }
  return out;
}

}  // namespace detail

/// p = m^2 + 4 prime for odd m <= m_max, curve y^2 = x(x^2 + m'x - 1) where
/// m' = +-m is chosen = 1 (mod 4). The other sign is the quadratic twist by -1
/// and has conductor 16p instead of 4p.
inline std::vector<SearchHit> search_neumann_setzer(std::uint64_t m_max, SearchOptions opt = {}) {
  if (m_max < 1) throw std::invalid_argument("m_max must be at least 1");
  const std::size_t count = (m_max + 1) / 2;
  return detail::parallel_collect(count, opt.jobs, [](std::size_t i) -> std::vector<SearchHit> {
    const BigInt m = 2 * BigInt(i) + 1;
    const BigInt p = m * m + 4;
    if (!is_prime(p)) return {};
    SearchHit h;
    h.family = "neumann-setzer";
    h.params = {{"m", m}, {"p", p}};
    const BigInt ms = mod(m, 4) == 1 ? m : BigInt(-m);
    h.params["model_m"] = ms;
    auto c = verify_curve("y^2=x(x^2" + std::string(ms > 0 ? "+" : "") + ms.str() + "x-1)", {0, ms, 0, -1, 0});
    h.flags["conductor_is_4p"] = c.conductor == 4 * p;
    h.curves.push_back(std::move(c));
    if (ms != m) h.notes.push_back("sign of m flipped to make m = 1 mod 4");
    return {h};
  });
}

/// True iff k < f(p) where f(p) = 18 + 2 log2 p for p < 2^96 and
/// 435 + 10 log2 p otherwise, decided exactly on integers.
inline bool ivorra_window_upper(unsigned k, const BigInt& p) {
  const BigInt two_k = pow(BigInt(2), k);
  if (p < pow(BigInt(2), 96)) return two_k < pow(BigInt(2), 18) * p * p;
  return two_k < pow(BigInt(2), 435) * pow(p, 10);
}

/// (k, m, p) with p = 2^k - m^2 prime, p = 7 (mod 16), 3 <= k <= k_max. The
/// model y^2 + xy = x^3 + (m-1)/4 x^2 + 2^{k-6} x is built when k >= 6 and m = 1 (mod 4).
inline std::vector<SearchHit> search_2p_family(unsigned k_max, SearchOptions opt = {}) {
  if (k_max < 3) throw std::invalid_argument("k_max must be at least 3");
  if (k_max > 62) throw std::invalid_argument("k_max above 62 is not supported");
  const std::size_t count = k_max - 2;
  return detail::parallel_collect(count, opt.jobs, [](std::size_t i) -> std::vector<SearchHit> {
    const unsigned k = static_cast<unsigned>(i) + 3;
    const BigInt two_k = pow(BigInt(2), k);
    std::vector<SearchHit> hits;
    for (BigInt m = 1; m * m < two_k; m += 2) {
      const BigInt p = two_k - m * m;
      if (mod(p, 16) != 7 || !is_prime(p)) continue;
      SearchHit h;
      h.family = "2p";
      h.params = {{"k", k}, {"m", m}, {"p", p}};
      if (p >= 29) {
        h.flags["in_window"] = k >= 7 && ivorra_window_upper(k, p);
      } else {
        h.flags["small_p_exception"] = true;
      }
      if (k >= 6 && mod(m, 4) == 1) {
        WeierstrassModel e{1, (m - 1) / 4, 0, pow(BigInt(2), k - 6), 0};
        auto c = verify_curve("y^2+xy=x^3+" + e.a2.str() + "x^2+" + e.a4.str() + "x", e);
        h.flags["conductor_is_2p"] = c.conductor == 2 * p;
        h.curves.push_back(std::move(c));
      } else {
        h.notes.push_back(k < 6 ? "k < 6: no model in this form" : "m = 3 mod 4: (m-1)/4 not integral, parameters only");
      }
      hits.push_back(std::move(h));
    }
    return hits;
  });
}

/// Primes 31 < p <= p_max with p - 16, p - 32 or p + 32 a square; one hit per
/// matching case, carrying y^2 = x^3 + m x^2 + c x with c = -4, -8, 8 respectively
/// and m the square root taken = 1 (mod 4).
inline std::vector<SearchHit> search_8p_family(std::uint64_t p_max, SearchOptions opt = {}) {
  if (p_max < 37) throw std::invalid_argument("p_max must be at least 37");
  std::vector<std::uint64_t> primes;
  for (auto p : detail::primes_up_to(p_max)) {
    if (p > 31) primes.push_back(p);
  }
  return detail::parallel_collect(primes.size(), opt.jobs, [&primes](std::size_t i) -> std::vector<SearchHit> {
    const BigInt p(primes[i]);
    struct Case {
      const char* name;
      BigInt shifted;
      int c;
    };
    const Case cases[] = {{"p-16", p - 16, -4}, {"p-32", p - 32, -8}, {"p+32", p + 32, 8}};
    std::vector<SearchHit> hits;
    for (const auto& cs : cases) {
      if (cs.shifted < 0) continue;
      auto m = is_square(cs.shifted);
      if (!m) continue;
      SearchHit h;
      h.family = "8p";
      // The square root fixes m only up to sign; the sign with m = 1 (mod 4)
      // gives conductor 8p, the other its twist by -1.
      const BigInt ms = mod(*m, 4) == 1 ? *m : BigInt(-*m);
      h.params = {{"p", p}, {"m", *m}, {"model_m", ms}};
      h.notes.push_back(std::string("case ") + cs.name);
      WeierstrassModel e{0, ms, 0, cs.c, 0};
      auto c = verify_curve("y^2=x^3" + std::string(ms > 0 ? "+" : "") + ms.str() + "x^2" + (cs.c > 0 ? "+" : "") +
                                std::to_string(cs.c) + "x",
                            e);
      h.flags["conductor_is_8p"] = c.conductor == 8 * p;
      h.curves.push_back(std::move(c));
      hits.push_back(std::move(h));
    }
    return hits;
  });
}

/// Odd prime powers P = p^alpha < Q = q^beta <= bound, p != q, Q - P = 8 (or 4
/// when allow_difference_4). Each hit carries y^2 = x(x - sP)(x - sQ) for s = +-1.
inline std::vector<SearchHit> search_4pq_family(std::uint64_t bound, bool allow_difference_4 = false,
                                                SearchOptions opt = {}) {
  if (bound < 11) throw std::invalid_argument("bound must be at least 11");
  struct PP {
    std::uint64_t value, prime;
    unsigned exponent;
  };
  std::map<std::uint64_t, PP> powers;
  for (auto p : detail::primes_up_to(bound)) {
    if (p == 2) continue;
    std::uint64_t v = p;
    for (unsigned e = 1;; ++e) {
      powers[v] = {v, p, e};
      if (v > bound / p) break;
      v *= p;
    }
  }
  std::vector<PP> list;
  for (const auto& [v, pp] : powers) list.push_back(pp);
  std::vector<unsigned> diffs{8};
  if (allow_difference_4) diffs.insert(diffs.begin(), 4);
  return detail::parallel_collect(list.size(), opt.jobs, [&](std::size_t i) -> std::vector<SearchHit> {
    const PP lo = list[i];
    std::vector<SearchHit> hits;
    for (unsigned d : diffs) {
      auto it = powers.find(lo.value + d);
      if (it == powers.end() || it->second.prime == lo.prime) continue;
      const PP hi = it->second;
      SearchHit h;
      h.family = "4pq";
      h.params = {{"P", lo.value}, {"Q", hi.value}, {"p", lo.prime}, {"alpha", lo.exponent},
                  {"q", hi.prime}, {"beta", hi.exponent}, {"difference", d}};
      for (int s : {1, -1}) {
        const BigInt sp = s * BigInt(lo.value);
        const BigInt sq = s * BigInt(hi.value);
        WeierstrassModel e{0, -(sp + sq), 0, sp * sq, 0};
        h.curves.push_back(verify_curve(std::string("y^2=x(x") + (s > 0 ? "-" : "+") + std::to_string(lo.value) +
                                            ")(x" + (s > 0 ? "-" : "+") + std::to_string(hi.value) + ")",
                                        e));
      }
      hits.push_back(std::move(h));
    }
    return hits;
  });
}

// ---------------------------------------------------------------------------
// Z/2 x Z/4 at conductor pq

struct Z2Z4Solution {
  std::string case_label;  ///< "a4=1", "a4=p^r" or "a4=p^r q^s"
  BigInt a2, a4, m, k;     ///< a4 = m^2, (4a2+1)^2 - 64 a4 = k^2
  CurveRecord curve;
};

struct Z2Z4Report {
  BigInt bound;
  std::set<BigInt> conductors;
  std::vector<Z2Z4Solution> solutions;
  std::size_t candidates_checked = 0;
};

/// Curves y^2 + xy = x^3 + a2 x^2 + a4 x (good reduction at 2, (0,0) of order 2)
/// with full 2-torsion and a point Q with 2Q = (0,0), of conductor pq <= bound.
/// Such Q has x(Q)^2 = a4, so a4 = m^2, and full 2-torsion makes
/// (4a2+1)^2 - 64 m^2 = k^2; every factor pair of 64 m^2 is enumerated for
/// 1 <= m <= bound and each solution is checked by Tate's algorithm and the
/// group law.
inline Z2Z4Report verify_z2z4_classification(std::uint64_t bound) {
  if (bound < 21) throw std::invalid_argument("bound must be at least 21");
  Z2Z4Report rep;
  rep.bound = bound;
  for (std::uint64_t mm = 1; mm <= bound; ++mm) {
    const BigInt m(mm);
    const auto mf = factor(m);
    if (mf.terms.size() > 2) continue;
    const BigInt target = 64 * m * m;
    for (const auto& u : divisors(target)) {
      const BigInt v = target / u;
      if (u >= v || (u - v) % 2 != 0) continue;
      const BigInt k = (v - u) / 2;
      for (int sign : {1, -1}) {
        const BigInt a = sign * (u + v) / 2;
        if (mod(a, 4) != 1) continue;
        ++rep.candidates_checked;
        // Primes of the discriminant m^4 k^2 must be two, with product <= bound.
        std::set<BigInt> ps;
        for (const auto& t : mf.terms) ps.insert(t.prime);
        for (const auto& t : factor(k).terms) ps.insert(t.prime);
        if (ps.size() != 2 || *ps.begin() * *ps.rbegin() > bound) continue;
        const BigInt a2 = (a - 1) / 4;
        const BigInt a4 = m * m;
        WeierstrassModel e{1, a2, 0, a4, 0};
        auto rec = verify_curve("y^2+xy=x^3+" + a2.str() + "x^2+" + a4.str() + "x", e);
        if (rec.conductor != *ps.begin() * *ps.rbegin()) continue;
        if (rec.two_torsion != TwoTorsion::Z2xZ2) continue;
        const auto re = to_rational(e);
        bool order4 = false;
        for (const BigInt& x : {m, BigInt(-m)}) {
          for (const auto& q : points_with_x(re, Rat(x))) {
            if (multiply(re, 2, q) == Point::affine(0, 0)) order4 = true;
          }
        }
        if (!order4) continue;
        std::string label = mm == 1 ? "a4=1" : (mf.terms.size() == 1 ? "a4=p^r" : "a4=p^r q^s");
        rep.conductors.insert(rec.conductor);
        rep.solutions.push_back(Z2Z4Solution{label, a2, a4, m, k, std::move(rec)});
      }
    }
  }
  return rep;
}

}  // namespace cuspgate

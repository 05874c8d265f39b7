#pragma once

// Exact arithmetic over unsigned machine words: modular operations,
// deterministic primality, square-free factorization and the search for
// primes in the progression 1 mod m.

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ipe/error.hpp"

namespace ipe {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

inline u64 mul_mod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

// Operands must already be reduced below m.
inline u64 add_mod(u64 a, u64 b, u64 m) { return a >= m - b ? a - (m - b) : a + b; }
inline u64 sub_mod(u64 a, u64 b, u64 m) { return a >= b ? a - b : a + (m - b); }
inline u64 neg_mod(u64 a, u64 m) { return a == 0 ? 0 : m - a; }

inline u64 pow_mod(u64 base, u64 exp, u64 m) {
  u64 result = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1;
  }
  return result;
}

/// Signed integer reduced into [0, m).
inline u64 residue_of(std::int64_t v, u64 m) {
  if (v >= 0) return static_cast<u64>(v) % m;
  const u64 mag = static_cast<u64>(-(v + 1)) + 1;
  return neg_mod(mag % m, m);
}

inline u64 checked_mul(u64 a, u64 b) {
  u64 out = 0;
  if (__builtin_mul_overflow(a, b, &out))
    fail(ErrorKind::Overflow, std::to_string(a) + " * " + std::to_string(b) + " exceeds 64 bits");
  return out;
}

inline u64 checked_add(u64 a, u64 b) {
  u64 out = 0;
  if (__builtin_add_overflow(a, b, &out))
    fail(ErrorKind::Overflow, std::to_string(a) + " + " + std::to_string(b) + " exceeds 64 bits");
  return out;
}

inline u64 checked_pow(u64 base, u64 exp) {
  u64 out = 1;
  for (u64 i = 0; i < exp; ++i) out = checked_mul(out, base);
  return out;
}

inline u64 ceil_div(u64 a, u64 b) { return a / b + (a % b != 0 ? 1 : 0); }

inline u64 binomial(u64 n, u64 k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  u128 acc = 1;
  for (u64 i = 1; i <= k; ++i) {
    acc = acc * (n - k + i) / i;  // exact: product of i consecutive integers / i!
    if (acc > UINT64_MAX) fail(ErrorKind::Overflow, "binomial(" + std::to_string(n) + "," + std::to_string(k) + ")");
  }
  return static_cast<u64>(acc);
}

/// Sum of C(n, i) for i = 0..d.
inline u64 binomial_prefix(u64 n, u64 d) {
  u64 total = 0;
  for (u64 i = 0; i <= std::min(n, d); ++i) total = checked_add(total, binomial(n, i));
  return total;
}

namespace detail {

inline bool miller_rabin_witness(u64 n, u64 a, u64 d, int s) {
  u64 x = pow_mod(a, d, n);
  if (x == 1 || x == n - 1) return false;
  for (int r = 1; r < s; ++r) {
    x = mul_mod(x, x, n);
    if (x == n - 1) return false;
  }
  return true;
}

}  // namespace detail

/// Deterministic for every 64-bit input: the first twelve primes form a
/// complete Miller-Rabin witness set below 3.3e24.
inline bool is_prime(u64 p) {
  static constexpr u64 kBases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  if (p < 2) return false;
  for (u64 b : kBases) {
    if (p == b) return true;
    if (p % b == 0) return false;
  }
  u64 d = p - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  return std::none_of(std::begin(kBases), std::end(kBases),
                      [&](u64 a) { return detail::miller_rabin_witness(p, a, d, s); });
}

/// Smallest prime strictly greater than bound.
inline u64 next_prime_above(u64 bound) {
  for (u64 c = bound + 1;; ++c) {
    if (c == 0) fail(ErrorKind::Overflow, "no prime above " + std::to_string(bound) + " in 64 bits");
    if (is_prime(c)) return c;
  }
}

/// Distinct prime factors of q (ascending), tolerating repeated factors.
inline std::vector<u64> distinct_prime_factors(u64 q) {
  std::vector<u64> out;
  for (u64 d = 2; d <= q / d; ++d) {
    if (q % d != 0) continue;
    out.push_back(d);
    while (q % d == 0) q /= d;
    if (is_prime(q)) break;
  }
  if (q > 1) out.push_back(q);
  return out;
}

/// A square-free modulus q = p_1 * ... * p_k with p_1 < ... < p_k.
class Modulus {
 public:
  /// Validates that the primes are distinct primes and their product fits.
  static Modulus from_primes(std::vector<u64> primes) {
    if (primes.empty()) fail(ErrorKind::BadParams, "modulus needs at least one prime factor");
    std::sort(primes.begin(), primes.end());
    u64 q = 1;
    for (std::size_t i = 0; i < primes.size(); ++i) {
      if (!::ipe::is_prime(primes[i])) fail(ErrorKind::NotPrime, std::to_string(primes[i]) + " is not prime");
      if (i > 0 && primes[i] == primes[i - 1])
        fail(ErrorKind::NotSquareFree, "repeated prime factor " + std::to_string(primes[i]));
      q = checked_mul(q, primes[i]);
    }
    return Modulus(q, std::move(primes));
  }

  u64 q() const noexcept { return q_; }
  std::span<const u64> factors() const noexcept { return factors_; }
  std::size_t k() const noexcept { return factors_.size(); }
  bool is_prime() const noexcept { return factors_.size() == 1; }

  friend bool operator==(const Modulus&, const Modulus&) = default;

 private:
  Modulus(u64 q, std::vector<u64> factors) : q_(q), factors_(std::move(factors)) {}

  u64 q_;
  std::vector<u64> factors_;
};

/// Trial division. Rejects moduli with a repeated prime factor.
inline Modulus factorize(u64 q) {
  if (q < 2) fail(ErrorKind::BadParams, "modulus must be at least 2, got " + std::to_string(q));
  std::vector<u64> factors;
  u64 rest = q;
  for (u64 d = 2; d <= rest / d; ++d) {
    if (rest % d != 0) continue;
    rest /= d;
    if (rest % d == 0)
      fail(ErrorKind::NotSquareFree, std::to_string(q) + " is divisible by " + std::to_string(d) + "^2");
    factors.push_back(d);
    if (is_prime(rest)) break;
  }
  if (rest > 1) factors.push_back(rest);
  return Modulus::from_primes(std::move(factors));
}

/// Smallest prime p > lower_bound with p = 1 (mod m).
inline u64 dirichlet_prime(u64 m, u64 lower_bound) {
  if (m < 2) fail(ErrorKind::BadParams, "progression modulus must be at least 2");
  if (lower_bound == UINT64_MAX) fail(ErrorKind::Overflow, "lower bound at the top of the 64-bit range");
  const u64 start = lower_bound + 1;
  const u64 delta = (1 + m - start % m) % m;
  if (start > UINT64_MAX - delta) fail(ErrorKind::Overflow, "progression 1 mod " + std::to_string(m) + " leaves 64 bits");
  for (u64 c = start + delta;; c += m) {
    if (is_prime(c)) return c;
    if (c > UINT64_MAX - m)
      fail(ErrorKind::Overflow, "no prime = 1 mod " + std::to_string(m) + " above " + std::to_string(lower_bound) +
                                    " within 64 bits");
  }
}

/// (v mod p_1, ..., v mod p_k).
inline std::vector<u64> crt_residues(u64 v, const Modulus& m) {
  if (v >= m.q()) fail(ErrorKind::BadParams, std::to_string(v) + " is not reduced modulo " + std::to_string(m.q()));
  std::vector<u64> out;
  out.reserve(m.k());
  for (u64 p : m.factors()) out.push_back(v % p);
  return out;
}

/// Inverse of crt_residues.
inline u64 crt_combine(std::span<const u64> residues, const Modulus& m) {
  if (residues.size() != m.k()) fail(ErrorKind::BadParams, "residue count does not match the factor count");
  u64 acc = 0;
  for (std::size_t i = 0; i < m.k(); ++i) {
    const u64 p = m.factors()[i];
    const u64 rest = m.q() / p;
    const u64 inv = pow_mod(rest % p, p - 2, p);
    const u64 coeff = mul_mod(residues[i] % p, inv, p);
    acc = add_mod(acc, mul_mod(coeff, rest, m.q()), m.q());
  }
  return acc;
}

}  // namespace ipe

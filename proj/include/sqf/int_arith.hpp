#ifndef SQF_INT_ARITH_HPP
#define SQF_INT_ARITH_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "sqf/errors.hpp"

namespace sqf {

// Trial-division capability: factoring/squarefree certification works for
// values whose unfactored cofactor stays below kFactorBound^2 (~1e14, i.e.
// m^2+16 for m up to ~1e7). Beyond that we raise capacity_exceeded rather
// than guess.
inline constexpr std::uint64_t kFactorBound = 10'000'000;

// largest k with 2^k | n; throws zero_input on n = 0
unsigned long two_adic_valuation(const mpz_class& n);

// n / 2^v2(n); throws zero_input on n = 0
mpz_class odd_part(const mpz_class& n);

bool is_perfect_square(const mpz_class& n);

struct PrimeFactorList {
    // (prime, exponent), primes strictly increasing, exponents >= 1
    std::vector<std::pair<mpz_class, unsigned>> entries;

    mpz_class value() const;
    bool squarefree() const;
};

// Complete factorization by trial division. Throws capacity_exceeded if the
// remaining cofactor cannot be certified prime with divisors <= bound.
PrimeFactorList factor_trial(const mpz_class& n, std::uint64_t bound = kFactorBound);

// true iff no prime square divides n (n >= 1). Same capacity contract as
// factor_trial, but exits early on the first repeated factor.
bool is_squarefree(const mpz_class& n, std::uint64_t bound = kFactorBound);

struct EulerProduct {
    double value;       // truncated product over p = 1 mod 4, p <= truncation
    double tail_bound;  // rigorous bound on the relative truncation error
    std::uint64_t truncation;
};

// prod (1 - 2/p^2) over primes p = 1 (mod 4), p <= truncation_bound.
// tail_bound uses the coarse estimate 4/B: the dropped factors multiply to
// exp(-sum_{p>B} 2/p^2 (1+o(1))) and sum_{p>B} 2/p^2 < 2/(B log B) < 2/B,
// doubled for slack.
EulerProduct euler_product_p1mod4(std::uint64_t truncation_bound);

// number of monic irreducible polynomials of degree d over F_p:
// (1/d) sum_{e|d} mu(e) p^(d/e)
mpz_class count_monic_irreducibles(const mpz_class& p, unsigned d);

// Moebius function of n >= 1 (n small: trial division)
int moebius(std::uint64_t n);

// ---- shared prime sieve -------------------------------------------------

// All primes <= bound, ascending. Cached; the cache only grows. Thread-safe.
std::vector<std::uint32_t> primes_up_to(std::uint64_t bound);

// ---- modular helpers (odd prime modulus) --------------------------------

// a^e mod n (n > 0)
mpz_class powmod(const mpz_class& a, const mpz_class& e, const mpz_class& n);

// inverse of a mod n; throws internal_inconsistency if not invertible
mpz_class invmod(const mpz_class& a, const mpz_class& n);

// square root of a mod odd prime p (Tonelli-Shanks, deterministic
// non-residue search); throws internal_inconsistency if a is a non-residue
mpz_class sqrtmod(const mpz_class& a, const mpz_class& p);

} // namespace sqf

#endif

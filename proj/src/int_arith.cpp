#include "sqf/int_arith.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

namespace sqf {

const char* errc_name(errc c) {
    switch (c) {
        case errc::zero_input: return "zero_input";
        case errc::capacity_exceeded: return "capacity_exceeded";
        case errc::excluded_m: return "excluded_m";
        case errc::not_squarefree: return "not_squarefree";
        case errc::mixed_fields: return "mixed_fields";
        case errc::internal_inconsistency: return "internal_inconsistency";
        case errc::non_convergence: return "non_convergence";
        case errc::not_in_order: return "not_in_order";
        case errc::mixed_orders: return "mixed_orders";
        case errc::not_above_prime: return "not_above_prime";
        case errc::verification_failed: return "verification_failed";
        case errc::bad_shape: return "bad_shape";
        case errc::unsupported_index: return "unsupported_index";
    }
    return "unknown";
}

unsigned long two_adic_valuation(const mpz_class& n) {
    if (n == 0) throw Error(errc::zero_input, "two_adic_valuation(0)");
    return mpz_scan1(n.get_mpz_t(), 0);
}

mpz_class odd_part(const mpz_class& n) {
    mpz_class r;
    mpz_tdiv_q_2exp(r.get_mpz_t(), n.get_mpz_t(), two_adic_valuation(n));
    return r;
}

bool is_perfect_square(const mpz_class& n) {
    if (n < 0) return false;
    return mpz_perfect_square_p(n.get_mpz_t()) != 0;
}

mpz_class PrimeFactorList::value() const {
    mpz_class v = 1;
    mpz_class pe;
    for (const auto& [p, e] : entries) {
        mpz_pow_ui(pe.get_mpz_t(), p.get_mpz_t(), e);
        v *= pe;
    }
    return v;
}

bool PrimeFactorList::squarefree() const {
    return std::all_of(entries.begin(), entries.end(),
                       [](const auto& pe) { return pe.second == 1; });
}

namespace {

std::vector<std::uint32_t> g_primes;   // ascending, covers [2, g_sieved]
std::uint64_t g_sieved = 0;
std::mutex g_sieve_mutex;

void extend_sieve_locked(std::uint64_t bound) {
    std::uint64_t n = std::max<std::uint64_t>(bound, 1u << 16);
    std::vector<std::uint8_t> composite(n + 1, 0);
    for (std::uint64_t p = 2; p * p <= n; ++p) {
        if (composite[p]) continue;
        for (std::uint64_t q = p * p; q <= n; q += p) composite[q] = 1;
    }
    g_primes.clear();
    for (std::uint64_t p = 2; p <= n; ++p)
        if (!composite[p]) g_primes.push_back(static_cast<std::uint32_t>(p));
    g_sieved = n;
}

} // namespace

std::vector<std::uint32_t> primes_up_to(std::uint64_t bound) {
    std::lock_guard<std::mutex> lk(g_sieve_mutex);
    if (bound > g_sieved) extend_sieve_locked(2 * bound);
    auto end = std::upper_bound(g_primes.begin(), g_primes.end(), bound);
    return std::vector<std::uint32_t>(g_primes.begin(), end);
}

namespace {

// Largest divisor worth trying for c: min(bound, isqrt(c)+1).
std::uint64_t trial_target(const mpz_class& c, std::uint64_t bound) {
    mpz_class root;
    mpz_sqrt(root.get_mpz_t(), c.get_mpz_t());
    if (!mpz_fits_ulong_p(root.get_mpz_t())) return bound;
    return std::min<std::uint64_t>(bound, root.get_ui() + 1);
}

// After all primes <= tried were divided out, decide whether the cofactor c
// is certifiably prime; throws when it is too large to certify.
void certify_cofactor_prime(const mpz_class& c, std::uint64_t tried, std::uint64_t bound) {
    mpz_class cap;
    cap = static_cast<unsigned long>(tried);
    cap *= static_cast<unsigned long>(tried);
    if (c <= cap) return; // no factor <= sqrt(c), hence prime
    throw Error(errc::capacity_exceeded,
                "cofactor " + c.get_str() + " not certifiable with divisors <= " +
                    std::to_string(bound));
}

} // namespace

PrimeFactorList factor_trial(const mpz_class& n, std::uint64_t bound) {
    if (n <= 0) throw Error(errc::zero_input, "factor_trial requires n >= 1");
    PrimeFactorList out;
    mpz_class c = n;

    unsigned long v = (c == 1) ? 0 : mpz_scan1(c.get_mpz_t(), 0);
    if (v > 0) {
        mpz_tdiv_q_2exp(c.get_mpz_t(), c.get_mpz_t(), v);
        out.entries.emplace_back(2, static_cast<unsigned>(v));
    }
    if (c == 1) return out;

    std::uint64_t target = trial_target(c, bound);
    auto primes = primes_up_to(target);
    mpz_class limit_sq;
    bool exhausted = true;
    for (std::size_t i = 1; i < primes.size(); ++i) { // 2 already stripped
        std::uint64_t p = primes[i];
        limit_sq = p;
        limit_sq *= p;
        if (limit_sq > c) { exhausted = false; break; }
        if (mpz_divisible_ui_p(c.get_mpz_t(), p)) {
            unsigned e = 0;
            do {
                mpz_divexact_ui(c.get_mpz_t(), c.get_mpz_t(), p);
                ++e;
            } while (mpz_divisible_ui_p(c.get_mpz_t(), p));
            out.entries.emplace_back(p, e);
        }
    }
    if (c > 1) {
        if (exhausted) certify_cofactor_prime(c, target, bound);
        out.entries.emplace_back(c, 1);
    }
    return out;
}

bool is_squarefree(const mpz_class& n, std::uint64_t bound) {
    if (n <= 0) throw Error(errc::zero_input, "is_squarefree requires n >= 1");
    if (n == 1) return true;
    mpz_class c = n;

    unsigned long v = mpz_scan1(c.get_mpz_t(), 0);
    if (v >= 2) return false;
    mpz_tdiv_q_2exp(c.get_mpz_t(), c.get_mpz_t(), v);
    if (c == 1) return true;

    std::uint64_t target = trial_target(c, bound);
    auto primes = primes_up_to(target);
    mpz_class limit_sq;
    bool exhausted = true;
    for (std::size_t i = 1; i < primes.size(); ++i) {
        std::uint64_t p = primes[i];
        limit_sq = p;
        limit_sq *= p;
        if (limit_sq > c) { exhausted = false; break; } // cofactor is prime
        if (mpz_divisible_ui_p(c.get_mpz_t(), p)) {
            mpz_divexact_ui(c.get_mpz_t(), c.get_mpz_t(), p);
            if (mpz_divisible_ui_p(c.get_mpz_t(), p)) return false;
        }
    }
    if (c > 1 && exhausted) certify_cofactor_prime(c, target, bound);
    return true;
}

EulerProduct euler_product_p1mod4(std::uint64_t truncation_bound) {
    long double prod = 1.0L;
    for (std::uint32_t p : primes_up_to(truncation_bound)) {
        if ((p & 3u) != 1u) continue;
        long double pd = static_cast<long double>(p);
        prod *= 1.0L - 2.0L / (pd * pd);
    }
    return EulerProduct{static_cast<double>(prod),
                        4.0 / static_cast<double>(truncation_bound), truncation_bound};
}

int moebius(std::uint64_t n) {
    if (n == 0) throw Error(errc::zero_input, "moebius(0)");
    int sign = 1;
    for (std::uint64_t p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        n /= p;
        if (n % p == 0) return 0;
        sign = -sign;
    }
    if (n > 1) sign = -sign;
    return sign;
}

mpz_class count_monic_irreducibles(const mpz_class& p, unsigned d) {
    if (d == 0) throw Error(errc::zero_input, "count_monic_irreducibles requires d >= 1");
    mpz_class sum = 0, pe;
    for (unsigned e = 1; e <= d; ++e) {
        if (d % e) continue;
        int mu = moebius(e);
        if (mu == 0) continue;
        mpz_pow_ui(pe.get_mpz_t(), p.get_mpz_t(), d / e);
        sum += mu * pe;
    }
    mpz_class q;
    mpz_divexact_ui(q.get_mpz_t(), sum.get_mpz_t(), d);
    return q;
}

mpz_class powmod(const mpz_class& a, const mpz_class& e, const mpz_class& n) {
    mpz_class r;
    mpz_powm(r.get_mpz_t(), a.get_mpz_t(), e.get_mpz_t(), n.get_mpz_t());
    return r;
}

mpz_class invmod(const mpz_class& a, const mpz_class& n) {
    mpz_class r;
    if (!mpz_invert(r.get_mpz_t(), a.get_mpz_t(), n.get_mpz_t()))
        throw Error(errc::internal_inconsistency,
                    a.get_str() + " not invertible mod " + n.get_str());
    return r;
}

mpz_class sqrtmod(const mpz_class& a, const mpz_class& p) {
    mpz_class r = a % p;
    if (r < 0) r += p;
    if (r == 0) return 0;
    if (mpz_legendre(r.get_mpz_t(), p.get_mpz_t()) != 1)
        throw Error(errc::internal_inconsistency,
                    a.get_str() + " is a quadratic non-residue mod " + p.get_str());
    if (p % 4 == 3) return powmod(r, (p + 1) / 4, p);

    // Tonelli-Shanks; smallest non-residue keeps the result deterministic
    mpz_class q = p - 1;
    unsigned long s = mpz_scan1(q.get_mpz_t(), 0);
    mpz_tdiv_q_2exp(q.get_mpz_t(), q.get_mpz_t(), s);
    mpz_class z = 2;
    while (mpz_legendre(z.get_mpz_t(), p.get_mpz_t()) != -1) ++z;

    mpz_class c = powmod(z, q, p);
    mpz_class x = powmod(r, (q + 1) / 2, p);
    mpz_class t = powmod(r, q, p);
    unsigned long m = s;
    while (t != 1) {
        mpz_class t2 = t;
        unsigned long i = 0;
        while (t2 != 1) {
            t2 = t2 * t2 % p;
            ++i;
            if (i == m)
                throw Error(errc::internal_inconsistency, "sqrtmod: loop overrun");
        }
        mpz_class b = c;
        for (unsigned long j = 0; j + i + 1 < m; ++j) b = b * b % p;
        m = i;
        c = b * b % p;
        t = t * c % p;
        x = x * b % p;
    }
    return x;
}

} // namespace sqf

#ifndef SQF_POLY_MOD_P_HPP
#define SQF_POLY_MOD_P_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "sqf/errors.hpp"

namespace sqf {

// Seed for the randomized equal-degree split (Cantor-Zassenhaus). Fixed so
// factorizations are reproducible run to run; reports echo it.
inline constexpr unsigned long kFactorSeed = 0x5eedful;

// Dense polynomial over F_p, constant term first, no trailing zero
// coefficients, residues in [0, p).
struct PolyModP {
    mpz_class p;
    std::vector<mpz_class> coeffs;

    PolyModP() = default;
    PolyModP(mpz_class prime, std::vector<mpz_class> c);

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
    bool is_zero() const { return coeffs.empty(); }
    bool is_one() const { return coeffs.size() == 1 && coeffs[0] == 1; }
    const mpz_class& lc() const { return coeffs.back(); }
    bool monic() const { return !is_zero() && lc() == 1; }

    mpz_class eval(const mpz_class& x) const;

    bool operator==(const PolyModP& o) const { return p == o.p && coeffs == o.coeffs; }

    // degree first, then lexicographic from the leading coefficient down
    static int cmp(const PolyModP& a, const PolyModP& b);

    std::string str(const std::string& var = "x") const;
};

PolyModP poly_add(const PolyModP& a, const PolyModP& b);
PolyModP poly_sub(const PolyModP& a, const PolyModP& b);
PolyModP poly_mul(const PolyModP& a, const PolyModP& b);
// quotient/remainder; divisor must be nonzero
std::pair<PolyModP, PolyModP> poly_divmod(const PolyModP& a, const PolyModP& b);
PolyModP poly_gcd(PolyModP a, PolyModP b); // monic
PolyModP poly_derivative(const PolyModP& a);
// a^e mod f (binary exponentiation in F_p[x]/f)
PolyModP poly_powmod(const PolyModP& a, const mpz_class& e, const PolyModP& f);

struct FactorizationModP {
    // (irreducible monic factor, exponent), sorted degree-then-lex
    std::vector<std::pair<PolyModP, unsigned>> factors;

    PolyModP product() const;
};

// Coefficient-wise reduction of an integer polynomial (constant first).
PolyModP reduce_mod_p(const std::vector<mpz_class>& int_poly, const mpz_class& p);

// Complete factorization of a monic polynomial into irreducibles.
// Squarefree split via gcd(f, f') (with the char-p p-th-power descent),
// distinct-degree via gcd with x^(p^k) - x, equal-degree via exhaustive
// root search for linear factors with p <= 10^4 and seeded
// Cantor-Zassenhaus otherwise. p = 2 never reaches the randomized path.
FactorizationModP factor_mod_p(const PolyModP& f, unsigned long seed = kFactorSeed);

// Discriminant of a monic integer quartic: disc = Res(f, f') via the 7x7
// Sylvester determinant (sign (-1)^(4*3/2) = +1, leading coefficient 1).
mpz_class quartic_discriminant(const std::vector<mpz_class>& int_poly);

// Exact determinant of a square integer matrix (Bareiss, fraction-free).
mpz_class det_bareiss(std::vector<std::vector<mpz_class>> m);

} // namespace sqf

#endif

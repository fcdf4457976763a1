#ifndef SQF_SPLITTING_HPP
#define SQF_SPLITTING_HPP

#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "sqf/field.hpp"
#include "sqf/order.hpp"

namespace sqf {

enum class FactorSource {
    dedekind,  // lifted from the factorization of the defining poly mod p
    two_table, // the explicit two-generator table for p = 2
};

const char* factor_source_name(FactorSource s);

struct PrimeIdealFactor {
    mpz_class p;
    AlgebraicNumber generator; // second generator alongside p
    unsigned e;                // ramification index
    unsigned f;                // residue degree
};

struct IdealFactorization {
    mpz_class m;
    mpz_class p;
    std::vector<PrimeIdealFactor> factors;
    FactorSource source;

    // multiset of (e, f) pairs, sorted
    std::vector<std::pair<unsigned, unsigned>> shape() const;
    unsigned sum_ef() const;
    std::string str() const;
};

// Dedekind route: factor the defining polynomial mod p and lift each
// irreducible factor with coefficients in [0, p). Valid because no odd
// prime divides I(theta); p = 2 must go through factor_two instead.
IdealFactorization factor_odd_prime(const mpz_class& m, const mpz_class& p);

// The two-generator table for p = 2, split by v_2(m); residue degrees are
// the norm-certified values (verify_factorization re-derives them)
IdealFactorization factor_two(const mpz_class& m);

// routes p = 2 to factor_two and odd p to factor_odd_prime
IdealFactorization factor_prime(const mpz_class& m, const mpz_class& p);

struct VerifyCertificate {
    bool pass;
    std::string failure;       // empty when pass
    std::string normal_forms;  // order + per-factor ideal NFs + product NF
};

// Re-proves a claimed factorization inside the p-maximal order: each factor
// generates a prime ideal with the claimed residue degree, the factors are
// pairwise distinct, sum e*f = 4, and the product with multiplicities
// equals p * O.
VerifyCertificate verify_factorization(const IdealFactorization& fact);

// like verify_factorization but throws verification_failed on failure
void verify_factorization_or_throw(const IdealFactorization& fact);

// true iff no monic degree-4 polynomial over F_p factors with this
// (e, f)-multiset, i.e. some degree demands more distinct irreducibles
// than exist over F_p. Throws bad_shape unless sum e*f = 4.
bool is_common_index_divisor(const mpz_class& p,
                             const std::vector<std::pair<unsigned, unsigned>>& shape);

// 2 if 2 is a common index divisor for K_m (decided from the shape of
// factor_two), else 1; cross-checked against the parity rule
unsigned field_index_via_splitting(const mpz_class& m);

} // namespace sqf

#endif

#ifndef SQF_FIELD_HPP
#define SQF_FIELD_HPP

#include <array>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "sqf/errors.hpp"

namespace sqf {

// K_m = Q(theta), theta a root of x^4 - m x^3 - 6 x^2 + m x + 1.
// Constant-first coefficient vector of the defining polynomial.
std::vector<mpz_class> defining_poly(const mpz_class& m);

// Reduce an integer polynomial in theta (constant first, any degree) to
// degree <= 3 using theta^4 = m theta^3 + 6 theta^2 - m theta - 1.
std::array<mpz_class, 4> reduce_theta_poly(const mpz_class& m, std::vector<mpz_class> coeffs);

// Element (c0 + c1 theta + c2 theta^2 + c3 theta^3) / den of K_m.
// Normalized: den >= 1 and gcd(c0, c1, c2, c3, den) = 1.
class AlgebraicNumber {
  public:
    AlgebraicNumber(mpz_class m, std::array<mpz_class, 4> num, mpz_class den = 1);

    // integer polynomial in theta (any degree), reduced mod the defining poly
    static AlgebraicNumber from_poly(const mpz_class& m, const std::vector<mpz_class>& coeffs,
                                     const mpz_class& den = 1);
    static AlgebraicNumber zero(const mpz_class& m) { return {m, {0, 0, 0, 0}}; }
    static AlgebraicNumber one(const mpz_class& m) { return {m, {1, 0, 0, 0}}; }
    static AlgebraicNumber theta(const mpz_class& m) { return {m, {0, 1, 0, 0}}; }

    const mpz_class& m() const { return m_; }
    const std::array<mpz_class, 4>& num() const { return num_; }
    const mpz_class& den() const { return den_; }

    bool is_zero() const;
    bool is_integral_coords() const { return den_ == 1; } // lies in Z[theta]

    friend AlgebraicNumber operator+(const AlgebraicNumber& a, const AlgebraicNumber& b);
    friend AlgebraicNumber operator-(const AlgebraicNumber& a, const AlgebraicNumber& b);
    friend AlgebraicNumber operator*(const AlgebraicNumber& a, const AlgebraicNumber& b);
    AlgebraicNumber operator-() const;
    bool operator==(const AlgebraicNumber& o) const;

    // characteristic polynomial of multiplication by this element (degree 4,
    // constant first, rational); integral iff the element is an algebraic
    // integer
    std::vector<mpq_class> char_poly() const;
    bool is_algebraic_integer() const;

    std::string str(const std::string& var = "theta") const;

  private:
    void normalize();

    mpz_class m_;
    std::array<mpz_class, 4> num_;
    mpz_class den_;
};

// All derived invariants of one K_m.
struct FieldParams {
    mpz_class m;
    mpz_class M;         // m^2 + 16
    unsigned long v2m;   // v_2(m)
    mpz_class M_odd;     // odd part of M, squarefree for valid m
    mpz_class poly_disc; // disc of the defining polynomial
    unsigned theta_index; // I(theta) in {2, 4, 8, 16}
    unsigned field_index; // I(K) in {1, 2}
    mpz_class field_disc; // poly_disc / theta_index^2
};

// disc of the defining polynomial. Uses the closed form 4 (m^2+16)^3 only
// after a one-time cross-check against the Sylvester-resultant oracle over
// m = 1..1000; falls back to the resultant if the check ever fails.
mpz_class poly_discriminant(const mpz_class& m);

// I(theta) from v_2(m): 0 -> 2, 1 -> 4, 2 -> 8, >= 3 -> 16
unsigned theta_index_of_v2(unsigned long v2m);
unsigned theta_index(const mpz_class& m);

// I(K_m): 2 iff m odd
unsigned field_index(const mpz_class& m);

// poly_disc / I(theta)^2; division must be exact
mpz_class field_discriminant(const mpz_class& m);

// The element 2 theta^3 - 2m theta^2 - 10 theta + m, whose square reduces
// to m^2 + 16 (canonical sign choice for sqrt(M)).
AlgebraicNumber sqrt_M_element(const mpz_class& m);

// Validates m (rejects m <= 0, m = 3 / square M, non-squarefree odd part)
// and fills every invariant.
FieldParams build(const mpz_class& m);

// validation only; throws like build but skips the discriminant work
void check_valid_m(const mpz_class& m);

// build() without the validity gate, for m already certified (the census
// sieve certifies whole ranges at once); still enforces the exact-division
// identity between poly_disc, theta_index and field_disc
FieldParams fill_invariants_presieved(const mpz_class& m);

} // namespace sqf

#endif

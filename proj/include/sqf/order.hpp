#ifndef SQF_ORDER_HPP
#define SQF_ORDER_HPP

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "sqf/field.hpp"

namespace sqf {

using Vec4 = std::array<mpz_class, 4>;
using Mat4 = std::array<Vec4, 4>;

// Row HNF of a spanning set of a full-rank submodule of Z^4: upper
// triangular, positive diagonal, entries above each pivot reduced into
// [0, pivot). Throws internal_inconsistency if the rows do not span a
// rank-4 module.
Mat4 hnf_rows(std::vector<Vec4> rows);

// Ring between Z[theta] and O_K, represented by a basis in row HNF over the
// power basis: basis element i is (row i of basis)/den. Always contains
// Z[theta]; closure under multiplication is checked at construction.
class Order {
  public:
    static Order ztheta(const mpz_class& m);
    // rows of power-basis coordinates with common denominator den
    static Order from_rows(const mpz_class& m, std::vector<Vec4> rows, const mpz_class& den);

    const mpz_class& m() const { return m_; }
    const mpz_class& den() const { return den_; }
    const Mat4& basis() const { return basis_; }

    // e_i * e_j = sum_k table(i,j)[k] e_k
    const Vec4& table(int i, int j) const { return table_[i][j]; }

    // module index (O : Z[theta]); a positive integer
    mpz_class index_in_ztheta() const;

    // product of order-coordinate vectors via the multiplication table
    Vec4 mul(const Vec4& a, const Vec4& b) const;

    // coordinates of alpha in this order's basis, if alpha belongs to it
    std::optional<Vec4> coords_of(const AlgebraicNumber& alpha) const;
    AlgebraicNumber element_from_coords(const Vec4& y) const;

    bool operator==(const Order& o) const {
        return m_ == o.m_ && den_ == o.den_ && basis_ == o.basis_;
    }

    std::string str() const;

  private:
    Order(mpz_class m, Mat4 basis, mpz_class den);
    void build_table();

    mpz_class m_;
    mpz_class den_;
    Mat4 basis_;
    std::array<std::array<Vec4, 4>, 4> table_;
};

using OrderPtr = std::shared_ptr<const Order>;

// Ideal of an order as a Z-module in the order's coordinates, row HNF.
struct IdealNF {
    OrderPtr order;
    Mat4 mat;

    bool operator==(const IdealNF& o) const;
    std::string str() const;
};

// {x in O : x^k in pO}, the p-radical, as an ideal of O
IdealNF p_radical(const OrderPtr& order, const mpz_class& p);

// ring of multipliers {x in K : x I <= I}; equals the order iff the order
// is p-maximal (for I the p-radical)
Order multiplier_ring(const IdealNF& radical, const mpz_class& p);

struct DedekindResult {
    bool p_maximal;   // polynomial criterion on the defining polynomial
    Order enlargement; // one radical-idealizer step applied to Z[theta]
};

// Dedekind criterion for Z[theta] at p, with the Round-2 enlargement step.
// The boolean comes from the gcd(T, g, h) test, the enlargement from the
// multiplier ring of the radical; the two agree and are cross-checked in
// the test suite.
DedekindResult dedekind_test(const mpz_class& m, const mpz_class& p);

// Fixed point of the radical-idealizer enlargement starting at Z[theta].
// Throws non_convergence after 8 rounds (impossible for a quartic).
Order p_maximal_order(const mpz_class& m, const mpz_class& p);

// v_p of (p-maximal order : Z[theta])
unsigned long index_valuation(const mpz_class& m, const mpz_class& p);

// normal form of p*order + alpha*order; alpha must lie in the order
IdealNF ideal_from_generators(const OrderPtr& order, const mpz_class& p,
                              const AlgebraicNumber& alpha);

IdealNF ideal_product(const IdealNF& a, const IdealNF& b);

mpz_class ideal_norm(const IdealNF& a);

struct PrimalityResult {
    bool prime;
    unsigned residue_degree; // f with norm = p^f (meaningful when prime)
};

// Decides whether a is a prime (= maximal) ideal by testing whether
// order/a is a field: the quotient is an F_p-algebra of dimension f <= 4;
// it is a field iff it is reduced (trivial iterated-Frobenius kernel) and
// has exactly one Frobenius-fixed line. Requires p*order <= a and a != order.
PrimalityResult is_prime_ideal(const IdealNF& a, const mpz_class& p);

} // namespace sqf

#endif

#include "sqf/order.hpp"

#include <sstream>

#include "sqf/int_arith.hpp"
#include "sqf/poly_mod_p.hpp"

namespace sqf {

namespace {

mpz_class mod_p(const mpz_class& a, const mpz_class& p) {
    mpz_class r;
    mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), p.get_mpz_t());
    return r;
}

Vec4 unit_vec(int i) {
    Vec4 v{0, 0, 0, 0};
    v[i] = 1;
    return v;
}

bool is_zero_vec(const Vec4& v) {
    return v[0] == 0 && v[1] == 0 && v[2] == 0 && v[3] == 0;
}

// unique y with y * B = u when it is integral (B upper triangular)
std::optional<Vec4> solve_integral(const Mat4& B, const Vec4& u) {
    Vec4 y;
    mpz_class acc, q, r;
    for (int j = 0; j < 4; ++j) {
        acc = u[j];
        for (int k = 0; k < j; ++k) acc -= y[k] * B[k][j];
        mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), acc.get_mpz_t(), B[j][j].get_mpz_t());
        if (r != 0) return std::nullopt;
        y[j] = q;
    }
    return y;
}

// canonical residue of v modulo the row span of an HNF matrix
void reduce_vec(const Mat4& mat, Vec4& v) {
    mpz_class q;
    for (int j = 0; j < 4; ++j) {
        mpz_fdiv_q(q.get_mpz_t(), v[j].get_mpz_t(), mat[j][j].get_mpz_t());
        if (q == 0) continue;
        for (int k = j; k < 4; ++k) v[k] -= q * mat[j][k];
    }
}

// ---- small dense linear algebra over F_p ---------------------------------

using ModMatrix = std::vector<std::vector<mpz_class>>;

std::size_t eliminate(ModMatrix& m, const mpz_class& p, std::vector<long>* pivot_of_row) {
    std::size_t rows = m.size(), cols = rows ? m[0].size() : 0;
    std::size_t rank = 0;
    for (std::size_t col = 0; col < cols && rank < rows; ++col) {
        std::size_t piv = rank;
        while (piv < rows && m[piv][col] == 0) ++piv;
        if (piv == rows) continue;
        std::swap(m[rank], m[piv]);
        mpz_class inv = invmod(m[rank][col], p);
        for (std::size_t j = col; j < cols; ++j) m[rank][j] = mod_p(m[rank][j] * inv, p);
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == rank || m[i][col] == 0) continue;
            mpz_class c = m[i][col];
            for (std::size_t j = col; j < cols; ++j)
                m[i][j] = mod_p(m[i][j] - c * m[rank][j], p);
        }
        if (pivot_of_row) pivot_of_row->push_back(static_cast<long>(col));
        ++rank;
    }
    return rank;
}

std::size_t rank_mod_p(ModMatrix m, const mpz_class& p) { return eliminate(m, p, nullptr); }

// basis of {v : M v = 0} over F_p
std::vector<std::vector<mpz_class>> right_nullspace(ModMatrix m, const mpz_class& p) {
    std::size_t cols = m.empty() ? 0 : m[0].size();
    std::vector<long> pivots;
    std::size_t rank = eliminate(m, p, &pivots);
    std::vector<char> is_pivot(cols, 0);
    for (long c : pivots) is_pivot[static_cast<std::size_t>(c)] = 1;
    std::vector<std::vector<mpz_class>> basis;
    for (std::size_t fc = 0; fc < cols; ++fc) {
        if (is_pivot[fc]) continue;
        std::vector<mpz_class> v(cols, 0);
        v[fc] = 1;
        for (std::size_t r = 0; r < rank; ++r) {
            long pc = pivots[r];
            v[static_cast<std::size_t>(pc)] = mod_p(-m[r][fc], p);
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

// basis of {x : x A = 0}: right nullspace of the transpose
std::vector<Vec4> left_nullspace4(const std::vector<std::vector<mpz_class>>& a,
                                  const mpz_class& p) {
    std::size_t rows = a.size(), cols = rows ? a[0].size() : 0;
    ModMatrix t(cols, std::vector<mpz_class>(rows));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) t[j][i] = a[i][j];
    std::vector<Vec4> out;
    for (auto& v : right_nullspace(std::move(t), p)) {
        Vec4 w;
        for (int i = 0; i < 4; ++i) w[i] = v[static_cast<std::size_t>(i)];
        out.push_back(std::move(w));
    }
    return out;
}

} // namespace

Mat4 hnf_rows(std::vector<Vec4> rows) {
    if (rows.size() < 4)
        throw Error(errc::internal_inconsistency, "hnf_rows needs at least 4 rows");
    std::size_t r = 0;
    for (int col = 0; col < 4; ++col) {
        for (;;) {
            std::size_t best = rows.size();
            for (std::size_t i = r; i < rows.size(); ++i) {
                if (rows[i][col] == 0) continue;
                if (best == rows.size() ||
                    mpz_cmpabs(rows[i][col].get_mpz_t(), rows[best][col].get_mpz_t()) < 0)
                    best = i;
            }
            if (best == rows.size())
                throw Error(errc::internal_inconsistency, "hnf_rows: rank-deficient input");
            std::swap(rows[r], rows[best]);
            // reduce every other entry modulo the pivot; remainders are
            // strictly smaller, so repeating converges like the euclidean
            // algorithm
            bool leftover = false;
            mpz_class q;
            for (std::size_t i = r + 1; i < rows.size(); ++i) {
                if (rows[i][col] == 0) continue;
                mpz_tdiv_q(q.get_mpz_t(), rows[i][col].get_mpz_t(), rows[r][col].get_mpz_t());
                if (q != 0)
                    for (int k = col; k < 4; ++k) rows[i][k] -= q * rows[r][k];
                if (rows[i][col] != 0) leftover = true;
            }
            if (!leftover) break;
        }
        if (rows[r][col] < 0)
            for (int k = col; k < 4; ++k) rows[r][k] = -rows[r][k];
        ++r;
    }
    for (std::size_t i = 4; i < rows.size(); ++i)
        if (!is_zero_vec(rows[i]))
            throw Error(errc::internal_inconsistency, "hnf_rows: elimination left residue");

    Mat4 out;
    for (int i = 0; i < 4; ++i) out[i] = rows[i];
    // reduce entries above each pivot into [0, pivot)
    mpz_class q;
    for (int j = 1; j < 4; ++j)
        for (int i = 0; i < j; ++i) {
            mpz_fdiv_q(q.get_mpz_t(), out[i][j].get_mpz_t(), out[j][j].get_mpz_t());
            if (q == 0) continue;
            for (int k = j; k < 4; ++k) out[i][k] -= q * out[j][k];
        }
    return out;
}

Order::Order(mpz_class m, Mat4 basis, mpz_class den)
    : m_(std::move(m)), den_(std::move(den)), basis_(std::move(basis)) {
    // must contain Z[theta]
    for (int i = 0; i < 4; ++i) {
        Vec4 u{0, 0, 0, 0};
        u[i] = den_;
        if (!solve_integral(basis_, u))
            throw Error(errc::internal_inconsistency,
                        "order does not contain theta^" + std::to_string(i));
    }
    build_table();
}

Order Order::ztheta(const mpz_class& m) {
    Mat4 id;
    for (int i = 0; i < 4; ++i) id[i] = unit_vec(i);
    return Order(m, id, 1);
}

Order Order::from_rows(const mpz_class& m, std::vector<Vec4> rows, const mpz_class& den) {
    Mat4 h = hnf_rows(std::move(rows));
    mpz_class g = den;
    for (const auto& row : h)
        for (const auto& x : row) {
            mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
            if (g == 1) break;
        }
    if (g > 1) {
        for (auto& row : h)
            for (auto& x : row) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), g.get_mpz_t());
    }
    mpz_class d;
    mpz_divexact(d.get_mpz_t(), den.get_mpz_t(), g.get_mpz_t());
    return Order(m, std::move(h), std::move(d));
}

void Order::build_table() {
    mpz_class den_sq = den_ * den_;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j <= i; ++j) {
            std::vector<mpz_class> prod(7, 0);
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) prod[a + b] += basis_[i][a] * basis_[j][b];
            Vec4 u = reduce_theta_poly(m_, std::move(prod));
            // e_i e_j = u / den^2; coordinates solve y B = u / den
            Vec4 v;
            mpz_class r;
            for (int k = 0; k < 4; ++k) {
                mpz_tdiv_qr(v[k].get_mpz_t(), r.get_mpz_t(), u[k].get_mpz_t(),
                            den_.get_mpz_t());
                if (r != 0)
                    throw Error(errc::internal_inconsistency,
                                "order basis not closed under multiplication");
            }
            auto y = solve_integral(basis_, v);
            if (!y)
                throw Error(errc::internal_inconsistency,
                            "order basis not closed under multiplication");
            table_[i][j] = *y;
            table_[j][i] = *y;
        }
}

mpz_class Order::index_in_ztheta() const {
    mpz_class det = basis_[0][0] * basis_[1][1] * basis_[2][2] * basis_[3][3];
    mpz_class den4;
    mpz_pow_ui(den4.get_mpz_t(), den_.get_mpz_t(), 4);
    mpz_class idx, r;
    mpz_tdiv_qr(idx.get_mpz_t(), r.get_mpz_t(), den4.get_mpz_t(), det.get_mpz_t());
    if (r != 0 || idx <= 0)
        throw Error(errc::internal_inconsistency, "order index is not a positive integer");
    return idx;
}

Vec4 Order::mul(const Vec4& a, const Vec4& b) const {
    Vec4 c{0, 0, 0, 0};
    for (int i = 0; i < 4; ++i) {
        if (a[i] == 0) continue;
        for (int j = 0; j < 4; ++j) {
            if (b[j] == 0) continue;
            mpz_class s = a[i] * b[j];
            for (int k = 0; k < 4; ++k) c[k] += s * table_[i][j][k];
        }
    }
    return c;
}

std::optional<Vec4> Order::coords_of(const AlgebraicNumber& alpha) const {
    if (alpha.m() != m_)
        throw Error(errc::mixed_fields, "element belongs to a different field");
    Vec4 v;
    mpz_class r;
    for (int i = 0; i < 4; ++i) {
        mpz_class t = alpha.num()[i] * den_;
        mpz_tdiv_qr(v[i].get_mpz_t(), r.get_mpz_t(), t.get_mpz_t(),
                    alpha.den().get_mpz_t());
        if (r != 0) return std::nullopt;
    }
    return solve_integral(basis_, v);
}

AlgebraicNumber Order::element_from_coords(const Vec4& y) const {
    std::array<mpz_class, 4> c{0, 0, 0, 0};
    for (int i = 0; i < 4; ++i) {
        if (y[i] == 0) continue;
        for (int k = 0; k < 4; ++k) c[k] += y[i] * basis_[i][k];
    }
    return AlgebraicNumber(m_, std::move(c), den_);
}

std::string Order::str() const {
    std::ostringstream os;
    os << "order(m=" << m_ << ", den=" << den_ << ", basis=[";
    for (int i = 0; i < 4; ++i) {
        os << (i ? "; " : "");
        for (int j = 0; j < 4; ++j) os << (j ? "," : "") << basis_[i][j];
    }
    os << "])";
    return os.str();
}

bool IdealNF::operator==(const IdealNF& o) const {
    return *order == *o.order && mat == o.mat;
}

std::string IdealNF::str() const {
    std::ostringstream os;
    os << "ideal[";
    for (int i = 0; i < 4; ++i) {
        os << (i ? "; " : "");
        for (int j = 0; j < 4; ++j) os << (j ? "," : "") << mat[i][j];
    }
    os << "]";
    return os.str();
}

namespace {

Vec4 one_coords(const Order& O) {
    Vec4 u{O.den(), 0, 0, 0};
    auto y = solve_integral(O.basis(), u);
    if (!y) throw Error(errc::internal_inconsistency, "order does not contain 1");
    return *y;
}

Vec4 mul_mod(const Order& O, const Vec4& a, const Vec4& b, const mpz_class& p) {
    Vec4 c = O.mul(a, b);
    for (auto& x : c) x = mod_p(x, p);
    return c;
}

// coordinates of x^p in O/pO
Vec4 pow_p_mod(const Order& O, const Vec4& x, const mpz_class& p) {
    Vec4 acc = one_coords(O);
    for (auto& v : acc) v = mod_p(v, p);
    long bits = static_cast<long>(mpz_sizeinbase(p.get_mpz_t(), 2));
    for (long bit = bits - 1; bit >= 0; --bit) {
        acc = mul_mod(O, acc, acc, p);
        if (mpz_tstbit(p.get_mpz_t(), bit)) acc = mul_mod(O, acc, x, p);
    }
    return acc;
}

// matrix (rows = images of basis vectors) of the iterated Frobenius phi^j
// with p^j >= 4, acting on O/pO
std::vector<std::vector<mpz_class>> frobenius_power(const Order& O, const mpz_class& p) {
    std::vector<std::vector<mpz_class>> f(4, std::vector<mpz_class>(4));
    for (int i = 0; i < 4; ++i) {
        Vec4 r = pow_p_mod(O, unit_vec(i), p);
        for (int k = 0; k < 4; ++k) f[i][k] = r[k];
    }
    mpz_class pj = p;
    while (pj < 4) {
        // square the map: rows of f2 are images of rows of f
        std::vector<std::vector<mpz_class>> f2(4, std::vector<mpz_class>(4, 0));
        for (int i = 0; i < 4; ++i)
            for (int k = 0; k < 4; ++k) {
                mpz_class s = 0;
                for (int t = 0; t < 4; ++t) s += f[i][t] * f[t][k];
                f2[i][k] = mod_p(s, p);
            }
        f = std::move(f2);
        pj *= pj;
    }
    return f;
}

} // namespace

IdealNF p_radical(const OrderPtr& order, const mpz_class& p) {
    auto frob = frobenius_power(*order, p);
    std::vector<Vec4> rows = left_nullspace4(frob, p);
    for (int i = 0; i < 4; ++i) {
        Vec4 v = unit_vec(i);
        v[i] = p;
        rows.push_back(std::move(v));
    }
    return IdealNF{order, hnf_rows(std::move(rows))};
}

Order multiplier_ring(const IdealNF& radical, const mpz_class& p) {
    const Order& O = *radical.order;
    // Psi: y -> coordinates of y*b_j in the ideal basis, all j stacked
    std::vector<std::vector<mpz_class>> psi(4, std::vector<mpz_class>(16));
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            Vec4 v = O.mul(unit_vec(i), radical.mat[j]);
            auto w = solve_integral(radical.mat, v);
            if (!w)
                throw Error(errc::internal_inconsistency,
                            "radical is not an ideal of its order");
            for (int k = 0; k < 4; ++k) psi[i][4 * j + k] = mod_p((*w)[k], p);
        }
    std::vector<Vec4> kernel = left_nullspace4(psi, p);

    std::vector<Vec4> rows;
    for (const auto& y : kernel) {
        Vec4 r{0, 0, 0, 0};
        for (int i = 0; i < 4; ++i)
            for (int k = 0; k < 4; ++k) r[k] += y[i] * O.basis()[i][k];
        rows.push_back(std::move(r));
    }
    for (int i = 0; i < 4; ++i) {
        Vec4 r;
        for (int k = 0; k < 4; ++k) r[k] = p * O.basis()[i][k];
        rows.push_back(std::move(r));
    }
    return Order::from_rows(O.m(), std::move(rows), p * O.den());
}

DedekindResult dedekind_test(const mpz_class& m, const mpz_class& p) {
    check_valid_m(m);
    std::vector<mpz_class> f = defining_poly(m);
    PolyModP fbar = reduce_mod_p(f, p);
    FactorizationModP fact = factor_mod_p(fbar);

    PolyModP gbar(p, {1});
    for (const auto& [gi, ei] : fact.factors) gbar = poly_mul(gbar, gi);
    PolyModP hbar = poly_divmod(fbar, gbar).first;

    // T = (g h - f)/p with g, h the monic lifts with coefficients in [0, p)
    std::vector<mpz_class> gh(gbar.coeffs.size() + hbar.coeffs.size() - 1, 0);
    for (std::size_t i = 0; i < gbar.coeffs.size(); ++i)
        for (std::size_t j = 0; j < hbar.coeffs.size(); ++j)
            gh[i + j] += gbar.coeffs[i] * hbar.coeffs[j];
    std::vector<mpz_class> tpoly(gh.size());
    for (std::size_t i = 0; i < gh.size(); ++i) {
        mpz_class diff = gh[i] - (i < f.size() ? f[i] : mpz_class(0));
        mpz_class q, r;
        mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), diff.get_mpz_t(), p.get_mpz_t());
        if (r != 0)
            throw Error(errc::internal_inconsistency, "dedekind_test: g*h != f mod p");
        tpoly[i] = q;
    }
    PolyModP tbar = reduce_mod_p(tpoly, p);
    PolyModP u = poly_gcd(poly_gcd(tbar, gbar), hbar);
    bool maximal = u.degree() == 0;

    auto z = std::make_shared<const Order>(Order::ztheta(m));
    Order enlarged = multiplier_ring(p_radical(z, p), p);
    return DedekindResult{maximal, std::move(enlarged)};
}

Order p_maximal_order(const mpz_class& m, const mpz_class& p) {
    check_valid_m(m);
    Order current = Order::ztheta(m);
    for (int round = 0; round < 8; ++round) {
        auto ptr = std::make_shared<const Order>(current);
        Order next = multiplier_ring(p_radical(ptr, p), p);
        if (next == current) return current;
        current = std::move(next);
    }
    throw Error(errc::non_convergence,
                "maximal-order loop did not stabilize for m=" + m.get_str() +
                    ", p=" + p.get_str());
}

unsigned long index_valuation(const mpz_class& m, const mpz_class& p) {
    mpz_class idx = p_maximal_order(m, p).index_in_ztheta();
    if (idx == 1) return 0;
    mpz_class stripped;
    return mpz_remove(stripped.get_mpz_t(), idx.get_mpz_t(), p.get_mpz_t());
}

IdealNF ideal_from_generators(const OrderPtr& order, const mpz_class& p,
                              const AlgebraicNumber& alpha) {
    auto y = order->coords_of(alpha);
    if (!y)
        throw Error(errc::not_in_order,
                    alpha.str() + " does not lie in " + order->str());
    std::vector<Vec4> rows;
    for (int i = 0; i < 4; ++i) {
        Vec4 r = unit_vec(i);
        r[i] = p;
        rows.push_back(std::move(r));
    }
    if (!is_zero_vec(*y))
        for (int i = 0; i < 4; ++i) rows.push_back(order->mul(*y, unit_vec(i)));
    return IdealNF{order, hnf_rows(std::move(rows))};
}

IdealNF ideal_product(const IdealNF& a, const IdealNF& b) {
    if (!(*a.order == *b.order))
        throw Error(errc::mixed_orders, "ideal product across different orders");
    std::vector<Vec4> rows;
    rows.reserve(16);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) rows.push_back(a.order->mul(a.mat[i], b.mat[j]));
    return IdealNF{a.order, hnf_rows(std::move(rows))};
}

mpz_class ideal_norm(const IdealNF& a) {
    return a.mat[0][0] * a.mat[1][1] * a.mat[2][2] * a.mat[3][3];
}

PrimalityResult is_prime_ideal(const IdealNF& a, const mpz_class& p) {
    const Order& O = *a.order;
    for (int i = 0; i < 4; ++i) {
        Vec4 v = unit_vec(i);
        v[i] = p;
        reduce_vec(a.mat, v);
        if (!is_zero_vec(v))
            throw Error(errc::not_above_prime,
                        "ideal does not contain " + p.get_str() + "*order");
    }
    mpz_class nrm = ideal_norm(a);
    if (nrm == 1)
        throw Error(errc::not_above_prime, "unit ideal is not above any prime");

    std::vector<int> s;
    for (int i = 0; i < 4; ++i) {
        const mpz_class& d = a.mat[i][i];
        if (d == 1) continue;
        if (d != p)
            throw Error(errc::internal_inconsistency,
                        "ideal normal form has diagonal entry " + d.get_str());
        s.push_back(i);
    }
    unsigned f = static_cast<unsigned>(s.size());

    // quotient multiplication: multiply in O, reduce by the ideal
    auto qmul = [&](const Vec4& x, const Vec4& y) {
        Vec4 r = O.mul(x, y);
        reduce_vec(a.mat, r);
        return r;
    };
    auto qpow_p = [&](Vec4 x) {
        Vec4 acc = one_coords(O);
        reduce_vec(a.mat, acc);
        long bits = static_cast<long>(mpz_sizeinbase(p.get_mpz_t(), 2));
        for (long bit = bits - 1; bit >= 0; --bit) {
            acc = qmul(acc, acc);
            if (mpz_tstbit(p.get_mpz_t(), bit)) acc = qmul(acc, x);
        }
        return acc;
    };

    // Frobenius on the quotient, in the basis {e_i : i in s}
    ModMatrix frob(f, std::vector<mpz_class>(f));
    for (unsigned r = 0; r < f; ++r) {
        Vec4 img = qpow_p(unit_vec(s[r]));
        for (unsigned c = 0; c < f; ++c) frob[r][c] = img[s[c]];
    }

    // reduced quotient: iterated Frobenius (p^k >= f) has trivial kernel
    ModMatrix fk = frob;
    mpz_class pk = p;
    while (pk < f) {
        ModMatrix f2(f, std::vector<mpz_class>(f, 0));
        for (unsigned i = 0; i < f; ++i)
            for (unsigned k = 0; k < f; ++k) {
                mpz_class acc = 0;
                for (unsigned t = 0; t < f; ++t) acc += fk[i][t] * fk[t][k];
                f2[i][k] = mod_p(acc, p);
            }
        fk = std::move(f2);
        pk *= pk;
    }
    bool reduced = rank_mod_p(fk, p) == f;

    // a field has exactly one Frobenius-fixed line (the prime subfield);
    // a product of r fields has r of them
    ModMatrix fmi = frob;
    for (unsigned i = 0; i < f; ++i) fmi[i][i] = mod_p(fmi[i][i] - 1, p);
    bool single_factor = rank_mod_p(fmi, p) == f - 1;

    return PrimalityResult{reduced && single_factor, f};
}

} // namespace sqf

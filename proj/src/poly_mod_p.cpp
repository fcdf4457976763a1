#include "sqf/poly_mod_p.hpp"

#include <algorithm>
#include <map>

#include "sqf/int_arith.hpp"

namespace sqf {

namespace {

void trim(std::vector<mpz_class>& c) {
    while (!c.empty() && c.back() == 0) c.pop_back();
}

mpz_class mod_p(const mpz_class& a, const mpz_class& p) {
    mpz_class r;
    mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), p.get_mpz_t());
    return r;
}

void check_same_p(const PolyModP& a, const PolyModP& b) {
    if (a.p != b.p)
        throw Error(errc::internal_inconsistency, "polynomials over different primes");
}

} // namespace

PolyModP::PolyModP(mpz_class prime, std::vector<mpz_class> c) : p(std::move(prime)) {
    coeffs.reserve(c.size());
    for (auto& x : c) coeffs.push_back(mod_p(x, p));
    trim(coeffs);
}

mpz_class PolyModP::eval(const mpz_class& x) const {
    mpz_class acc = 0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = mod_p(acc * x + *it, p);
    return acc;
}

int PolyModP::cmp(const PolyModP& a, const PolyModP& b) {
    if (a.degree() != b.degree()) return a.degree() < b.degree() ? -1 : 1;
    for (int i = a.degree(); i >= 0; --i) {
        int c = ::cmp(a.coeffs[i], b.coeffs[i]);
        if (c) return c;
    }
    return 0;
}

std::string PolyModP::str(const std::string& var) const {
    if (is_zero()) return "0";
    std::string s;
    for (int i = degree(); i >= 0; --i) {
        if (coeffs[i] == 0) continue;
        if (!s.empty()) s += " + ";
        if (i == 0 || coeffs[i] != 1) s += coeffs[i].get_str();
        if (i > 0) {
            if (coeffs[i] != 1) s += "*";
            s += var;
            if (i > 1) s += "^" + std::to_string(i);
        }
    }
    return s;
}

PolyModP poly_add(const PolyModP& a, const PolyModP& b) {
    check_same_p(a, b);
    std::vector<mpz_class> c(std::max(a.coeffs.size(), b.coeffs.size()), 0);
    for (std::size_t i = 0; i < a.coeffs.size(); ++i) c[i] += a.coeffs[i];
    for (std::size_t i = 0; i < b.coeffs.size(); ++i) c[i] += b.coeffs[i];
    return PolyModP(a.p, std::move(c));
}

PolyModP poly_sub(const PolyModP& a, const PolyModP& b) {
    check_same_p(a, b);
    std::vector<mpz_class> c(std::max(a.coeffs.size(), b.coeffs.size()), 0);
    for (std::size_t i = 0; i < a.coeffs.size(); ++i) c[i] += a.coeffs[i];
    for (std::size_t i = 0; i < b.coeffs.size(); ++i) c[i] -= b.coeffs[i];
    return PolyModP(a.p, std::move(c));
}

PolyModP poly_mul(const PolyModP& a, const PolyModP& b) {
    check_same_p(a, b);
    if (a.is_zero() || b.is_zero()) return PolyModP(a.p, {});
    std::vector<mpz_class> c(a.coeffs.size() + b.coeffs.size() - 1, 0);
    for (std::size_t i = 0; i < a.coeffs.size(); ++i)
        for (std::size_t j = 0; j < b.coeffs.size(); ++j) c[i + j] += a.coeffs[i] * b.coeffs[j];
    return PolyModP(a.p, std::move(c));
}

std::pair<PolyModP, PolyModP> poly_divmod(const PolyModP& a, const PolyModP& b) {
    check_same_p(a, b);
    if (b.is_zero()) throw Error(errc::zero_input, "polynomial division by zero");
    if (a.degree() < b.degree()) return {PolyModP(a.p, {}), a};
    mpz_class lcinv = invmod(b.lc(), b.p);
    std::vector<mpz_class> rem = a.coeffs;
    std::vector<mpz_class> quo(a.degree() - b.degree() + 1, 0);
    for (int k = a.degree() - b.degree(); k >= 0; --k) {
        mpz_class q = mod_p(rem[k + b.degree()] * lcinv, a.p);
        quo[k] = q;
        if (q == 0) continue;
        for (int j = 0; j <= b.degree(); ++j)
            rem[k + j] = mod_p(rem[k + j] - q * b.coeffs[j], a.p);
    }
    return {PolyModP(a.p, std::move(quo)), PolyModP(a.p, std::move(rem))};
}

PolyModP poly_gcd(PolyModP a, PolyModP b) {
    check_same_p(a, b);
    while (!b.is_zero()) {
        PolyModP r = poly_divmod(a, b).second;
        a = std::move(b);
        b = std::move(r);
    }
    if (a.is_zero() || a.lc() == 1) return a;
    mpz_class inv = invmod(a.lc(), a.p);
    std::vector<mpz_class> c = a.coeffs;
    for (auto& x : c) x *= inv;
    return PolyModP(a.p, std::move(c));
}

PolyModP poly_derivative(const PolyModP& a) {
    std::vector<mpz_class> c;
    for (int i = 1; i <= a.degree(); ++i) c.push_back(a.coeffs[i] * i);
    return PolyModP(a.p, std::move(c));
}

PolyModP poly_powmod(const PolyModP& a, const mpz_class& e, const PolyModP& f) {
    check_same_p(a, f);
    PolyModP base = poly_divmod(a, f).second;
    PolyModP acc(a.p, {1});
    for (long bit = static_cast<long>(mpz_sizeinbase(e.get_mpz_t(), 2)) - 1; bit >= 0; --bit) {
        acc = poly_divmod(poly_mul(acc, acc), f).second;
        if (mpz_tstbit(e.get_mpz_t(), bit))
            acc = poly_divmod(poly_mul(acc, base), f).second;
    }
    return acc;
}

PolyModP FactorizationModP::product() const {
    if (factors.empty())
        throw Error(errc::zero_input, "empty factorization has no defined prime");
    PolyModP acc(factors[0].first.p, {1});
    for (const auto& [g, e] : factors)
        for (unsigned i = 0; i < e; ++i) acc = poly_mul(acc, g);
    return acc;
}

PolyModP reduce_mod_p(const std::vector<mpz_class>& int_poly, const mpz_class& p) {
    return PolyModP(p, int_poly);
}

namespace {

// f(x) = g(x^p) -> g; over F_p coefficients are fixed by Frobenius
PolyModP pth_root(const PolyModP& f) {
    unsigned long p = f.p.get_ui();
    std::vector<mpz_class> c;
    for (std::size_t i = 0; i < f.coeffs.size(); i += p) c.push_back(f.coeffs[i]);
    return PolyModP(f.p, std::move(c));
}

// multiplicity map: squarefree coprime parts with their exponents
void squarefree_decompose(const PolyModP& f, unsigned mult,
                          std::vector<std::pair<PolyModP, unsigned>>& out) {
    if (f.degree() < 1) return;
    PolyModP df = poly_derivative(f);
    if (df.is_zero()) {
        if (!mpz_fits_ulong_p(f.p.get_mpz_t()))
            throw Error(errc::capacity_exceeded, "p-th power descent needs small p");
        squarefree_decompose(pth_root(f), mult * static_cast<unsigned>(f.p.get_ui()), out);
        return;
    }
    PolyModP c = poly_gcd(f, df);
    PolyModP w = poly_divmod(f, c).first;
    unsigned i = 1;
    while (!w.is_one()) {
        PolyModP y = poly_gcd(w, c);
        PolyModP z = poly_divmod(w, y).first;
        if (z.degree() >= 1) out.emplace_back(z, mult * i);
        w = std::move(y);
        c = poly_divmod(c, w).first;
        ++i;
    }
    if (!c.is_one())
        squarefree_decompose(c, mult, out); // c is a p-th power; recursion hits df == 0
}

PolyModP make_x(const mpz_class& p) { return PolyModP(p, {0, 1}); }

PolyModP monic_linear(const mpz_class& p, const mpz_class& root) {
    return PolyModP(p, {mod_p(-root, p), 1});
}

// g = product of distinct monic irreducibles, all of degree d; split them off
void equal_degree_split(const PolyModP& g, unsigned d, gmp_randclass& rng,
                        std::vector<PolyModP>& out) {
    if (g.degree() == static_cast<int>(d)) {
        out.push_back(g);
        return;
    }
    const mpz_class& p = g.p;

    if (d == 1 && (p == 2 || p <= 10'000)) {
        for (mpz_class a = 0; a < p; ++a)
            if (g.eval(a) == 0) out.push_back(monic_linear(p, a));
        return;
    }
    if (p == 2)
        // distinct same-degree factors over F_2 with total degree <= 4 can
        // only be linear, handled above (there is a single irreducible
        // quadratic, so two distinct ones cannot both divide g)
        throw Error(errc::internal_inconsistency, "unexpected equal-degree split over F_2");

    mpz_class pd;
    mpz_pow_ui(pd.get_mpz_t(), p.get_mpz_t(), d);
    mpz_class exp = (pd - 1) / 2;
    for (;;) {
        std::vector<mpz_class> hc(static_cast<std::size_t>(g.degree()), 0);
        for (auto& x : hc) x = rng.get_z_range(p);
        PolyModP h(p, std::move(hc));
        if (h.degree() < 1) continue;
        PolyModP s = poly_powmod(h, exp, g);
        s = poly_sub(s, PolyModP(p, {1}));
        PolyModP t = poly_gcd(s, g);
        if (t.degree() > 0 && t.degree() < g.degree()) {
            equal_degree_split(t, d, rng, out);
            equal_degree_split(poly_divmod(g, t).first, d, rng, out);
            return;
        }
    }
}

} // namespace

FactorizationModP factor_mod_p(const PolyModP& f, unsigned long seed) {
    if (!f.monic())
        throw Error(errc::internal_inconsistency, "factor_mod_p expects a monic polynomial");
    gmp_randclass rng(gmp_randinit_mt);
    rng.seed(seed);

    std::vector<std::pair<PolyModP, unsigned>> sqf_parts;
    squarefree_decompose(f, 1, sqf_parts);

    FactorizationModP out;
    for (const auto& [part, mult] : sqf_parts) {
        // distinct-degree split of the squarefree part
        PolyModP g = part;
        PolyModP h = make_x(f.p); // x^(p^d) mod g, iterated
        for (unsigned d = 1; g.degree() > 0 && static_cast<int>(2 * d) <= g.degree(); ++d) {
            h = poly_powmod(h, f.p, g);
            PolyModP gd = poly_gcd(poly_sub(h, make_x(f.p)), g);
            if (gd.degree() > 0) {
                std::vector<PolyModP> irr;
                equal_degree_split(gd, d, rng, irr);
                for (auto& q : irr) out.factors.emplace_back(std::move(q), mult);
                g = poly_divmod(g, gd).first;
                h = poly_divmod(h, g).second;
            }
        }
        if (g.degree() > 0) out.factors.emplace_back(g, mult); // remainder is irreducible
    }

    std::sort(out.factors.begin(), out.factors.end(),
              [](const auto& a, const auto& b) { return PolyModP::cmp(a.first, b.first) < 0; });
    return out;
}

mpz_class det_bareiss(std::vector<std::vector<mpz_class>> m) {
    const std::size_t n = m.size();
    if (n == 0) return 1;
    int sign = 1;
    mpz_class prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m[k][k] == 0) {
            std::size_t s = k + 1;
            while (s < n && m[s][k] == 0) ++s;
            if (s == n) return 0;
            std::swap(m[k], m[s]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                mpz_class t = m[i][j] * m[k][k] - m[i][k] * m[k][j];
                mpz_divexact(m[i][j].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
            }
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    return sign < 0 ? mpz_class(-m[n - 1][n - 1]) : m[n - 1][n - 1];
}

mpz_class quartic_discriminant(const std::vector<mpz_class>& int_poly) {
    if (int_poly.size() != 5 || int_poly[4] != 1)
        throw Error(errc::internal_inconsistency,
                    "quartic_discriminant expects a monic degree-4 polynomial");
    // Sylvester matrix of f (degree 4) and f' (degree 3): 3 + 4 rows
    std::vector<mpz_class> d = {int_poly[1], 2 * int_poly[2], 3 * int_poly[3], 4};
    std::vector<std::vector<mpz_class>> s(7, std::vector<mpz_class>(7, 0));
    for (int r = 0; r < 3; ++r)
        for (int j = 0; j <= 4; ++j) s[r][r + j] = int_poly[4 - j];
    for (int r = 0; r < 4; ++r)
        for (int j = 0; j <= 3; ++j) s[3 + r][r + j] = d[3 - j];
    return det_bareiss(std::move(s));
}

} // namespace sqf

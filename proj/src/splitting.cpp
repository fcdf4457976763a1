#include "sqf/splitting.hpp"

#include <algorithm>
#include <sstream>

#include "sqf/int_arith.hpp"
#include "sqf/poly_mod_p.hpp"

namespace sqf {

const char* factor_source_name(FactorSource s) {
    return s == FactorSource::dedekind ? "dedekind" : "two-table";
}

std::vector<std::pair<unsigned, unsigned>> IdealFactorization::shape() const {
    std::vector<std::pair<unsigned, unsigned>> s;
    for (const auto& f : factors) s.emplace_back(f.e, f.f);
    std::sort(s.begin(), s.end());
    return s;
}

unsigned IdealFactorization::sum_ef() const {
    unsigned t = 0;
    for (const auto& f : factors) t += f.e * f.f;
    return t;
}

std::string IdealFactorization::str() const {
    std::ostringstream os;
    os << p << " = ";
    for (std::size_t i = 0; i < factors.size(); ++i) {
        const auto& fa = factors[i];
        if (i) os << " * ";
        os << "<" << p << ", " << fa.generator.str() << ">";
        if (fa.e > 1) os << "^" << fa.e;
    }
    os << "   (e,f):";
    for (const auto& fa : factors) os << " (" << fa.e << "," << fa.f << ")";
    os << "  [" << factor_source_name(source) << "]";
    return os.str();
}

IdealFactorization factor_odd_prime(const mpz_class& m, const mpz_class& p) {
    check_valid_m(m);
    if (p == 2 || p < 2)
        throw Error(errc::internal_inconsistency, "factor_odd_prime requires an odd prime");

    FactorizationModP fact = factor_mod_p(reduce_mod_p(defining_poly(m), p));
    IdealFactorization out{m, p, {}, FactorSource::dedekind};
    for (const auto& [g, e] : fact.factors) {
        // lift with coefficients in [0, p); the generator is g(theta)
        AlgebraicNumber gen = AlgebraicNumber::from_poly(m, g.coeffs);
        out.factors.push_back(PrimeIdealFactor{p, gen, e, static_cast<unsigned>(g.degree())});
    }
    return out;
}

IdealFactorization factor_two(const mpz_class& m) {
    check_valid_m(m);
    unsigned long v2 = two_adic_valuation(m);
    IdealFactorization out{m, 2, {}, FactorSource::two_table};

    auto push = [&](AlgebraicNumber gen, unsigned e, unsigned f) {
        if (!gen.is_algebraic_integer())
            throw Error(errc::verification_failed,
                        "claimed generator " + gen.str() + " is not an algebraic integer (m=" +
                            m.get_str() + ", v2(m)=" + std::to_string(v2) + ")");
        out.factors.push_back(PrimeIdealFactor{2, std::move(gen), e, f});
    };

    if (v2 == 0) {
        // (1 +- sqrt(m^2+16))/2 with sqrt(M) = 2 theta^3 - 2m theta^2 - 10 theta + m;
        // two unramified primes of degree 2
        push(AlgebraicNumber(m, {m + 1, -10, -2 * m, 2}, 2), 1, 2);
        push(AlgebraicNumber(m, {1 - m, 10, 2 * m, -2}, 2), 1, 2);
    } else if (v2 == 1) {
        push(AlgebraicNumber(m, {6, -m, 10, m}, 4), 2, 2);
    } else if (v2 == 2) {
        push(AlgebraicNumber(m, {1, 1, 1, 1}, 4), 4, 1);
    } else if (v2 == 3) {
        mpz_class m2 = m * m, m3 = m * m * m;
        push(AlgebraicNumber(
                 m, {8 - m2, -(m3 + 21 * m - 56), 5 * m2 + 168, m3 + 25 * m + 4}, 16),
             2, 2);
    } else {
        push(AlgebraicNumber(m, {2, 7, 0, 1}, 4), 2, 1);
        push(AlgebraicNumber(m, {5, 7, 0, 1}, 4), 2, 1);
    }
    return out;
}

IdealFactorization factor_prime(const mpz_class& m, const mpz_class& p) {
    return p == 2 ? factor_two(m) : factor_odd_prime(m, p);
}

VerifyCertificate verify_factorization(const IdealFactorization& fact) {
    check_valid_m(fact.m);
    VerifyCertificate cert{true, "", ""};
    auto fail = [&](const std::string& why) {
        cert.pass = false;
        if (cert.failure.empty()) cert.failure = why;
    };

    auto order = std::make_shared<const Order>(p_maximal_order(fact.m, fact.p));
    std::ostringstream nf;
    nf << order->str() << "\n";

    if (fact.sum_ef() != 4) fail("sum of e*f is " + std::to_string(fact.sum_ef()));

    std::vector<IdealNF> ideals;
    for (const auto& pf : fact.factors) {
        if (!order->coords_of(pf.generator)) {
            fail("generator " + pf.generator.str() + " is not in the maximal order");
            nf << "  generator " << pf.generator.str() << ": NOT IN ORDER\n";
            continue;
        }
        IdealNF ideal = ideal_from_generators(order, fact.p, pf.generator);
        nf << "  <" << fact.p << ", " << pf.generator.str() << "> -> " << ideal.str()
           << " norm " << ideal_norm(ideal) << "\n";
        try {
            PrimalityResult pr = is_prime_ideal(ideal, fact.p);
            if (!pr.prime)
                fail("ideal of " + pf.generator.str() + " is not prime");
            else if (pr.residue_degree != pf.f)
                fail("residue degree of " + pf.generator.str() + " is " +
                     std::to_string(pr.residue_degree) + ", claimed " + std::to_string(pf.f));
        } catch (const Error& e) {
            fail(std::string("primality check: ") + e.what());
        }
        ideals.push_back(std::move(ideal));
    }

    for (std::size_t i = 0; i + 1 < ideals.size(); ++i)
        for (std::size_t j = i + 1; j < ideals.size(); ++j)
            if (ideals[i] == ideals[j])
                fail("factors " + std::to_string(i) + " and " + std::to_string(j) +
                     " generate the same ideal");

    if (ideals.size() == fact.factors.size()) {
        // unit ideal = the full order
        Mat4 id;
        for (int i = 0; i < 4; ++i) {
            id[i] = Vec4{0, 0, 0, 0};
            id[i][i] = 1;
        }
        IdealNF prod{order, id};
        for (std::size_t i = 0; i < ideals.size(); ++i)
            for (unsigned k = 0; k < fact.factors[i].e; ++k)
                prod = ideal_product(prod, ideals[i]);
        IdealNF p_full = ideal_from_generators(order, fact.p, AlgebraicNumber::zero(fact.m));
        nf << "  product -> " << prod.str() << "\n  p*order -> " << p_full.str() << "\n";
        if (!(prod == p_full)) fail("product of factors differs from p*order");
    }

    cert.normal_forms = nf.str();
    return cert;
}

void verify_factorization_or_throw(const IdealFactorization& fact) {
    VerifyCertificate cert = verify_factorization(fact);
    if (!cert.pass)
        throw Error(errc::verification_failed,
                    cert.failure + "\n" + fact.str() + "\n" + cert.normal_forms);
}

bool is_common_index_divisor(const mpz_class& p,
                             const std::vector<std::pair<unsigned, unsigned>>& shape) {
    unsigned total = 0;
    for (const auto& [e, f] : shape) {
        if (e < 1 || f < 1) throw Error(errc::bad_shape, "e and f must be positive");
        total += e * f;
    }
    if (total != 4)
        throw Error(errc::bad_shape, "sum of e*f is " + std::to_string(total) + ", want 4");
    // realizable iff for every degree d there are enough distinct monic
    // irreducibles of degree d over F_p
    for (unsigned d = 1; d <= 4; ++d) {
        mpz_class need = 0;
        for (const auto& [e, f] : shape)
            if (f == d) ++need;
        if (need > count_monic_irreducibles(p, d)) return true;
    }
    return false;
}

unsigned field_index_via_splitting(const mpz_class& m) {
    unsigned idx = is_common_index_divisor(2, factor_two(m).shape()) ? 2 : 1;
    unsigned expected = field_index(m);
    if (idx != expected)
        throw Error(errc::internal_inconsistency,
                    "index from splitting is " + std::to_string(idx) + " but parity rule gives " +
                        std::to_string(expected) + " for m = " + m.get_str());
    return idx;
}

} // namespace sqf

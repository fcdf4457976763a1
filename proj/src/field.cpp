#include "sqf/field.hpp"

#include <mutex>

#include "sqf/int_arith.hpp"
#include "sqf/poly_mod_p.hpp"

namespace sqf {

std::vector<mpz_class> defining_poly(const mpz_class& m) {
    return {1, m, -6, -m, 1};
}

AlgebraicNumber::AlgebraicNumber(mpz_class m, std::array<mpz_class, 4> num, mpz_class den)
    : m_(std::move(m)), num_(std::move(num)), den_(std::move(den)) {
    if (den_ == 0) throw Error(errc::zero_input, "algebraic number with zero denominator");
    normalize();
}

void AlgebraicNumber::normalize() {
    if (den_ < 0) {
        den_ = -den_;
        for (auto& x : num_) x = -x;
    }
    mpz_class g = den_;
    for (const auto& x : num_) {
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
        if (g == 1) return;
    }
    for (auto& x : num_) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), g.get_mpz_t());
    mpz_divexact(den_.get_mpz_t(), den_.get_mpz_t(), g.get_mpz_t());
}

bool AlgebraicNumber::is_zero() const {
    return num_[0] == 0 && num_[1] == 0 && num_[2] == 0 && num_[3] == 0;
}

std::array<mpz_class, 4> reduce_theta_poly(const mpz_class& m, std::vector<mpz_class> c) {
    while (c.size() > 4) {
        std::size_t d = c.size() - 1;
        mpz_class top = c.back();
        c.pop_back();
        if (top != 0) {
            c[d - 1] += m * top;
            c[d - 2] += 6 * top;
            c[d - 3] -= m * top;
            c[d - 4] -= top;
        }
    }
    std::array<mpz_class, 4> out{0, 0, 0, 0};
    for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i];
    return out;
}

namespace {

void check_same_field(const AlgebraicNumber& a, const AlgebraicNumber& b) {
    if (a.m() != b.m())
        throw Error(errc::mixed_fields, "elements of K_" + a.m().get_str() + " and K_" +
                                            b.m().get_str() + " cannot be combined");
}

} // namespace

AlgebraicNumber AlgebraicNumber::from_poly(const mpz_class& m,
                                           const std::vector<mpz_class>& coeffs,
                                           const mpz_class& den) {
    return AlgebraicNumber(m, reduce_theta_poly(m, coeffs), den);
}

AlgebraicNumber operator+(const AlgebraicNumber& a, const AlgebraicNumber& b) {
    check_same_field(a, b);
    std::array<mpz_class, 4> c;
    for (int i = 0; i < 4; ++i) c[i] = a.num_[i] * b.den_ + b.num_[i] * a.den_;
    return AlgebraicNumber(a.m_, std::move(c), a.den_ * b.den_);
}

AlgebraicNumber operator-(const AlgebraicNumber& a, const AlgebraicNumber& b) {
    check_same_field(a, b);
    std::array<mpz_class, 4> c;
    for (int i = 0; i < 4; ++i) c[i] = a.num_[i] * b.den_ - b.num_[i] * a.den_;
    return AlgebraicNumber(a.m_, std::move(c), a.den_ * b.den_);
}

AlgebraicNumber operator*(const AlgebraicNumber& a, const AlgebraicNumber& b) {
    check_same_field(a, b);
    std::vector<mpz_class> prod(7, 0);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) prod[i + j] += a.num_[i] * b.num_[j];
    return AlgebraicNumber(a.m_, reduce_theta_poly(a.m_, std::move(prod)), a.den_ * b.den_);
}

AlgebraicNumber AlgebraicNumber::operator-() const {
    std::array<mpz_class, 4> c;
    for (int i = 0; i < 4; ++i) c[i] = -num_[i];
    return AlgebraicNumber(m_, std::move(c), den_);
}

bool AlgebraicNumber::operator==(const AlgebraicNumber& o) const {
    return m_ == o.m_ && den_ == o.den_ && num_ == o.num_;
}

std::vector<mpq_class> AlgebraicNumber::char_poly() const {
    // Faddeev-LeVerrier on the multiplication matrix over the power basis
    using Mat = std::array<std::array<mpq_class, 4>, 4>;
    Mat mul{};
    for (int j = 0; j < 4; ++j) {
        std::vector<mpz_class> shifted(j + 4, 0);
        for (int i = 0; i < 4; ++i) shifted[i + j] = num_[i];
        auto row = reduce_theta_poly(m_, std::move(shifted));
        for (int k = 0; k < 4; ++k) {
            mpq_class q(row[k], den_);
            q.canonicalize();
            mul[j][k] = q;
        }
    }

    auto mat_mul = [](const Mat& a, const Mat& b) {
        Mat r{};
        for (int i = 0; i < 4; ++i)
            for (int k = 0; k < 4; ++k)
                for (int j = 0; j < 4; ++j) r[i][j] += a[i][k] * b[k][j];
        return r;
    };
    auto trace = [](const Mat& a) {
        mpq_class t = 0;
        for (int i = 0; i < 4; ++i) t += a[i][i];
        return t;
    };

    Mat mk = mul;
    std::array<mpq_class, 4> c; // c[0] multiplies x^3, ..., c[3] is the constant
    for (int k = 0; k < 4; ++k) {
        if (k > 0) {
            Mat shifted = mk;
            for (int i = 0; i < 4; ++i) shifted[i][i] += c[k - 1];
            mk = mat_mul(mul, shifted);
        }
        c[k] = -trace(mk) / (k + 1);
    }
    return {c[3], c[2], c[1], c[0], mpq_class(1)};
}

bool AlgebraicNumber::is_algebraic_integer() const {
    for (const auto& q : char_poly())
        if (q.get_den() != 1) return false;
    return true;
}

std::string AlgebraicNumber::str(const std::string& var) const {
    std::string s;
    static const char* powers[] = {"", "", "^2", "^3"};
    for (int i = 0; i < 4; ++i) {
        const mpz_class& x = num_[i];
        if (x == 0) continue;
        if (s.empty()) {
            if (x < 0) s += "-";
        } else {
            s += x < 0 ? " - " : " + ";
        }
        mpz_class a = abs(x);
        if (a != 1 || i == 0) s += a.get_str();
        if (i > 0) {
            if (a != 1) s += "*";
            s += var + powers[i];
        }
    }
    if (s.empty()) s = "0";
    if (den_ != 1) s = "(" + s + ")/" + den_.get_str();
    return s;
}

namespace {

std::once_flag g_disc_gate_flag;
bool g_closed_form_ok = false;

mpz_class closed_form_disc(const mpz_class& m) {
    mpz_class M = m * m + 16;
    return 4 * M * M * M;
}

void run_disc_gate() {
    for (unsigned long m = 1; m <= 1000; ++m) {
        mpz_class mz(m);
        if (quartic_discriminant(defining_poly(mz)) != closed_form_disc(mz)) {
            g_closed_form_ok = false;
            return;
        }
    }
    g_closed_form_ok = true;
}

} // namespace

mpz_class poly_discriminant(const mpz_class& m) {
    std::call_once(g_disc_gate_flag, run_disc_gate);
    if (g_closed_form_ok) return closed_form_disc(m);
    return quartic_discriminant(defining_poly(m));
}

unsigned theta_index_of_v2(unsigned long v2m) {
    if (v2m == 0) return 2;
    if (v2m == 1) return 4;
    if (v2m == 2) return 8;
    return 16;
}

void check_valid_m(const mpz_class& m) {
    if (m <= 0)
        throw Error(errc::excluded_m, "m must be a positive integer (P_m and P_-m generate "
                                      "the same field; m = 0 is reducible)");
    mpz_class M = m * m + 16;
    if (is_perfect_square(M))
        throw Error(errc::excluded_m,
                    "m=" + m.get_str() + " excluded: m^2+16 is a perfect square");
    if (!is_squarefree(odd_part(M)))
        throw Error(errc::not_squarefree, "m=" + m.get_str() + ": odd part of m^2+16 = " +
                                              odd_part(M).get_str() + " is not squarefree");
}

unsigned theta_index(const mpz_class& m) {
    check_valid_m(m);
    return theta_index_of_v2(two_adic_valuation(m));
}

unsigned field_index(const mpz_class& m) {
    check_valid_m(m);
    return mpz_odd_p(m.get_mpz_t()) ? 2 : 1;
}

mpz_class field_discriminant(const mpz_class& m) {
    return build(m).field_disc;
}

AlgebraicNumber sqrt_M_element(const mpz_class& m) {
    check_valid_m(m);
    return AlgebraicNumber(m, {m, -10, -2 * m, 2});
}

FieldParams fill_invariants_presieved(const mpz_class& m) {
    FieldParams fp;
    fp.m = m;
    fp.M = m * m + 16;
    fp.v2m = two_adic_valuation(m);
    fp.M_odd = odd_part(fp.M);
    fp.poly_disc = poly_discriminant(m);
    fp.theta_index = theta_index_of_v2(fp.v2m);
    fp.field_index = mpz_odd_p(m.get_mpz_t()) ? 2 : 1;

    mpz_class isq(fp.theta_index);
    isq *= fp.theta_index;
    mpz_class q, r;
    mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), fp.poly_disc.get_mpz_t(), isq.get_mpz_t());
    if (r != 0)
        throw Error(errc::internal_inconsistency,
                    "disc(P_m) = " + fp.poly_disc.get_str() + " is not divisible by I(theta)^2 = " +
                        isq.get_str() + " for m = " + m.get_str());
    fp.field_disc = q;
    return fp;
}

FieldParams build(const mpz_class& m) {
    check_valid_m(m);
    return fill_invariants_presieved(m);
}

} // namespace sqf

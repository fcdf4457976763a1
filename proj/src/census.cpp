#include "sqf/census.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace sqf {

MClass m_class_of_v2(unsigned long v2m) {
    if (v2m == 0) return MClass::odd;
    if (v2m == 1) return MClass::v2_eq_1;
    if (v2m == 2) return MClass::v2_eq_2;
    return MClass::v2_ge_3;
}

const char* m_class_name(MClass c) {
    switch (c) {
        case MClass::odd: return "odd";
        case MClass::v2_eq_1: return "v2=1";
        case MClass::v2_eq_2: return "v2=2";
        case MClass::v2_ge_3: return "v2>=3";
    }
    return "?";
}

ValiditySieve::ValiditySieve(std::uint64_t m_max) : m_max_(m_max), bad_(m_max + 1, 0) {
    if (m_max > kCensusCap)
        throw Error(errc::capacity_exceeded,
                    "census range " + std::to_string(m_max) + " exceeds the cap " +
                        std::to_string(kCensusCap));
    if (m_max == 0) return;

    mpz_class top = mpz_class(static_cast<unsigned long>(m_max));
    top = top * top + 16;
    mpz_class root;
    mpz_sqrt(root.get_mpz_t(), top.get_mpz_t());
    std::uint64_t pbound = root.get_ui();

    for (std::uint32_t p : primes_up_to(pbound)) {
        if ((p & 3u) != 1u) continue;
        // p^2 | m^2 + 16 iff m = +-s (mod p^2) with s^2 = -16 (mod p^2);
        // the root mod p lifts uniquely (Hensel) since 2r is a unit
        mpz_class pz(p);
        mpz_class r = sqrtmod(mpz_class(-16), pz);
        mpz_class t = (mpz_class(-16) - r * r) / pz * invmod(2 * r, pz);
        mpz_fdiv_r(t.get_mpz_t(), t.get_mpz_t(), pz.get_mpz_t());
        mpz_class s = r + t * pz;
        std::uint64_t p2 = static_cast<std::uint64_t>(p) * p;
        std::uint64_t s0 = s.get_ui();
        for (std::uint64_t v = s0; v <= m_max_; v += p2) bad_[v] = 1;
        for (std::uint64_t v = p2 - s0; v <= m_max_; v += p2) bad_[v] = 1;
    }
}

bool ValiditySieve::odd_part_squarefree(std::uint64_t m) const {
    return !bad_[m];
}

bool ValiditySieve::valid(std::uint64_t m) const {
    return m >= 1 && m <= m_max_ && m != 3 && !bad_[m];
}

void for_each_field(std::uint64_t m_max, const std::function<void(const FieldParams&)>& fn) {
    if (m_max == 0) return;
    ValiditySieve sieve(m_max);
    for (std::uint64_t m = 1; m <= m_max; ++m)
        if (sieve.valid(m)) fn(fill_invariants_presieved(mpz_class(static_cast<unsigned long>(m))));
}

std::vector<FieldParams> enumerate_fields(std::uint64_t m_max) {
    std::vector<FieldParams> out;
    for_each_field(m_max, [&](const FieldParams& fp) { out.push_back(fp); });
    return out;
}

namespace {

// largest m whose discriminant could still be <= x: the least possible
// discriminant for given m is (m^2+16)^3 / 64
std::uint64_t m_bound_for_x(const mpz_class& x) {
    if (x < 1) return 0;
    mpz_class t, xx = 64 * x;
    mpz_root(t.get_mpz_t(), xx.get_mpz_t(), 3);
    if (t < 17) return 0;
    mpz_class mb;
    t -= 16;
    mpz_sqrt(mb.get_mpz_t(), t.get_mpz_t());
    if (!mpz_fits_ulong_p(mb.get_mpz_t()))
        throw Error(errc::capacity_exceeded, "x bound too large for enumeration");
    return mb.get_ui();
}

std::uint64_t class_index(std::uint64_t m) {
    if (m & 1u) return 0;
    unsigned long v2 = static_cast<unsigned long>(__builtin_ctzll(m));
    return v2 == 1 ? 1 : (v2 == 2 ? 2 : 3);
}

// smallest field discriminant over valid m <= m_max; any m > 64 has
// discriminant >= 64^6/64, far above everything found below
mpz_class smallest_discriminant(const ValiditySieve& sieve) {
    mpz_class best = 0;
    std::uint64_t cut = std::min<std::uint64_t>(sieve.m_max(), 64);
    for (std::uint64_t m = 1; m <= cut; ++m) {
        if (!sieve.valid(m)) continue;
        FieldParams fp = fill_invariants_presieved(mpz_class(static_cast<unsigned long>(m)));
        if (best == 0 || fp.field_disc < best) best = fp.field_disc;
    }
    return best;
}

std::size_t ladder_bucket(const mpz_class& disc, const mpz_class& smallest) {
    mpz_class c;
    mpz_cdiv_q(c.get_mpz_t(), disc.get_mpz_t(), smallest.get_mpz_t());
    if (c <= 1) return 0;
    c -= 1;
    return mpz_sizeinbase(c.get_mpz_t(), 2);
}

std::string fmt_double(double v, const char* fmt = "%.9g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

} // namespace

void CensusPartial::merge(const CensusPartial& o) {
    if (o.hist.size() > hist.size()) hist.resize(o.hist.size(), {0, 0, 0, 0});
    for (std::size_t j = 0; j < o.hist.size(); ++j)
        for (int c = 0; c < 4; ++c) hist[j][c] += o.hist[j][c];
    for (int c = 0; c < 4; ++c) {
        total[c] += o.total[c];
        valid[c] += o.valid[c];
        excluded[c] += o.excluded[c];
        not_squarefree[c] += o.not_squarefree[c];
    }
}

CensusPartial census_range(std::uint64_t lo, std::uint64_t hi, const ValiditySieve& sieve,
                           const mpz_class& smallest_disc) {
    CensusPartial part;
    for (std::uint64_t m = lo + 1; m <= hi; ++m) {
        std::uint64_t cls = class_index(m);
        ++part.total[cls];
        if (m == 3 || is_perfect_square(mpz_class(static_cast<unsigned long>(m)) *
                                            static_cast<unsigned long>(m) +
                                        16)) {
            ++part.excluded[cls];
            continue;
        }
        if (!sieve.odd_part_squarefree(m)) {
            ++part.not_squarefree[cls];
            continue;
        }
        ++part.valid[cls];
        FieldParams fp = fill_invariants_presieved(mpz_class(static_cast<unsigned long>(m)));
        std::size_t j = ladder_bucket(fp.field_disc, smallest_disc);
        if (j >= part.hist.size()) part.hist.resize(j + 1, {0, 0, 0, 0});
        ++part.hist[j][cls];
    }
    return part;
}

std::array<std::uint64_t, 6> count_by_index(const mpz_class& x) {
    std::array<std::uint64_t, 6> out{0, 0, 0, 0, 0, 0};
    if (x < 1) return out;
    std::uint64_t mb = m_bound_for_x(x);
    ValiditySieve sieve(mb);
    for (std::uint64_t m = 1; m <= mb; ++m) {
        if (!sieve.valid(m)) continue;
        FieldParams fp = fill_invariants_presieved(mpz_class(static_cast<unsigned long>(m)));
        if (fp.field_disc > x) continue;
        out[fp.field_index == 1 ? 0 : 1] += 1;
    }
    return out;
}

double squarefree_density(MClass cls, std::uint64_t m_max) {
    ValiditySieve sieve(m_max);
    std::uint64_t total = 0, pass = 0;
    for (std::uint64_t m = 1; m <= m_max; ++m) {
        if (class_index(m) != static_cast<std::uint64_t>(cls)) continue;
        ++total;
        if (sieve.odd_part_squarefree(m)) ++pass;
    }
    return total ? static_cast<double>(pass) / static_cast<double>(total) : 0.0;
}

TheoryConstant theory_constant(unsigned i, std::uint64_t truncation) {
    EulerProduct e = euler_product_p1mod4(truncation);
    if (i == 1) {
        double pre = 0.25 / std::cbrt(4.0) + 0.25 / std::cbrt(2.0) + 0.25;
        return TheoryConstant{pre * e.value, pre, e.tail_bound};
    }
    if (i == 2) return TheoryConstant{0.25 * e.value, 0.25, e.tail_bound};
    throw Error(errc::unsupported_index,
                "no asymptotic constant for index " + std::to_string(i));
}

double empirical_constant(std::uint64_t count, const mpz_class& x) {
    if (count == 0) return 0.0;
    return static_cast<double>(count) / std::pow(x.get_d(), 1.0 / 6.0);
}

namespace {

void write_checkpoints(const CensusConfig& config, std::uint64_t m_max,
                       const ValiditySieve& sieve) {
    std::string buffer;
    std::uint64_t since_flush = 0;
    auto flush = [&]() {
        std::string tmp = config.checkpoint_path + ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out)
                throw std::runtime_error("cannot write checkpoint file " + tmp);
            out << buffer;
        }
        std::filesystem::rename(tmp, config.checkpoint_path);
    };
    for (std::uint64_t m = 1; m <= m_max; ++m) {
        CheckpointRecord rec;
        rec.m = m;
        rec.v2m = (m & 1u) ? 0 : static_cast<unsigned long>(__builtin_ctzll(m));
        rec.valid = sieve.valid(m);
        if (rec.valid) {
            FieldParams fp = fill_invariants_presieved(mpz_class(static_cast<unsigned long>(m)));
            rec.field_disc = fp.field_disc;
            rec.field_index = fp.field_index;
        } else {
            rec.field_disc = 0;
            rec.field_index = 0;
        }
        buffer += checkpoint_line(rec);
        buffer += '\n';
        if (config.checkpoint_stride && ++since_flush >= config.checkpoint_stride) {
            flush();
            since_flush = 0;
        }
    }
    flush();
}

} // namespace

CensusReport build_report(const CensusConfig& config) {
    if ((config.m_max == 0) == (config.x_max == 0))
        throw std::invalid_argument("census config needs exactly one of m_max / x_max");
    if (config.euler_truncation < 5)
        throw std::invalid_argument("euler truncation must be at least 5");

    CensusReport rep;
    rep.config = config;
    rep.m_max = config.m_max ? config.m_max : m_bound_for_x(config.x_max);

    ValiditySieve sieve(rep.m_max);

    // seeded spot re-checks of the sieve against per-value trial division
    if (rep.m_max >= 1) {
        gmp_randclass rng(gmp_randinit_mt);
        rng.seed(config.rng_seed);
        for (int k = 0; k < 128; ++k) {
            mpz_class pick = rng.get_z_range(mpz_class(static_cast<unsigned long>(rep.m_max))) + 1;
            std::uint64_t m = pick.get_ui();
            bool direct = is_squarefree(odd_part(pick * pick + 16));
            if (direct != sieve.odd_part_squarefree(m))
                throw Error(errc::internal_inconsistency,
                            "sieve disagrees with trial division at m = " + std::to_string(m));
        }
    }

    rep.smallest_disc = smallest_discriminant(sieve);
    rep.euler = euler_product_p1mod4(config.euler_truncation);
    rep.c1_theory = theory_constant(1, config.euler_truncation);
    rep.c2_theory = theory_constant(2, config.euler_truncation);

    // counts are exact for x below the least possible discriminant of any
    // m outside the enumerated range
    mpz_class next_m(static_cast<unsigned long>(rep.m_max) + 1);
    mpz_class lb = next_m * next_m + 16;
    lb = lb * lb * lb / 64;
    rep.x_complete = lb - 1;
    mpz_class x_cap = rep.x_complete;
    if (config.x_max != 0 && config.x_max < x_cap) x_cap = config.x_max;

    // parallel range pass
    CensusPartial merged;
    if (rep.m_max >= 1 && rep.smallest_disc > 0) {
        const std::uint64_t chunk = 1u << 16;
        std::atomic<std::uint64_t> next{0};
        unsigned workers = std::max(1u, config.workers);
        std::vector<CensusPartial> partials(workers);
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&, w]() {
                for (;;) {
                    std::uint64_t lo = next.fetch_add(chunk);
                    if (lo >= rep.m_max) return;
                    std::uint64_t hi = std::min(rep.m_max, lo + chunk);
                    partials[w].merge(census_range(lo, hi, sieve, rep.smallest_disc));
                }
            });
        for (auto& t : pool) t.join();
        for (auto& p : partials) merged.merge(p);
    }

    for (int c = 0; c < 4; ++c) {
        ClassReport& cr = rep.classes[c];
        cr.cls = static_cast<MClass>(c);
        cr.total = merged.total[c];
        cr.valid = merged.valid[c];
        cr.excluded = merged.excluded[c];
        cr.not_squarefree = merged.not_squarefree[c];
        cr.density = cr.total ? static_cast<double>(cr.valid) / static_cast<double>(cr.total)
                              : 0.0;
        rep.rejected_excluded += cr.excluded;
        rep.rejected_not_squarefree += cr.not_squarefree;
    }

    // ladder: powers of two on the smallest discriminant, up to the exact range
    if (rep.smallest_disc > 0) {
        std::array<std::uint64_t, 4> run{0, 0, 0, 0};
        mpz_class x = rep.smallest_disc;
        for (std::size_t j = 0; x <= x_cap; ++j, x <<= 1) {
            if (j < merged.hist.size())
                for (int c = 0; c < 4; ++c) run[c] += merged.hist[j][c];
            LadderRow row;
            row.x = x;
            row.by_class = run;
            std::uint64_t n1 = run[1] + run[2] + run[3], n2 = run[0];
            row.counts = {n1, n2, 0, 0, 0, 0};
            row.c1_emp = empirical_constant(n1, x);
            row.c2_emp = empirical_constant(n2, x);
            rep.ladder.push_back(std::move(row));
        }
    }

    // per-class empirical constants beside the additive terms of C1/C2
    if (!rep.ladder.empty()) {
        const LadderRow& top = rep.ladder.back();
        const double cls_terms[4] = {
            rep.c2_theory.value,                      // odd <-> C2
            rep.euler.value * 0.25 / std::cbrt(4.0),  // v2=1 <-> first C1 term
            rep.euler.value * 0.25 / std::cbrt(2.0),  // v2=2 <-> second C1 term
            rep.euler.value * 0.25,                   // v2>=3 <-> third C1 term
        };
        for (int c = 0; c < 4; ++c) {
            rep.classes[c].empirical_constant = empirical_constant(top.by_class[c], top.x);
            rep.classes[c].theory_term = cls_terms[c];
        }
        auto flag_if_deviant = [&](const char* name, double emp, double theo) {
            if (theo <= 0) return;
            double dev = std::abs(emp - theo) / theo;
            if (dev > 0.05) {
                std::ostringstream os;
                os << name << " relative deviation " << fmt_double(100 * dev, "%.1f")
                   << "% exceeds 5% (empirical " << fmt_double(emp) << " vs "
                   << fmt_double(theo) << " at x = " << top.x << ")";
                rep.flags.push_back(os.str());
            }
        };
        flag_if_deviant("C1", top.c1_emp, rep.c1_theory.value);
        flag_if_deviant("C2", top.c2_emp, rep.c2_theory.value);
    }

    if (!config.checkpoint_path.empty()) write_checkpoints(config, rep.m_max, sieve);
    return rep;
}

std::string report_to_json(const CensusReport& r) {
    using json = nlohmann::ordered_json;
    json j;
    j["config"] = {
        {"m_max", std::to_string(r.m_max)},
        {"x_max", r.config.x_max.get_str()},
        {"euler_truncation", r.config.euler_truncation},
        {"workers", r.config.workers},
        {"rng_seed", r.config.rng_seed},
        {"checkpoint_path", r.config.checkpoint_path},
        {"checkpoint_stride", r.config.checkpoint_stride},
    };
    j["counts_exact_up_to_x"] = r.x_complete.get_str();
    j["smallest_discriminant"] = r.smallest_disc.get_str();
    j["euler_product"] = {
        {"value", fmt_double(r.euler.value, "%.12g")},
        {"tail_bound", fmt_double(r.euler.tail_bound, "%.3g")},
        {"truncation", r.euler.truncation},
    };
    j["constants_theory"] = {
        {"C1", fmt_double(r.c1_theory.value, "%.12g")},
        {"C1_prefactor", fmt_double(r.c1_theory.prefactor, "%.12g")},
        {"C2", fmt_double(r.c2_theory.value, "%.12g")},
        {"C2_prefactor", fmt_double(r.c2_theory.prefactor, "%.12g")},
    };
    json ladder = json::array();
    for (const auto& row : r.ladder) {
        json e;
        e["x"] = row.x.get_str();
        for (std::size_t k = 0; k < kIndexKeys.size(); ++k)
            e["N" + std::to_string(kIndexKeys[k])] = std::to_string(row.counts[k]);
        e["c1_emp"] = fmt_double(row.c1_emp);
        e["c2_emp"] = fmt_double(row.c2_emp);
        ladder.push_back(std::move(e));
    }
    j["ladder"] = std::move(ladder);
    json classes = json::array();
    for (const auto& cr : r.classes) {
        classes.push_back({
            {"class", m_class_name(cr.cls)},
            {"total", std::to_string(cr.total)},
            {"valid", std::to_string(cr.valid)},
            {"excluded", std::to_string(cr.excluded)},
            {"not_squarefree", std::to_string(cr.not_squarefree)},
            {"density", fmt_double(cr.density, "%.9g")},
            {"empirical_constant", fmt_double(cr.empirical_constant)},
            {"theory_term", fmt_double(cr.theory_term)},
        });
    }
    j["classes"] = std::move(classes);
    j["rejected"] = {
        {"excluded_m", std::to_string(r.rejected_excluded)},
        {"odd_part_not_squarefree", std::to_string(r.rejected_not_squarefree)},
    };
    j["flags"] = r.flags;
    return j.dump(2) + "\n";
}

std::string report_to_csv(const CensusReport& r) {
    std::ostringstream os;
    os << "x,N1,N2,N_other,c1_emp,c2_emp\n";
    for (const auto& row : r.ladder) {
        std::uint64_t other =
            row.counts[2] + row.counts[3] + row.counts[4] + row.counts[5];
        os << row.x.get_str() << "," << row.counts[0] << "," << row.counts[1] << "," << other
           << "," << fmt_double(row.c1_emp) << "," << fmt_double(row.c2_emp) << "\n";
    }
    return os.str();
}

std::string checkpoint_line(const CheckpointRecord& r) {
    std::ostringstream os;
    os << r.m << "," << (r.valid ? 1 : 0) << "," << r.v2m << "," << r.field_disc.get_str()
       << "," << r.field_index;
    return os.str();
}

CheckpointRecord parse_checkpoint_line(const std::string& line) {
    CheckpointRecord rec;
    std::istringstream is(line);
    std::string tok;
    auto next = [&]() {
        if (!std::getline(is, tok, ','))
            throw std::invalid_argument("malformed checkpoint record: " + line);
        return tok;
    };
    rec.m = std::stoull(next());
    rec.valid = next() == "1";
    rec.v2m = std::stoul(next());
    rec.field_disc = mpz_class(next());
    rec.field_index = static_cast<unsigned>(std::stoul(next()));
    return rec;
}

} // namespace sqf

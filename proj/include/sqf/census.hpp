#ifndef SQF_CENSUS_HPP
#define SQF_CENSUS_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "sqf/field.hpp"
#include "sqf/int_arith.hpp"

namespace sqf {

// the residue classes of m the two-adic splitting distinguishes
enum class MClass { odd = 0, v2_eq_1 = 1, v2_eq_2 = 2, v2_ge_3 = 3 };
MClass m_class_of_v2(unsigned long v2m);
const char* m_class_name(MClass c);

// Enumeration cap: beyond this the squarefree certification would need
// primes past kFactorBound.
inline constexpr std::uint64_t kCensusCap = 10'000'000;

// Validity filter over 1..m_max. The odd part of m^2+16 has a square
// divisor iff p^2 | m^2+16 for some prime p = 1 (mod 4), i.e. iff
// m = +-sqrt(-16) (mod p^2); those roots are sieved directly, so the
// filter is exact, not probabilistic. Cross-checked against per-value
// trial division in the tests and by seeded samples in build_report.
class ValiditySieve {
  public:
    explicit ValiditySieve(std::uint64_t m_max);

    std::uint64_t m_max() const { return m_max_; }
    bool odd_part_squarefree(std::uint64_t m) const;
    // excluded (m = 3) or square filter failures are both invalid
    bool valid(std::uint64_t m) const;

  private:
    std::uint64_t m_max_;
    std::vector<std::uint8_t> bad_;
};

// FieldParams for every valid m <= m_max in increasing order; skipped m are
// tallied by the census. Streaming, so usable for large ranges.
void for_each_field(std::uint64_t m_max, const std::function<void(const FieldParams&)>& fn);

// convenience wrapper for small ranges
std::vector<FieldParams> enumerate_fields(std::uint64_t m_max);

// N(x, i) for i = 1, 2, 3, 4, 6, 12 (in that key order): the number of
// valid m whose field discriminant is <= x and field index is i.
std::array<std::uint64_t, 6> count_by_index(const mpz_class& x);
inline constexpr std::array<unsigned, 6> kIndexKeys{1, 2, 3, 4, 6, 12};

// fraction of m <= m_max in a residue class passing the squarefree filter
// (the m = 3 exclusion counts in the denominator, not the numerator)
double squarefree_density(MClass cls, std::uint64_t m_max);

struct TheoryConstant {
    double value;
    double prefactor;   // rational-surd prefactor ahead of the euler product
    double tail_bound;  // inherited from the euler product truncation
};

// asymptotic constants: C_2 = (1/4) prod, C_1 = (1/(4 cbrt 4) + 1/(4 cbrt 2)
// + 1/4) prod, product over p = 1 (mod 4) of (1 - 2/p^2).
// Throws unsupported_index for i not in {1, 2}.
TheoryConstant theory_constant(unsigned i, std::uint64_t truncation);

// N(x, i) / x^(1/6); presentation only, counts stay exact
double empirical_constant(std::uint64_t count, const mpz_class& x);

struct CensusConfig {
    std::uint64_t m_max = 0; // exactly one of m_max / x_max must be set
    mpz_class x_max = 0;
    std::uint64_t euler_truncation = 1'000'000;
    unsigned workers = 1;
    unsigned long rng_seed = 1;          // drives the sampled re-checks
    std::string checkpoint_path;         // empty = no checkpoints
    std::uint64_t checkpoint_stride = 100'000;
};

struct LadderRow {
    mpz_class x;
    std::array<std::uint64_t, 6> counts; // keyed like kIndexKeys
    std::array<std::uint64_t, 4> by_class;
    double c1_emp;
    double c2_emp;
};

struct ClassReport {
    MClass cls;
    std::uint64_t total = 0;
    std::uint64_t valid = 0;
    std::uint64_t excluded = 0;
    std::uint64_t not_squarefree = 0;
    double density = 0.0;
    double empirical_constant = 0.0; // class count at top ladder x over x^(1/6)
    double theory_term = 0.0;        // the matching additive term of C_1/C_2
};

struct CensusReport {
    CensusConfig config;
    std::uint64_t m_max = 0;  // resolved
    mpz_class x_complete = 0; // counts are exact for every x <= x_complete
    mpz_class smallest_disc = 0;
    EulerProduct euler{1.0, 0.0, 0};
    TheoryConstant c1_theory{0, 0, 0};
    TheoryConstant c2_theory{0, 0, 0};
    std::vector<LadderRow> ladder;
    std::array<ClassReport, 4> classes;
    std::uint64_t rejected_excluded = 0;
    std::uint64_t rejected_not_squarefree = 0;
    std::vector<std::string> flags;
};

// range-partitioned partial result; merge is associative and commutative
struct CensusPartial {
    std::vector<std::array<std::uint64_t, 4>> hist; // ladder bucket x class
    std::array<std::uint64_t, 4> total{};
    std::array<std::uint64_t, 4> valid{};
    std::array<std::uint64_t, 4> excluded{};
    std::array<std::uint64_t, 4> not_squarefree{};

    void merge(const CensusPartial& o);
};

// single range pass (m in (lo, hi]), binning valid m into ladder buckets
CensusPartial census_range(std::uint64_t lo, std::uint64_t hi, const ValiditySieve& sieve,
                           const mpz_class& smallest_disc);

// Full census: exact counts, constants, densities, deviation flags.
// Deterministic for a fixed config (workers only change the wall time).
CensusReport build_report(const CensusConfig& config);

std::string report_to_json(const CensusReport& r);
std::string report_to_csv(const CensusReport& r);

// newline-delimited "m,valid,v2m,field_disc,field_index" records
struct CheckpointRecord {
    std::uint64_t m;
    bool valid;
    unsigned long v2m;
    mpz_class field_disc;  // 0 when invalid
    unsigned field_index;  // 0 when invalid
};
std::string checkpoint_line(const CheckpointRecord& r);
CheckpointRecord parse_checkpoint_line(const std::string& line);

} // namespace sqf

#endif

#pragma once

// Sufficient conditions for a proper posterior under the independence
// Jeffreys prior sigma^{-1} pi(lambda) (or the benchmark prior
// sigma^{-1} p(lambda) with p proper).

#include "skewsym/distributions.hpp"

#include <optional>
#include <string>
#include <vector>

namespace skewsym {

struct Interval {
    double lo;  // may be -infinity
    double hi;  // may be +infinity
};

// Exact observations and interval-censored observations S_i = [lo, hi].
struct Dataset {
    std::vector<double> exact;
    std::vector<Interval> censored;

    std::size_t size() const { return exact.size() + censored.size(); }
    bool empty() const { return size() == 0; }

    // Throws DomainError on non-finite exact values or empty intervals.
    void validate() const;
};

enum class PriorKind { independence_jeffreys, benchmark };

enum class Verdict { Proper, NotGuaranteed, PriorUndefinedAtZero };
std::string_view to_string(Verdict v);

// Two observations whose sets are separated by a positive distance.
struct SeparatedPair {
    std::size_t first;   // index into exact (then censored, offset by exact.size())
    std::size_t second;
    double gap;
};

struct ProprietyReport {
    Verdict verdict = Verdict::NotGuaranteed;
    std::vector<std::string> reasons;   // which rule fired or which clause failed
    std::vector<std::string> warnings;  // e.g. near-ties
    std::optional<SeparatedPair> witness;
};

// The Jeffreys prior of lambda is finite at 0 iff f has a second moment.
bool prior_defined_at_zero(const SymmetricBase& base);

// Point observations: proper if f is a scale mixture of normals, n >= 2 and
// all observations are pairwise different.
ProprietyReport check_exact(const Dataset& data, const SymmetricBase& base,
                            PriorKind prior = PriorKind::independence_jeffreys);

// Set observations (exact points read as zero-length intervals): proper if
// f is a scale mixture of normals, n >= 2 and two sets are separated by a
// positive gap.
ProprietyReport check_censored(const Dataset& data, const SymmetricBase& base,
                               PriorKind prior = PriorKind::independence_jeffreys);

// check_exact when there are no censored rows, check_censored otherwise.
ProprietyReport check_propriety(const Dataset& data, const SymmetricBase& base,
                                PriorKind prior = PriorKind::independence_jeffreys);

}  // namespace skewsym

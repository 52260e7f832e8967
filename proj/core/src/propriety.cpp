#include "skewsym/propriety.hpp"

#include "skewsym/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace skewsym {

void Dataset::validate() const {
    for (std::size_t i = 0; i < exact.size(); ++i)
        if (!std::isfinite(exact[i]))
            throw DomainError("dataset: exact observation " + std::to_string(i + 1) + " is not finite");
    for (std::size_t i = 0; i < censored.size(); ++i) {
        const auto& s = censored[i];
        if (std::isnan(s.lo) || std::isnan(s.hi) || !(s.lo < s.hi) || s.lo == INFINITY || s.hi == -INFINITY)
            throw DomainError("dataset: censored interval " + std::to_string(i + 1) +
                              " must satisfy lo < hi");
    }
}

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::Proper: return "Proper";
        case Verdict::NotGuaranteed: return "NotGuaranteed";
        case Verdict::PriorUndefinedAtZero: return "PriorUndefinedAtZero";
    }
    return "?";
}

bool prior_defined_at_zero(const SymmetricBase& base) { return std::isfinite(base.second_moment()); }

namespace {

// Shared preconditions. Returns false (and fills the report) when the
// prior itself is undefined.
bool check_prior(ProprietyReport& report, const SymmetricBase& base, PriorKind prior) {
    if (prior == PriorKind::independence_jeffreys && !prior_defined_at_zero(base)) {
        report.verdict = Verdict::PriorUndefinedAtZero;
        report.reasons.push_back(
            "Jeffreys prior of lambda is undefined at 0: the base density has no finite second moment");
        return false;
    }
    return true;
}

void near_tie_warnings(ProprietyReport& report, std::vector<double> values) {
    std::sort(values.begin(), values.end());
    for (std::size_t i = 1; i < values.size(); ++i) {
        const double a = values[i - 1], b = values[i];
        if (a != b && std::fabs(b - a) < 1e-12 * std::max(std::fabs(a), std::fabs(b))) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "observations " << a << " and " << b
                << " differ by less than 1e-12 relative; near-ties can make the posterior numerically near-improper";
            report.warnings.push_back(msg.str());
        }
    }
}

}  // namespace

ProprietyReport check_exact(const Dataset& data, const SymmetricBase& base, PriorKind prior) {
    if (!data.censored.empty()) throw DomainError("check_exact: dataset contains censored observations");
    data.validate();
    ProprietyReport report;
    if (!check_prior(report, base, prior)) return report;

    bool ok = true;
    if (!base.is_scale_mixture_of_normals()) {
        ok = false;
        report.reasons.push_back("base density is not a scale mixture of normals; the point-observation rule does not apply");
    }
    const std::size_t n = data.exact.size();
    if (n < 2) {
        ok = false;
        report.reasons.push_back("fewer than 2 observations (n = " + std::to_string(n) + ")");
    }
    std::vector<double> sorted = data.exact;
    std::sort(sorted.begin(), sorted.end());
    const auto dup = std::adjacent_find(sorted.begin(), sorted.end());
    if (dup != sorted.end()) {
        ok = false;
        std::ostringstream msg;
        msg.precision(17);
        msg << "repeated observation " << *dup
            << ": repeated values may destroy the existence of the posterior; no guarantee is given";
        report.reasons.push_back(msg.str());
    }
    near_tie_warnings(report, data.exact);

    if (ok) {
        report.verdict = Verdict::Proper;
        report.reasons.push_back(
            "point-observation rule: scale mixture of normals, n >= 2, all observations distinct");
    } else {
        report.verdict = Verdict::NotGuaranteed;
    }
    return report;
}

ProprietyReport check_censored(const Dataset& data, const SymmetricBase& base, PriorKind prior) {
    data.validate();
    ProprietyReport report;
    if (!check_prior(report, base, prior)) return report;

    std::vector<Interval> sets;
    sets.reserve(data.size());
    for (double y : data.exact) sets.push_back({y, y});
    sets.insert(sets.end(), data.censored.begin(), data.censored.end());

    bool ok = true;
    if (!base.is_scale_mixture_of_normals()) {
        ok = false;
        report.reasons.push_back("base density is not a scale mixture of normals; the set-observation rule does not apply");
    }
    if (sets.size() < 2) {
        ok = false;
        report.reasons.push_back("fewer than 2 observations (n = " + std::to_string(sets.size()) + ")");
    }

    // Largest gap lo_j - hi_i over pairs i != j: pair the smallest upper end
    // with the largest lower end, falling back to runners-up when both are
    // the same set.
    std::optional<SeparatedPair> best;
    if (sets.size() >= 2) {
        std::vector<std::size_t> by_hi(sets.size()), by_lo(sets.size());
        std::iota(by_hi.begin(), by_hi.end(), 0);
        std::iota(by_lo.begin(), by_lo.end(), 0);
        std::partial_sort(by_hi.begin(), by_hi.begin() + 2, by_hi.end(),
                          [&](auto a, auto b) { return sets[a].hi < sets[b].hi; });
        std::partial_sort(by_lo.begin(), by_lo.begin() + 2, by_lo.end(),
                          [&](auto a, auto b) { return sets[a].lo > sets[b].lo; });
        auto consider = [&](std::size_t i, std::size_t j) {
            if (i == j) return;
            const double gap = sets[j].lo - sets[i].hi;
            if (!best || gap > best->gap) best = SeparatedPair{std::min(i, j), std::max(i, j), gap};
        };
        consider(by_hi[0], by_lo[0]);
        consider(by_hi[0], by_lo[1]);
        consider(by_hi[1], by_lo[0]);
    }
    if (!best || !(best->gap > 0.0)) {
        ok = false;
        report.reasons.push_back("no two observations are separated by a positive distance");
        best.reset();
    }
    std::vector<double> points = data.exact;
    std::sort(points.begin(), points.end());
    if (std::adjacent_find(points.begin(), points.end()) != points.end())
        report.warnings.push_back("repeated exact observations are present; the gap rule treats them as zero-length sets");
    near_tie_warnings(report, data.exact);

    if (ok) {
        report.verdict = Verdict::Proper;
        report.witness = best;
        std::ostringstream msg;
        msg << "set-observation rule: scale mixture of normals, n >= 2, observations " << best->first + 1
            << " and " << best->second + 1 << " separated by gap " << best->gap;
        report.reasons.push_back(msg.str());
    } else {
        report.verdict = Verdict::NotGuaranteed;
    }
    return report;
}

ProprietyReport check_propriety(const Dataset& data, const SymmetricBase& base, PriorKind prior) {
    return data.censored.empty() ? check_exact(data, base, prior) : check_censored(data, base, prior);
}

}  // namespace skewsym

#include "skewsym/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace skewsym {

namespace {

double safe_eval(const std::function<double(const std::vector<double>&)>& f,
                 const std::vector<double>& x) {
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

NelderMeadResult nelder_mead_once(const std::function<double(const std::vector<double>&)>& f,
                                  const std::vector<double>& start, const NelderMeadOptions& opts,
                                  std::size_t budget) {
    const std::size_t d = start.size();
    std::vector<std::vector<double>> simplex(d + 1, start);
    for (std::size_t i = 0; i < d; ++i) {
        const double step = start[i] != 0.0 ? opts.initial_step * std::max(1.0, std::fabs(start[i]) * 0.1)
                                            : opts.initial_step;
        simplex[i + 1][i] += step;
    }
    std::vector<double> values(d + 1);
    std::size_t evals = 0;
    for (std::size_t i = 0; i <= d; ++i) {
        values[i] = safe_eval(f, simplex[i]);
        ++evals;
    }

    std::vector<std::size_t> order(d + 1);
    std::vector<double> centroid(d), trial(d), trial2(d);
    bool converged = false;
    while (evals < budget) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
        const std::size_t best = order.front(), worst = order.back(), second = order[d - 1];

        double diameter = 0.0;
        for (std::size_t i = 0; i <= d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                diameter = std::max(diameter, std::fabs(simplex[i][j] - simplex[best][j]));
        if (std::isfinite(values[worst]) &&
            std::fabs(values[worst] - values[best]) <= opts.f_tol * (1.0 + std::fabs(values[best])) &&
            diameter <= opts.x_tol * (1.0 + std::sqrt(std::inner_product(
                                                simplex[best].begin(), simplex[best].end(),
                                                simplex[best].begin(), 0.0)))) {
            converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= d; ++i) {
            if (i == worst) continue;
            for (std::size_t j = 0; j < d; ++j) centroid[j] += simplex[i][j] / static_cast<double>(d);
        }
        auto along = [&](double t, std::vector<double>& out) {
            for (std::size_t j = 0; j < d; ++j) out[j] = centroid[j] + t * (simplex[worst][j] - centroid[j]);
        };

        along(-1.0, trial);
        const double fr = safe_eval(f, trial);
        ++evals;
        if (fr < values[best]) {
            along(-2.0, trial2);
            const double fe = safe_eval(f, trial2);
            ++evals;
            if (fe < fr) {
                simplex[worst] = trial2;
                values[worst] = fe;
            } else {
                simplex[worst] = trial;
                values[worst] = fr;
            }
        } else if (fr < values[second]) {
            simplex[worst] = trial;
            values[worst] = fr;
        } else {
            const bool outside = fr < values[worst];
            along(outside ? -0.5 : 0.5, trial2);
            const double fc = safe_eval(f, trial2);
            ++evals;
            if (fc < std::min(fr, values[worst])) {
                simplex[worst] = trial2;
                values[worst] = fc;
            } else {
                for (std::size_t i = 0; i <= d; ++i) {
                    if (i == best) continue;
                    for (std::size_t j = 0; j < d; ++j)
                        simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
                    values[i] = safe_eval(f, simplex[i]);
                    ++evals;
                }
            }
        }
    }
    const auto best = static_cast<std::size_t>(
        std::min_element(values.begin(), values.end()) - values.begin());
    return {simplex[best], values[best], evals, converged};
}

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> start, const NelderMeadOptions& opts) {
    NelderMeadResult result = nelder_mead_once(f, start, opts, opts.max_evaluations);
    std::size_t used = result.evaluations;
    for (std::size_t r = 0; r < opts.restarts && used < opts.max_evaluations; ++r) {
        auto next = nelder_mead_once(f, result.x, opts, opts.max_evaluations - used);
        used += next.evaluations;
        const bool improved = next.value < result.value - opts.f_tol * (1.0 + std::fabs(result.value));
        if (next.value <= result.value) result = std::move(next);
        if (!improved) break;
    }
    result.evaluations = used;
    return result;
}

std::vector<std::vector<double>> numerical_hessian(
    const std::function<double(const std::vector<double>&)>& f, const std::vector<double>& x,
    double rel_step) {
    const std::size_t d = x.size();
    std::vector<double> h(d);
    for (std::size_t i = 0; i < d; ++i) h[i] = rel_step * std::max(1.0, std::fabs(x[i]));
    std::vector<std::vector<double>> hess(d, std::vector<double>(d, 0.0));
    const double f0 = f(x);
    auto at = [&](std::size_t i, double di, std::size_t j, double dj) {
        auto y = x;
        y[i] += di;
        y[j] += dj;
        return f(y);
    };
    for (std::size_t i = 0; i < d; ++i) {
        hess[i][i] = (at(i, h[i], i, 0.0) - 2.0 * f0 + at(i, -h[i], i, 0.0)) / (h[i] * h[i]);
        for (std::size_t j = 0; j < i; ++j) {
            const double v = (at(i, h[i], j, h[j]) - at(i, h[i], j, -h[j]) - at(i, -h[i], j, h[j]) +
                              at(i, -h[i], j, -h[j])) /
                             (4.0 * h[i] * h[j]);
            hess[i][j] = hess[j][i] = v;
        }
    }
    return hess;
}

}  // namespace skewsym

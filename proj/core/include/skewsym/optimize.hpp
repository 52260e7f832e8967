#pragma once

#include <functional>
#include <vector>

namespace skewsym {

struct NelderMeadOptions {
    std::size_t max_evaluations = 20000;
    double f_tol = 1e-10;      // spread of simplex values
    double x_tol = 1e-9;       // simplex diameter
    double initial_step = 0.5; // per-coordinate initial simplex offset
    std::size_t restarts = 2;  // re-seed the simplex at the optimum
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
};

// Minimize f with the Nelder-Mead simplex method. Non-finite objective
// values are treated as +infinity.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> start,
                             const NelderMeadOptions& opts = {});

// Central-difference Hessian of f at x with per-coordinate step h_i.
std::vector<std::vector<double>> numerical_hessian(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& x, double rel_step = 1e-4);

}  // namespace skewsym

#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace skewsym {

struct QuadratureOptions {
    double rel_tol = 1e-12;   // refinement target, relative to the L1 norm
    double fail_tol = 1e-8;   // relative error estimate that counts as failure
    double abs_tol = 0.0;
    std::size_t max_intervals = 2000;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    double l1 = 0.0;
};

using Integrand = std::function<double(double)>;

// Globally adaptive 21-point Gauss-Kronrod quadrature on [a, b]; either
// limit may be infinite (mapped onto a finite interval). The interval with
// the largest error is bisected until the total error is below
// max(rel_tol * L1, abs_tol), the interval budget runs out, or every
// interval is too short to split. Throws NumericalError when the final
// error exceeds max(fail_tol * L1, abs_tol).
QuadratureResult integrate(const Integrand& f, double a, double b,
                           const QuadratureOptions& opts = {});

// Same, with [a, b] split at the given interior breakpoints (points outside
// (a, b) are ignored). All pieces share one interval budget and one error
// test, so pieces carrying negligible mass cannot fail the integral.
QuadratureResult integrate_pieces(const Integrand& f, double a, double b,
                                  std::span<const double> breakpoints,
                                  const QuadratureOptions& opts = {});

}  // namespace skewsym

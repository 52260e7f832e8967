#pragma once

// Fisher information of the skewness parameter, the Jeffreys prior of
// lambda, its tabulation/normalization, the Student-t(1/2) approximation,
// the independence Jeffreys prior and the diagonal of the full Fisher
// information matrix.

#include "skewsym/distributions.hpp"

#include <memory>
#include <vector>

namespace skewsym {

// I(lambda) = 2 int_0^inf x^2 f(x) g(lambda x)^2 / (G(lambda x)(1 - G(lambda x))) dx.
// Returns +infinity at lambda = 0 when f has no second moment.
double fisher_lambda(const SymmetricBase& base, const SkewingCdf& skew, double lambda);

// Same integral truncated to x in [0, upper]. Used to watch the lambda = 0
// integral grow when f has infinite variance.
double fisher_lambda_truncated(const SymmetricBase& base, const SkewingCdf& skew, double lambda,
                               double upper);

// Unnormalized Jeffreys prior sqrt(I(lambda)). Throws DomainError when
// I(lambda) is infinite (the prior is undefined at zero).
double jeffreys_lambda(const SymmetricBase& base, const SkewingCdf& skew, double lambda);

// Envelope for I(lambda), lambda >= L > 0:
//   (2/l^3) int u^2 f(u/L) k(u) du  <=  I(l)  <=  (2M/l^3) int u^2 k(u) du
// with k the Fisher kernel g^2/(G(1-G)). Each side is its own quadrature.
struct FisherEnvelope {
    double lower;
    double upper;
};
FisherEnvelope fisher_tail_envelope(const SymmetricBase& base, const SkewingCdf& skew, double lambda,
                                    double L);

struct GridSpec {
    double min_abs = 1e-3;   // smallest nonzero |lambda|
    double max_abs = 200.0;  // grid edge
    std::size_t per_side = 400;
    bool include_zero = true;

    // Symmetric grid, log-spaced in |lambda|, strictly increasing.
    std::vector<double> points() const;
};

// Tabulated Jeffreys prior for one (base, skew) pair. Immutable once built.
class JeffreysTable {
public:
    JeffreysTable(ModelFamily family, std::vector<double> grid, std::vector<double> values);

    const ModelFamily& family() const { return family_; }
    const std::vector<double>& lambda_grid() const { return grid_; }
    // Unnormalized sqrt(I(lambda)) at each grid point.
    const std::vector<double>& values() const { return values_; }
    // Integral of the unnormalized prior over the real line (interpolant on
    // the grid plus the analytic tails).
    double norm_constant() const { return norm_constant_; }
    // Median of lambda^3 I(lambda) over the outer 20% of each half-grid.
    double tail_constant() const { return tail_constant_; }

    // Normalized log prior density at any lambda. Log-space monotone cubic
    // interpolation inside the grid, the asymptote c |l|^{-3/2} (1 + b/l^2)
    // outside.
    double log_density(double lambda) const;
    double density(double lambda) const { return std::exp(log_density(lambda)); }

    // Normalized value at grid point i.
    double normalized_value(std::size_t i) const { return values_[i] / norm_constant_; }

private:
    struct Half;
    double log_unnormalized(double lambda) const;

    ModelFamily family_;
    std::vector<double> grid_;
    std::vector<double> values_;
    std::shared_ptr<const Half> positive_;
    std::shared_ptr<const Half> negative_;
    double value_at_zero_ = 0.0;
    double norm_constant_ = 0.0;
    double tail_constant_ = 0.0;
};

// Evaluate the Jeffreys prior on the grid (in parallel when threads > 1)
// and normalize. Throws DomainError when the grid is not symmetric or the
// prior is undefined at a grid point.
JeffreysTable build_table(const ModelFamily& family, const GridSpec& grid = {}, unsigned threads = 1);

// Student-t density with `dof` degrees of freedom, scale and center; the
// proper approximation (dof = 1/2) to the Jeffreys prior of lambda.
struct StudentTApprox {
    double dof = 0.5;
    double scale = 1.0;
    double center = 0.0;

    double log_density(double lambda) const;
    double density(double lambda) const { return std::exp(log_density(lambda)); }
};

struct StudentTFit {
    StudentTApprox approx;
    double sup_distance = 0.0;  // max over the grid of |normalized table - t density|
};

// Fix dof = 1/2 and choose the scale minimizing the sup-norm distance to
// the normalized table over the grid.
StudentTFit fit_t_approx(const JeffreysTable& table);

// log of sigma^{-1} pi(lambda), normalized in lambda.
double independence_prior_logdensity(double mu, double sigma, double lambda, const JeffreysTable& table);

struct FisherDiagonal {
    double mu_mu;
    double sigma_sigma;
    double lambda_lambda;
};

// Diagonal of the Fisher information matrix of (mu, sigma, lambda).
FisherDiagonal fisher_diag(const SkewSymmetric& model);

}  // namespace skewsym

#pragma once

// Symmetric base densities f, skewing CDFs G, and the skew-symmetric family
//
//     s(y; mu, sigma, lambda) = (2/sigma) f(z) G(lambda z),  z = (y - mu)/sigma.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace skewsym {

enum class BaseKind { normal, logistic, student_t, exp_power };
enum class SkewKind { normal_cdf, logistic_cdf, student_t_cdf };

std::string_view to_string(BaseKind kind);
std::string_view to_string(SkewKind kind);
BaseKind parse_base_kind(std::string_view name);
SkewKind parse_skew_kind(std::string_view name);

// Symmetric unimodal density f with mode 0 and support on the real line.
class SymmetricBase {
public:
    static SymmetricBase normal();
    static SymmetricBase logistic();
    static SymmetricBase student_t(double dof);
    // f(x) = delta / (2 Gamma(1/delta)) exp(-|x|^delta)
    static SymmetricBase exp_power(double delta);
    static SymmetricBase make(BaseKind kind, std::optional<double> shape = std::nullopt);

    BaseKind kind() const { return kind_; }
    std::optional<double> shape() const { return shape_; }

    // The bound M with 0 < f(x) <= M; attained at the mode.
    double density_bound() const { return std::exp(log_norm_); }
    // E[X^2] under f, or +infinity.
    double second_moment() const;
    bool is_scale_mixture_of_normals() const;

    double pdf(double x) const { return std::exp(log_pdf(x)); }
    double log_pdf(double x) const;
    double cdf(double x) const;
    // d/dx log f(x)
    double score(double x) const;
    // Half-width beyond which the mass left out is below 1e-12 (a
    // quadrature breakpoint, not a hard cut).
    double tail_cutoff() const;

    double draw(std::mt19937_64& rng) const;

    friend bool operator==(const SymmetricBase&, const SymmetricBase&) = default;

private:
    SymmetricBase(BaseKind kind, std::optional<double> shape);

    BaseKind kind_;
    std::optional<double> shape_;
    double log_norm_ = 0.0;  // log f(0)
};

// CDF G of a symmetric continuous density g, used as the skewing function.
class SkewingCdf {
public:
    static SkewingCdf normal();
    static SkewingCdf logistic();
    static SkewingCdf student_t(double dof);
    static SkewingCdf make(SkewKind kind, std::optional<double> shape = std::nullopt);

    SkewKind kind() const { return kind_; }
    std::optional<double> shape() const { return shape_; }

    double cdf(double x) const;
    double log_cdf(double x) const;
    double pdf(double x) const { return std::exp(log_pdf(x)); }
    double log_pdf(double x) const;

    // log of g(u)^2 / (G(u) (1 - G(u))), the Fisher-information kernel.
    // For the logistic CDF g = G(1 - G), so the kernel is exactly g(u).
    double log_fisher_kernel(double u) const;
    // Generic evaluation of the same kernel, bypassing the logistic identity.
    double log_fisher_kernel_generic(double u) const;

    friend bool operator==(const SkewingCdf&, const SkewingCdf&) = default;

private:
    SkewingCdf(SkewKind kind, std::optional<double> shape);

    SkewKind kind_;
    std::optional<double> shape_;
    double log_norm_ = 0.0;  // log g(0)
};

// A (base, skew) pair: the model family without location/scale/skewness.
struct ModelFamily {
    SymmetricBase base;
    SkewingCdf skew;

    static ModelFamily skew_normal() { return {SymmetricBase::normal(), SkewingCdf::normal()}; }
    static ModelFamily skew_logistic() { return {SymmetricBase::logistic(), SkewingCdf::logistic()}; }
    // "skew-normal", "skew-logistic", "normal", "logistic"
    static ModelFamily from_name(std::string_view name);

    friend bool operator==(const ModelFamily&, const ModelFamily&) = default;
};

std::string describe(const ModelFamily& family);

class SkewSymmetric {
public:
    SkewSymmetric(double mu, double sigma, double lambda, SymmetricBase base, SkewingCdf skew);
    SkewSymmetric(double mu, double sigma, double lambda, const ModelFamily& family)
        : SkewSymmetric(mu, sigma, lambda, family.base, family.skew) {}

    double mu() const { return mu_; }
    double sigma() const { return sigma_; }
    double lambda() const { return lambda_; }
    const SymmetricBase& base() const { return base_; }
    const SkewingCdf& skew() const { return skew_; }
    ModelFamily family() const { return {base_, skew_}; }

private:
    double mu_;
    double sigma_;
    double lambda_;
    SymmetricBase base_;
    SkewingCdf skew_;
};

double density(const SkewSymmetric& model, double y);
double log_density(const SkewSymmetric& model, double y);

// Closed-form skew-logistic density (1/(4 sigma)) sech^2(z/2) (1 + tanh(lambda z/2)).
double skew_logistic_density(double mu, double sigma, double lambda, double y);

// Standardized (mu = 0, sigma = 1) lower and upper tail masses; the tail
// that is integrated numerically is always the smaller one.
double standard_cdf(const ModelFamily& family, double lambda, double z);
double standard_ccdf(const ModelFamily& family, double lambda, double z);
double standard_log_cdf(const ModelFamily& family, double lambda, double z);
double standard_log_ccdf(const ModelFamily& family, double lambda, double z);
double standard_log_density(const ModelFamily& family, double lambda, double z);

double cdf(const SkewSymmetric& model, double y);
double ccdf(const SkewSymmetric& model, double y);
double log_cdf(const SkewSymmetric& model, double y);
double log_ccdf(const SkewSymmetric& model, double y);

// Bracketed root search on cdf; |cdf(result) - p| <= 1e-9.
double quantile(const SkewSymmetric& model, double p);

// One draw by the sign-flip representation: X ~ f, keep X with
// probability G(lambda X), otherwise -X.
double draw(const SkewSymmetric& model, std::mt19937_64& rng);
std::vector<double> sample(const SkewSymmetric& model, std::size_t n, std::mt19937_64& rng);
std::vector<double> sample(const SkewSymmetric& model, std::size_t n, std::uint64_t seed);

}  // namespace skewsym

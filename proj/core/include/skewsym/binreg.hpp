#pragma once

// Binomial regression with skew-symmetric links S(eta; lambda), the
// hierarchical determinant prior det[X' W X]^{1/2} pi(lambda), posterior
// fitting, prediction and model comparison.

#include "skewsym/distributions.hpp"
#include "skewsym/inference.hpp"
#include "skewsym/jeffreys.hpp"
#include "skewsym/mcmc.hpp"

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace skewsym {

struct GlmData {
    Eigen::MatrixXd X;  // m x (k+1), first column all ones
    std::vector<double> n;
    std::vector<double> y;
    std::vector<std::string> covariate_names;  // k names (intercept excluded)

    std::size_t rows() const { return static_cast<std::size_t>(X.rows()); }
    std::size_t columns() const { return static_cast<std::size_t>(X.cols()); }

    // Prepend the intercept to covariate columns.
    static GlmData from_covariates(const std::vector<std::vector<double>>& covariates,
                                   std::vector<std::string> names, std::vector<double> n, std::vector<double> y);
    // Beetle mortality data: 8 doses of carbon disulphide.
    static GlmData bliss();

    // Throws DomainError on shape mismatch, a non-unit first column or
    // y outside [0, n].
    void validate() const;
    friend bool operator==(const GlmData& a, const GlmData& b);
};

struct LinkValues {
    double log_cdf;   // log S
    double log_ccdf;  // log (1 - S)
    double log_pdf;   // log s
};

struct SkewLink {
    std::string name;
    ModelFamily family;
    bool lambda_fixed = false;  // symmetric link, lambda pinned at 0
    std::shared_ptr<const JeffreysTable> lambda_prior;  // required unless lambda_fixed

    static SkewLink logit();
    static SkewLink probit();
    static SkewLink skew_logistic(std::shared_ptr<const JeffreysTable> table);
    static SkewLink skew_normal(std::shared_ptr<const JeffreysTable> table);

    std::size_t parameter_count(const GlmData& data) const { return data.columns() + (lambda_fixed ? 0 : 1); }
    LinkValues eval(double eta, double lambda) const;
    double cdf(double eta, double lambda) const { return std::exp(eval(eta, lambda).log_cdf); }
    void validate() const;
};

// Sum of log C(n_i, y_i).
double binomial_log_constants(const GlmData& data);

// sum_i y_i log S(eta_i) + (n_i - y_i) log(1 - S(eta_i)), binomial
// constants omitted unless include_constants. -infinity when a row with
// opposing counts sits at S = 0 or 1.
double glm_loglik(std::span<const double> beta, double lambda, const GlmData& data, const SkewLink& link,
                  bool include_constants = false);

// (1/2) log det[X' W X] + log pi(lambda) (the second term only for free
// lambda). -infinity when X' W X is singular.
double cik_logprior(std::span<const double> beta, double lambda, const GlmData& data, const SkewLink& link);

// (1/2) log det[X' W X] alone.
double cik_half_logdet(std::span<const double> beta, double lambda, const GlmData& data, const SkewLink& link);

struct GlmMle {
    std::vector<double> beta;
    double lambda = 0.0;
    double max_loglik = 0.0;
    double aic = 0.0;
    double bic = 0.0;  // with n = number of rows
    int k = 0;
    bool boundary = false;
};

GlmMle glm_mle(const GlmData& data, const SkewLink& link, bool include_constants = false,
               double lambda_max = 500.0);

struct GlmFitOptions {
    McmcConfig mcmc = McmcConfig::application_defaults();
    bool include_constants = false;
    bool marginal = true;
    ImportanceOptions importance{};
};

struct GlmPosterior {
    std::string link_name;
    GlmData data;
    PosteriorDraws draws;  // beta_0..beta_k[, lambda]
    std::vector<double> predicted_probabilities;  // posterior mean of S per row
    GlmMle mle;
    std::optional<MarginalLikelihood> log_c;   // log of int L pi
    std::optional<MarginalLikelihood> log_c0;  // log of int pi
    bool include_constants = false;

    // log C - log C0 when both are available.
    std::optional<double> log_marginal() const;
};

GlmPosterior glm_fit(const GlmData& data, const SkewLink& link, const GlmFitOptions& options = {});

// n_j times the posterior mean of S(x_j' beta; lambda) for each row.
std::vector<double> glm_predict(const GlmPosterior& posterior, const GlmData& data, const SkewLink& link);

struct GlmComparisonRow {
    std::string link_name;
    double aic;
    double bic;
    std::optional<double> log_marginal;
    std::optional<double> bayes_factor;  // against the reference
};

// Throws DomainError when the fits were made on different data or the
// reference is missing.
std::vector<GlmComparisonRow> glm_compare(const std::vector<GlmPosterior>& fits, const std::string& reference);

}  // namespace skewsym

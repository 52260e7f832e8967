#pragma once

// CSV and JSON ingestion. CSV dialect: comma separated, header row
// required, '.' decimal point. Errors carry 1-based row/column positions
// (row 1 is the header).

#include "skewsym/binreg.hpp"
#include "skewsym/distributions.hpp"
#include "skewsym/propriety.hpp"
#include "skewsym/stress_strength.hpp"

#include <istream>
#include <string>
#include <vector>

namespace skewsym::io {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;  // same width as header

    // Column index by name, or -1.
    int find(const std::string& name) const;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

// Columns `y` (exact) and/or `lo,hi` (censored). In a row either y or the
// interval is filled; an empty lo/hi is an infinite end.
Dataset dataset_from_csv(const CsvTable& table);
// Columns `n`, `y` and one or more covariates (intercept prepended).
GlmData glm_data_from_csv(const CsvTable& table);
// Columns `x,y` (pairs) or a single `z` column of differences.
PairedSample pairs_from_csv(const CsvTable& table);

struct ModelSpec {
    ModelFamily family = ModelFamily::skew_normal();
    double mu = 0.0;
    double sigma = 1.0;
    double lambda = 0.0;

    SkewSymmetric model() const { return {mu, sigma, lambda, family}; }
};

// {"base": {"kind": "...", "shape": x}, "skew": {"kind": "...", "shape": x},
//  "mu": m, "sigma": s, "lambda": l}. Kinds: normal, logistic, student_t,
// exp_power for the base; normal_cdf/normal, logistic_cdf/logistic,
// student_t_cdf/student_t for the skew. mu, sigma, lambda default to 0, 1, 0.
ModelSpec parse_model_json(const std::string& text);
ModelSpec read_model_file(const std::string& path);
std::string model_to_json(const ModelSpec& spec);

}  // namespace skewsym::io

#include "skewsym/io.hpp"

#include "skewsym/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace skewsym::io {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(',', start);
        out.push_back(trim(std::string_view(line).substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

double parse_number(const std::string& cell, std::size_t row, std::size_t col) {
    if (cell.empty()) throw ParseError("empty numeric field", row, col);
    std::string lower(cell);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "inf" || lower == "+inf" || lower == "infinity") return INFINITY;
    if (lower == "-inf" || lower == "-infinity") return -INFINITY;
    const char* first = cell.data();
    if (*first == '+') ++first;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(first, cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size())
        throw ParseError("cannot parse '" + cell + "' as a number", row, col);
    if (std::isnan(v)) throw ParseError("NaN is not a valid value", row, col);
    return v;
}

// Data rows start at file row 2.
std::size_t file_row(std::size_t data_index) { return data_index + 2; }

}  // namespace

int CsvTable::find(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
}

CsvTable read_csv(std::istream& in) {
    CsvTable t;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (row == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
        if (trim(line).empty()) {
            if (row == 1) throw ParseError("missing header row", 1);
            continue;
        }
        if (line.find('"') != std::string::npos) throw ParseError("quoted fields are not supported", row);
        auto cells = split(line);
        if (t.header.empty()) {
            for (std::size_t c = 0; c < cells.size(); ++c) {
                if (cells[c].empty()) throw ParseError("empty column name", row, c + 1);
                if (std::find(cells.begin(), cells.begin() + static_cast<std::ptrdiff_t>(c), cells[c]) != cells.begin() + static_cast<std::ptrdiff_t>(c))
                    throw ParseError("duplicate column '" + cells[c] + "'", row, c + 1);
            }
            t.header = std::move(cells);
            continue;
        }
        if (cells.size() != t.header.size())
            throw ParseError("expected " + std::to_string(t.header.size()) + " fields, found " +
                                 std::to_string(cells.size()),
                             row, std::min(cells.size(), t.header.size()) + 1);
        // Keep positions aligned with the file: pad skipped blank lines.
        while (t.rows.size() + 2 < row) t.rows.emplace_back();
        t.rows.push_back(std::move(cells));
    }
    if (t.header.empty()) throw ParseError("missing header row", 1);
    return t;
}

CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return read_csv(in);
}

Dataset dataset_from_csv(const CsvTable& t) {
    const int cy = t.find("y"), clo = t.find("lo"), chi = t.find("hi");
    if (cy < 0 && (clo < 0 || chi < 0)) throw ParseError("dataset CSV needs a 'y' column or 'lo','hi' columns", 1);
    if ((clo < 0) != (chi < 0)) throw ParseError("dataset CSV needs both 'lo' and 'hi'", 1, static_cast<std::size_t>(std::max(clo, chi)) + 1);
    Dataset d;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        if (r.empty()) continue;
        const std::size_t row = file_row(i);
        const bool has_y = cy >= 0 && !r[static_cast<std::size_t>(cy)].empty();
        const bool has_lo = clo >= 0 && !r[static_cast<std::size_t>(clo)].empty();
        const bool has_hi = chi >= 0 && !r[static_cast<std::size_t>(chi)].empty();
        if (has_y) {
            if (has_lo || has_hi) throw ParseError("row has both an exact value and an interval", row);
            const double y = parse_number(r[static_cast<std::size_t>(cy)], row, static_cast<std::size_t>(cy) + 1);
            if (!std::isfinite(y)) throw ParseError("exact observation must be finite", row, static_cast<std::size_t>(cy) + 1);
            d.exact.push_back(y);
        } else if (clo >= 0 && (has_lo || has_hi)) {
            const double lo = has_lo ? parse_number(r[static_cast<std::size_t>(clo)], row, static_cast<std::size_t>(clo) + 1) : -INFINITY;
            const double hi = has_hi ? parse_number(r[static_cast<std::size_t>(chi)], row, static_cast<std::size_t>(chi) + 1) : INFINITY;
            if (!(lo < hi)) throw ParseError("interval needs lo < hi", row, static_cast<std::size_t>(chi) + 1);
            d.censored.push_back({lo, hi});
        } else {
            throw ParseError("row has neither an exact value nor an interval", row);
        }
    }
    return d;
}

GlmData glm_data_from_csv(const CsvTable& t) {
    const int cn = t.find("n"), cy = t.find("y");
    if (cn < 0 || cy < 0) throw ParseError("binomial CSV needs 'n' and 'y' columns", 1);
    std::vector<std::size_t> cov_cols;
    std::vector<std::string> names;
    for (std::size_t c = 0; c < t.header.size(); ++c)
        if (static_cast<int>(c) != cn && static_cast<int>(c) != cy) {
            cov_cols.push_back(c);
            names.push_back(t.header[c]);
        }
    std::vector<std::vector<double>> cov(cov_cols.size());
    std::vector<double> n, y;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        if (r.empty()) continue;
        const std::size_t row = file_row(i);
        const double ni = parse_number(r[static_cast<std::size_t>(cn)], row, static_cast<std::size_t>(cn) + 1);
        const double yi = parse_number(r[static_cast<std::size_t>(cy)], row, static_cast<std::size_t>(cy) + 1);
        if (!(ni >= 0.0) || !std::isfinite(ni) || ni != std::floor(ni))
            throw ParseError("n must be a nonnegative integer", row, static_cast<std::size_t>(cn) + 1);
        if (!(yi >= 0.0) || yi > ni || yi != std::floor(yi))
            throw ParseError("y must be an integer in [0, n]", row, static_cast<std::size_t>(cy) + 1);
        n.push_back(ni);
        y.push_back(yi);
        for (std::size_t k = 0; k < cov_cols.size(); ++k) {
            const double v = parse_number(r[cov_cols[k]], row, cov_cols[k] + 1);
            if (!std::isfinite(v)) throw ParseError("covariate must be finite", row, cov_cols[k] + 1);
            cov[k].push_back(v);
        }
    }
    if (n.empty()) throw ParseError("binomial CSV has no data rows", 2);
    return GlmData::from_covariates(cov, names, n, y);
}

PairedSample pairs_from_csv(const CsvTable& t) {
    const int cx = t.find("x"), cy = t.find("y"), cz = t.find("z");
    if (t.find("lo") >= 0 || t.find("hi") >= 0)
        throw ParseError("censored pairs are not supported: stress-strength needs the complete sample", 1);
    if (!((cx >= 0 && cy >= 0) || cz >= 0)) throw ParseError("pairs CSV needs 'x,y' columns or a 'z' column", 1);
    PairedSample s;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        if (r.empty()) continue;
        const std::size_t row = file_row(i);
        auto cell = [&](int c) {
            const double v = parse_number(r[static_cast<std::size_t>(c)], row, static_cast<std::size_t>(c) + 1);
            if (!std::isfinite(v)) throw ParseError("value must be finite", row, static_cast<std::size_t>(c) + 1);
            return v;
        };
        if (cx >= 0 && cy >= 0) {
            s.x.push_back(cell(cx));
            s.y.push_back(cell(cy));
        } else {
            s.x.push_back(cell(cz));
            s.y.push_back(0.0);
        }
    }
    return s;
}

// ----------------------------------------------------------------------------
// Model JSON

namespace {

using nlohmann::json;

std::optional<double> shape_of(const json& j, const std::string& where) {
    if (!j.contains("shape") || j["shape"].is_null()) return std::nullopt;
    if (!j["shape"].is_number()) throw ParseError(where + ".shape must be a number");
    return j["shape"].get<double>();
}

double number_or(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) throw ParseError(std::string("'") + key + "' must be a number");
    return j[key].get<double>();
}

// Byte offset -> (line, column), both 1-based.
std::pair<std::size_t, std::size_t> locate(const std::string& text, std::size_t offset) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < std::min(offset, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

}  // namespace

ModelSpec parse_model_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = locate(text, e.byte > 0 ? e.byte - 1 : 0);
        throw ParseError(std::string("malformed model JSON: ") + e.what(), line, col);
    }
    if (!j.is_object()) throw ParseError("model JSON must be an object");
    if (!j.contains("base") || !j["base"].is_object() || !j["base"].contains("kind") || !j["base"]["kind"].is_string())
        throw ParseError("model JSON needs base.kind");
    ModelSpec spec;
    try {
        const auto base = SymmetricBase::make(parse_base_kind(j["base"]["kind"].get<std::string>()),
                                              shape_of(j["base"], "base"));
        SkewingCdf skew = SkewingCdf::normal();
        if (j.contains("skew")) {
            if (!j["skew"].is_object() || !j["skew"].contains("kind") || !j["skew"]["kind"].is_string())
                throw ParseError("model JSON skew must be an object with a kind");
            skew = SkewingCdf::make(parse_skew_kind(j["skew"]["kind"].get<std::string>()), shape_of(j["skew"], "skew"));
        } else if (base.kind() == BaseKind::logistic) {
            skew = SkewingCdf::logistic();
        }
        spec.family = {base, skew};
    } catch (const DomainError& e) {
        throw ParseError(std::string("invalid model: ") + e.what());
    }
    spec.mu = number_or(j, "mu", 0.0);
    spec.sigma = number_or(j, "sigma", 1.0);
    spec.lambda = number_or(j, "lambda", 0.0);
    try {
        (void)spec.model();
    } catch (const DomainError& e) {
        throw ParseError(std::string("invalid model parameters: ") + e.what());
    }
    return spec;
}

ModelSpec read_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_model_json(ss.str());
}

std::string model_to_json(const ModelSpec& spec) {
    json j;
    j["base"]["kind"] = std::string(to_string(spec.family.base.kind()));
    if (spec.family.base.shape()) j["base"]["shape"] = *spec.family.base.shape();
    j["skew"]["kind"] = std::string(to_string(spec.family.skew.kind()));
    if (spec.family.skew.shape()) j["skew"]["shape"] = *spec.family.skew.shape();
    j["mu"] = spec.mu;
    j["sigma"] = spec.sigma;
    j["lambda"] = spec.lambda;
    return j.dump();
}

}  // namespace skewsym::io

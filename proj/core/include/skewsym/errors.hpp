#pragma once

#include <stdexcept>
#include <string>

namespace skewsym {

// Invalid argument or parameter outside the model's support.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A numerical routine (quadrature, root search, optimizer) failed to reach
// its tolerance. The message carries the diagnostic.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Importance-sampling estimate whose effective sample size is too small.
class UnreliableEstimate : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// Malformed CSV/JSON input. Carries the 1-based row/column when known.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t row = 0, std::size_t column = 0)
        : std::runtime_error(format(what, row, column)), row_(row), column_(column) {}

    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    static std::string format(const std::string& what, std::size_t row, std::size_t column) {
        if (row == 0) return what;
        std::string out = what + " (row " + std::to_string(row);
        if (column != 0) out += ", column " + std::to_string(column);
        return out + ")";
    }

    std::size_t row_;
    std::size_t column_;
};

}  // namespace skewsym

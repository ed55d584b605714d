#pragma once

#include <stdexcept>
#include <string>

namespace pspp {

// Base class for everything this library throws.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Incompatible matrix/vector shapes.
class dimension_error : public error {
public:
    using error::error;
};

// A covariance inverse was requested but the matrix is singular or
// too ill-conditioned; carries the condition estimate that tripped the guard.
class singular_error : public error {
public:
    singular_error(const std::string& what, double condition)
        : error(what), condition_(condition) {}
    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

// A matrix required to be positive semi-definite is not; carries the
// offending eigenvalue.
class not_psd_error : public error {
public:
    not_psd_error(const std::string& what, double min_eigenvalue)
        : error(what), min_eigenvalue_(min_eigenvalue) {}
    double min_eigenvalue() const noexcept { return min_eigenvalue_; }

private:
    double min_eigenvalue_;
};

// Parameter outside the mathematical domain of an operation
// (degrees of freedom too small, support constraint violated, ...).
class domain_error : public error {
public:
    using error::error;
};

// Config file problems; carries the location when known (1-based, 0 = unknown).
class config_error : public error {
public:
    explicit config_error(const std::string& what, int line = 0, int column = 0)
        : error(what), line_(line), column_(column) {}
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

// Malformed input data (CSV ingestion, I/O failures on data files).
class data_error : public error {
public:
    using error::error;
};

}  // namespace pspp

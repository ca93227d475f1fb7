#pragma once

// Error taxonomy shared by all modules.
//
// validation_error: rejected input (bad field, schedule collision, shape mismatch).
//   Carries the offending field path where one exists.
// numeric_error:    a numeric routine failed (factorization breakdown, non-finite
//   intermediate). Carries a fingerprint (operation, dimensions, seed) so the
//   failing call can be replayed in isolation.
// truncation_error: a requested certified tolerance is unreachable within the
//   configured resource cap. Carries the bound that was achieved.

#include <cstdio>
#include <stdexcept>
#include <string>

namespace szegolab {

namespace detail {
inline std::string short_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}
} // namespace detail

class validation_error : public std::invalid_argument {
public:
    explicit validation_error(const std::string& field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(field) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& fingerprint, const std::string& what)
        : std::runtime_error(what + " [" + fingerprint + "]"), fingerprint_(fingerprint) {}
    const std::string& fingerprint() const noexcept { return fingerprint_; }

private:
    std::string fingerprint_;
};

class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& path, const std::string& what)
        : std::runtime_error(what + " [" + path + "]"), path_(path) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

class truncation_error : public std::runtime_error {
public:
    truncation_error(double achieved_bound, double requested_tol, const std::string& what)
        : std::runtime_error(what + " (achieved " + detail::short_double(achieved_bound) +
                             ", requested " + detail::short_double(requested_tol) + ")"),
          achieved_bound_(achieved_bound),
          requested_tol_(requested_tol) {}
    double achieved_bound() const noexcept { return achieved_bound_; }
    double requested_tol() const noexcept { return requested_tol_; }

private:
    double achieved_bound_;
    double requested_tol_;
};

} // namespace szegolab

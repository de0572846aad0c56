#pragma once

#include <stdexcept>
#include <string>

namespace nhpc {

// Base for all numeric/validation failures raised by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Argument outside the mathematical domain (e.g. log of zero).
struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

// Spectrum point violates the passivity assumption Im(eps) <= 0.
struct PassivityError : Error {
    explicit PassivityError(const std::string& msg) : Error(msg) {}
};

// Gamma/digamma evaluated at a nonpositive integer.
struct PoleError : Error {
    explicit PoleError(const std::string& msg) : Error(msg) {}
};

// Energy argument outside the reservoir band, or band-edge parameters.
struct BandError : Error {
    explicit BandError(const std::string& msg) : Error(msg) {}
};

// Inconsistent model/reservoir specification.
struct SpecError : Error {
    explicit SpecError(const std::string& msg) : Error(msg) {}
};

// Matrix is numerically defective (exceptional point): the biorthogonal
// expansion is invalid at this exact parameter point.
struct DefectiveError : Error {
    explicit DefectiveError(const std::string& msg, double min_overlap)
        : Error(msg), min_overlap(min_overlap) {}
    double min_overlap;
};

// Dense diagonalization request above the configured dimension cap.
struct DimCapError : Error {
    explicit DimCapError(const std::string& msg) : Error(msg) {}
};

// Bad run configuration; carries the offending field name.
struct ConfigError : Error {
    ConfigError(const std::string& field, const std::string& msg)
        : Error("config field '" + field + "': " + msg), field(field) {}
    std::string field;
};

}  // namespace nhpc

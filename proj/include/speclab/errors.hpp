#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace speclab {

/// Base class for all library errors.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// Mismatched lattices, bad option combinations, exceeded caps.
class config_error : public error {
public:
    explicit config_error(const std::string& what) : error(what) {}
};

/// Argument outside the mathematical domain of an operation.
class domain_error : public error {
public:
    explicit domain_error(const std::string& what) : error(what) {}
};

/// A run configuration failed validation; carries the offending field name.
class validation_error : public error {
public:
    validation_error(std::string field, const std::string& what)
        : error("invalid field '" + field + "': " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Non-finite amplitudes during time stepping. A signal, not a crash: the
/// orchestrator records it as a blow-up event.
class numeric_blowup : public error {
public:
    numeric_blowup(std::int64_t step_index, const std::string& what)
        : error(what + " (step " + std::to_string(step_index) + ")"),
          step_index_(step_index) {}
    std::int64_t step_index() const noexcept { return step_index_; }

private:
    std::int64_t step_index_;
};

/// Numeric constant estimation failed (quadrature did not converge, etc.).
class estimation_error : public error {
public:
    explicit estimation_error(const std::string& what) : error(what) {}
};

/// Input degenerate for the requested diagnostic (e.g. all-zero field fit).
class degenerate_input_error : public error {
public:
    explicit degenerate_input_error(const std::string& what) : error(what) {}
};

}  // namespace speclab

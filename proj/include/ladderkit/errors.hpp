#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ladderkit {

// Base of every error the toolkit throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid argument or violated precondition (non-finite value, fs > fp, ...).
class InputError : public Error {
public:
    using Error::Error;
};

// A circuit solve hit a singular node or a zero denominator.
class SingularNetworkError : public Error {
public:
    using Error::Error;
};

// Extremum search landed on the first or last grid point.
class BoundaryExtremumError : public Error {
public:
    using Error::Error;
};

// Filter metrics could not be extracted from a transmission trace.
class MetricsError : public Error {
public:
    enum class Kind { BandNotContained, NoCrossing, NoOutOfBandPoints };

    MetricsError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

// No static-capacitance candidate produced a usable passband.
class SynthesisError : public Error {
public:
    using Error::Error;
};

// The admittance sweep has no interior resonance pair to seed a fit from.
class InitError : public Error {
public:
    using Error::Error;
};

// Malformed text input. Line numbers are 1-based; 0 means "not line specific".
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& msg)
        : Error(line ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Config document violates the expected schema; field is a JSON-pointer-like path.
class SchemaError : public Error {
public:
    SchemaError(std::string field, const std::string& msg)
        : Error(field + ": " + msg), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace ladderkit

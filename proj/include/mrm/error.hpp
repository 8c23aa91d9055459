#pragma once

#include <stdexcept>
#include <string>

namespace mrm {

// Base of every error raised by the library. The CLI maps ArgumentError and
// ConfigError to usage failures and everything else to domain failures.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Caller passed an invalid argument (bad range, wrong length, bad flag value).
class ArgumentError : public Error {
public:
    using Error::Error;
};

// A configuration document or table could not be parsed or is inconsistent.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Voltage outside the tabulated electro-optic response.
class RangeError : public Error {
public:
    using Error::Error;
};

// Resonance search found zero or several minima in the requested window.
class SearchError : public Error {
public:
    using Error::Error;
};

// p0 == p3: the RLM reference level coincides with the outer levels.
class DegenerateLevelsError : public Error {
public:
    using Error::Error;
};

// Logarithm of a non-positive power ratio.
class MathDomainError : public Error {
public:
    using Error::Error;
};

class InsufficientDataError : public Error {
public:
    using Error::Error;
};

class EmptyWindowError : public Error {
public:
    using Error::Error;
};

}  // namespace mrm

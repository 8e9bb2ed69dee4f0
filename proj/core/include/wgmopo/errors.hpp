#pragma once

#include <stdexcept>
#include <string>

namespace wgmopo {

// Base class for all library errors.  Subclasses distinguish caller mistakes
// (DomainError), numerical failures (ConvergenceError), and bad input files
// (DataError, ScenarioError) so the CLI can map them to exit codes.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Arguments outside a documented validity range (wavelength, temperature,
// mode numbers, probabilities, ...).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(what) {}
};

// An iterative solver failed to reach its tolerance.
class ConvergenceError : public Error {
public:
    explicit ConvergenceError(const std::string& what) : Error(what) {}
};

// A data file (material, line list, geometry) is missing, malformed, or
// fails a consistency check.
class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(what) {}
};

// A scenario file is missing, malformed, has the wrong schema version, or
// contains unknown keys.
class ScenarioError : public Error {
public:
    explicit ScenarioError(const std::string& what) : Error(what) {}
};

}  // namespace wgmopo

#pragma once

// common.hpp
// Shared scalar aliases, error types and tolerance defaults for wildstokes.

#include <complex>
#include <stdexcept>
#include <string>

namespace wildstokes {

using Complex = std::complex<double>;

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

// Default tolerances, shared across modules.
constexpr double kRegularityTol = 1e-9;   // relative to max |diag|
constexpr double kAngleClusterTol = 1e-9; // radians
constexpr double kOdeRelTolDefault = 1e-12;
constexpr double kSupportTolDefault = 1e-7;

/// Base class for all wildstokes errors.
class error : public std::runtime_error {
public:
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// Input violates a mathematical precondition (e.g. non-regular Cartan element).
class degenerate_input_error : public error {
public:
  explicit degenerate_input_error(const std::string& what) : error(what) {}
};

/// Structurally invalid data (bad bundle, bad document, bad payload).
class malformed_input_error : public error {
public:
  explicit malformed_input_error(const std::string& what) : error(what) {}
};

/// Requested accuracy could not be met (series/ODE/support residuals).
class precision_error : public error {
public:
  explicit precision_error(const std::string& what) : error(what) {}
};

/// Residue spectrum has integer-spaced eigenvalues; the pole frame degenerates.
class resonance_error : public error {
public:
  explicit resonance_error(const std::string& what) : error(what) {}
};

/// Deformation path leaves the admissible region (wall approach).
class path_error : public error {
public:
  explicit path_error(const std::string& what) : error(what) {}
};

/// Singular directions collide along a deformation path.
class chamber_error : public error {
public:
  explicit chamber_error(const std::string& what) : error(what) {}
};

/// Problem size beyond the supported enumeration scale.
class unsupported_scale_error : public error {
public:
  explicit unsupported_scale_error(const std::string& what) : error(what) {}
};

/// Filesystem failure while writing outputs.
class io_error : public error {
public:
  explicit io_error(const std::string& what) : error(what) {}
};

} // namespace wildstokes

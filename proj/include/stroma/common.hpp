#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace stroma {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of a formula (negative stretch, radicand < 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid mesh or mesh-generation input.
class MeshError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration value or unknown configuration key.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A Gauss point reached J <= 0.
class InvertedElementError : public Error {
 public:
  InvertedElementError(int element, const std::string& what)
      : Error("element " + std::to_string(element) + ": " + what), element_(element) {}
  int element() const noexcept { return element_; }

 private:
  int element_;
};

/// Nonlinear or linear solve failure.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// 1 mmHg = 133.322 Pa = 1.33322e-4 MPa. All internal stresses are in MPa (N/mm^2).
inline constexpr double kMpaPerMmHg = 133.322e-6;

inline double mmhg_to_mpa(double mmhg) { return mmhg * kMpaPerMmHg; }
inline double mpa_to_mmhg(double mpa) { return mpa / kMpaPerMmHg; }

}  // namespace stroma

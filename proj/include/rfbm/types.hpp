#pragma once

#include <array>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace rfbm {

// Chart models use d coordinates, the ambient sphere uses d+1, and d <= 4.
inline constexpr int kMaxCoords = 5;
inline constexpr int kMaxDim = 4;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxCoords, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor,
                          kMaxCoords, kMaxCoords>;

// christoffel[k](i, j) = Gamma^k_{ij}
using Christoffel = std::array<Mat, kMaxCoords>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ChartSingularityError : public Error {
 public:
  using Error::Error;
};

class CutLocusError : public Error {
 public:
  using Error::Error;
};

class StepRejected : public Error {
 public:
  using Error::Error;
};

class ExplosionSentinel : public Error {
 public:
  using Error::Error;
};

class ConjugatePointError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class OverflowGuardError : public Error {
 public:
  OverflowGuardError(const std::string& what, double at)
      : Error(what), y_at_failure(at) {}
  double y_at_failure;
};

class DegenerateFrameError : public Error {
 public:
  using Error::Error;
};

}  // namespace rfbm

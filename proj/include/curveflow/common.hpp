#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace curveflow {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  double norm() const { return std::hypot(x, y); }
  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
};

inline double distance(Point2 a, Point2 b) { return (a - b).norm(); }

/// Invalid user input: bad config values, malformed source definitions.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical failure: CFL violation, non-finite values, inconsistent data.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace curveflow

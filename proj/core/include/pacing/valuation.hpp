#pragma once

#include <string>
#include <utility>
#include <vector>

namespace pacing {

// Subgradient interval [lower, upper] of a concave function at a point:
// lower is the right derivative, upper the left derivative.
struct Subgradient {
  double lower = 0.0;
  double upper = 0.0;
};

// Concave, nondecreasing valuation v(x) with v(0) = 0:
//   linear           v(x) = c x
//   shifted_power    v(x) = c ((x + s)^a - s^a),   s >= 0, a in (0, 1]
//   piecewise_linear interpolation of concave breakpoints starting at (0, 0),
//                    continued past the last breakpoint with the last slope.
class ConcaveValuation {
 public:
  enum class Kind { linear, shifted_power, piecewise_linear };
  using Point = std::pair<double, double>;

  ConcaveValuation() = default;  // linear with c = 0

  static ConcaveValuation linear(double c);
  static ConcaveValuation shifted_power(double c, double s, double a);
  static ConcaveValuation piecewise_linear(std::vector<Point> points);

  Kind kind() const { return kind_; }
  double scale() const { return c_; }
  double shift() const { return s_; }
  double exponent() const { return a_; }
  const std::vector<Point>& points() const { return points_; }

  // Slopes and intercepts of the affine pieces: v(x) = min_k(a_k + s_k x)
  // for piecewise-linear valuations.
  std::vector<Point> affine_pieces() const;

  bool is_zero() const;
  // True when v is linear in disguise (one slope everywhere).
  bool is_linear() const;

  double value(double x) const;
  // Derivative for smooth kinds; right derivative for piecewise-linear.
  double derivative(double x) const;
  double second_derivative(double x) const;
  Subgradient subgradient(double x) const;

  // v'(0) from the right (may be +infinity) and v'(1) from the left.
  double derivative_at_zero() const;
  double derivative_at_one() const;

  // sup_{x >= 0} (alpha v(x) - price x); +infinity when unbounded.
  double conjugate(double alpha, double price) const;

  // Whether x v'(x) is nondecreasing on [0, 1].
  bool x_derivative_nondecreasing() const;

  // Multiplies the valuation by k > 0.
  ConcaveValuation scaled(double k) const;

  std::string describe() const;

 private:
  Kind kind_ = Kind::linear;
  double c_ = 0.0;
  double s_ = 0.0;
  double a_ = 1.0;
  std::vector<Point> points_;
};

}  // namespace pacing

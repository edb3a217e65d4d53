#include "pacing/valuation.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "pacing/market.hpp"

namespace pacing {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool condition, const char* message) {
  if (!condition) throw StructuralError(message);
}

}  // namespace

ConcaveValuation ConcaveValuation::linear(double c) {
  require(std::isfinite(c) && c >= 0.0, "linear valuation needs c >= 0");
  ConcaveValuation v;
  v.kind_ = Kind::linear;
  v.c_ = c;
  return v;
}

ConcaveValuation ConcaveValuation::shifted_power(double c, double s, double a) {
  require(std::isfinite(c) && c >= 0.0, "shifted_power needs c >= 0");
  require(std::isfinite(s) && s >= 0.0, "shifted_power needs s >= 0");
  require(std::isfinite(a) && a > 0.0 && a <= 1.0,
          "shifted_power needs a in (0, 1]");
  ConcaveValuation v;
  v.kind_ = Kind::shifted_power;
  v.c_ = c;
  v.s_ = s;
  v.a_ = a;
  return v;
}

ConcaveValuation ConcaveValuation::piecewise_linear(std::vector<Point> points) {
  require(points.size() >= 2, "pwl valuation needs at least two points");
  require(points.front().first == 0.0 && points.front().second == 0.0,
          "pwl valuation must start at (0, 0)");
  double last_slope = kInf;
  for (std::size_t k = 1; k < points.size(); ++k) {
    const double dx = points[k].first - points[k - 1].first;
    require(std::isfinite(points[k].first) && std::isfinite(points[k].second),
            "pwl breakpoints must be finite");
    require(dx > 0.0, "pwl breakpoints must have increasing x");
    const double slope = (points[k].second - points[k - 1].second) / dx;
    require(slope >= -1e-12, "pwl valuation must be nondecreasing");
    require(slope <= last_slope * (1.0 + 1e-12) + 1e-12,
            "pwl valuation must be concave (nonincreasing slopes)");
    last_slope = slope;
  }
  ConcaveValuation v;
  v.kind_ = Kind::piecewise_linear;
  v.points_ = std::move(points);
  return v;
}

std::vector<ConcaveValuation::Point> ConcaveValuation::affine_pieces() const {
  std::vector<Point> pieces;
  if (kind_ != Kind::piecewise_linear) return pieces;
  for (std::size_t k = 1; k < points_.size(); ++k) {
    const auto [x0, y0] = points_[k - 1];
    const auto [x1, y1] = points_[k];
    const double slope = (y1 - y0) / (x1 - x0);
    pieces.emplace_back(slope, y0 - slope * x0);
  }
  return pieces;
}

bool ConcaveValuation::is_zero() const {
  if (kind_ != Kind::piecewise_linear) return c_ == 0.0;
  for (const auto& [x, y] : points_) {
    if (y != 0.0) return false;
  }
  return true;
}

bool ConcaveValuation::is_linear() const {
  switch (kind_) {
    case Kind::linear:
      return true;
    case Kind::shifted_power:
      return a_ == 1.0 || c_ == 0.0;
    case Kind::piecewise_linear: {
      const auto pieces = affine_pieces();
      for (const auto& piece : pieces) {
        if (std::abs(piece.first - pieces.front().first) > 1e-12) return false;
      }
      return true;
    }
  }
  return false;
}

double ConcaveValuation::value(double x) const {
  switch (kind_) {
    case Kind::linear:
      return c_ * x;
    case Kind::shifted_power:
      if (a_ == 1.0) return c_ * x;
      return c_ * (std::pow(x + s_, a_) - std::pow(s_, a_));
    case Kind::piecewise_linear: {
      for (std::size_t k = 1; k < points_.size(); ++k) {
        if (x <= points_[k].first || k + 1 == points_.size()) {
          const auto [x0, y0] = points_[k - 1];
          const auto [x1, y1] = points_[k];
          return y0 + (y1 - y0) / (x1 - x0) * (x - x0);
        }
      }
    }
  }
  return 0.0;
}

double ConcaveValuation::derivative(double x) const {
  switch (kind_) {
    case Kind::linear:
      return c_;
    case Kind::shifted_power:
      if (a_ == 1.0 || c_ == 0.0) return c_;
      if (x + s_ <= 0.0) return kInf;
      return c_ * a_ * std::pow(x + s_, a_ - 1.0);
    case Kind::piecewise_linear:
      return subgradient(x).lower;
  }
  return 0.0;
}

double ConcaveValuation::second_derivative(double x) const {
  if (kind_ != Kind::shifted_power || a_ == 1.0 || c_ == 0.0) return 0.0;
  if (x + s_ <= 0.0) return -kInf;
  return c_ * a_ * (a_ - 1.0) * std::pow(x + s_, a_ - 2.0);
}

Subgradient ConcaveValuation::subgradient(double x) const {
  if (kind_ != Kind::piecewise_linear) {
    const double d = derivative(x);
    return {d, d};
  }
  const auto pieces = affine_pieces();
  const std::size_t segments = pieces.size();
  // Segment k spans [points_[k].x, points_[k+1].x].
  for (std::size_t k = 0; k < segments; ++k) {
    const double right_end = points_[k + 1].first;
    if (x < right_end || k + 1 == segments) {
      const double slope = pieces[k].first;
      const bool at_left_kink = k > 0 && x == points_[k].first;
      return {slope, at_left_kink ? pieces[k - 1].first : slope};
    }
    if (x == right_end) {
      return {pieces[k + 1].first, pieces[k].first};
    }
  }
  return {pieces.back().first, pieces.back().first};
}

double ConcaveValuation::derivative_at_zero() const {
  if (kind_ == Kind::piecewise_linear) return affine_pieces().front().first;
  return derivative(0.0);
}

double ConcaveValuation::derivative_at_one() const {
  if (kind_ == Kind::piecewise_linear) return subgradient(1.0).upper;
  return derivative(1.0);
}

double ConcaveValuation::conjugate(double alpha, double price) const {
  if (alpha <= 0.0 || is_zero()) return 0.0;
  switch (kind_) {
    case Kind::linear:
      return alpha * c_ <= price ? 0.0 : kInf;
    case Kind::shifted_power: {
      if (a_ == 1.0) return alpha * c_ <= price ? 0.0 : kInf;
      if (price <= 0.0) return kInf;
      // alpha c a (x + s)^(a - 1) = price
      const double base = price / (alpha * c_ * a_);
      const double x = std::pow(base, 1.0 / (a_ - 1.0)) - s_;
      if (x <= 0.0) return 0.0;
      return alpha * value(x) - price * x;
    }
    case Kind::piecewise_linear: {
      const auto pieces = affine_pieces();
      if (alpha * pieces.back().first > price) return kInf;
      double best = 0.0;
      for (const auto& [x, y] : points_) {
        best = std::max(best, alpha * y - price * x);
      }
      return best;
    }
  }
  return 0.0;
}

bool ConcaveValuation::x_derivative_nondecreasing() const {
  // c a x (x+s)^(a-1) has derivative c a (x+s)^(a-2) (a x + s) >= 0.
  if (kind_ != Kind::piecewise_linear) return true;
  // At a kink x v'(x) jumps down; flat tails also break monotonicity.
  const auto pieces = affine_pieces();
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    if (points_[k].first >= 1.0) break;
    if (k > 0 && pieces[k].first < pieces[k - 1].first - 1e-12) return false;
  }
  return true;
}

ConcaveValuation ConcaveValuation::scaled(double k) const {
  require(std::isfinite(k) && k > 0.0, "valuation scale must be positive");
  ConcaveValuation v = *this;
  v.c_ *= k;
  for (auto& point : v.points_) point.second *= k;
  return v;
}

std::string ConcaveValuation::describe() const {
  std::ostringstream out;
  switch (kind_) {
    case Kind::linear:
      out << "linear(c=" << c_ << ")";
      break;
    case Kind::shifted_power:
      out << "shifted_power(c=" << c_ << ", s=" << s_ << ", a=" << a_ << ")";
      break;
    case Kind::piecewise_linear:
      out << "pwl(";
      for (std::size_t k = 0; k < points_.size(); ++k) {
        out << (k ? " " : "") << "(" << points_[k].first << ","
            << points_[k].second << ")";
      }
      out << ")";
      break;
  }
  return out.str();
}

}  // namespace pacing

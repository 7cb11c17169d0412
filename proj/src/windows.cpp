#include "shiftconv/windows.hpp"

#include <cmath>
#include <stdexcept>

namespace shiftconv {

double smoothstep(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double f = std::exp(-1.0 / t);
  const double g = std::exp(-1.0 / (1.0 - t));
  return f / (f + g);
}

SmoothWindow SmoothWindow::zero() { return {Kind::Zero, 0.0, 0.0, 0.0, 0.0}; }

SmoothWindow SmoothWindow::bump(double lo, double hi) {
  if (!(lo <= hi)) throw std::invalid_argument("bump window needs lo <= hi");
  if (lo == hi) return zero();
  return {Kind::Bump, lo, lo, hi, hi};
}

SmoothWindow SmoothWindow::plateau(double lo, double a, double b, double hi) {
  if (!(lo < a && a <= b && b < hi)) {
    throw std::invalid_argument("plateau window needs lo < a <= b < hi");
  }
  return {Kind::Plateau, lo, a, b, hi};
}

double SmoothWindow::operator()(double x) const {
  if (kind_ == Kind::Zero || !(x > lo_ && x < hi_)) return 0.0;
  if (kind_ == Kind::Bump) {
    const double t = (x - lo_) / (hi_ - lo_);
    return std::exp(4.0 - 1.0 / (t * (1.0 - t)));
  }
  if (x < a_) return smoothstep((x - lo_) / (a_ - lo_));
  if (x > b_) return smoothstep((hi_ - x) / (hi_ - b_));
  return 1.0;
}

nlohmann::json SmoothWindow::to_json() const {
  switch (kind_) {
    case Kind::Zero: return {{"kind", "zero"}};
    case Kind::Bump: return {{"kind", "bump"}, {"support", {lo_, hi_}}};
    case Kind::Plateau:
      return {{"kind", "plateau"}, {"support", {lo_, hi_}}, {"plateau", {a_, b_}}};
  }
  return {};
}

}  // namespace shiftconv

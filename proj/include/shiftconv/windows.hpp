#pragma once

#include <string>

#include <json.hpp>

namespace shiftconv {

/// C^infinity compactly supported weight.  A bump is exp(4 - 1/(t(1-t))) on the
/// rescaled support t in (0, 1), peaking at 1; a plateau rises by a smoothstep
/// on [lo, a], equals 1 on [a, b] and falls on [b, hi].
class SmoothWindow {
 public:
  enum class Kind { Zero, Bump, Plateau };

  static SmoothWindow zero();
  static SmoothWindow bump(double lo, double hi);
  static SmoothWindow plateau(double lo, double a, double b, double hi);

  /// V: bump on [1, 2].
  static SmoothWindow v_default() { return bump(1.0, 2.0); }
  /// W: rises on [1/2, 2/3], 1 on [2/3, 5/2], falls on [5/2, 3].
  static SmoothWindow w_default() { return plateau(0.5, 2.0 / 3.0, 2.5, 3.0); }

  double operator()(double x) const;

  Kind kind() const { return kind_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  bool empty() const { return kind_ == Kind::Zero; }

  nlohmann::json to_json() const;

 private:
  SmoothWindow(Kind kind, double lo, double a, double b, double hi)
      : kind_(kind), lo_(lo), a_(a), b_(b), hi_(hi) {}

  Kind kind_;
  double lo_, a_, b_, hi_;
};

/// Smoothstep 0 -> 1 on [0, 1], built from exp(-1/t).
double smoothstep(double t);

}  // namespace shiftconv

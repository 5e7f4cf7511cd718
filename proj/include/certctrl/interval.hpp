#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace certctrl {

// Closed interval [lo, hi], lo <= hi.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double x) const { return x >= lo && x <= hi; }
  // Largest magnitude over the interval.
  double max_abs() const { return std::max(std::fabs(lo), std::fabs(hi)); }
};

inline Interval make_interval(double lo, double hi) {
  if (!(lo <= hi)) throw std::invalid_argument("interval: lo > hi");
  return Interval{lo, hi};
}

inline Interval operator+(Interval a, Interval b) {
  return Interval{a.lo + b.lo, a.hi + b.hi};
}

inline Interval operator+(Interval a, double c) {
  return Interval{a.lo + c, a.hi + c};
}

inline Interval operator*(double k, Interval a) {
  return (k >= 0.0) ? Interval{k * a.lo, k * a.hi}
                    : Interval{k * a.hi, k * a.lo};
}

inline Interval hull(Interval a, Interval b) {
  return Interval{std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

}  // namespace certctrl

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>

namespace hema::interp {

/// Bracketing cell for x in a strictly increasing axis: index i with axis[i] <= x <= axis[i+1]
/// and the fractional position inside the cell. Empty when x lies outside the axis.
struct Cell {
  std::size_t lo = 0;
  double frac = 0.0;
};

inline std::optional<Cell> locate(std::span<const double> axis, double x) {
  if (axis.empty() || x < axis.front() || x > axis.back()) return std::nullopt;
  if (axis.size() == 1) return Cell{0, 0.0};
  auto it = std::upper_bound(axis.begin(), axis.end(), x);
  std::size_t hi = static_cast<std::size_t>(it - axis.begin());
  if (hi >= axis.size()) hi = axis.size() - 1;  // x == back()
  const std::size_t lo = hi - 1;
  return Cell{lo, (x - axis[lo]) / (axis[hi] - axis[lo])};
}

inline bool strictly_increasing(std::span<const double> axis) {
  return std::adjacent_find(axis.begin(), axis.end(), [](double a, double b) { return !(a < b); }) ==
         axis.end();
}

/// Exact at t = 0 and t = 1, so interpolating at a node returns the tabulated value.
inline double lerp(double a, double b, double t) { return std::lerp(a, b, t); }

}  // namespace hema::interp

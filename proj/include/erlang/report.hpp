#pragma once

#include <optional>
#include <string>
#include <vector>

namespace erlang {

// One checked inequality: observed <= bound. Rows with an unstated constant
// carry no verdict (satisfied is empty) and report the implied constant.
struct BoundCheck {
  std::string name;
  double observed = 0.0;
  double bound = 0.0;
  std::optional<bool> satisfied;
};

// Relative slack for floating-point rounding in the comparison.
inline bool within_bound(double observed, double bound) {
  return observed <= bound + 1e-12 * (bound > 1.0 ? bound : 1.0);
}

inline BoundCheck check(std::string name, double observed, double bound) {
  return {std::move(name), observed, bound, within_bound(observed, bound)};
}

inline bool all_satisfied(const std::vector<BoundCheck>& rows) {
  for (const auto& r : rows)
    if (r.satisfied && !*r.satisfied) return false;
  return true;
}

}  // namespace erlang

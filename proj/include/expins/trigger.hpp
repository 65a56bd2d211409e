#pragma once

#include <limits>
#include <span>
#include <vector>

namespace expins {

/// Interval on the real line with selectable closedness at each end.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_closed = false;
  bool hi_closed = false;

  bool contains(double x) const {
    const bool above = lo_closed ? x >= lo : x > lo;
    const bool below = hi_closed ? x <= hi : x < hi;
    return above && below;
  }
  bool empty() const { return lo > hi || (lo == hi && !(lo_closed && hi_closed)); }
};

/// True when the two intervals share at least one point.
bool overlaps(const Interval& a, const Interval& b);

/// Set of index values that trigger a payment: a union of boxes, each box one
/// interval per index component. A one-component area is a union of
/// intervals.
class TriggerArea {
 public:
  using Box = std::vector<Interval>;

  TriggerArea() = default;
  explicit TriggerArea(std::vector<Box> boxes);

  /// theta > threshold (one component).
  static TriggerArea above(double threshold);
  /// theta < threshold (one component).
  static TriggerArea below(double threshold);
  static TriggerArea interval(Interval iv);
  /// Union over components j of {theta_j > thresholds[j]}.
  static TriggerArea any_component_above(std::span<const double> thresholds);

  bool contains(std::span<const double> theta) const;
  bool contains(double theta) const { return contains(std::span<const double>(&theta, 1)); }

  std::size_t dimension() const { return dim_; }
  const std::vector<Box>& boxes() const { return boxes_; }

 private:
  std::vector<Box> boxes_;
  std::size_t dim_ = 0;
};

}  // namespace expins

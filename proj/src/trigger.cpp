#include "expins/trigger.hpp"

#include <algorithm>

#include "expins/errors.hpp"

namespace expins {

bool overlaps(const Interval& a, const Interval& b) {
  if (a.empty() || b.empty()) return false;
  // Take the larger lower end and the smaller upper end, keeping closedness.
  double lo = a.lo;
  bool lo_closed = a.lo_closed;
  if (b.lo > lo || (b.lo == lo && !b.lo_closed)) {
    lo = b.lo;
    lo_closed = b.lo_closed && (b.lo != a.lo || a.lo_closed);
  }
  double hi = a.hi;
  bool hi_closed = a.hi_closed;
  if (b.hi < hi || (b.hi == hi && !b.hi_closed)) {
    hi = b.hi;
    hi_closed = b.hi_closed && (b.hi != a.hi || a.hi_closed);
  }
  return !Interval{lo, hi, lo_closed, hi_closed}.empty();
}

TriggerArea::TriggerArea(std::vector<Box> boxes) : boxes_(std::move(boxes)) {
  if (boxes_.empty()) throw ValidationError("trigger area needs at least one box");
  dim_ = boxes_.front().size();
  if (dim_ == 0) throw ValidationError("trigger box needs at least one component");
  for (const auto& b : boxes_)
    if (b.size() != dim_) throw ValidationError("trigger boxes must share the index dimension");
}

TriggerArea TriggerArea::above(double threshold) {
  return TriggerArea({Box{Interval{threshold, std::numeric_limits<double>::infinity(), false, false}}});
}

TriggerArea TriggerArea::below(double threshold) {
  return TriggerArea({Box{Interval{-std::numeric_limits<double>::infinity(), threshold, false, false}}});
}

TriggerArea TriggerArea::interval(Interval iv) { return TriggerArea({Box{iv}}); }

TriggerArea TriggerArea::any_component_above(std::span<const double> thresholds) {
  if (thresholds.empty()) throw ValidationError("trigger needs at least one component threshold");
  std::vector<Box> boxes;
  for (std::size_t j = 0; j < thresholds.size(); ++j) {
    Box b(thresholds.size());
    b[j] = Interval{thresholds[j], std::numeric_limits<double>::infinity(), false, false};
    boxes.push_back(std::move(b));
  }
  return TriggerArea(std::move(boxes));
}

bool TriggerArea::contains(std::span<const double> theta) const {
  if (theta.size() != dim_) throw ValidationError("index dimension does not match the trigger area");
  return std::any_of(boxes_.begin(), boxes_.end(), [&](const Box& b) {
    for (std::size_t j = 0; j < dim_; ++j)
      if (!b[j].contains(theta[j])) return false;
    return true;
  });
}

}  // namespace expins

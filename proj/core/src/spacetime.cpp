#include "wfsim/spacetime.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace wfsim {

FrameVelocity::FrameVelocity(double beta) : beta_(beta) {
  if (!std::isfinite(beta) || std::abs(beta) >= 1.0)
    throw std::invalid_argument("frame velocity must satisfy |beta| < 1");
}

double FrameVelocity::gamma() const { return 1.0 / std::sqrt(1.0 - beta_ * beta_); }

SpacetimeEvent boost(const SpacetimeEvent& e, FrameVelocity v) {
  if (!std::isfinite(e.t) || !std::isfinite(e.x))
    throw std::invalid_argument("event coordinates must be finite");
  double g = v.gamma();
  return {e.id, g * (e.t - v.beta() * e.x), g * (e.x - v.beta() * e.t)};
}

double interval_squared(const SpacetimeEvent& a, const SpacetimeEvent& b) {
  double dt = b.t - a.t;
  double dx = b.x - a.x;
  return dt * dt - dx * dx;
}

IntervalKind classify_interval(const SpacetimeEvent& a, const SpacetimeEvent& b) {
  double s2 = interval_squared(a, b);
  if (s2 > kIntervalTol) return IntervalKind::Timelike;
  if (s2 < -kIntervalTol) return IntervalKind::Spacelike;
  return IntervalKind::Lightlike;
}

EventOrder order_events_detailed(const std::vector<SpacetimeEvent>& events, FrameVelocity v) {
  std::set<std::string> ids;
  for (const auto& e : events)
    if (!ids.insert(e.id).second)
      throw std::invalid_argument("duplicate event id: " + e.id);

  struct Entry {
    std::string id;
    double tprime;
  };
  std::vector<Entry> entries;
  entries.reserve(events.size());
  for (const auto& e : events) entries.push_back({e.id, boost(e, v).t});

  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.tprime != b.tprime) return a.tprime < b.tprime;
    return a.id < b.id;
  });

  // Chain events whose boosted times agree within tolerance into groups and
  // order each group lexicographically by id.
  EventOrder order;
  size_t i = 0;
  while (i < entries.size()) {
    size_t j = i + 1;
    while (j < entries.size() && entries[j].tprime - entries[j - 1].tprime <= kSimultaneityTol) ++j;
    std::vector<std::string> group;
    for (size_t k = i; k < j; ++k) group.push_back(entries[k].id);
    std::sort(group.begin(), group.end());
    if (group.size() > 1) {
      std::string note = "simultaneous within tolerance:";
      for (const auto& id : group) note += " " + id;
      order.tie_notes.push_back(note);
    }
    for (auto& id : group) order.ids.push_back(std::move(id));
    i = j;
  }
  return order;
}

std::vector<std::string> order_events(const std::vector<SpacetimeEvent>& events, FrameVelocity v) {
  return order_events_detailed(events, v).ids;
}

FrameVelocity reversing_boost(const SpacetimeEvent& a, const SpacetimeEvent& b) {
  if (classify_interval(a, b) != IntervalKind::Spacelike)
    throw std::invalid_argument("events are not spacelike separated");
  double dt = b.t - a.t;
  double dx = b.x - a.x;
  double sign_dx = dx >= 0.0 ? 1.0 : -1.0;
  double sign_dt = dt >= 0.0 ? 1.0 : -1.0;  // dt == 0 is already a tie; either sign reverses
  FrameVelocity v(sign_dt * sign_dx * (std::abs(dt / dx) + 1.0) / 2.0);

  double before = dt;
  double after = boost(b, v).t - boost(a, v).t;
  if (before != 0.0 && !(before > 0.0 ? after < 0.0 : after > 0.0))
    throw std::runtime_error("reversing boost failed to reverse the order");
  return v;
}

}  // namespace wfsim

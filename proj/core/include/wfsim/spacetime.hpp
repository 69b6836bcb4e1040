#pragma once

#include <string>
#include <vector>

namespace wfsim {

// 1+1 dimensional Minkowski kinematics with c = 1.

inline constexpr double kSimultaneityTol = 1e-12;  // |dt'| below this is a tie
inline constexpr double kIntervalTol = 1e-12;      // |s^2| below this is lightlike

struct SpacetimeEvent {
  std::string id;
  double t = 0.0;
  double x = 0.0;

  bool operator==(const SpacetimeEvent&) const = default;
};

/// Velocity of a boosted frame relative to the rest frame, |beta| < 1.
class FrameVelocity {
 public:
  explicit FrameVelocity(double beta);
  double beta() const { return beta_; }
  double gamma() const;

 private:
  double beta_;
};

enum class IntervalKind { Spacelike, Lightlike, Timelike };

SpacetimeEvent boost(const SpacetimeEvent& e, FrameVelocity v);

/// Invariant interval s^2 = dt^2 - dx^2.
double interval_squared(const SpacetimeEvent& a, const SpacetimeEvent& b);
IntervalKind classify_interval(const SpacetimeEvent& a, const SpacetimeEvent& b);

struct EventOrder {
  std::vector<std::string> ids;
  // One note per group of events simultaneous within kSimultaneityTol,
  // which are ordered lexicographically by id.
  std::vector<std::string> tie_notes;
};

/// Total deterministic order by boosted time coordinate.
EventOrder order_events_detailed(const std::vector<SpacetimeEvent>& events, FrameVelocity v);
std::vector<std::string> order_events(const std::vector<SpacetimeEvent>& events, FrameVelocity v);

/// A velocity whose frame reverses the rest-frame time order of two
/// spacelike-separated events: beta = s * sign(dx) * (|dt/dx| + 1) / 2,
/// with s chosen so the reversal actually happens (midpoint between the
/// critical slope and the speed of light).
FrameVelocity reversing_boost(const SpacetimeEvent& a, const SpacetimeEvent& b);

}  // namespace wfsim

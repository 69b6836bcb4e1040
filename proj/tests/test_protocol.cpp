#include <doctest.h>

#include <cmath>

#include "wfsim/protocol.hpp"

using namespace wfsim;

namespace {

const ScenarioEvent& event_of(const Scenario& s, const std::string& id) {
  const ScenarioEvent* ev = s.find_event(id);
  REQUIRE(ev != nullptr);
  return *ev;
}

}  // namespace

TEST_SUITE("builders") {

TEST_CASE("paper scenario layout") {
  Scenario s = build_paper_scenario(2);
  CHECK(s.id == "paper");
  REQUIRE(s.register_spec.size() == 6);
  CHECK(s.register_spec[0].name == "F_spin");
  CHECK(s.register_spec[1].name == "A_spin");
  CHECK(s.register_spec[2].name == "m");
  CHECK(s.register_spec[2].dimension == 3);
  CHECK(s.register_spec[3].name == "eps");
  CHECK(s.register_spec[4].name == "W1");
  CHECK(s.register_spec[5].name == "W2");

  CHECK(event_of(s, "prep").where.t == 0.0);
  CHECK(event_of(s, "F_meas").where.t == 1.0);
  CHECK(event_of(s, "reset").where.t == 1.2);
  CHECK(event_of(s, "emit").where.t == 2.0);
  CHECK(event_of(s, "A_meas").where.t == 2.5);
  CHECK(event_of(s, "A_meas").where.x == 10.0);
  CHECK(event_of(s, "W_z").where.t == 3.0);
  CHECK(event_of(s, "W_x").where.t == 3.1);

  REQUIRE(s.spacelike_pairs.size() == 1);
  CHECK(s.spacelike_pairs[0].first == "emit");
  CHECK(s.spacelike_pairs[0].second == "A_meas");

  CHECK(std::holds_alternative<PrepareEntangled>(event_of(s, "prep").op));
  const auto& prep = std::get<PrepareEntangled>(event_of(s, "prep").op);
  CHECK(std::abs(prep.amplitudes[0] - std::sqrt(0.5)) < 1e-15);
  CHECK(std::abs(prep.amplitudes[3] - std::sqrt(0.5)) < 1e-15);
  CHECK(std::abs(prep.amplitudes[1]) < 1e-15);

  // The agent measures in the x basis in the published setup.
  const auto& a_meas = std::get<ProjectiveMeasure>(event_of(s, "A_meas").op);
  const auto* basis = std::get_if<QubitBasis>(&a_meas.basis);
  REQUIRE(basis != nullptr);
  CHECK(basis->angle == doctest::Approx(std::acos(-1.0) / 2).epsilon(1e-15));

  CHECK(validate(s).empty());
  CHECK(s.find_event("nope") == nullptr);
  CHECK(s.event_locations().size() == s.events.size());
}

TEST_CASE("extra emitted qubits get their own x measurements") {
  Scenario s = build_paper_scenario(4);
  CHECK(s.register_spec.size() == 8);
  CHECK(event_of(s, "W_x2").where.t == doctest::Approx(3.2));
  CHECK(event_of(s, "W_x3").where.t == doctest::Approx(3.3));
  const auto& wx3 = std::get<ProjectiveMeasure>(event_of(s, "W_x3").op);
  REQUIRE(wx3.targets.size() == 1);
  CHECK(wx3.targets[0] == "W4");
  CHECK(validate(s).empty());

  CHECK_THROWS_AS(build_paper_scenario(1), std::invalid_argument);
  CHECK_THROWS_AS(build_paper_scenario(13), std::invalid_argument);
}

TEST_CASE("basic lab scenario") {
  Scenario s = build_basic_wfs(cxd(0.6, 0.0), cxd(0.8, 0.0));
  CHECK(s.id == "basic_wfs");
  REQUIRE(s.register_spec.size() == 3);
  CHECK(s.initial_amplitudes.count("F_spin") == 1);
  const auto& w = std::get<ProjectiveMeasure>(event_of(s, "W_lab").op);
  CHECK(w.actor == "W");
  CHECK(w.remainder == RemainderPolicy::Collect);
  const auto* vecs = std::get_if<std::vector<LabeledVector>>(&w.basis);
  REQUIRE(vecs != nullptr);
  REQUIRE(vecs->size() == 2);
  CHECK((*vecs)[0].label == "+");
  // (|L+> + |L->)/sqrt(2) puts 1/2 weight on flat indices 4 and 17 of the
  // 18-level lab: |+, m+, eps+> and |-, m-, eps->.
  CHECK(std::abs((*vecs)[0].vec[4] - std::sqrt(0.5)) < 1e-15);
  CHECK(std::abs((*vecs)[0].vec[17] - std::sqrt(0.5)) < 1e-15);
  CHECK(std::abs((*vecs)[1].vec[17] + std::sqrt(0.5)) < 1e-15);
  CHECK(validate(s).empty());

  CHECK_THROWS_AS(build_basic_wfs(cxd(1.0, 0.0), cxd(1.0, 0.0)),
                  std::invalid_argument);
}

TEST_CASE("bipartite order flag swaps the measurement times") {
  Scenario a_first = build_bipartite(cxd(0.5, 0.0), cxd(0.5, 0.0),
                                     cxd(std::sqrt(0.5), 0.0), QubitBasis::z(),
                                     QubitBasis::x(), MeasurementOrder::AFirst);
  Scenario b_first = build_bipartite(cxd(0.5, 0.0), cxd(0.5, 0.0),
                                     cxd(std::sqrt(0.5), 0.0), QubitBasis::z(),
                                     QubitBasis::x(), MeasurementOrder::BFirst);
  CHECK(event_of(a_first, "A_meas").where.t < event_of(a_first, "B_meas").where.t);
  CHECK(event_of(b_first, "B_meas").where.t < event_of(b_first, "A_meas").where.t);
  CHECK(classify_interval(event_of(a_first, "A_meas").where,
                          event_of(a_first, "B_meas").where) ==
        IntervalKind::Spacelike);
  CHECK(validate(a_first).empty());
  CHECK(validate(b_first).empty());

  CHECK_THROWS_AS(build_bipartite(cxd(1.0, 0.0), cxd(1.0, 0.0), cxd(1.0, 0.0),
                                  QubitBasis::z(), QubitBasis::x(),
                                  MeasurementOrder::AFirst),
                  std::invalid_argument);
}

TEST_CASE("signaling scenario moves the agent before the emission") {
  Scenario s = build_signaling(0.7, 2);
  CHECK(s.id == "signaling");
  CHECK(event_of(s, "A_meas").where.t == 1.5);
  CHECK(event_of(s, "A_meas").where.t < event_of(s, "emit").where.t);
  const auto& emit = std::get<EmitQubits>(event_of(s, "emit").op);
  REQUIRE(emit.semantics_override.has_value());
  CHECK(*emit.semantics_override == EmissionSemantics::RecordAdaptive);
  const auto& a_meas = std::get<ProjectiveMeasure>(event_of(s, "A_meas").op);
  CHECK(std::get<QubitBasis>(a_meas.basis).angle == doctest::Approx(0.7));
  CHECK(validate(s).empty());

  CHECK_THROWS_AS(build_signaling(-0.1, 2), std::invalid_argument);
  CHECK_THROWS_AS(build_signaling(std::acos(-1.0), 2), std::invalid_argument);
}

}  // TEST_SUITE

TEST_SUITE("validation") {

TEST_CASE("clean scenarios validate silently") {
  for (int n : {2, 3, 5}) CHECK(validate(build_paper_scenario(n)).empty());
}

TEST_CASE("unknown subsystem references are reported") {
  Scenario s = build_paper_scenario(2);
  std::get<FriendMeasure>(s.events[1].op).environment = "ghost";
  auto v = validate(s);
  REQUIRE_FALSE(v.empty());
  bool mentioned = false;
  for (const auto& msg : v) mentioned = mentioned || msg.find("ghost") != std::string::npos;
  CHECK(mentioned);
}

TEST_CASE("non-normalized preparation is rejected") {
  Scenario s = build_paper_scenario(2);
  std::get<PrepareEntangled>(s.events[0].op).amplitudes *= 2.0;
  CHECK_FALSE(validate(s).empty());
}

TEST_CASE("lab operations must sit on the lab worldline") {
  Scenario s = build_paper_scenario(2);
  for (auto& ev : s.events)
    if (ev.where.id == "reset") ev.where.x = 4.0;
  auto v = validate(s);
  REQUIRE_FALSE(v.empty());
  bool mentioned = false;
  for (const auto& msg : v)
    mentioned = mentioned || msg.find("worldline") != std::string::npos;
  CHECK(mentioned);
}

TEST_CASE("declared spacelike pairs are checked against the metric") {
  Scenario s = build_paper_scenario(2);
  for (auto& ev : s.events)
    if (ev.where.id == "A_meas") ev.where.x = 0.5;  // now timelike from emit
  auto v = validate(s);
  bool mentioned = false;
  for (const auto& msg : v)
    mentioned = mentioned || msg.find("spacelike") != std::string::npos;
  CHECK(mentioned);
}

TEST_CASE("emitted qubits are only measurable in the emission's future") {
  Scenario s = build_paper_scenario(2);
  for (auto& ev : s.events)
    if (ev.where.id == "W_z") ev.where.x = 50.0;  // spacelike from emit
  auto v = validate(s);
  bool mentioned = false;
  for (const auto& msg : v)
    mentioned = mentioned || msg.find("timelike future") != std::string::npos;
  CHECK(mentioned);
}

TEST_CASE("duplicate event ids and small lab factors are rejected") {
  Scenario s = build_paper_scenario(2);
  s.events[3].where.id = "F_meas";
  CHECK_FALSE(validate(s).empty());

  Scenario t = build_paper_scenario(2);
  t.register_spec[3] = {"eps", 2, {"idle", "plus"}};
  auto v = validate(t);
  bool mentioned = false;
  for (const auto& msg : v)
    mentioned = mentioned || msg.find("at least 3 levels") != std::string::npos;
  CHECK(mentioned);
}

TEST_CASE("validation_error carries the violation list") {
  Scenario s = build_paper_scenario(2);
  s.events[3].where.id = "F_meas";
  try {
    throw validation_error(validate(s));
  } catch (const validation_error& e) {
    CHECK_FALSE(e.violations.empty());
    CHECK(std::string(e.what()).find("F_meas") != std::string::npos);
  }
}

}  // TEST_SUITE

#include <doctest.h>

#include <cmath>

#include "wfsim/analysis.hpp"

using namespace wfsim;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

}  // namespace

TEST_SUITE("distributions") {

TEST_CASE("joint tables aggregate branch weights") {
  Scenario s = build_paper_scenario(2);
  RunReport r = run(s, FrameVelocity(0.0), UpdatePolicy::UnitaryLab,
                    EmissionSemantics::RecordAdaptive);
  VariableList vars = {{"A_meas", "A"}, {"W_z", "W"}, {"W_x", "W"}};
  JointDistribution joint = joint_distribution(r, vars);
  REQUIRE(joint.size() == 8);
  double total = 0.0;
  for (const auto& [key, p] : joint) {
    CHECK(p == doctest::Approx(0.125).epsilon(1e-12));
    total += p;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(joint_distribution(r, {{"missing", "A"}}), std::invalid_argument);
  CHECK_THROWS_AS(joint_distribution(r, {}), std::invalid_argument);
}

TEST_CASE("total variation distance on hand-built tables") {
  JointDistribution uniform8, four;
  for (const std::string& a : {"+", "-"})
    for (const std::string& b : {"+", "-"})
      for (const std::string& c : {"+", "-"}) uniform8[{a, b, c}] = 0.125;
  four[{"+", "+", "+"}] = four[{"+", "-", "+"}] = 0.25;
  four[{"-", "+", "-"}] = four[{"-", "-", "-"}] = 0.25;

  CHECK(total_variation_distance(uniform8, uniform8) == doctest::Approx(0.0));
  CHECK(total_variation_distance(uniform8, four) == doctest::Approx(0.5));
  CHECK(total_variation_distance(four, uniform8) == doctest::Approx(0.5));

  JointDistribution disjoint;
  disjoint[{"x", "x", "x"}] = 1.0;
  CHECK(total_variation_distance(uniform8, disjoint) == doctest::Approx(1.0));
}

TEST_CASE("marginals sum partner variables away") {
  JointDistribution joint;
  joint[{"+", "+"}] = 0.5;
  joint[{"+", "-"}] = 0.25;
  joint[{"-", "-"}] = 0.25;
  auto m0 = marginal(joint, 0);
  CHECK(m0.at("+") == doctest::Approx(0.75));
  CHECK(m0.at("-") == doctest::Approx(0.25));
  auto m1 = marginal(joint, 1);
  CHECK(m1.at("+") == doctest::Approx(0.5));
  CHECK(m1.at("-") == doctest::Approx(0.5));
  CHECK_THROWS_AS(marginal(joint, 2), std::invalid_argument);
}

TEST_CASE("default variables follow the policy") {
  Scenario s = build_paper_scenario(3);
  VariableList unitary = default_variables(s, UpdatePolicy::UnitaryLab);
  REQUIRE(unitary.size() == 4);
  CHECK(unitary[0] == Variable{"A_meas", "A"});
  CHECK(unitary[1] == Variable{"W_z", "W"});
  CHECK(unitary[2] == Variable{"W_x", "W"});
  CHECK(unitary[3] == Variable{"W_x2", "W"});

  VariableList projective = default_variables(s, UpdatePolicy::ProjectiveAll);
  REQUIRE(projective.size() == 5);
  CHECK(projective[0] == Variable{"F_meas", "F"});
}

}  // TEST_SUITE

TEST_SUITE("agreement") {

TEST_CASE("record and first qubit agree at rest; x readouts decouple") {
  Scenario s = build_paper_scenario(3);
  RunReport r = run(s, FrameVelocity(0.0), UpdatePolicy::UnitaryLab,
                    EmissionSemantics::RecordAdaptive);
  CHECK(agreement_probability(r, {"W_z", "W"}, {"F_record", "F"}) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(agreement_probability(r, {"W_x", "W"}, {"A_meas", "A"}) ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK(x_agreement(r) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("in the boosted frame every x readout tracks the agent") {
  Scenario s = build_paper_scenario(3);
  RunReport r = run(s, FrameVelocity(0.2), UpdatePolicy::UnitaryLab,
                    EmissionSemantics::RecordAdaptive);
  CHECK(agreement_probability(r, {"W_x", "W"}, {"A_meas", "A"}) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(agreement_probability(r, {"W_x", "W"}, {"W_x2", "W"}) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(x_agreement(r) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("x_agreement needs two x readouts") {
  Scenario s = build_paper_scenario(2);
  RunReport r = run(s, FrameVelocity(0.0), UpdatePolicy::UnitaryLab,
                    EmissionSemantics::RecordAdaptive);
  CHECK_THROWS_AS(x_agreement(r), std::invalid_argument);
}

}  // TEST_SUITE

TEST_SUITE("frame_comparison") {

TEST_CASE("adaptive emission makes the frames disagree, marginals agree") {
  Scenario s = build_paper_scenario(3);
  VariableList vars = {{"A_meas", "A"}, {"W_z", "W"}, {"W_x", "W"}, {"W_x2", "W"}};
  FrameComparison fc = compare_frames(s, 0.0, 0.2, UpdatePolicy::UnitaryLab,
                                      EmissionSemantics::RecordAdaptive, vars);
  CHECK(fc.tvd == doctest::Approx(0.75).epsilon(1e-12));
  CHECK_FALSE(fc.consistent);
  REQUIRE(fc.marginals1.size() == 4);
  // No single variable betrays the difference.
  for (size_t i = 0; i < 4; ++i) {
    CHECK(fc.marginals1[i].at("+") == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(fc.marginals2[i].at("+") == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("collapse-everywhere stays frame independent") {
  Scenario s = build_paper_scenario(3);
  VariableList vars = {{"A_meas", "A"}, {"W_z", "W"}, {"W_x", "W"}, {"W_x2", "W"}};
  FrameComparison fc = compare_frames(s, 0.0, 0.2, UpdatePolicy::ProjectiveAll,
                                      EmissionSemantics::RecordAdaptive, vars);
  CHECK(fc.tvd <= 1e-10);
  CHECK(fc.consistent);
}

TEST_CASE("bipartite joints are order and frame invariant") {
  cxd third(std::sqrt(1.0 / 3.0), 0.0);
  Scenario a_first = build_bipartite(third, third, third, QubitBasis::z(),
                                     QubitBasis::x(), MeasurementOrder::AFirst);
  Scenario b_first = build_bipartite(third, third, third, QubitBasis::z(),
                                     QubitBasis::x(), MeasurementOrder::BFirst);
  VariableList vars = {{"A_meas", "A"}, {"B_meas", "B"}};

  RunReport ra = run(a_first, FrameVelocity(0.0), UpdatePolicy::ProjectiveAll,
                     EmissionSemantics::FixedUnitary);
  RunReport rb = run(b_first, FrameVelocity(0.0), UpdatePolicy::ProjectiveAll,
                     EmissionSemantics::FixedUnitary);
  CHECK(total_variation_distance(joint_distribution(ra, vars),
                                 joint_distribution(rb, vars)) <= 1e-12);

  FrameComparison fc = compare_frames(a_first, 0.5, -0.5, UpdatePolicy::ProjectiveAll,
                                      EmissionSemantics::FixedUnitary, vars);
  CHECK(fc.consistent);
  CHECK(fc.tvd <= 1e-10);
}

}  // TEST_SUITE

TEST_SUITE("theta_recovery") {

TEST_CASE("the pre-emission record carries the remote angle exactly") {
  for (double theta : {0.0, 0.3, kPi / 3, 2.8}) {
    Scenario s = build_signaling(theta, 2);
    ThetaRecovery rec = recover_theta(s, FrameVelocity(0.0));
    REQUIRE(rec.branches.size() == 2);
    for (const auto& b : rec.branches) {
      CHECK(std::abs(b.theta_hat - theta) <= 1e-9);
      CHECK(b.weight == doctest::Approx(0.5).epsilon(1e-12));
      CHECK((b.sign == 1) == (b.remote_outcome == "+"));
    }
    CHECK(rec.max_lab_overlap <= 1e-12);
  }
}

TEST_CASE("without a preceding remote measurement there is nothing to read") {
  Scenario s = build_paper_scenario(2);  // agent fires after emission at rest
  CHECK_THROWS_WITH_AS(recover_theta(s, FrameVelocity(0.0)),
                       doctest::Contains("no remote measurement precedes"),
                       std::runtime_error);
  // The same scenario in the boosted frame has the agent first.
  ThetaRecovery rec = recover_theta(s, FrameVelocity(0.2));
  REQUIRE(rec.branches.size() == 2);
  CHECK(rec.branches[0].theta_hat == doctest::Approx(kPi / 2).epsilon(1e-9));
}

}  // TEST_SUITE

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "onum/core.hpp"
#include "test_support.hpp"

using namespace onum;
using onum::testing::integrate;
using onum::testing::uniform;

namespace {

constexpr double e = std::numbers::e;

}  // namespace

TEST(Network, DefaultsToUnitCapacities) {
  const Network net(4);
  EXPECT_EQ(net.link_count(), 4u);
  for (double c : net.capacities()) EXPECT_EQ(c, 1.0);
  EXPECT_TRUE(net.unit_capacities());
}

TEST(Network, RejectsEmptyAndNonPositive) {
  EXPECT_THROW(Network(0), std::invalid_argument);
  EXPECT_THROW(Network(std::vector<double>{1.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(Network(std::vector<double>{}), std::invalid_argument);
}

TEST(UtilityFunction, LogAndLinearShapes) {
  const auto g = UtilityFunction::log(2.0, 3.0);
  EXPECT_DOUBLE_EQ(g.value(0.0), 0.0);
  EXPECT_DOUBLE_EQ(g.value(1.0), 6.0 * std::log(2.0));
  EXPECT_DOUBLE_EQ(g.marginal(1.0), 3.0);
  const auto h = UtilityFunction::linear(1.5);
  EXPECT_DOUBLE_EQ(h.value(0.0), 0.0);
  EXPECT_DOUBLE_EQ(h.value(2.0), 3.0);
  EXPECT_DOUBLE_EQ(h.marginal(0.7), 1.5);
}

TEST(UtilityFunction, LogIsConcaveWithDecreasingMarginal) {
  Rng rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto g = UtilityFunction::log(uniform(rng, 0.1, 10.0), uniform(rng, 1.0, 5.0));
    const double h = 1e-4;
    const double y = uniform(rng, 2.0 * h, 1.0);
    const double fd_first = (g.value(y + h) - g.value(y - h)) / (2.0 * h);
    EXPECT_NEAR(fd_first, g.marginal(y), 1e-6 * g.marginal(0.0));
    EXPECT_LT(g.value(y + h) - 2.0 * g.value(y) + g.value(y - h), 0.0);
    EXPECT_GT(g.marginal(y), g.marginal(y + 0.01));
  }
}

TEST(Instance, ValidatesArrivals) {
  const Network net(3);
  EXPECT_THROW(Instance(net, {{UtilityFunction::linear(1.0), {}, 0.5}}), std::invalid_argument);
  EXPECT_THROW(Instance(net, {{UtilityFunction::linear(1.0), {3}, 0.5}}), std::invalid_argument);
  EXPECT_THROW(Instance(net, {{UtilityFunction::linear(1.0), {0}, -0.1}}), std::invalid_argument);
  EXPECT_THROW(Instance(net, {{UtilityFunction::linear(1.0), {1, 1}, 0.1}}),
               std::invalid_argument);
  EXPECT_NO_THROW(Instance(net, {{UtilityFunction::linear(1.0), {2, 0}, 0.0}}));
}

TEST(ValueFunction, CanonicalExamples) {
  const auto vf = make_value_function(1.0, e);
  EXPECT_DOUBLE_EQ(vf.alpha(), 2.0);
  EXPECT_DOUBLE_EQ(vf.beta(), 0.5);
  EXPECT_NEAR(phi_eval(vf, 1.0), e, 1e-15);

  const auto flat = make_value_function(5.0, 5.0);
  EXPECT_DOUBLE_EQ(flat.alpha(), 1.0);
  EXPECT_DOUBLE_EQ(flat.beta(), 1.0);
  for (double y : {0.0, 0.3, 0.99, 1.0}) EXPECT_DOUBLE_EQ(flat(y), 5.0);

  const auto steep = make_value_function(1.0, std::exp(3.0));
  EXPECT_DOUBLE_EQ(steep.alpha(), 4.0);
  EXPECT_DOUBLE_EQ(steep.beta(), 0.25);
  EXPECT_NEAR(steep(0.625), std::exp(1.5), 1e-14);
}

TEST(ValueFunction, RejectsBadBounds) {
  EXPECT_THROW(make_value_function(0.0, 1.0), std::domain_error);
  EXPECT_THROW(make_value_function(-1.0, 1.0), std::domain_error);
  EXPECT_THROW(make_value_function(2.0, 1.0), std::domain_error);
}

TEST(ValueFunction, EvaluationExamples) {
  const auto vf = make_value_function(1.0, e);
  EXPECT_DOUBLE_EQ(phi_eval(vf, 0.3), 1.0);
  EXPECT_NEAR(phi_eval(vf, 1.0), e, 1e-15);
  EXPECT_NEAR(phi_eval(vf, 0.75), std::exp(0.5), 1e-15);
  EXPECT_THROW(phi_eval(vf, 1.1), std::domain_error);
  EXPECT_THROW(phi_eval(vf, -0.1), std::domain_error);
}

TEST(ValueFunction, IntegralExamples) {
  const auto vf = make_value_function(1.0, e);
  EXPECT_NEAR(phi_integral(vf, 0.0, 0.5), 0.5, 1e-15);
  EXPECT_NEAR(phi_integral(vf, 0.0, 1.0), 0.5 + (e - 1.0) / 2.0, 1e-15);
  // Independent check on the exponential segment by adaptive quadrature.
  const double quadrature = integrate([&](double s) { return vf(s); }, 0.5, 0.75);
  EXPECT_NEAR(quadrature, (std::exp(0.5) - 1.0) / 2.0, 1e-12);
  EXPECT_NEAR(phi_integral(vf, 0.5, 0.75), quadrature, 1e-12);
  EXPECT_THROW(phi_integral(vf, 0.6, 0.5), std::domain_error);
  EXPECT_THROW(phi_integral(vf, 0.0, 1.5), std::domain_error);
}

TEST(ValueFunction, IntegralMatchesQuadratureOnRandomCurves) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const double m = uniform(rng, 0.1, 5.0);
    const auto vf = make_value_function(m, m * uniform(rng, 1.0, 200.0));
    double y0 = uniform01(rng);
    double y1 = uniform01(rng);
    if (y0 > y1) std::swap(y0, y1);
    // Split at the kink so the quadrature sees smooth pieces.
    auto f = [&](double s) { return vf(s); };
    double reference = 0.0;
    if (y1 <= vf.beta() || y0 >= vf.beta()) {
      reference = integrate(f, y0, y1);
    } else {
      reference = integrate(f, y0, vf.beta()) + integrate(f, vf.beta(), y1);
    }
    EXPECT_NEAR(phi_integral(vf, y0, y1), reference, 1e-10 * std::max(1.0, reference));
  }
}

TEST(ValueFunction, IntegralIsAdditive) {
  Rng rng(12);
  for (int trial = 0; trial < 2000; ++trial) {
    const double m = uniform(rng, 0.1, 5.0);
    const auto vf = make_value_function(m, m * uniform(rng, 1.0, 500.0));
    double p[3] = {uniform01(rng), uniform01(rng), uniform01(rng)};
    std::sort(p, p + 3);
    const double whole = vf.integral(p[0], p[2]);
    const double parts = vf.integral(p[0], p[1]) + vf.integral(p[1], p[2]);
    EXPECT_NEAR(whole, parts, 1e-12 * std::max(1.0, whole));
  }
}

TEST(ValueFunction, MonotoneAndContinuousOnRandomDraws) {
  Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const double m = uniform(rng, 0.1, 5.0);
    const auto vf = make_value_function(m, m * uniform(rng, 1.0, 100.0));
    double previous = vf(0.0);
    constexpr int points = 10000;
    for (int j = 1; j <= points; ++j) {
      const double value = vf(static_cast<double>(j) / points);
      ASSERT_GE(value, previous);
      previous = value;
    }
    const double left = vf(std::nextafter(vf.beta(), 0.0));
    EXPECT_NEAR(left, vf(vf.beta()), 1e-12 * m);
  }
}

TEST(ValidateConditions, CanonicalPasses) {
  const auto report = validate_conditions(make_value_function(1.0, e), 1000);
  EXPECT_TRUE(report.endpoints);
  EXPECT_TRUE(report.monotone);
  EXPECT_TRUE(report.differential);
  // phi' = alpha * phi exactly, so the slack sits at finite-difference error.
  EXPECT_NEAR(report.differential_slack, 0.0, 1e-6);
}

TEST(ValidateConditions, HalvedAlphaFailsDifferentialCheck) {
  const auto canonical = make_value_function(1.0, e);
  const auto forged = ValueFunction::custom(1.0, e, canonical.alpha() / 2.0, canonical.beta(),
                                            canonical.rate());
  const auto report = validate_conditions(forged, 1000);
  EXPECT_TRUE(report.endpoints);
  EXPECT_TRUE(report.monotone);
  EXPECT_FALSE(report.differential);
  EXPECT_FALSE(report.all());
}

TEST(ValidateConditions, DegenerateFlatCurvePasses) {
  const auto report = validate_conditions(make_value_function(5.0, 5.0), 1000);
  EXPECT_TRUE(report.all());
  EXPECT_NEAR(report.differential_slack, 5.0, 1e-9);  // alpha * phi - 0
}

TEST(ValidateConditions, WrongEndpointIsReported) {
  // Curve rate too small to reach M at y = 1.
  const auto vf = ValueFunction::custom(1.0, e, 2.0, 0.5, 1.0);
  const auto report = validate_conditions(vf, 100);
  EXPECT_FALSE(report.endpoints);
  EXPECT_THROW(validate_conditions(vf, 1), std::invalid_argument);
}

TEST(ValidateConditions, CanonicalAlwaysPasses) {
  Rng rng(14);
  for (int trial = 0; trial < 100; ++trial) {
    const double m = uniform(rng, 0.05, 20.0);
    const auto vf = make_value_function(m, m * std::exp(uniform(rng, 0.0, 6.0)));
    EXPECT_TRUE(validate_conditions(vf, 2000).all()) << "m=" << vf.lower() << " M=" << vf.upper();
  }
}

TEST(MarginalBounds, Examples) {
  const Network net(2);
  EXPECT_TRUE(check_marginal_bounds(
      Instance(net, {{UtilityFunction::log(2.0, 1.0), {0}, 0.5}}), 1.0, 3.0));
  EXPECT_FALSE(check_marginal_bounds(
      Instance(net, {{UtilityFunction::log(4.0, 1.0), {0}, 0.5}}), 1.0, 3.0));
  // Boundary: slope exactly m per link.
  const double m = 0.7;
  EXPECT_TRUE(check_marginal_bounds(
      Instance(net, {{UtilityFunction::linear(m * 2.0), {0, 1}, 1.0}}), m, 3.0));
  EXPECT_FALSE(check_marginal_bounds(
      Instance(net, {{UtilityFunction::linear(m * 1.9), {0, 1}, 1.0}}), m, 3.0));
  EXPECT_TRUE(check_marginal_bounds(Instance(net), 1.0, 3.0));
}

TEST(MarginalBounds, LogFamilyReducesToEndpointChecks) {
  Rng rng(15);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t k = 1 + onum::testing::uniform_index(rng, 3);
    std::vector<std::size_t> links(k);
    std::iota(links.begin(), links.end(), 0u);
    const double a = uniform(rng, 0.5, 4.0);
    const double b = uniform01(rng);
    const Instance inst(Network(3), {{UtilityFunction::log(a, static_cast<double>(k)), links, b}});
    const bool expected = a <= 3.0 && a / (1.0 + b) >= 1.0;
    EXPECT_EQ(check_marginal_bounds(inst, 1.0, 3.0), expected);
  }
}

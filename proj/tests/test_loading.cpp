#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "mamdi/loading.hpp"
#include "oracles.hpp"

using namespace mamdi;

TEST_CASE("distribution of the round gap sums to one") {
  const double ea = 0.23, eb = 0.61;
  double sum = 0.0;
  for (std::uint64_t k = 0; k < 2000; ++k) sum += loading_distribution(ea, eb, k);
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));

  // Printed form of the zero-gap mass.
  const double d = ea + eb - ea * eb;
  CHECK(loading_distribution(ea, eb, 0) == doctest::Approx(ea * eb / d).epsilon(1e-15));
  // One-sided geometric tails.
  const double p0 = ea * eb / d;
  CHECK(loading_distribution(ea, eb, 3) ==
        doctest::Approx((std::pow(1.0 - ea, 3) + std::pow(1.0 - eb, 3)) * p0).epsilon(1e-14));
}

TEST_CASE("expected maximum decomposes into the mean gap and the two means") {
  const double pairs[][2] = {{0.1, 0.9}, {0.5, 0.5}, {0.03, 0.4}, {1.0, 0.7}, {1.0, 1.0}};
  for (const auto& p : pairs) {
    const double ea = p[0], eb = p[1];
    const double lhs = expected_max(ea, eb);
    const double rhs = 0.5 * (expected_abs_diff(ea, eb) + 1.0 / ea + 1.0 / eb);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
  }
  // Both load on the first attempt.
  CHECK(expected_max(1.0, 1.0) == 1.0);
  CHECK(expected_abs_diff(1.0, 1.0) == 0.0);
}

TEST_CASE("symmetric closed forms") {
  const double etas[] = {0.001, 0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 1.0};
  for (double eta : etas) {
    CAPTURE(eta);
    const double nl = (3.0 - 2.0 * eta) / (eta * (2.0 - eta));
    CHECK(expected_max(eta, eta) == doctest::Approx(nl).epsilon(1e-12));
    const double period = 1e-9;
    const double tst = 2.0 * (1.0 - eta) * period / (eta * (2.0 - eta));
    CHECK(storage_time(eta, eta, period) == doctest::Approx(tst).epsilon(1e-12));
  }
}

TEST_CASE("decay expectation: exact endpoints and the overlap identity") {
  const double ea = 0.17, eb = 0.66;
  CHECK(decay_expectation(ea, eb, 0.0) == 1.0);  // exactly, not approximately
  // Large decay leaves only the zero-gap mass.
  CHECK(decay_expectation(ea, eb, 1e9) ==
        doctest::Approx(loading_distribution(ea, eb, 0)).epsilon(1e-12));
  // Splitting by which side loads first recovers the total.
  const double deltas[] = {0.0, 1e-6, 0.01, 0.3, 2.0};
  for (double delta : deltas) {
    CAPTURE(delta);
    const double p0 = loading_distribution(ea, eb, 0);
    const double split = p0 + order_and_overlap(ea, eb, delta).s_a_lt_b +
                         order_and_overlap(eb, ea, delta).s_a_lt_b;
    CHECK(decay_expectation(ea, eb, delta) == doctest::Approx(split).epsilon(1e-13));
  }
}

TEST_CASE("order statistics cover both orderings") {
  const double ea = 0.3, eb = 0.55;
  const double p_a_ge_b = order_and_overlap(ea, eb, 0.0).prob_a_ge_b;
  const double p_b_ge_a = order_and_overlap(eb, ea, 0.0).prob_a_ge_b;
  const double p_equal = loading_distribution(ea, eb, 0);
  CHECK(p_a_ge_b + p_b_ge_a - p_equal == doctest::Approx(1.0).epsilon(1e-14));
  // Printed form.
  CHECK(p_a_ge_b == doctest::Approx(eb / (ea + eb - ea * eb)).epsilon(1e-15));
  // At delta = 0 the partial overlap is just the ordering probability.
  CHECK(order_and_overlap(ea, eb, 0.0).s_a_lt_b ==
        doctest::Approx(1.0 - p_a_ge_b).epsilon(1e-14));
}

TEST_CASE("storage time scales linearly with the period") {
  const double ea = 0.2, eb = 0.8;
  const double base = storage_time(ea, eb, 1.0);
  CHECK(base == doctest::Approx(expected_abs_diff(ea, eb)).epsilon(1e-15));
  CHECK(storage_time(ea, eb, 2.5e-9) == doctest::Approx(base * 2.5e-9).epsilon(1e-15));
}

TEST_CASE("arguments outside (0, 1] are rejected") {
  CHECK_THROWS_AS(expected_max(0.0, 0.5), std::domain_error);
  CHECK_THROWS_AS(expected_max(0.5, 1.5), std::domain_error);
  CHECK_THROWS_AS(decay_expectation(-0.1, 0.5, 1.0), std::domain_error);
  CHECK_THROWS_AS(mc_loading_oracle(0.0, 0.5, 0.1, 100, 1), std::domain_error);
}

TEST_CASE("simulation oracle reproduces every closed form at one point") {
  const double ea = 0.35, eb = 0.12, delta = 0.2;
  const auto mc = mc_loading_oracle(ea, eb, delta, 300000, 424242);
  CHECK(mc.trials == 300000);

  // 4 sigma keeps a fixed-seed unit test safely away from the tail.
  auto within4 = [](double cf, const Estimate& est) {
    return std::fabs(cf - est.value) <= 4.0 * est.std_error + 1e-12;
  };
  CHECK_MESSAGE(within4(loading_distribution(ea, eb, 0), mc.p_equal),
                mc.p_equal.value << " +- " << mc.p_equal.std_error);
  CHECK_MESSAGE(within4(expected_max(ea, eb), mc.expected_max),
                mc.expected_max.value << " +- " << mc.expected_max.std_error);
  CHECK_MESSAGE(within4(expected_abs_diff(ea, eb), mc.expected_abs_diff),
                mc.expected_abs_diff.value << " +- " << mc.expected_abs_diff.std_error);
  CHECK_MESSAGE(within4(expected_abs_diff(ea, eb), mc.storage_time),
                "storage time in period units: " << mc.storage_time.value);
  CHECK_MESSAGE(within4(decay_expectation(ea, eb, delta), mc.decay_expectation),
                mc.decay_expectation.value << " +- " << mc.decay_expectation.std_error);
  CHECK_MESSAGE(within4(order_and_overlap(ea, eb, delta).prob_a_ge_b, mc.prob_a_ge_b),
                mc.prob_a_ge_b.value << " +- " << mc.prob_a_ge_b.std_error);
  CHECK_MESSAGE(within4(order_and_overlap(ea, eb, delta).s_a_lt_b, mc.s_a_lt_b),
                mc.s_a_lt_b.value << " +- " << mc.s_a_lt_b.std_error);
}

TEST_CASE("simulation oracle is deterministic and block-order independent") {
  const auto a = mc_loading_oracle(0.4, 0.7, 0.05, 70000, 99);
  const auto b = mc_loading_oracle(0.4, 0.7, 0.05, 70000, 99);
  CHECK(a.expected_max.value == b.expected_max.value);
  CHECK(a.expected_max.std_error == b.expected_max.std_error);
  CHECK(a.decay_expectation.value == b.decay_expectation.value);
  // A different seed must actually change the draw.
  const auto c = mc_loading_oracle(0.4, 0.7, 0.05, 70000, 100);
  CHECK(a.expected_max.value != c.expected_max.value);
}

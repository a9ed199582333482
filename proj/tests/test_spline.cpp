#include "doctest.h"

#include <Eigen/Dense>

#include "minsnap/pins.hpp"
#include "minsnap/rng.hpp"
#include "minsnap/spline.hpp"
#include "minsnap/time_allocation.hpp"
#include "oracles.hpp"

using minsnap::durations_to_times;
using minsnap::expand_pins;
using minsnap::Pin;
using minsnap::PinSet;
using minsnap::Spline;
using minsnap::TimeAllocation;
using minsnap::times_to_durations;

TEST_CASE("time allocation construction and validation") {
  Eigen::VectorXd knots(3);
  knots << 0.0, 1.0, 4.0;
  TimeAllocation t = TimeAllocation::from_knots(knots);
  CHECK(t.segment_count() == 2);
  CHECK(t.delta(0) == doctest::Approx(0.5));
  CHECK(t.delta(1) == doctest::Approx(1.5));
  CHECK(t.midpoint(1) == doctest::Approx(2.5));

  Eigen::VectorXd bad(3);
  bad << 0.0, 1.0, 1.0;
  CHECK_THROWS_AS(TimeAllocation::from_knots(bad), std::invalid_argument);

  Eigen::VectorXd negative(1);
  negative << -0.5;
  CHECK_THROWS_AS(TimeAllocation::from_durations(negative, 0.0), std::invalid_argument);
}

TEST_CASE("durations to times cumulative map") {
  Eigen::VectorXd d1(1);
  d1 << 1.0;
  TimeAllocation t1 = durations_to_times(d1, 0.0);
  CHECK(t1.knots()(0) == 0.0);
  CHECK(t1.knots()(1) == 2.0);

  Eigen::VectorXd d3(3);
  d3 << 0.5, 0.5, 1.0;
  TimeAllocation t3 = durations_to_times(d3, 0.0);
  Eigen::VectorXd expect(4);
  expect << 0.0, 1.0, 2.0, 4.0;
  CHECK((t3.knots() - expect).norm() == 0.0);

  minsnap::Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd d(5);
    for (int i = 0; i < 5; ++i) d(i) = rng.uniform(0.01, 3.0);
    const double tau0 = rng.uniform(-10.0, 10.0);
    const Eigen::VectorXd back = times_to_durations(durations_to_times(d, tau0));
    CHECK((back - d).norm() == 0.0);  // exact round trip
  }
}

TEST_CASE("segment lookup resolves knot ties to the earlier segment") {
  Eigen::VectorXd knots(4);
  knots << 0.0, 1.0, 2.0, 3.0;
  TimeAllocation t = TimeAllocation::from_knots(knots);
  CHECK(t.locate_segment(0.0) == 0);
  CHECK(t.locate_segment(0.5) == 0);
  CHECK(t.locate_segment(1.0) == 0);
  CHECK(t.locate_segment(1.5) == 1);
  CHECK(t.locate_segment(2.0) == 1);
  CHECK(t.locate_segment(3.0) == 2);
  CHECK_THROWS_AS(t.locate_segment(-0.1), std::domain_error);
  CHECK_THROWS_AS(t.locate_segment(3.1), std::domain_error);
}

TEST_CASE("pin expansion places values and selectors") {
  SUBCASE("boundary pins on a single segment") {
    const auto e = expand_pins({{0, 0, 0.0}, {1, 0, 1.0}}, 1, 2);
    Eigen::VectorXd fbar(4);
    fbar << 0, 0, 1, 0;
    CHECK((e.pinned_values[0] - fbar).norm() == 0.0);
    CHECK(e.free_positions[0] == std::vector<int>{1, 3});
    CHECK(e.mu_minus[0] == 1);
    CHECK(e.mu_plus[0] == 1);
  }
  SUBCASE("interior pin lands on both neighbouring segments") {
    const auto e = expand_pins({{1, 0, 5.0}}, 2, 2);
    CHECK(e.pinned_values[0](2) == 5.0);
    CHECK(e.pinned_values[1](0) == 5.0);
    CHECK(e.mu_plus[0] == 1);
    CHECK(e.mu_minus[1] == 1);
    CHECK(e.mu_minus[0] == 0);
    CHECK(e.mu_plus[1] == 0);
  }
  SUBCASE("no pins leaves everything free") {
    const auto e = expand_pins({}, 1, 2);
    CHECK(e.pinned_values[0].norm() == 0.0);
    CHECK((e.selector(0) - Eigen::MatrixXd::Identity(4, 4)).norm() == 0.0);
  }
}

TEST_CASE("pin expansion rejects invalid input") {
  CHECK_THROWS_AS(expand_pins({{0, 2, 1.0}}, 1, 2), std::invalid_argument);   // deriv >= k
  CHECK_THROWS_AS(expand_pins({{2, 0, 1.0}}, 1, 2), std::invalid_argument);   // knot > l
  CHECK_THROWS_AS(expand_pins({{0, 0, 1.0}, {0, 0, 2.0}}, 1, 2), std::invalid_argument);
}

TEST_CASE("pin expansion satisfies the selector identities") {
  // P f-bar = b and P Z = 0 for the row-selector implied by the pins,
  // checked by explicit multiplication on random pin sets.
  minsnap::Rng rng(23);
  for (int trial = 0; trial < 25; ++trial) {
    const int k = rng.uniform_int(1, 5);
    const int l = rng.uniform_int(1, 6);
    PinSet pins;
    for (int knot = 0; knot <= l; ++knot) {
      for (int q = 0; q < k; ++q) {
        if (rng.uniform() < 0.4) pins.push_back({knot, q, rng.uniform(-3.0, 3.0)});
      }
    }
    const auto e = expand_pins(pins, l, k);
    for (const Pin& p : pins) {
      struct Side {
        int segment;
        int pos;
      };
      std::vector<Side> sides;
      if (p.knot < l) sides.push_back({p.knot, p.deriv});
      if (p.knot > 0) sides.push_back({p.knot - 1, k + p.deriv});
      for (const Side& s : sides) {
        // row of P for this pin occurrence: selects position s.pos
        CHECK(e.pinned_values[s.segment](s.pos) == p.value);
        const Eigen::MatrixXd z = e.selector(s.segment);
        CHECK(z.row(s.pos).norm() == 0.0);  // P Z = 0
      }
    }
    for (int i = 0; i < l; ++i) {
      const Eigen::MatrixXd z = e.selector(i);
      CHECK(z.cols() == 2 * k - e.mu_minus[i] - e.mu_plus[i]);
      CHECK((z.transpose() * z - Eigen::MatrixXd::Identity(z.cols(), z.cols())).norm() == 0.0);
      if (i + 1 < l) CHECK(e.mu_plus[i] == e.mu_minus[i + 1]);
    }
  }
}

TEST_CASE("spline evaluation") {
  SUBCASE("constant segments") {
    Eigen::VectorXd knots(3);
    knots << 0.0, 1.0, 2.0;
    Eigen::VectorXd c(4);
    c << 3.5, 0, 0, 0;
    Spline s(2, TimeAllocation::from_knots(knots), {c, c});
    CHECK(s.eval(0.7, 0) == 3.5);
    CHECK(s.eval(1.9, 0) == 3.5);
    CHECK(s.eval(0.7, 1) == 0.0);
    CHECK(s.eval(0.7, 3) == 0.0);
  }
  SUBCASE("cubic with known values") {
    Eigen::VectorXd knots(2);
    knots << -1.0, 1.0;
    Eigen::VectorXd c(4);
    c << 0.5, 0.75, 0.0, -0.25;
    Spline s(2, TimeAllocation::from_knots(knots), {c});
    CHECK(s.eval(1.0, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s.eval(1.0, 1) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(s.eval(-1.0, 0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(s.eval(0.0, 0) == doctest::Approx(0.5).epsilon(1e-15));
    // derivative order beyond the stored polynomial degree
    CHECK(s.eval(0.3, 4) == 0.0);
    CHECK_THROWS_AS(s.eval(1.5, 0), std::domain_error);
    CHECK_THROWS_AS(s.eval(0.0, -1), std::invalid_argument);
  }
  SUBCASE("time shift reproduces values exactly") {
    // dyadic knots and shift, so every sum below is exact in binary
    Eigen::VectorXd d(3);
    d << 0.5, 0.25, 1.25;
    minsnap::Rng rng(5);
    std::vector<Eigen::VectorXd> cs;
    for (int i = 0; i < 3; ++i) {
      Eigen::VectorXd c(6);
      for (int j = 0; j < 6; ++j) c(j) = rng.uniform(-1.0, 1.0);
      cs.push_back(c);
    }
    const double alpha = 1024.0;
    Spline s(3, durations_to_times(d, 0.0), cs);
    Spline shifted(3, durations_to_times(d, alpha), cs);
    for (double tau : {0.0, 0.125, 0.5, 1.0, 1.75, 2.5, 4.0}) {
      for (int q = 0; q < 3; ++q) {
        CHECK(s.eval(tau, q) == shifted.eval(tau + alpha, q));
      }
    }
  }
}

TEST_CASE("endpoint derivative stacks match direct evaluation") {
  minsnap::Rng rng(9);
  Eigen::VectorXd d(2);
  d << 0.75, 1.5;
  std::vector<Eigen::VectorXd> cs;
  for (int i = 0; i < 2; ++i) {
    Eigen::VectorXd c(6);
    for (int j = 0; j < 6; ++j) c(j) = rng.uniform(-1.0, 1.0);
    cs.push_back(c);
  }
  Spline s(3, durations_to_times(d, -1.0), cs);
  for (int seg = 0; seg < 2; ++seg) {
    const Eigen::VectorXd left = s.endpoint_derivatives(seg, false);
    const Eigen::VectorXd right = s.endpoint_derivatives(seg, true);
    const double tl = s.times().knots()(seg);
    const double tr = s.times().knots()(seg + 1);
    for (int q = 0; q < 3; ++q) {
      // evaluate just inside to dodge the knot tie rule for the left segment
      CHECK(left(q) == doctest::Approx(s.eval(tl + (seg > 0 ? 1e-12 : 0.0), q)).epsilon(1e-6));
      CHECK(right(q) == doctest::Approx(s.eval(tr, q)).epsilon(1e-12));
    }
  }
}

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "perscale/error.hpp"
#include "perscale/geometry.hpp"
#include "perscale/oracles/geometry_oracle.hpp"

using namespace perscale;
using doctest::Approx;

namespace {
const double kPi = std::numbers::pi;
Region unit_square() { return Region::box({0, 0}, {1, 1}); }
}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("volume of standard windows") {
  CHECK(volume(Region::box({0, 0}, {10, 10})) == Approx(100.0));
  CHECK(volume(Region::ball({0, 0}, 1.0)) == Approx(kPi));
  CHECK(volume(Region::simplex({{0, 0}, {1, 0}, {0, 1}})) == Approx(0.5));
  CHECK(volume(Region::box({0, 0, 0}, {2, 3, 4})) == Approx(24.0));
  CHECK(volume(Region::ball({0, 0, 0}, 1.0)) == Approx(4.0 / 3.0 * kPi));
}

TEST_CASE("degenerate windows are rejected") {
  CHECK_THROWS_AS(volume(Region::box({0, 0}, {0, 1})), Error);
  CHECK_THROWS_AS(volume(Region::ball({0, 0}, 0.0)), Error);
  CHECK_THROWS_AS(volume(Region::simplex({{0, 0}, {1, 1}, {2, 2}})), Error);
}

TEST_CASE("steiner volume") {
  CHECK(steiner_volume(unit_square(), 1.0) == Approx(1.0 + 4.0 + kPi));
  CHECK(steiner_volume(unit_square(), 0.0) == Approx(1.0));
  CHECK(steiner_volume(Region::simplex({{0, 0}, {1, 0}, {0, 1}}), 0.0) == Approx(0.5));
  CHECK(steiner_volume(Region::ball({0, 0}, 1.0), 1.0) == Approx(4.0 * kPi));
  CHECK(steiner_volume(Region::ball({0, 0, 0}, 1.0), 1.0) == Approx(4.0 / 3.0 * kPi * 8.0));
}

TEST_CASE("quermassintegrals") {
  CHECK(quermassintegral(unit_square(), 1) == Approx(2.0));
  CHECK(quermassintegral(unit_square(), 2) == Approx(kPi));
  CHECK(quermassintegral(Region::simplex({{0, 0}, {1, 0}, {0, 1}}), 2) == Approx(kPi));
  CHECK(quermassintegral(Region::ball({0, 0}, 2.0), 0) == Approx(4.0 * kPi));
  CHECK_THROWS_AS(quermassintegral(unit_square(), 3), Error);
  CHECK_THROWS_AS(quermassintegral(unit_square(), -1), Error);
}

TEST_CASE("quermassintegral fit to monte carlo dilation recovers W_1 of the square") {
  const std::vector<double> deltas{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  const auto w = oracle::fitted_quermassintegrals(unit_square(), deltas, 400'000, 7);
  REQUIRE(w.size() == 3);
  CHECK(w[1] == Approx(2.0).epsilon(0.03));
}

TEST_CASE("steiner volume agrees with monte carlo dilation") {
  const auto mc = oracle::dilated_volume_mc(unit_square(), 1.0, 1'000'000, 11);
  CHECK(std::abs(mc.value - steiner_volume(unit_square(), 1.0)) < 3.0 * mc.stderr_ + 1e-12);
}

TEST_CASE("condition iv ratio traces") {
  const AveragingSequence balls(Region::ball({0, 0}, 1.0), {1, 2, 3, 4, 5});
  const auto rb = check_condition_iv(balls);
  CHECK(rb.bounded);
  for (double r : rb.ratio_trace) CHECK(r == Approx(std::sqrt(kPi)));

  const AveragingSequence squares(unit_square(), {1, 2, 3, 4, 5});
  const auto rs = check_condition_iv(squares);
  CHECK(rs.bounded);
  for (double r : rs.ratio_trace) CHECK(r == Approx(2.0));

  std::vector<double> lengths;
  for (double k = 1; k <= 1e5; k *= 10) lengths.push_back(k);
  const AveragingSequence slabs(unit_square(), lengths, {0});
  const auto rl = check_condition_iv(slabs);
  CHECK_FALSE(rl.bounded);
  for (std::size_t i = 1; i < rl.ratio_trace.size(); ++i)
    CHECK(rl.ratio_trace[i] > rl.ratio_trace[i - 1]);
  // Large slabs grow like sqrt(k).
  const auto& tr = rl.ratio_trace;
  CHECK(tr.back() / tr[tr.size() - 2] == Approx(std::sqrt(10.0)).epsilon(0.01));
}

TEST_CASE("averaging sequences are nested") {
  const AveragingSequence seq(Region::simplex({{0, 0}, {1, 0}, {0, 1}}), {1, 2, 4});
  for (std::size_t k = 1; k < seq.size(); ++k) {
    CHECK(volume(seq.at(k)) > volume(seq.at(k - 1)));
    for (const auto& v : seq.at(k - 1).vertices()) CHECK(seq.at(k).contains(v));
  }
}

TEST_CASE("distance to region") {
  CHECK(oracle::distance_to_region(unit_square(), {0.5, 0.5, 0}) == 0.0);
  CHECK(oracle::distance_to_region(unit_square(), {2, 0.5, 0}) == Approx(1.0));
  CHECK(oracle::distance_to_region(Region::ball({0, 0}, 1.0), {3, 0, 0}) == Approx(2.0));
}

}  // TEST_SUITE

#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "oracles/oracles.hpp"

using namespace pa3c;

TEST_CASE("return oracle") {
  const auto a = oracles::discounted_return_oracle({0, 0, 10}, 0.95, 0.0, true);
  CHECK(a[0] == doctest::Approx(9.025));
  CHECK(a[1] == doctest::Approx(9.5));
  CHECK(a[2] == doctest::Approx(10.0));
  CHECK(oracles::discounted_return_oracle({1, 1, 1}, 1.0, 0.0, true) == std::vector<double>{3, 2, 1});
  const auto b = oracles::discounted_return_oracle({2, 5}, 0.5, 4.0, false);
  CHECK(b[1] == doctest::Approx(5.0 + 0.5 * 4.0));
}

TEST_CASE("finite differences") {
  auto square = [](const std::vector<double>& x) { return x[0] * x[0]; };
  CHECK(std::abs(oracles::finite_difference_grads(square, {3.0})[0] - 6.0) < 1e-6);
  auto constant = [](const std::vector<double>&) { return 4.2; };
  for (double g : oracles::finite_difference_grads(constant, {1.0, -2.0, 0.5})) CHECK(g == 0.0);
}

TEST_CASE("connectivity oracle") {
  GenerationConfig one;
  one.min_rooms = one.max_rooms = 1;
  CHECK(oracles::connectivity_oracle(generate_level(7, one)));

  DungeonLevel level = testing::two_room_level();
  CHECK(oracles::connectivity_oracle(level));
  level.grid.set({4, 15}, Tile::Void);  // cut the corridor
  CHECK_FALSE(oracles::connectivity_oracle(level));
}

TEST_CASE("generated levels always connect the start to the stairs") {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    CAPTURE(seed);
    REQUIRE(oracles::connectivity_oracle(generate_level(seed, {})));
  }
  GenerationConfig small;
  small.max_rooms = 3;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    REQUIRE(oracles::connectivity_oracle(generate_level(seed, small)));
  }
}

#include <doctest.h>

#include <algorithm>
#include <set>

#include "fixtures.hpp"
#include "oracles/oracles.hpp"
#include "pa3c/dungeon.hpp"
#include "pa3c/errors.hpp"

using namespace pa3c;

namespace {

int count_tiles(const TileGrid& g, Tile t) {
  int n = 0;
  for (int r = 0; r < kRows; ++r) {
    for (int c = 0; c < kCols; ++c) n += g.at(r, c) == t;
  }
  return n;
}

int sector_of(const Room& room) {
  // Rooms never straddle sectors, so the top-left corner identifies it.
  const int row_edges[] = {7, 14, kRows};
  const int col_edges[] = {26, 53, kCols};
  int sr = 0, sc = 0;
  while (room.top >= row_edges[sr]) ++sr;
  while (room.left >= col_edges[sc]) ++sc;
  return sr * 3 + sc;
}

}  // namespace

TEST_CASE("default level: room count, single stairs, mutual reachability") {
  const DungeonLevel level = generate_level(42, {});
  CHECK(level.rooms.size() >= 2);
  CHECK(level.rooms.size() <= 9);
  CHECK(count_tiles(level.grid, Tile::Stairs) == 1);
  CHECK(level.grid.at(level.stairs_pos) == Tile::Stairs);
  CHECK(oracles::all_rooms_connected(level));
  CHECK(oracles::connectivity_oracle(level));
}

TEST_CASE("single-room configuration keeps rogue and stairs in one room") {
  GenerationConfig config;
  config.min_rooms = 1;
  config.max_rooms = 1;
  const DungeonLevel level = generate_level(7, config);
  REQUIRE(level.rooms.size() == 1);
  CHECK(level.rooms[0].interior_contains(level.rogue_pos));
  CHECK(level.rooms[0].interior_contains(level.stairs_pos));
  CHECK(level.doors.empty());
  CHECK(oracles::connectivity_oracle(level));
}

TEST_CASE("generation is deterministic in the seed") {
  const DungeonLevel a = generate_level(42, {});
  const DungeonLevel b = generate_level(42, {});
  CHECK(a.grid == b.grid);
  CHECK(a.rooms == b.rooms);
  CHECK(a.doors == b.doors);
  CHECK(a.rogue_pos == b.rogue_pos);
  CHECK(a.stairs_pos == b.stairs_pos);
  CHECK_FALSE(generate_level(43, {}).grid == a.grid);
}

TEST_CASE("invalid generation configs are rejected") {
  GenerationConfig c;
  c.max_rooms = 10;
  CHECK_THROWS_AS(generate_level(1, c), ConfigError);
  c = {};
  c.min_rooms = 5;
  c.max_rooms = 4;
  CHECK_THROWS_AS(generate_level(1, c), ConfigError);
  c = {};
  c.min_room_height = 3;
  CHECK_THROWS_AS(generate_level(1, c), ConfigError);
  c = {};
  c.min_room_width = 30;
  CHECK_THROWS_AS(generate_level(1, c), ConfigError);
  c = {};
  c.min_rooms = 0;
  CHECK_THROWS_AS(new_episode(1, c), ConfigError);
}

TEST_CASE("structural invariants over many seeds") {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    CAPTURE(seed);
    const DungeonLevel level = generate_level(seed, {});
    REQUIRE(level.rooms.size() >= 2);
    REQUIRE(level.rooms.size() <= 9);

    std::set<int> sectors;
    for (const Room& room : level.rooms) {
      CHECK(room.height >= 4);
      CHECK(room.width >= 4);
      sectors.insert(sector_of(room));
    }
    CHECK(sectors.size() == level.rooms.size());

    for (const Pos d : level.doors) {
      CHECK(level.grid.at(d) == Tile::Door);
      const bool on_wall = std::any_of(level.rooms.begin(), level.rooms.end(),
                                       [&](const Room& r) { return r.on_perimeter(d); });
      CHECK(on_wall);
    }
    CHECK(count_tiles(level.grid, Tile::Door) == static_cast<int>(level.doors.size()));
    // at most one door per wall, so at most 4 per room
    for (const Room& room : level.rooms) {
      const auto n = std::count_if(level.doors.begin(), level.doors.end(),
                                   [&](Pos d) { return room.on_perimeter(d); });
      CHECK(n <= 4);
    }
    CHECK(count_tiles(level.grid, Tile::Stairs) == 1);
    const int stairs_room = level.room_at(level.stairs_pos);
    REQUIRE(stairs_room >= 0);
    CHECK(level.rooms[stairs_room].interior_contains(level.stairs_pos));
    CHECK(is_walkable(level.grid.at(level.rogue_pos)));
    CHECK(level.rogue_pos != level.stairs_pos);
    CHECK(oracles::all_rooms_connected(level));
  }
}

TEST_CASE("new episode reveals exactly the starting room") {
  for (std::uint64_t seed : {1u, 2u, 3u, 42u}) {
    const Episode ep = new_episode(seed, {});
    CHECK(ep.level.step_count == 0);
    CHECK_FALSE(ep.level.terminal);
    const auto visible = oracles::visible_cells(ep.level);
    CHECK(ep.known.grid.count_non_void() == static_cast<int>(visible.size()));
    for (const Pos p : visible) CHECK(ep.known.grid.at(p) == ep.level.grid.at(p));
    CHECK(ep.known.rogue_pos == ep.level.rogue_pos);
  }
  CHECK(new_episode(9, {}).known == new_episode(9, {}).known);
}

TEST_CASE("descending on the stairs ends the episode") {
  DungeonLevel level = testing::two_room_level();
  level.rogue_pos = level.stairs_pos;
  KnownMap known = testing::start_known(level);
  const StepOutcome out = step(level, known, Action::Descend);
  CHECK(out.kind == OutcomeKind::Descended);
  CHECK(out.terminal);
  CHECK(level.terminal);
  CHECK_THROWS_AS(step(level, known, Action::Up), ProtocolError);
}

TEST_CASE("walking into a wall is blocked and changes nothing but the step count") {
  DungeonLevel level = testing::two_room_level();
  level.rogue_pos = {3, 5};  // just below the top wall
  KnownMap known = testing::start_known(level);
  const DungeonLevel before = level;
  const KnownMap known_before = known;
  const StepOutcome out = step(level, known, Action::Up);
  CHECK(out.kind == OutcomeKind::Blocked);
  CHECK_FALSE(out.terminal);
  CHECK(level.rogue_pos == before.rogue_pos);
  CHECK(level.grid == before.grid);
  CHECK(known.grid == known_before.grid);
  CHECK(level.step_count == 1);

  // Descend away from the stairs does nothing either.
  CHECK(step(level, known, Action::Descend).kind == OutcomeKind::Blocked);
  CHECK(level.rogue_pos == before.rogue_pos);
}

TEST_CASE("the 500th action without a descent hits the step limit") {
  DungeonLevel level = testing::two_room_level();
  KnownMap known = testing::start_known(level);
  for (int i = 1; i < kMaxEpisodeSteps; ++i) {
    const StepOutcome out = step(level, known, Action::Descend);
    REQUIRE_FALSE(out.terminal);
    REQUIRE(level.step_count == i);
  }
  const StepOutcome last = step(level, known, Action::Left);
  CHECK(last.kind == OutcomeKind::StepLimit);
  CHECK(last.terminal);
  CHECK(level.step_count == kMaxEpisodeSteps);
}

TEST_CASE("auto_descend ends the episode on arrival") {
  DungeonLevel level = testing::two_room_level();
  level.auto_descend = true;
  level.rogue_pos = {4, 24};
  KnownMap known = testing::start_known(level);
  CHECK(step(level, known, Action::Right).kind == OutcomeKind::Descended);
}

TEST_CASE("door and corridor cells reveal the 8-neighbourhood") {
  DungeonLevel level = testing::two_room_level();
  KnownMap known = testing::start_known(level);
  level.rogue_pos = {4, 9};
  reveal(level, known);
  const int room_a = known.grid.count_non_void();
  step(level, known, Action::Right);  // onto the door (4,10)
  CHECK(known.grid.at({4, 11}) == Tile::Corridor);
  CHECK(known.grid.at({4, 12}) == Tile::Void);
  step(level, known, Action::Right);  // corridor (4,11)
  CHECK(known.grid.at({4, 12}) == Tile::Corridor);
  CHECK(known.grid.count_non_void() > room_a);
  // Entering room B reveals all of it.
  for (int i = 0; i < 10; ++i) step(level, known, Action::Right);
  CHECK(level.rogue_pos == Pos{4, 21});
  CHECK(known.grid.at(level.stairs_pos) == Tile::Stairs);
  CHECK(known.grid.at({6, 30}) == Tile::HorizontalWall);
}

TEST_CASE("random play: monotone memory, step conservation, blocked fixed points") {
  std::mt19937_64 rng(5);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Episode ep = new_episode(seed, {});
    int n = 0;
    while (!ep.level.terminal) {
      const auto a = static_cast<Action>(std::uniform_int_distribution<int>(0, 4)(rng));
      const DungeonLevel before = ep.level;
      const KnownMap known_before = ep.known;
      const StepOutcome out = step(ep.level, ep.known, a);
      ++n;
      REQUIRE(ep.level.step_count == n);
      REQUIRE(ep.known.grid.count_non_void() >= known_before.grid.count_non_void());
      for (int r = 0; r < kRows; ++r) {
        for (int c = 0; c < kCols; ++c) {
          const Tile t = ep.known.grid.at(r, c);
          if (t != Tile::Void) REQUIRE(t == ep.level.grid.at(r, c));
          if (known_before.grid.at(r, c) != Tile::Void) REQUIRE(t == known_before.grid.at(r, c));
        }
      }
      if (out.kind == OutcomeKind::Blocked) {
        REQUIRE(ep.level.rogue_pos == before.rogue_pos);
        REQUIRE(ep.level.grid == before.grid);
        REQUIRE(ep.known.grid == known_before.grid);
      }
      REQUIRE(is_walkable(ep.level.grid.at(ep.level.rogue_pos)));
    }
    CHECK(ep.level.step_count <= kMaxEpisodeSteps);
  }
}

TEST_CASE("same seed and action sequence give the same trajectory") {
  const std::vector<Action> script = {Action::Up,   Action::Left, Action::Left, Action::Down,
                                      Action::Right, Action::Descend, Action::Up};
  auto play = [&] {
    Episode ep = new_episode(77, {});
    std::vector<Pos> path;
    for (int i = 0; i < 200 && !ep.level.terminal; ++i) {
      step(ep.level, ep.known, script[i % script.size()]);
      path.push_back(ep.level.rogue_pos);
    }
    return std::make_pair(path, ep.known);
  };
  CHECK(play() == play());
}

TEST_CASE("trace records serialize as one JSON object per line") {
  const std::string line = to_json_line(TraceRecord{3, Action::Descend, OutcomeKind::Descended, {4, 7}, 10.0});
  CHECK(line == R"({"action":"descend","outcome":"descended","reward":10.0,"rogue_pos":[4,7],"step":3})");
}

TEST_CASE("action names and keys parse") {
  CHECK(parse_action("h") == Action::Left);
  CHECK(parse_action("j") == Action::Down);
  CHECK(parse_action("k") == Action::Up);
  CHECK(parse_action("l") == Action::Right);
  CHECK(parse_action(">") == Action::Descend);
  CHECK(parse_action("Descend") == Action::Descend);
  CHECK_THROWS(parse_action("x"));
}

#include <doctest.h>

#include <sstream>

#include "fixtures.hpp"
#include "pa3c/errors.hpp"
#include "pa3c/screen.hpp"

using namespace pa3c;

TEST_CASE("rogue is drawn one row below its map row") {
  KnownMap k;
  k.rogue_pos = {5, 10};
  const AsciiFrame f = render_frame(k);
  CHECK(f.rows[6][10] == '@');
  for (int r = 1; r <= kRows; ++r) {
    for (int c = 0; c < kCols; ++c) {
      if (r == 6 && c == 10) continue;
      REQUIRE(f.rows[r][c] == ' ');
    }
  }
}

TEST_CASE("frame geometry and status line") {
  KnownMap k;
  k.rogue_pos = {0, 0};
  k.step_count = 17;
  const AsciiFrame f = render_frame(k, "hello");
  for (const std::string& row : f.rows) CHECK(row.size() == 80);
  CHECK(f.rows[0].rfind("hello", 0) == 0);
  CHECK(f.rows[23].rfind("Level: 1  Step: 17", 0) == 0);
}

TEST_CASE("stairs render as percent") {
  KnownMap k;
  k.rogue_pos = {1, 1};
  k.grid.set({8, 40}, Tile::Stairs);
  CHECK(render_frame(k).rows[9][40] == '%');
}

TEST_CASE("every tile has its glyph") {
  CHECK(glyph_for(Tile::Void) == ' ');
  CHECK(glyph_for(Tile::Floor) == '.');
  CHECK(glyph_for(Tile::HorizontalWall) == '-');
  CHECK(glyph_for(Tile::VerticalWall) == '|');
  CHECK(glyph_for(Tile::Door) == '+');
  CHECK(glyph_for(Tile::Corridor) == '#');
  CHECK(glyph_for(Tile::Stairs) == '%');
}

TEST_CASE("round trip with memory missing the current cell") {
  const auto s = testing::random_walk(3, 40);
  const KnownMap& k = s.episode.known;
  KnownMap prev = k;
  prev.grid.set(k.rogue_pos, Tile::Void);
  const KnownMap parsed = parse_frame(render_frame(k), prev);
  // The cell under '@' is unknowable from the frame; with the memory blanked
  // there it decodes as Floor.
  if (k.under_rogue() == Tile::Floor) {
    CHECK(parsed == k);
  } else {
    KnownMap expected = k;
    expected.grid.set(k.rogue_pos, Tile::Floor);
    CHECK(parsed == expected);
  }
}

TEST_CASE("parse without memory defaults the rogue cell to floor") {
  KnownMap k;
  k.rogue_pos = {4, 4};
  k.grid.set({4, 4}, Tile::Corridor);
  k.grid.set({4, 5}, Tile::Corridor);
  const KnownMap parsed = parse_frame(render_frame(k));
  CHECK(parsed.grid.at({4, 4}) == Tile::Floor);
  CHECK(parsed.grid.at({4, 5}) == Tile::Corridor);
  CHECK(parsed.rogue_pos == Pos{4, 4});
}

TEST_CASE("round trip over fuzzed reachable states") {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto s = testing::random_walk(seed, static_cast<int>(seed % 300));
    const KnownMap& k = s.episode.known;
    REQUIRE(parse_frame(render_frame(k), k) == k);
  }
}

TEST_CASE("parsing is monotone in memory") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto s = testing::random_walk(seed, 200);
    // Parse an early frame on top of the final memory: nothing is lost.
    const KnownMap& memory = s.history.back();
    const KnownMap parsed = parse_frame(render_frame(s.history[s.history.size() / 2]), memory);
    for (int r = 0; r < kRows; ++r) {
      for (int c = 0; c < kCols; ++c) {
        if (memory.grid.at(r, c) != Tile::Void) REQUIRE(parsed.grid.at(r, c) != Tile::Void);
      }
    }
  }
}

TEST_CASE("union semantics: new stairs glyph joins memory") {
  KnownMap memory;
  memory.rogue_pos = {2, 2};
  memory.grid.set({2, 3}, Tile::Floor);
  KnownMap shown = memory;
  shown.grid.set({7, 7}, Tile::Stairs);
  shown.grid.set({2, 3}, Tile::Void);
  const KnownMap parsed = parse_frame(render_frame(shown), memory);
  CHECK(parsed.grid.at({7, 7}) == Tile::Stairs);
  CHECK(parsed.grid.at({2, 3}) == Tile::Floor);
}

TEST_CASE("malformed frames are rejected") {
  KnownMap k;
  k.rogue_pos = {3, 3};
  AsciiFrame f = render_frame(k);
  AsciiFrame two = f;
  two.rows[10][50] = '@';
  CHECK_THROWS_AS(parse_frame(two), MalformedFrame);
  AsciiFrame none = f;
  none.rows[4][3] = ' ';
  CHECK_THROWS_AS(parse_frame(none), MalformedFrame);
  AsciiFrame odd = f;
  odd.rows[12][12] = 'Z';
  CHECK_THROWS_AS(parse_frame(odd), MalformedFrame);
}

TEST_CASE("serialized frames are 24 lines of 80 characters") {
  const auto s = testing::random_walk(11, 30);
  const AsciiFrame f = render_frame(s.episode.known);
  const std::string text = serialize(f);
  std::istringstream in(text);
  CHECK(deserialize_frame(in) == f);

  std::istringstream short_in("too short\n");
  CHECK_THROWS_AS(deserialize_frame(short_in), MalformedFrame);
}

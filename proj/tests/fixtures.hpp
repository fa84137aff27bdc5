#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <random>
#include <vector>

#include "pa3c/dungeon.hpp"
#include "pa3c/situations.hpp"

namespace pa3c::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("pa3c-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void draw_room(DungeonLevel& level, const Room& room) {
  for (int r = room.top; r <= room.bottom(); ++r) {
    for (int c = room.left; c <= room.right(); ++c) {
      Tile t = Tile::Floor;
      if (r == room.top || r == room.bottom()) {
        t = Tile::HorizontalWall;
      } else if (c == room.left || c == room.right()) {
        t = Tile::VerticalWall;
      }
      level.grid.set({r, c}, t);
    }
  }
  level.rooms.push_back(room);
}

inline void add_door(DungeonLevel& level, Pos p) {
  level.grid.set(p, Tile::Door);
  level.doors.push_back(p);
}

// Straight corridor between two cells sharing a row or column.
inline void add_corridor(DungeonLevel& level, Pos a, Pos b) {
  const int dr = (b.row > a.row) - (b.row < a.row);
  const int dc = (b.col > a.col) - (b.col < a.col);
  for (Pos p = a;; p = {p.row + dr, p.col + dc}) {
    level.grid.set(p, Tile::Corridor);
    if (p == b) break;
  }
}

inline void place_stairs(DungeonLevel& level, Pos p) {
  level.grid.set(p, Tile::Stairs);
  level.stairs_pos = p;
}

// Two rooms joined by a corridor:
//   room A rows 2..6, cols 2..10, door on its right wall at (4, 10)
//   corridor (4, 11)..(4, 19)
//   room B rows 2..6, cols 20..30, door on its left wall at (4, 20)
// Stairs in room B at (4, 25); rogue starts in room A at (4, 5).
inline DungeonLevel two_room_level() {
  DungeonLevel level;
  draw_room(level, {2, 2, 5, 9});
  draw_room(level, {2, 20, 5, 11});
  add_door(level, {4, 10});
  add_door(level, {4, 20});
  add_corridor(level, {4, 11}, {4, 19});
  place_stairs(level, {4, 25});
  level.rogue_pos = {4, 5};
  return level;
}

inline KnownMap start_known(const DungeonLevel& level) {
  KnownMap k;
  reveal(level, k);
  return k;
}

inline KnownMap fully_known(const DungeonLevel& level) {
  KnownMap k;
  k.grid = level.grid;
  k.rogue_pos = level.rogue_pos;
  k.step_count = level.step_count;
  return k;
}

// A reachable game state: a generated level after `moves` random actions
// (stopping early if the episode ends).
struct ReachableState {
  Episode episode;
  std::vector<KnownMap> history;  // frames memory after every step, start included
};

inline ReachableState random_walk(std::uint64_t seed, int moves,
                                  const GenerationConfig& config = {}) {
  ReachableState s{new_episode(seed, config), {}};
  s.history.push_back(s.episode.known);
  std::mt19937_64 rng(seed ^ 0xabcdefULL);
  std::uniform_int_distribution<int> pick(0, kNumActions - 1);
  for (int i = 0; i < moves && !s.episode.level.terminal; ++i) {
    step(s.episode.level, s.episode.known, static_cast<Action>(pick(rng)));
    s.history.push_back(s.episode.known);
  }
  return s;
}

// Hand-built frames memories for the situation classifier: every
// combination of the three conditions, each in two variants (corridor tile
// with a wall above, door tile with a wall to the right).
struct SituationFixture {
  KnownMap known;
  bool on_corridor = false;
  bool stairs_known = false;
  bool next_to_wall = false;
};

inline std::vector<SituationFixture> situation_fixtures() {
  std::vector<SituationFixture> out;
  for (int variant = 0; variant < 2; ++variant) {
    for (int bits = 0; bits < 8; ++bits) {
      SituationFixture f;
      f.on_corridor = bits & 1;
      f.stairs_known = bits & 2;
      f.next_to_wall = bits & 4;
      const Pos rogue{10, 40};
      f.known.rogue_pos = rogue;
      Tile under = Tile::Floor;
      if (f.on_corridor) under = variant == 0 ? Tile::Corridor : Tile::Door;
      f.known.grid.set(rogue, under);
      // Diagonal walls never count as "next to".
      f.known.grid.set({9, 39}, Tile::HorizontalWall);
      f.known.grid.set({11, 41}, Tile::VerticalWall);
      if (f.next_to_wall) {
        if (variant == 0) {
          f.known.grid.set({9, 40}, Tile::HorizontalWall);
        } else {
          f.known.grid.set({10, 41}, Tile::VerticalWall);
        }
      }
      if (f.stairs_known) f.known.grid.set({3, 70}, Tile::Stairs);
      out.push_back(f);
    }
  }
  return out;
}

// Priority rule written out longhand: the first active condition that holds.
inline SituationId expected_situation(const SituationFixture& f, const std::vector<SituationId>& active) {
  auto on = [&](SituationId id) {
    for (SituationId a : active) {
      if (a == id) return true;
    }
    return false;
  };
  if (on(1) && f.on_corridor) return 1;
  if (on(2) && f.stairs_known) return 2;
  if (on(3) && f.next_to_wall) return 3;
  return 4;
}

}  // namespace pa3c::testing

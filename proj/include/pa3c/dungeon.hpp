#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace pa3c {

// Playfield dimensions. The 24-row terminal keeps row 0 for messages and
// row 23 for the status line, leaving 22 rows of map.
inline constexpr int kRows = 22;
inline constexpr int kCols = 80;
inline constexpr int kMaxEpisodeSteps = 500;

enum class Tile : std::uint8_t {
  Void,
  Floor,
  HorizontalWall,
  VerticalWall,
  Door,
  Corridor,
  Stairs,
};

std::string_view to_string(Tile tile);

inline bool is_walkable(Tile t) {
  return t == Tile::Floor || t == Tile::Door || t == Tile::Corridor || t == Tile::Stairs;
}

inline bool is_wall(Tile t) { return t == Tile::HorizontalWall || t == Tile::VerticalWall; }

struct Pos {
  int row = 0;
  int col = 0;

  friend auto operator<=>(const Pos&, const Pos&) = default;
};

inline bool in_bounds(Pos p) { return p.row >= 0 && p.row < kRows && p.col >= 0 && p.col < kCols; }

// Dense kRows x kCols tile array.
class TileGrid {
 public:
  TileGrid() { cells_.fill(Tile::Void); }

  Tile at(Pos p) const { return cells_[index(p)]; }
  Tile at(int row, int col) const { return cells_[index({row, col})]; }
  void set(Pos p, Tile t) { cells_[index(p)] = t; }

  // Out-of-bounds positions read as Void.
  Tile at_or_void(Pos p) const { return in_bounds(p) ? at(p) : Tile::Void; }

  int count_non_void() const;

  friend bool operator==(const TileGrid&, const TileGrid&) = default;

 private:
  static std::size_t index(Pos p) { return static_cast<std::size_t>(p.row) * kCols + p.col; }
  std::array<Tile, kRows * kCols> cells_;
};

// Room rectangle, exterior (walls included).
struct Room {
  int top = 0;
  int left = 0;
  int height = 0;
  int width = 0;

  int bottom() const { return top + height - 1; }
  int right() const { return left + width - 1; }
  bool contains(Pos p) const {
    return p.row >= top && p.row <= bottom() && p.col >= left && p.col <= right();
  }
  bool interior_contains(Pos p) const {
    return p.row > top && p.row < bottom() && p.col > left && p.col < right();
  }
  bool on_perimeter(Pos p) const { return contains(p) && !interior_contains(p); }

  friend bool operator==(const Room&, const Room&) = default;
};

struct GenerationConfig {
  int min_rooms = 2;
  int max_rooms = 9;
  // Chance that a sector of the 3x3 grid hosts a room.
  double room_probability = 0.9;
  int min_room_height = 4;
  int min_room_width = 4;
  // Chance of carving a corridor for each adjacency left out of the spanning tree.
  double extra_corridor_probability = 0.5;
  // Stepping onto the stairs ends the episode without an explicit Descend.
  bool auto_descend = false;

  // Throws ConfigError.
  void validate() const;

  friend bool operator==(const GenerationConfig&, const GenerationConfig&) = default;
};

struct DungeonLevel {
  TileGrid grid;
  std::vector<Room> rooms;
  std::vector<Pos> doors;
  Pos rogue_pos;
  Pos stairs_pos;
  int step_count = 0;
  std::uint64_t rng_seed = 0;
  bool terminal = false;
  bool auto_descend = false;

  // Index into rooms of the room whose rectangle contains p, or -1.
  int room_at(Pos p) const;
};

// Frames memory: every cell seen so far on this level.
struct KnownMap {
  TileGrid grid;
  Pos rogue_pos;
  int step_count = 0;

  Tile under_rogue() const { return grid.at(rogue_pos); }
  bool stairs_known() const;

  friend bool operator==(const KnownMap&, const KnownMap&) = default;
};

enum class Action : std::uint8_t { Up, Down, Left, Right, Descend };
inline constexpr int kNumActions = 5;

std::string_view to_string(Action a);
// Accepts the names above (case-insensitive) and the Rogue keys h j k l >.
Action parse_action(std::string_view text);

enum class OutcomeKind : std::uint8_t { Moved, Blocked, Descended, StepLimit };

std::string_view to_string(OutcomeKind k);

struct StepOutcome {
  OutcomeKind kind = OutcomeKind::Moved;
  bool terminal = false;
};

// Deterministic in (seed, config). Throws ConfigError.
DungeonLevel generate_level(std::uint64_t seed, const GenerationConfig& config);

struct Episode {
  DungeonLevel level;
  KnownMap known;
};

// Fresh level with the frames memory holding exactly what is visible from
// the starting position.
Episode new_episode(std::uint64_t seed, const GenerationConfig& config);

// Lit-room visibility: standing inside a room reveals the whole room with its
// walls and doors; on a door or corridor the 8-neighbourhood is revealed.
void reveal(const DungeonLevel& level, KnownMap& known);

// Advances the game by one action. Throws ProtocolError on a terminal level.
StepOutcome step(DungeonLevel& level, KnownMap& known, Action action);

// One line of an exported episode trace.
struct TraceRecord {
  int step = 0;
  Action action = Action::Up;
  OutcomeKind outcome = OutcomeKind::Moved;
  Pos rogue_pos;
  double reward = 0.0;
};

std::string to_json_line(const TraceRecord& record);

}  // namespace pa3c

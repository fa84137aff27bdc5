#include "pa3c/dungeon.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <random>
#include <utility>

#include <json.hpp>

#include "pa3c/errors.hpp"

namespace pa3c {

std::string_view to_string(Tile tile) {
  switch (tile) {
    case Tile::Void: return "void";
    case Tile::Floor: return "floor";
    case Tile::HorizontalWall: return "hwall";
    case Tile::VerticalWall: return "vwall";
    case Tile::Door: return "door";
    case Tile::Corridor: return "corridor";
    case Tile::Stairs: return "stairs";
  }
  return "?";
}

std::string_view to_string(Action a) {
  switch (a) {
    case Action::Up: return "up";
    case Action::Down: return "down";
    case Action::Left: return "left";
    case Action::Right: return "right";
    case Action::Descend: return "descend";
  }
  return "?";
}

Action parse_action(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "up" || lower == "k") return Action::Up;
  if (lower == "down" || lower == "j") return Action::Down;
  if (lower == "left" || lower == "h") return Action::Left;
  if (lower == "right" || lower == "l") return Action::Right;
  if (lower == "descend" || lower == ">") return Action::Descend;
  throw std::invalid_argument("unknown action '" + std::string(text) + "'");
}

std::string_view to_string(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::Moved: return "moved";
    case OutcomeKind::Blocked: return "blocked";
    case OutcomeKind::Descended: return "descended";
    case OutcomeKind::StepLimit: return "step_limit";
  }
  return "?";
}

int TileGrid::count_non_void() const {
  return static_cast<int>(
      std::count_if(cells_.begin(), cells_.end(), [](Tile t) { return t != Tile::Void; }));
}

int DungeonLevel::room_at(Pos p) const {
  for (std::size_t i = 0; i < rooms.size(); ++i) {
    if (rooms[i].contains(p)) return static_cast<int>(i);
  }
  return -1;
}

bool KnownMap::stairs_known() const {
  for (int r = 0; r < kRows; ++r) {
    for (int c = 0; c < kCols; ++c) {
      if (grid.at(r, c) == Tile::Stairs) return true;
    }
  }
  return false;
}

namespace {

constexpr int kSectorGrid = 3;

struct Sector {
  int top;
  int left;
  int height;
  int width;
};

Sector sector_bounds(int sr, int sc) {
  const int top = sr * kRows / kSectorGrid;
  const int left = sc * kCols / kSectorGrid;
  return {top, left, (sr + 1) * kRows / kSectorGrid - top, (sc + 1) * kCols / kSectorGrid - left};
}

// Largest room exterior a sector may hold: the sector's last row and column
// stay empty so neighbouring rooms never touch.
int max_room_height() {
  int h = kRows;
  for (int sr = 0; sr < kSectorGrid; ++sr) h = std::min(h, sector_bounds(sr, 0).height - 1);
  return h;
}

int max_room_width() {
  int w = kCols;
  for (int sc = 0; sc < kSectorGrid; ++sc) w = std::min(w, sector_bounds(0, sc).width - 1);
  return w;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  bool chance(double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_) < p; }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

struct UnionFind {
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
  std::vector<int> parent;
};

struct Edge {
  int a;  // left or upper sector
  int b;  // right or lower sector
  bool horizontal;
};

std::vector<Edge> sector_adjacencies() {
  std::vector<Edge> edges;
  for (int sr = 0; sr < kSectorGrid; ++sr) {
    for (int sc = 0; sc < kSectorGrid; ++sc) {
      const int id = sr * kSectorGrid + sc;
      if (sc + 1 < kSectorGrid) edges.push_back({id, id + 1, true});
      if (sr + 1 < kSectorGrid) edges.push_back({id, id + kSectorGrid, false});
    }
  }
  return edges;
}

enum class Side { Top, Bottom, Left, Right };

class LevelBuilder {
 public:
  LevelBuilder(std::uint64_t seed, const GenerationConfig& config) : rng_(seed), config_(config) {
    level_.rng_seed = seed;
    level_.auto_descend = config.auto_descend;
  }

  DungeonLevel build() {
    choose_occupied_sectors();
    place_rooms();
    connect_sectors();
    place_stairs_and_rogue();
    return std::move(level_);
  }

 private:
  void choose_occupied_sectors() {
    constexpr int n = kSectorGrid * kSectorGrid;
    std::vector<int> chosen;
    do {
      chosen.clear();
      for (int i = 0; i < n; ++i) {
        if (rng_.chance(config_.room_probability)) chosen.push_back(i);
      }
    } while (static_cast<int>(chosen.size()) < config_.min_rooms);
    while (static_cast<int>(chosen.size()) > config_.max_rooms) {
      chosen.erase(chosen.begin() + rng_.uniform(0, static_cast<int>(chosen.size()) - 1));
    }
    occupied_.assign(n, false);
    for (int i : chosen) occupied_[i] = true;
  }

  void place_rooms() {
    room_of_sector_.assign(kSectorGrid * kSectorGrid, -1);
    for (int id = 0; id < kSectorGrid * kSectorGrid; ++id) {
      if (!occupied_[id]) continue;
      const Sector s = sector_bounds(id / kSectorGrid, id % kSectorGrid);
      Room room;
      room.height = rng_.uniform(config_.min_room_height, s.height - 1);
      room.width = rng_.uniform(config_.min_room_width, s.width - 1);
      room.top = rng_.uniform(s.top, s.top + s.height - 1 - room.height);
      room.left = rng_.uniform(s.left, s.left + s.width - 1 - room.width);
      room_of_sector_[id] = static_cast<int>(level_.rooms.size());
      level_.rooms.push_back(room);
      draw_room(room);
    }
  }

  void draw_room(const Room& room) {
    for (int r = room.top; r <= room.bottom(); ++r) {
      for (int c = room.left; c <= room.right(); ++c) {
        Tile t = Tile::Floor;
        if (r == room.top || r == room.bottom()) {
          t = Tile::HorizontalWall;
        } else if (c == room.left || c == room.right()) {
          t = Tile::VerticalWall;
        }
        level_.grid.set({r, c}, t);
      }
    }
  }

  // Random spanning tree over all nine sectors; empty sectors take part as
  // corridor junctions and are pruned again while they are dead-end leaves.
  void connect_sectors() {
    constexpr int n = kSectorGrid * kSectorGrid;
    std::vector<Edge> edges = sector_adjacencies();
    std::shuffle(edges.begin(), edges.end(), rng_.engine());

    UnionFind uf(n);
    std::vector<Edge> tree;
    std::vector<Edge> rest;
    for (const Edge& e : edges) {
      if (uf.unite(e.a, e.b)) {
        tree.push_back(e);
      } else {
        rest.push_back(e);
      }
    }

    bool pruned = true;
    while (pruned) {
      pruned = false;
      std::vector<int> degree(n, 0);
      for (const Edge& e : tree) {
        ++degree[e.a];
        ++degree[e.b];
      }
      for (auto it = tree.begin(); it != tree.end(); ++it) {
        const bool a_dead = !occupied_[it->a] && degree[it->a] == 1;
        const bool b_dead = !occupied_[it->b] && degree[it->b] == 1;
        if (a_dead || b_dead) {
          tree.erase(it);
          pruned = true;
          break;
        }
      }
    }

    junction_.assign(n, Pos{-1, -1});
    for (const Edge& e : tree) {
      for (int id : {e.a, e.b}) {
        if (!occupied_[id] && junction_[id].row < 0) {
          const Sector s = sector_bounds(id / kSectorGrid, id % kSectorGrid);
          junction_[id] = {rng_.uniform(s.top, s.top + s.height - 2),
                           rng_.uniform(s.left, s.left + s.width - 2)};
          level_.grid.set(junction_[id], Tile::Corridor);
        }
      }
    }

    for (const Edge& e : tree) carve_connection(e);
    for (const Edge& e : rest) {
      if (occupied_[e.a] && occupied_[e.b] && rng_.chance(config_.extra_corridor_probability)) {
        carve_connection(e);
      }
    }
  }

  // Position just outside the connection point of a sector on the given side:
  // a fresh door for rooms, the junction cell for empty sectors.
  Pos endpoint(int sector, Side side) {
    if (!occupied_[sector]) return junction_[sector];
    const Room& room = level_.rooms[room_of_sector_[sector]];
    Pos door;
    Pos exit;
    switch (side) {
      case Side::Top:
        door = {room.top, rng_.uniform(room.left + 1, room.right() - 1)};
        exit = {door.row - 1, door.col};
        break;
      case Side::Bottom:
        door = {room.bottom(), rng_.uniform(room.left + 1, room.right() - 1)};
        exit = {door.row + 1, door.col};
        break;
      case Side::Left:
        door = {rng_.uniform(room.top + 1, room.bottom() - 1), room.left};
        exit = {door.row, door.col - 1};
        break;
      case Side::Right:
        door = {rng_.uniform(room.top + 1, room.bottom() - 1), room.right()};
        exit = {door.row, door.col + 1};
        break;
    }
    level_.grid.set(door, Tile::Door);
    level_.doors.push_back(door);
    return exit;
  }

  void carve_connection(const Edge& e) {
    const Pos from = endpoint(e.a, e.horizontal ? Side::Right : Side::Bottom);
    const Pos to = endpoint(e.b, e.horizontal ? Side::Left : Side::Top);
    // Single-bend corridor; which leg comes first is random.
    const bool horizontal_first = rng_.chance(0.5);
    const Pos bend = horizontal_first ? Pos{from.row, to.col} : Pos{to.row, from.col};
    carve_line(from, bend);
    carve_line(bend, to);
  }

  void carve_line(Pos a, Pos b) {
    const int dr = (b.row > a.row) - (b.row < a.row);
    const int dc = (b.col > a.col) - (b.col < a.col);
    for (Pos p = a;; p = {p.row + dr, p.col + dc}) {
      if (level_.grid.at(p) == Tile::Void) level_.grid.set(p, Tile::Corridor);
      if (p == b) break;
    }
  }

  Pos random_interior_cell(const Room& room) {
    return {rng_.uniform(room.top + 1, room.bottom() - 1),
            rng_.uniform(room.left + 1, room.right() - 1)};
  }

  void place_stairs_and_rogue() {
    const int last = static_cast<int>(level_.rooms.size()) - 1;
    level_.stairs_pos = random_interior_cell(level_.rooms[rng_.uniform(0, last)]);
    level_.grid.set(level_.stairs_pos, Tile::Stairs);
    do {
      level_.rogue_pos = random_interior_cell(level_.rooms[rng_.uniform(0, last)]);
    } while (level_.rogue_pos == level_.stairs_pos);
  }

  Rng rng_;
  const GenerationConfig& config_;
  DungeonLevel level_;
  std::vector<bool> occupied_;
  std::vector<int> room_of_sector_;
  std::vector<Pos> junction_;
};

}  // namespace

void GenerationConfig::validate() const {
  if (min_rooms < 1 || max_rooms > 9 || min_rooms > max_rooms) {
    throw ConfigError("room count bounds must satisfy 1 <= min_rooms <= max_rooms <= 9");
  }
  if (min_room_height < 4 || min_room_width < 4) {
    throw ConfigError("rooms must be at least 4x4 including walls");
  }
  if (min_room_height > max_room_height() || min_room_width > max_room_width()) {
    throw ConfigError("minimum room size does not fit a 3x3 sector of the playfield");
  }
  if (!(room_probability > 0.0 && room_probability <= 1.0)) {
    throw ConfigError("room_probability must be in (0, 1]");
  }
  if (!(extra_corridor_probability >= 0.0 && extra_corridor_probability <= 1.0)) {
    throw ConfigError("extra_corridor_probability must be in [0, 1]");
  }
}

DungeonLevel generate_level(std::uint64_t seed, const GenerationConfig& config) {
  config.validate();
  return LevelBuilder(seed, config).build();
}

void reveal(const DungeonLevel& level, KnownMap& known) {
  const Pos p = level.rogue_pos;
  known.rogue_pos = p;
  const Tile here = level.grid.at(p);
  if (here == Tile::Floor || here == Tile::Stairs) {
    const int idx = level.room_at(p);
    if (idx >= 0) {
      const Room& room = level.rooms[idx];
      for (int r = room.top; r <= room.bottom(); ++r) {
        for (int c = room.left; c <= room.right(); ++c) known.grid.set({r, c}, level.grid.at(r, c));
      }
      return;
    }
  }
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) {
      const Pos q{p.row + dr, p.col + dc};
      if (in_bounds(q)) known.grid.set(q, level.grid.at(q));
    }
  }
}

Episode new_episode(std::uint64_t seed, const GenerationConfig& config) {
  Episode ep{generate_level(seed, config), {}};
  ep.known.step_count = 0;
  reveal(ep.level, ep.known);
  return ep;
}

StepOutcome step(DungeonLevel& level, KnownMap& known, Action action) {
  if (level.terminal) throw ProtocolError("step() called on a terminal level");

  ++level.step_count;
  known.step_count = level.step_count;
  StepOutcome out;

  if (action == Action::Descend) {
    out.kind = level.rogue_pos == level.stairs_pos ? OutcomeKind::Descended : OutcomeKind::Blocked;
  } else {
    Pos to = level.rogue_pos;
    switch (action) {
      case Action::Up: --to.row; break;
      case Action::Down: ++to.row; break;
      case Action::Left: --to.col; break;
      case Action::Right: ++to.col; break;
      case Action::Descend: break;
    }
    if (in_bounds(to) && is_walkable(level.grid.at(to))) {
      level.rogue_pos = to;
      reveal(level, known);
      out.kind = level.auto_descend && to == level.stairs_pos ? OutcomeKind::Descended
                                                               : OutcomeKind::Moved;
    } else {
      out.kind = OutcomeKind::Blocked;
    }
  }

  if (out.kind != OutcomeKind::Descended && level.step_count >= kMaxEpisodeSteps) {
    out.kind = OutcomeKind::StepLimit;
  }
  out.terminal = out.kind == OutcomeKind::Descended || out.kind == OutcomeKind::StepLimit;
  level.terminal = out.terminal;
  return out;
}

std::string to_json_line(const TraceRecord& record) {
  nlohmann::json j;
  j["step"] = record.step;
  j["action"] = to_string(record.action);
  j["outcome"] = to_string(record.outcome);
  j["rogue_pos"] = {record.rogue_pos.row, record.rogue_pos.col};
  j["reward"] = record.reward;
  return j.dump();
}

}  // namespace pa3c

#include "pa3c/screen.hpp"

#include <istream>
#include <regex>
#include <sstream>

#include "pa3c/errors.hpp"

namespace pa3c {

namespace {

constexpr char kRogueGlyph = '@';

std::optional<Tile> tile_for(char glyph) {
  switch (glyph) {
    case ' ': return Tile::Void;
    case '.': return Tile::Floor;
    case '-': return Tile::HorizontalWall;
    case '|': return Tile::VerticalWall;
    case '+': return Tile::Door;
    case '#': return Tile::Corridor;
    case '%': return Tile::Stairs;
    default: return std::nullopt;
  }
}

std::string pad(std::string s) {
  s.resize(kScreenCols, ' ');
  return s;
}

}  // namespace

char glyph_for(Tile tile) {
  switch (tile) {
    case Tile::Void: return ' ';
    case Tile::Floor: return '.';
    case Tile::HorizontalWall: return '-';
    case Tile::VerticalWall: return '|';
    case Tile::Door: return '+';
    case Tile::Corridor: return '#';
    case Tile::Stairs: return '%';
  }
  return ' ';
}

AsciiFrame render_frame(const KnownMap& known, const std::string& message) {
  AsciiFrame frame;
  frame.rows[0] = pad(message);
  for (int r = 0; r < kRows; ++r) {
    std::string& line = frame.rows[r + 1];
    line.assign(kScreenCols, ' ');
    for (int c = 0; c < kCols; ++c) line[c] = glyph_for(known.grid.at(r, c));
  }
  frame.rows[known.rogue_pos.row + 1][known.rogue_pos.col] = kRogueGlyph;
  frame.rows[kScreenRows - 1] = pad("Level: 1  Step: " + std::to_string(known.step_count));
  return frame;
}

KnownMap parse_frame(const AsciiFrame& frame, const std::optional<KnownMap>& memory) {
  KnownMap out = memory.value_or(KnownMap{});
  int rogues = 0;
  for (int r = 0; r < kRows; ++r) {
    const std::string& line = frame.rows[r + 1];
    if (static_cast<int>(line.size()) != kScreenCols) {
      throw MalformedFrame("map row " + std::to_string(r + 1) + " is not 80 characters wide");
    }
    for (int c = 0; c < kCols; ++c) {
      const char g = line[c];
      if (g == kRogueGlyph) {
        ++rogues;
        out.rogue_pos = {r, c};
        continue;
      }
      const auto tile = tile_for(g);
      if (!tile) {
        throw MalformedFrame("unknown glyph '" + std::string(1, g) + "' at row " +
                             std::to_string(r + 1) + ", column " + std::to_string(c));
      }
      if (*tile != Tile::Void) out.grid.set({r, c}, *tile);
    }
  }
  if (rogues != 1) {
    throw MalformedFrame("expected exactly one '@' on the map, found " + std::to_string(rogues));
  }
  if (out.grid.at(out.rogue_pos) == Tile::Void) out.grid.set(out.rogue_pos, Tile::Floor);

  static const std::regex status(R"(Level:\s*\d+\s+Step:\s*(\d+))");
  std::smatch m;
  if (std::regex_search(frame.rows[kScreenRows - 1], m, status)) {
    out.step_count = std::stoi(m[1].str());
  }
  return out;
}

std::string serialize(const AsciiFrame& frame) {
  std::string out;
  out.reserve(kScreenRows * (kScreenCols + 1));
  for (const std::string& row : frame.rows) {
    out += row;
    out += '\n';
  }
  return out;
}

AsciiFrame deserialize_frame(std::istream& in) {
  AsciiFrame frame;
  for (int r = 0; r < kScreenRows; ++r) {
    if (!std::getline(in, frame.rows[r])) {
      throw MalformedFrame("frame truncated at line " + std::to_string(r));
    }
    if (static_cast<int>(frame.rows[r].size()) != kScreenCols) {
      throw MalformedFrame("line " + std::to_string(r) + " is not 80 characters wide");
    }
  }
  return frame;
}

}  // namespace pa3c

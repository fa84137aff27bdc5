#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>

#include "pa3c/dungeon.hpp"

namespace pa3c {

inline constexpr int kScreenRows = 24;
inline constexpr int kScreenCols = 80;

// A Rogue-style terminal screen: row 0 is the message line, rows 1..22 the
// map, row 23 the status line. Every row is exactly 80 characters.
struct AsciiFrame {
  std::array<std::string, kScreenRows> rows;

  friend bool operator==(const AsciiFrame&, const AsciiFrame&) = default;
};

char glyph_for(Tile tile);

AsciiFrame render_frame(const KnownMap& known, const std::string& message = {});

// Inverse of render_frame. The tile under '@' comes from memory when memory
// knows it, otherwise it is taken to be Floor. The result is the union of
// the frame and memory. Throws MalformedFrame.
KnownMap parse_frame(const AsciiFrame& frame, const std::optional<KnownMap>& memory = std::nullopt);

// 24 newline-terminated lines.
std::string serialize(const AsciiFrame& frame);
// Throws MalformedFrame on wrong line count or width.
AsciiFrame deserialize_frame(std::istream& in);

}  // namespace pa3c

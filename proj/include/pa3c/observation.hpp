#pragma once

#include <string_view>
#include <vector>

#include "pa3c/dungeon.hpp"

namespace pa3c {

inline constexpr int kViewSize = 17;
inline constexpr int kViewCenter = kViewSize / 2;

enum class Encoding { C1, C2 };

inline int channels(Encoding e) { return e == Encoding::C1 ? 1 : 2; }
std::string_view to_string(Encoding e);
Encoding parse_encoding(std::string_view text);

// Tile codes of the cropped view.
inline constexpr float kStairsCode = 4.0f;
inline constexpr float kWallCode = 8.0f;
inline constexpr float kPassageCode = 16.0f;

// Rogue-centred 17x17xC view, stored channel-major: values[(c * 17 + i) * 17 + j].
struct Observation {
  Encoding encoding = Encoding::C1;
  std::vector<float> values;

  int channels() const { return pa3c::channels(encoding); }
  float at(int channel, int i, int j) const {
    return values[(static_cast<std::size_t>(channel) * kViewSize + i) * kViewSize + j];
  }

  friend bool operator==(const Observation&, const Observation&) = default;
};

// Cell (i, j) holds the frames-memory tile at (rogue_row + i - 8,
// rogue_col + j - 8); off-map cells are 0. The rogue itself is not drawn.
// c2 puts stairs in channel 0 and walls, doors and corridors in channel 1.
Observation crop_view(const KnownMap& known, Encoding encoding);

}  // namespace pa3c

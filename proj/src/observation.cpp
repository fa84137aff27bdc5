#include "pa3c/observation.hpp"

#include <stdexcept>
#include <string>

namespace pa3c {

std::string_view to_string(Encoding e) { return e == Encoding::C1 ? "c1" : "c2"; }

Encoding parse_encoding(std::string_view text) {
  if (text == "c1") return Encoding::C1;
  if (text == "c2") return Encoding::C2;
  throw std::invalid_argument("encoding must be c1 or c2, got '" + std::string(text) + "'");
}

Observation crop_view(const KnownMap& known, Encoding encoding) {
  Observation obs;
  obs.encoding = encoding;
  obs.values.assign(static_cast<std::size_t>(channels(encoding)) * kViewSize * kViewSize, 0.0f);
  const std::size_t env_offset =
      encoding == Encoding::C2 ? static_cast<std::size_t>(kViewSize) * kViewSize : 0;

  for (int i = 0; i < kViewSize; ++i) {
    for (int j = 0; j < kViewSize; ++j) {
      const Pos p{known.rogue_pos.row + i - kViewCenter, known.rogue_pos.col + j - kViewCenter};
      const std::size_t cell = static_cast<std::size_t>(i) * kViewSize + j;
      switch (known.grid.at_or_void(p)) {
        case Tile::Stairs: obs.values[cell] = kStairsCode; break;
        case Tile::HorizontalWall:
        case Tile::VerticalWall: obs.values[env_offset + cell] = kWallCode; break;
        case Tile::Door:
        case Tile::Corridor: obs.values[env_offset + cell] = kPassageCode; break;
        case Tile::Floor:
        case Tile::Void: break;
      }
    }
  }
  return obs;
}

}  // namespace pa3c

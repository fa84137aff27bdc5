#include "pa3c/situations.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace pa3c {

SituationConfig SituationConfig::from_name(std::string_view text) {
  if (text == "s1") return {SituationConfigName::S1};
  if (text == "s2") return {SituationConfigName::S2};
  if (text == "s4") return {SituationConfigName::S4};
  throw std::invalid_argument("situations must be s1, s2 or s4, got '" + std::string(text) + "'");
}

std::string_view SituationConfig::label() const {
  switch (name) {
    case SituationConfigName::S1: return "s1";
    case SituationConfigName::S2: return "s2";
    case SituationConfigName::S4: return "s4";
  }
  return "?";
}

std::vector<SituationId> SituationConfig::active_set() const {
  switch (name) {
    case SituationConfigName::S1: return {4};
    case SituationConfigName::S2: return {2, 4};
    case SituationConfigName::S4: return {1, 2, 3, 4};
  }
  return {4};
}

bool SituationConfig::is_active(SituationId id) const {
  const auto set = active_set();
  return std::find(set.begin(), set.end(), id) != set.end();
}

SituationConditions evaluate_conditions(const KnownMap& known) {
  SituationConditions c;
  const Tile here = known.under_rogue();
  c.on_corridor = here == Tile::Corridor || here == Tile::Door;
  c.stairs_visible = known.stairs_known();
  const Pos p = known.rogue_pos;
  for (const Pos q : {Pos{p.row - 1, p.col}, Pos{p.row + 1, p.col}, Pos{p.row, p.col - 1},
                      Pos{p.row, p.col + 1}}) {
    if (is_wall(known.grid.at_or_void(q))) c.next_to_wall = true;
  }
  return c;
}

SituationId classify(const KnownMap& known, const SituationConfig& config) {
  const SituationConditions c = evaluate_conditions(known);
  if (c.on_corridor && config.is_active(1)) return 1;
  if (c.stairs_visible && config.is_active(2)) return 2;
  if (c.next_to_wall && config.is_active(3)) return 3;
  return 4;
}

}  // namespace pa3c

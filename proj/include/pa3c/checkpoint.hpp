#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "pa3c/network.hpp"
#include "pa3c/observation.hpp"
#include "pa3c/situations.hpp"

namespace pa3c {

// On-disk layout, all integers and floats little-endian:
//   "PA3C"  u32 version  i64 global_step
//   str situations  str encoding        (str = u32 length + bytes)
//   u32 input_channels conv1 conv2 dense lstm
//   u32 situation_count, then per situation:
//     u32 id  u32 entry_count
//     entry: str name  u32 rank  u32 dims[rank]  f32 data[prod(dims)]
// Parameter entries use the layout names; optimizer state is stored as
// "rms/<name>" entries after them.
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  struct Slot {
    SituationId situation = 4;
    Eigen::VectorXf params;
    Eigen::VectorXf mean_square;

    friend bool operator==(const Slot&, const Slot&) = default;
  };

  SituationConfig situations;
  Encoding encoding = Encoding::C1;
  NetworkSpec spec;
  std::int64_t global_step = 0;
  std::vector<Slot> slots;

  const Slot& slot(SituationId id) const;
};

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
// Throws CheckpointError on a truncated or inconsistent stream.
Checkpoint read_checkpoint(std::istream& in);

// Writes atomically through a temporary file. Throws CheckpointError.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace pa3c

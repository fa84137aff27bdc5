#include "pa3c/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "pa3c/errors.hpp"

namespace pa3c {

namespace {

constexpr char kMagic[4] = {'P', 'A', '3', 'C'};
constexpr std::uint32_t kMaxName = 256;

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::is_integral_v<T>);
  using U = std::make_unsigned_t<T>;
  U u = static_cast<U>(value);
  char bytes[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bytes[i] = static_cast<char>(u & 0xFF);
    u = static_cast<U>(u >> 8);
  }
  out.write(bytes, sizeof(T));
}

void put_f32(std::ostream& out, float f) { put_le(out, std::bit_cast<std::uint32_t>(f)); }

void put_str(std::ostream& out, const std::string& s) {
  put_le(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void put_entry(std::ostream& out, const std::string& name, const std::vector<int>& shape,
               const float* data, std::size_t size) {
  put_str(out, name);
  put_le(out, static_cast<std::uint32_t>(shape.size()));
  for (int d : shape) put_le(out, static_cast<std::uint32_t>(d));
  for (std::size_t i = 0; i < size; ++i) put_f32(out, data[i]);
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  template <typename T>
  T le() {
    unsigned char bytes[sizeof(T)];
    read(bytes, sizeof(T));
    std::make_unsigned_t<T> u = 0;
    for (std::size_t i = sizeof(T); i-- > 0;) u = static_cast<decltype(u)>((u << 8) | bytes[i]);
    return static_cast<T>(u);
  }

  float f32() { return std::bit_cast<float>(le<std::uint32_t>()); }

  std::string str() {
    const auto n = le<std::uint32_t>();
    if (n > kMaxName) throw CheckpointError("checkpoint string too long");
    std::string s(n, '\0');
    read(s.data(), n);
    return s;
  }

  void read(void* dst, std::size_t n) {
    in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) throw CheckpointError("checkpoint truncated");
  }

 private:
  std::istream& in_;
};

void read_entry(Reader& r, const ParamEntry& expected, const std::string& name, float* dst) {
  const std::string got = r.str();
  if (got != name) throw CheckpointError("expected entry '" + name + "', found '" + got + "'");
  const auto rank = r.le<std::uint32_t>();
  if (rank != expected.shape.size()) throw CheckpointError("rank mismatch for '" + name + "'");
  for (int d : expected.shape) {
    if (r.le<std::uint32_t>() != static_cast<std::uint32_t>(d)) {
      throw CheckpointError("shape mismatch for '" + name + "'");
    }
  }
  for (std::size_t i = 0; i < expected.size; ++i) dst[i] = r.f32();
}

}  // namespace

const Checkpoint::Slot& Checkpoint::slot(SituationId id) const {
  for (const Slot& s : slots) {
    if (s.situation == id) return s;
  }
  throw CheckpointError("checkpoint has no network for situation " + std::to_string(id));
}

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  const ParamLayout layout(ckpt.spec);
  out.write(kMagic, 4);
  put_le(out, kCheckpointVersion);
  put_le(out, ckpt.global_step);
  put_str(out, std::string(ckpt.situations.label()));
  put_str(out, std::string(to_string(ckpt.encoding)));
  for (int v : {ckpt.spec.input_channels, ckpt.spec.conv1_filters, ckpt.spec.conv2_filters,
                ckpt.spec.dense_units, ckpt.spec.lstm_units}) {
    put_le(out, static_cast<std::uint32_t>(v));
  }
  put_le(out, static_cast<std::uint32_t>(ckpt.slots.size()));
  for (const Checkpoint::Slot& slot : ckpt.slots) {
    if (static_cast<std::size_t>(slot.params.size()) != layout.total_size() ||
        static_cast<std::size_t>(slot.mean_square.size()) != layout.total_size()) {
      throw CheckpointError("slot size does not match the network layout");
    }
    put_le(out, static_cast<std::uint32_t>(slot.situation));
    put_le(out, static_cast<std::uint32_t>(2 * layout.entries().size()));
    for (const ParamEntry& e : layout.entries()) {
      put_entry(out, e.name, e.shape, slot.params.data() + e.offset, e.size);
    }
    for (const ParamEntry& e : layout.entries()) {
      put_entry(out, "rms/" + e.name, e.shape, slot.mean_square.data() + e.offset, e.size);
    }
  }
}

Checkpoint read_checkpoint(std::istream& in) {
  Reader r(in);
  char magic[4];
  r.read(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) throw CheckpointError("not a PA3C checkpoint");
  const auto version = r.le<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ckpt;
  ckpt.global_step = r.le<std::int64_t>();
  try {
    ckpt.situations = SituationConfig::from_name(r.str());
    ckpt.encoding = parse_encoding(r.str());
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(std::string("bad checkpoint header: ") + e.what());
  }
  ckpt.spec.input_channels = static_cast<int>(r.le<std::uint32_t>());
  ckpt.spec.conv1_filters = static_cast<int>(r.le<std::uint32_t>());
  ckpt.spec.conv2_filters = static_cast<int>(r.le<std::uint32_t>());
  ckpt.spec.dense_units = static_cast<int>(r.le<std::uint32_t>());
  ckpt.spec.lstm_units = static_cast<int>(r.le<std::uint32_t>());
  if (ckpt.spec.input_channels != channels(ckpt.encoding)) {
    throw CheckpointError("input channels disagree with the encoding");
  }
  for (int v : {ckpt.spec.conv1_filters, ckpt.spec.conv2_filters, ckpt.spec.dense_units,
                ckpt.spec.lstm_units}) {
    if (v < 1 || v > 4096) throw CheckpointError("implausible layer width in checkpoint");
  }
  const ParamLayout layout(ckpt.spec);

  const auto count = r.le<std::uint32_t>();
  const auto active = ckpt.situations.active_set();
  if (count != active.size()) throw CheckpointError("situation count does not match configuration");
  for (std::uint32_t s = 0; s < count; ++s) {
    Checkpoint::Slot slot;
    slot.situation = static_cast<SituationId>(r.le<std::uint32_t>());
    if (!ckpt.situations.is_active(slot.situation)) {
      throw CheckpointError("unexpected situation id " + std::to_string(slot.situation));
    }
    if (r.le<std::uint32_t>() != 2 * layout.entries().size()) {
      throw CheckpointError("unexpected entry count");
    }
    slot.params.resize(static_cast<Eigen::Index>(layout.total_size()));
    slot.mean_square.resize(static_cast<Eigen::Index>(layout.total_size()));
    for (const ParamEntry& e : layout.entries()) {
      read_entry(r, e, e.name, slot.params.data() + e.offset);
    }
    for (const ParamEntry& e : layout.entries()) {
      read_entry(r, e, "rms/" + e.name, slot.mean_square.data() + e.offset);
    }
    ckpt.slots.push_back(std::move(slot));
  }
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot open " + tmp.string() + " for writing");
    write_checkpoint(out, ckpt);
    out.flush();
    if (!out) throw CheckpointError("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw CheckpointError("cannot move checkpoint into place: " + ec.message());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  return read_checkpoint(in);
}

}  // namespace pa3c

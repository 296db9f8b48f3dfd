#include "sodta/checkpoint.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace sodta {

namespace {

constexpr std::array<char, 4> kMagic = {'S', 'D', 'G', 'A'};
// guards against absurd lengths from corrupted files
constexpr std::uint64_t kMaxLength = std::uint64_t{1} << 40;

template <typename T>
void put(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<unsigned char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes;
  in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T));
  if (in.gcount() != static_cast<std::streamsize>(sizeof(T))) throw CheckpointError("truncated checkpoint");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

void put_array(std::ostream& out, const std::vector<double>& v) {
  put<std::uint64_t>(out, v.size());
  for (double d : v) put<double>(out, d);
}

std::vector<double> get_array(std::istream& in) {
  const auto n = get<std::uint64_t>(in);
  if (n > kMaxLength) throw CheckpointError("corrupt array length in checkpoint");
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(n, 1 << 20)));
  for (std::uint64_t i = 0; i < n; ++i) v.push_back(get<double>(in));
  return v;
}

}  // namespace

void write_checkpoint(std::ostream& out, const IterationState& state) {
  if (state.subs.empty()) throw CheckpointError("empty state: no sub-problems to checkpoint");
  out.write(kMagic.data(), kMagic.size());
  put<std::uint16_t>(out, kCheckpointVersion);
  put<std::uint64_t>(out, state.k);
  put<std::uint64_t>(out, state.subs.size());
  for (const auto& s : state.subs) {
    put<std::uint8_t>(out, s.frozen ? 1 : 0);
    put<double>(out, s.disagreement);
    put<double>(out, s.objective);
    put_array(out, s.values);
    put_array(out, s.workspace.row_duals);
    put_array(out, s.workspace.bound_duals);
  }
  if (!out) throw CheckpointError("failed writing checkpoint");
}

IterationState read_checkpoint(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (in.gcount() != static_cast<std::streamsize>(magic.size())) throw CheckpointError("truncated checkpoint");
  if (magic != kMagic) throw CheckpointError("version mismatch: not an SDGA checkpoint");
  const auto version = get<std::uint16_t>(in);
  if (version != kCheckpointVersion) {
    throw CheckpointError("version mismatch: checkpoint format " + std::to_string(version) + ", expected " +
                          std::to_string(kCheckpointVersion));
  }
  IterationState state;
  state.k = static_cast<std::size_t>(get<std::uint64_t>(in));
  const auto n = get<std::uint64_t>(in);
  if (n == 0) throw CheckpointError("empty state: checkpoint has no sub-problems");
  if (n > kMaxLength) throw CheckpointError("corrupt sub-problem count in checkpoint");
  for (std::uint64_t s = 0; s < n; ++s) {
    SubproblemState ss;
    const auto flag = get<std::uint8_t>(in);
    if (flag > 1) throw CheckpointError("corrupt frozen flag in checkpoint");
    ss.frozen = flag == 1;
    ss.disagreement = get<double>(in);
    ss.objective = get<double>(in);
    ss.values = get_array(in);
    ss.workspace.row_duals = get_array(in);
    ss.workspace.bound_duals = get_array(in);
    state.subs.push_back(std::move(ss));
  }
  if (in.peek() != std::char_traits<char>::eof()) throw CheckpointError("trailing bytes after checkpoint");
  return state;
}

void save_checkpoint(const std::filesystem::path& path, const IterationState& state) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot write checkpoint " + path.string());
  write_checkpoint(out, state);
}

IterationState load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  return read_checkpoint(in);
}

}  // namespace sodta

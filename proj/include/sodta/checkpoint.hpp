#ifndef SODTA_CHECKPOINT_HPP_
#define SODTA_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>

#include "sodta/dga.hpp"

namespace sodta {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint16_t kCheckpointVersion = 1;

/// Binary layout, little-endian throughout:
///   "SDGA" u16 version u64 k u64 num_subproblems
///   per sub-problem: u8 frozen, f64 disagreement, f64 objective,
///   then values, row_duals, bound_duals as (u64 length, f64[length]).
void write_checkpoint(std::ostream& out, const IterationState& state);
IterationState read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const IterationState& state);
IterationState load_checkpoint(const std::filesystem::path& path);

}  // namespace sodta

#endif  // SODTA_CHECKPOINT_HPP_

#ifndef SODTA_LAYOUT_HPP_
#define SODTA_LAYOUT_HPP_

#include <cstddef>

#include "sodta/network.hpp"

namespace sodta {

enum class VarKind { Occupancy, Flow };

struct VarCoord {
  VarKind kind = VarKind::Occupancy;
  int entity = 0;  // cell for occupancy, link for flow
  int t = 0;
  int od = 0;
};

/// Canonical flat index space of the central problem: all occupancy
/// variables x[cell][t][od] first, then all flow variables y[link][t][od].
class VariableLayout {
 public:
  VariableLayout() = default;
  explicit VariableLayout(const Network& network)
      : cells_(network.num_cells()),
        links_(network.num_links()),
        slots_(static_cast<std::size_t>(network.horizon())),
        steps_(static_cast<std::size_t>(network.flow_steps())),
        ods_(network.num_ods()) {}

  std::size_t occupancy(int cell, int t, int od) const {
    return (static_cast<std::size_t>(cell) * slots_ + static_cast<std::size_t>(t)) * ods_ +
           static_cast<std::size_t>(od);
  }
  std::size_t flow(int link, int t, int od) const {
    return num_occupancy() +
           (static_cast<std::size_t>(link) * steps_ + static_cast<std::size_t>(t)) * ods_ +
           static_cast<std::size_t>(od);
  }
  std::size_t num_occupancy() const { return cells_ * slots_ * ods_; }
  std::size_t num_flow() const { return links_ * steps_ * ods_; }
  std::size_t size() const { return num_occupancy() + num_flow(); }
  bool is_flow(std::size_t index) const { return index >= num_occupancy(); }

  VarCoord decode(std::size_t index) const {
    VarCoord c;
    const std::size_t per = is_flow(index) ? steps_ : slots_;
    if (is_flow(index)) {
      c.kind = VarKind::Flow;
      index -= num_occupancy();
    }
    c.od = static_cast<int>(index % ods_);
    index /= ods_;
    c.t = static_cast<int>(index % per);
    c.entity = static_cast<int>(index / per);
    return c;
  }

 private:
  std::size_t cells_ = 0, links_ = 0, slots_ = 0, steps_ = 0, ods_ = 0;
};

}  // namespace sodta

#endif  // SODTA_LAYOUT_HPP_

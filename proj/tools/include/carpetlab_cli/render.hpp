// SVG figures of level sets.

#ifndef CARPETLAB_CLI_RENDER_HPP_
#define CARPETLAB_CLI_RENDER_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "carpetlab/systems.hpp"

namespace carpetlab::cli {

inline constexpr std::size_t kMaxRenderBoxes = 100000;

// Unit-square viewport with E_n filled and holes outlined. Sponges are drawn
// as three projections (xy, yz, zx) side by side.
std::string render_levelset(const LevelSet& level_set,
                            const std::vector<Box>& holes = {},
                            std::size_t max_boxes = kMaxRenderBoxes);

}  // namespace carpetlab::cli

#endif  // CARPETLAB_CLI_RENDER_HPP_

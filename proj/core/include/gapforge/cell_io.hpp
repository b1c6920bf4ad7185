#pragma once

// JSON round-trip for cells and design targets.
//
// Cell schema:
//   {
//     "inclusions": [
//       {"kind": "rect", "center": [x, y], "half_extents": [hx, hy]},
//       {"kind": "disk", "center": [x, y], "radius": r}
//     ],
//     "strengths": [q_1, ...]
//   }
//
// Targets schema:
//   {"gaps": [[A_1, B_1], [A_2, B_2], ...]}
//
// Serialization uses shortest round-trip floats, so write(parse(write(c)))
// is byte-identical to write(c) for finite doubles.

#include <filesystem>
#include <string>

#include "gapforge/cell_geometry.hpp"
#include "gapforge/gap_algebra.hpp"

namespace gapforge::io {

std::string write_cell(const geom::CellSpec& cell);
geom::CellSpec parse_cell(const std::string& text);

void write_cell_file(const std::filesystem::path& path, const geom::CellSpec& cell);
geom::CellSpec read_cell_file(const std::filesystem::path& path);

alg::TargetGaps parse_targets(const std::string& text);
alg::TargetGaps read_targets_file(const std::filesystem::path& path);

/// Reads an entire file; throws ValidationError if it cannot be opened.
std::string slurp(const std::filesystem::path& path);
/// Writes text to a file; throws ValidationError on failure.
void spill(const std::filesystem::path& path, const std::string& text);

} // namespace gapforge::io

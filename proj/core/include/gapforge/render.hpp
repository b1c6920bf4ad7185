#pragma once

// CSV and SVG renderers for the toolkit's result tables.  Every float goes
// through format_double, so identical inputs give byte-identical files.

#include <string>
#include <vector>

#include "gapforge/cell_geometry.hpp"
#include "gapforge/gap_algebra.hpp"
#include "gapforge/spectra_lab.hpp"

namespace gapforge::io {

/// Columns: j, A_j, B_j_bisection, B_j_matrix, abs_diff.
std::string render_forward_csv(const std::vector<double>& poles,
                               const std::vector<double>& roots_bisection,
                               const std::vector<double>& roots_matrix);

/// Columns: j, A_target, B_target, b_j, q_j, A_realized.
std::string render_design_summary_csv(const alg::TargetGaps& targets,
                                      const alg::DesignParams& params,
                                      const geom::CellSpec& cell,
                                      const std::vector<double>& realized_rates);

/// Columns: eps, k, mode, lambda, limit, abs_err, mesh_margin.
std::string render_verify_csv(const lab::ConvergenceReport& report);

/// Human-readable verdict lines, one per tracked eigenvalue.
std::string render_verify_verdicts(const lab::ConvergenceReport& report);

/// Columns: phi_i, phi_1, phi_2, mode, k, lambda; rows sorted by
/// (mode, phi_i, k).  All rows are quasi-mode samples.
std::string render_bands_csv(const std::vector<lab::PhiSample>& samples);

/// Band diagram along (0,0) -> (pi,0) -> (pi,pi) -> (0,0): one polyline per
/// band, horizontal dashed lines at each limit edge A_j (lower) and B_j.
std::string render_band_svg(const std::vector<lab::PhiSample>& path, int bands,
                            const std::vector<double>& lower_edges,
                            const std::vector<double>& upper_edges);

} // namespace gapforge::io

#pragma once

// Concrete unit-cell realizations on Y = (0,1)^2: the inclusion shape
// catalog, exact measures, validity diagnostics, and the design-to-geometry
// step that turns (a_j, b_j) into placed shapes with matching strengths.

#include <array>
#include <string>
#include <vector>

#include "gapforge/gap_algebra.hpp"

namespace gapforge::geom {

enum class ShapeKind { Rect, Disk };

/// Axis-aligned rectangle or disk, strictly inside the open unit cell.
struct InclusionShape {
    ShapeKind kind = ShapeKind::Rect;
    std::array<double, 2> center{0.5, 0.5};
    std::array<double, 2> half_extents{0.0, 0.0}; ///< rect only
    double radius = 0.0;                          ///< disk only

    static InclusionShape rect(double cx, double cy, double hx, double hy);
    static InclusionShape disk(double cx, double cy, double r);
    /// Throws ValidationError if degenerate or not strictly inside Y.
    void validate() const;
};

/// Unit cell contents: inclusions Omega_1..Omega_m with strengths q_j.
/// The matrix component Omega_0 is the complement inside Y.
struct CellSpec {
    std::vector<InclusionShape> inclusions;
    std::vector<double> strengths;

    std::size_t size() const { return inclusions.size(); }
};

struct Measure {
    double volume = 0.0;       ///< area
    double surface_area = 0.0; ///< perimeter
};

/// Exact closed-form area and perimeter.
Measure measure(const InclusionShape& shape);

/// Placement policy for realize_design: a single horizontal row of squares
/// with equal gaps, vertically centered.
struct LayoutPolicy {
    double margin = 0.02; ///< clearance to the cell boundary and between shapes
};

/// Realizes a design as square inclusions with |Omega_j| = b_j exactly and
/// q_j = (a_j/b_j) |Omega_j| / |boundary_j|, so the realized coupling rates
/// reproduce A_j = a_j/b_j.  Throws LayoutError when the row does not fit
/// with the policy margin.
CellSpec realize_design(const alg::DesignParams& params, const LayoutPolicy& policy = {});

struct CellDiagnostics {
    bool valid = false;
    std::vector<std::string> violations; ///< empty iff valid
    std::vector<Measure> measures;       ///< per inclusion
    double matrix_volume = 0.0;          ///< |Omega_0| = 1 - sum |Omega_j|
    double containment_margin = 0.0;     ///< min distance of any shape to dY
    double disjointness_margin = 0.0;    ///< min pairwise gap (inf for m <= 1)
    std::vector<double> rates;           ///< realized A_j in inclusion order
    bool rates_strictly_increasing = false;
};

/// Diagnostic sweep over the cell invariants; never throws on bad cells,
/// the report carries the verdict.
CellDiagnostics validate_cell(const CellSpec& cell);

struct GridAlignResult {
    CellSpec cell;
    bool changed = false;
    double max_edge_shift = 0.0;       ///< largest edge move, absolute
    std::vector<double> rate_delta;    ///< realized A_j minus input A_j
    std::vector<Measure> new_measures; ///< snapped measures per inclusion
};

/// Snaps every rectangle edge to the nearest multiple of h = 1/N.
/// Rectangles only.  Throws LayoutError when snapping collapses a shape,
/// merges two shapes, or pushes one against the cell boundary.  Idempotent:
/// aligning an aligned cell is a no-op.
GridAlignResult grid_align(const CellSpec& cell, int resolution);

/// Whether every rectangle edge already lies on the h = 1/N grid.
bool is_grid_aligned(const CellSpec& cell, int resolution, double tol = 1e-12);

/// Euclidean gap between the closures of two shapes (0 if they touch or
/// overlap).
double shape_gap(const InclusionShape& a, const InclusionShape& b);

/// Distance from the shape's closure to the cell boundary (negative if it
/// sticks out).
double boundary_clearance(const InclusionShape& shape);

} // namespace gapforge::geom

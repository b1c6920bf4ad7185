#include "gapforge/cell_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "gapforge/errors.hpp"

namespace gapforge::geom {

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw ValidationError(message);
}

double snap(double x, double h) { return std::round(x / h) * h; }

} // namespace

InclusionShape InclusionShape::rect(double cx, double cy, double hx, double hy) {
    InclusionShape s;
    s.kind = ShapeKind::Rect;
    s.center = {cx, cy};
    s.half_extents = {hx, hy};
    s.validate();
    return s;
}

InclusionShape InclusionShape::disk(double cx, double cy, double r) {
    InclusionShape s;
    s.kind = ShapeKind::Disk;
    s.center = {cx, cy};
    s.radius = r;
    s.validate();
    return s;
}

void InclusionShape::validate() const {
    require(std::isfinite(center[0]) && std::isfinite(center[1]), "shape: center must be finite");
    if (kind == ShapeKind::Rect) {
        require(std::isfinite(half_extents[0]) && half_extents[0] > 0.0 &&
                    std::isfinite(half_extents[1]) && half_extents[1] > 0.0,
                "shape: rectangle half-extents must be positive");
    } else {
        require(std::isfinite(radius) && radius > 0.0, "shape: disk radius must be positive");
    }
    require(boundary_clearance(*this) > 0.0,
            "shape: closure must lie strictly inside the unit cell");
}

Measure measure(const InclusionShape& shape) {
    shape.validate();
    Measure m;
    if (shape.kind == ShapeKind::Rect) {
        m.volume = 4.0 * shape.half_extents[0] * shape.half_extents[1];
        m.surface_area = 4.0 * (shape.half_extents[0] + shape.half_extents[1]);
    } else {
        m.volume = std::numbers::pi * shape.radius * shape.radius;
        m.surface_area = 2.0 * std::numbers::pi * shape.radius;
    }
    return m;
}

double boundary_clearance(const InclusionShape& shape) {
    double hx, hy;
    if (shape.kind == ShapeKind::Rect) {
        hx = shape.half_extents[0];
        hy = shape.half_extents[1];
    } else {
        hx = hy = shape.radius;
    }
    const double left = shape.center[0] - hx;
    const double right = 1.0 - (shape.center[0] + hx);
    const double bottom = shape.center[1] - hy;
    const double top = 1.0 - (shape.center[1] + hy);
    return std::min(std::min(left, right), std::min(bottom, top));
}

double shape_gap(const InclusionShape& a, const InclusionShape& b) {
    const double dcx = std::abs(a.center[0] - b.center[0]);
    const double dcy = std::abs(a.center[1] - b.center[1]);

    if (a.kind == ShapeKind::Disk && b.kind == ShapeKind::Disk)
        return std::hypot(dcx, dcy) - a.radius - b.radius;

    if (a.kind == ShapeKind::Rect && b.kind == ShapeKind::Rect) {
        const double sx = dcx - (a.half_extents[0] + b.half_extents[0]);
        const double sy = dcy - (a.half_extents[1] + b.half_extents[1]);
        if (sx <= 0.0 && sy <= 0.0) return std::max(sx, sy); // overlap depth
        return std::hypot(std::max(sx, 0.0), std::max(sy, 0.0));
    }

    const InclusionShape& rect = (a.kind == ShapeKind::Rect) ? a : b;
    const InclusionShape& disk = (a.kind == ShapeKind::Rect) ? b : a;
    const double ex = std::abs(disk.center[0] - rect.center[0]) - rect.half_extents[0];
    const double ey = std::abs(disk.center[1] - rect.center[1]) - rect.half_extents[1];
    if (ex <= 0.0 && ey <= 0.0) return std::max(ex, ey) - disk.radius;
    return std::hypot(std::max(ex, 0.0), std::max(ey, 0.0)) - disk.radius;
}

CellSpec realize_design(const alg::DesignParams& params, const LayoutPolicy& policy) {
    params.validate();
    require(policy.margin > 0.0, "layout: margin must be positive");

    const std::size_t m = params.size();
    std::vector<double> side(m);
    double row_width = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        side[j] = std::sqrt(params.b[j]);
        row_width += side[j];
    }

    const double gap = (1.0 - row_width) / static_cast<double>(m + 1);
    const double tallest = *std::max_element(side.begin(), side.end());
    if (gap < policy.margin || 0.5 * (1.0 - tallest) < policy.margin) {
        std::ostringstream msg;
        msg << "layout: " << m << " squares with total side " << row_width
            << " do not fit in a row with margin " << policy.margin
            << "; shrink the volume fractions or use a different policy";
        throw LayoutError(msg.str());
    }

    CellSpec cell;
    cell.inclusions.reserve(m);
    cell.strengths.reserve(m);
    double cursor = gap;
    for (std::size_t j = 0; j < m; ++j) {
        const double half = 0.5 * side[j];
        cell.inclusions.push_back(InclusionShape::rect(cursor + half, 0.5, half, half));
        cursor += side[j] + gap;
        const Measure meas = measure(cell.inclusions.back());
        // q_j = A_j |Omega_j| / |boundary_j| makes coupling_rate return
        // exactly a_j / b_j again.
        cell.strengths.push_back((params.a[j] / params.b[j]) * meas.volume / meas.surface_area);
    }
    return cell;
}

CellDiagnostics validate_cell(const CellSpec& cell) {
    CellDiagnostics diag;
    diag.containment_margin = std::numeric_limits<double>::infinity();
    diag.disjointness_margin = std::numeric_limits<double>::infinity();

    if (cell.inclusions.size() != cell.strengths.size()) {
        diag.violations.push_back("one strength per inclusion required");
        return diag;
    }

    double vol_sum = 0.0;
    for (std::size_t j = 0; j < cell.size(); ++j) {
        const auto& shape = cell.inclusions[j];
        try {
            shape.validate();
        } catch (const ValidationError& err) {
            diag.violations.push_back("inclusion " + std::to_string(j) + ": " + err.what());
            continue;
        }
        const Measure meas = measure(shape);
        diag.measures.push_back(meas);
        vol_sum += meas.volume;
        diag.containment_margin = std::min(diag.containment_margin, boundary_clearance(shape));
        if (!(std::isfinite(cell.strengths[j]) && cell.strengths[j] > 0.0))
            diag.violations.push_back("strength " + std::to_string(j) + " must be positive");
    }

    for (std::size_t i = 0; i < cell.size(); ++i) {
        for (std::size_t j = i + 1; j < cell.size(); ++j) {
            const double g = shape_gap(cell.inclusions[i], cell.inclusions[j]);
            diag.disjointness_margin = std::min(diag.disjointness_margin, g);
            if (g <= 0.0)
                diag.violations.push_back("inclusions " + std::to_string(i) + " and " +
                                          std::to_string(j) + " are not disjoint");
        }
    }

    diag.matrix_volume = 1.0 - vol_sum;
    if (!(diag.matrix_volume > 0.0))
        diag.violations.push_back("inclusion volumes must sum below 1");

    if (diag.measures.size() == cell.size() && diag.violations.empty()) {
        diag.rates.resize(cell.size());
        for (std::size_t j = 0; j < cell.size(); ++j)
            diag.rates[j] = alg::coupling_rate(cell.strengths[j], diag.measures[j].surface_area,
                                               diag.measures[j].volume);
        diag.rates_strictly_increasing = true;
        for (std::size_t j = 1; j < diag.rates.size(); ++j) {
            if (diag.rates[j] - diag.rates[j - 1] <= 1e-10 * std::abs(diag.rates[j])) {
                diag.rates_strictly_increasing = false;
                break;
            }
        }
    }

    diag.valid = diag.violations.empty();
    return diag;
}

GridAlignResult grid_align(const CellSpec& cell, int resolution) {
    require(resolution >= 2, "grid align: resolution must be at least 2");
    const CellDiagnostics before = validate_cell(cell);
    require(before.valid, "grid align: cell is invalid: " +
                              (before.violations.empty() ? std::string("unknown")
                                                         : before.violations.front()));
    for (const auto& shape : cell.inclusions)
        require(shape.kind == ShapeKind::Rect, "grid align: rectangle inclusions only");

    const double h = 1.0 / resolution;
    GridAlignResult result;
    result.cell.strengths = cell.strengths;
    result.cell.inclusions.reserve(cell.size());

    for (std::size_t j = 0; j < cell.size(); ++j) {
        const auto& shape = cell.inclusions[j];
        const double left = snap(shape.center[0] - shape.half_extents[0], h);
        const double right = snap(shape.center[0] + shape.half_extents[0], h);
        const double bottom = snap(shape.center[1] - shape.half_extents[1], h);
        const double top = snap(shape.center[1] + shape.half_extents[1], h);

        if (right - left < 0.5 * h || top - bottom < 0.5 * h)
            throw LayoutError("grid align: inclusion " + std::to_string(j) +
                              " collapses at resolution " + std::to_string(resolution));
        if (left < 0.5 * h || right > 1.0 - 0.5 * h || bottom < 0.5 * h || top > 1.0 - 0.5 * h)
            throw LayoutError("grid align: inclusion " + std::to_string(j) +
                              " snaps onto the cell boundary at resolution " +
                              std::to_string(resolution));

        InclusionShape snapped;
        snapped.kind = ShapeKind::Rect;
        snapped.center = {0.5 * (left + right), 0.5 * (bottom + top)};
        snapped.half_extents = {0.5 * (right - left), 0.5 * (top - bottom)};

        for (double shift : {std::abs(left - (shape.center[0] - shape.half_extents[0])),
                             std::abs(right - (shape.center[0] + shape.half_extents[0])),
                             std::abs(bottom - (shape.center[1] - shape.half_extents[1])),
                             std::abs(top - (shape.center[1] + shape.half_extents[1]))})
            result.max_edge_shift = std::max(result.max_edge_shift, shift);

        result.cell.inclusions.push_back(snapped);
    }

    for (std::size_t i = 0; i < result.cell.size(); ++i) {
        for (std::size_t j = i + 1; j < result.cell.size(); ++j) {
            if (shape_gap(result.cell.inclusions[i], result.cell.inclusions[j]) < 0.5 * h)
                throw LayoutError("grid align: inclusions " + std::to_string(i) + " and " +
                                  std::to_string(j) + " merge at resolution " +
                                  std::to_string(resolution));
        }
    }

    result.rate_delta.resize(cell.size());
    result.new_measures.resize(cell.size());
    for (std::size_t j = 0; j < cell.size(); ++j) {
        result.new_measures[j] = measure(result.cell.inclusions[j]);
        const double new_rate =
            alg::coupling_rate(cell.strengths[j], result.new_measures[j].surface_area,
                               result.new_measures[j].volume);
        result.rate_delta[j] = new_rate - before.rates[j];
    }
    result.changed = result.max_edge_shift > 0.0;
    return result;
}

bool is_grid_aligned(const CellSpec& cell, int resolution, double tol) {
    const double h = 1.0 / resolution;
    for (const auto& shape : cell.inclusions) {
        if (shape.kind != ShapeKind::Rect) return false;
        for (double edge : {shape.center[0] - shape.half_extents[0],
                            shape.center[0] + shape.half_extents[0],
                            shape.center[1] - shape.half_extents[1],
                            shape.center[1] + shape.half_extents[1]}) {
            if (std::abs(edge - snap(edge, h)) > tol) return false;
        }
    }
    return true;
}

} // namespace gapforge::geom

#include "gapforge/mesh.hpp"

#include <cmath>
#include <string>

#include "gapforge/errors.hpp"

namespace gapforge::fem {

namespace {

struct GridRect {
    int left, right, bottom, top; ///< grid-line indices, right > left
};

GridRect rect_indices(const geom::InclusionShape& shape, int n) {
    const double h = 1.0 / n;
    GridRect g;
    g.left = static_cast<int>(std::lround((shape.center[0] - shape.half_extents[0]) / h));
    g.right = static_cast<int>(std::lround((shape.center[0] + shape.half_extents[0]) / h));
    g.bottom = static_cast<int>(std::lround((shape.center[1] - shape.half_extents[1]) / h));
    g.top = static_cast<int>(std::lround((shape.center[1] + shape.half_extents[1]) / h));
    return g;
}

} // namespace

StructuredMesh build_mesh(const geom::CellSpec& cell, int resolution) {
    if (resolution < 2 || resolution > 4096)
        throw ValidationError("mesh: resolution out of range [2, 4096]");
    const auto diag = geom::validate_cell(cell);
    if (!diag.valid)
        throw ValidationError("mesh: invalid cell: " + diag.violations.front());
    for (const auto& shape : cell.inclusions) {
        if (shape.kind != geom::ShapeKind::Rect)
            throw ValidationError("mesh: the FEM path supports rectangle inclusions only");
    }
    if (!geom::is_grid_aligned(cell, resolution))
        throw ValidationError("mesh: cell is not aligned to the h = 1/" +
                              std::to_string(resolution) +
                              " grid; run grid_align at this resolution first");

    StructuredMesh mesh;
    mesh.resolution = resolution;
    mesh.h = 1.0 / resolution;
    mesh.cell = cell;
    mesh.element_label.assign(static_cast<std::size_t>(mesh.n_elements()), 0);

    for (std::size_t j = 0; j < cell.size(); ++j) {
        const GridRect g = rect_indices(cell.inclusions[j], resolution);
        for (int ey = g.bottom; ey < g.top; ++ey) {
            for (int ex = g.left; ex < g.right; ++ex) {
                auto& label = mesh.element_label[static_cast<std::size_t>(mesh.elem_id(ex, ey))];
                if (label != 0)
                    throw ValidationError("mesh: element claimed by two inclusions");
                label = static_cast<int>(j) + 1;
            }
        }

        // Boundary edges of the inclusion, counter-clockwise ranges.
        for (int ix = g.left; ix < g.right; ++ix) {
            mesh.interface_edges.push_back(
                {mesh.node_id(ix, g.bottom), mesh.node_id(ix + 1, g.bottom), static_cast<int>(j)});
            mesh.interface_edges.push_back(
                {mesh.node_id(ix, g.top), mesh.node_id(ix + 1, g.top), static_cast<int>(j)});
        }
        for (int iy = g.bottom; iy < g.top; ++iy) {
            mesh.interface_edges.push_back(
                {mesh.node_id(g.left, iy), mesh.node_id(g.left, iy + 1), static_cast<int>(j)});
            mesh.interface_edges.push_back(
                {mesh.node_id(g.right, iy), mesh.node_id(g.right, iy + 1), static_cast<int>(j)});
        }
    }
    return mesh;
}

DofMap build_dof_map(const StructuredMesh& mesh) {
    DofMap map;
    map.n_nodes = mesh.n_nodes();
    map.gamma_of_node.assign(static_cast<std::size_t>(map.n_nodes), -1);
    map.interior_dof.assign(static_cast<std::size_t>(map.n_nodes), -1);

    for (const auto& edge : mesh.interface_edges) {
        for (int node : {edge.node_a, edge.node_b}) {
            auto& owner = map.gamma_of_node[static_cast<std::size_t>(node)];
            if (owner != -1 && owner != edge.inclusion)
                throw ValidationError("dof map: node on two interfaces; inclusions touch");
            owner = edge.inclusion;
        }
    }

    int next = map.n_nodes;
    for (int node = 0; node < map.n_nodes; ++node) {
        if (map.gamma_of_node[static_cast<std::size_t>(node)] >= 0)
            map.interior_dof[static_cast<std::size_t>(node)] = next++;
    }
    map.n_broken = next;

    const int n = mesh.resolution;
    for (int iy = 0; iy <= n; ++iy) {
        for (int ix = 0; ix <= n; ++ix) {
            if (ix == 0 || iy == 0 || ix == n || iy == n)
                map.cell_boundary_nodes.push_back(mesh.node_id(ix, iy));
            if (ix == n || iy == n) {
                SlavePair pair;
                pair.slave_node = mesh.node_id(ix, iy);
                pair.master_node = mesh.node_id(ix == n ? 0 : ix, iy == n ? 0 : iy);
                pair.crossings_x = (ix == n) ? 1 : 0;
                pair.crossings_y = (iy == n) ? 1 : 0;
                map.slaves.push_back(pair);
            }
        }
    }
    return map;
}

std::array<int, 4> DofMap::element_dofs(const StructuredMesh& mesh, int element) const {
    const int label = mesh.element_label[static_cast<std::size_t>(element)];
    std::array<int, 4> dofs = mesh.element_nodes(element);
    if (label > 0) {
        for (auto& d : dofs) {
            // Inside inclusion label-1: nodes on its boundary switch to the
            // interior trace; strictly interior nodes keep their primary DOF.
            if (gamma_of_node[static_cast<std::size_t>(d)] == label - 1)
                d = interior_dof[static_cast<std::size_t>(d)];
        }
    }
    return dofs;
}

} // namespace gapforge::fem

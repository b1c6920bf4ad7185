#pragma once

// Structured quadrilateral discretization of Y = (0,1)^2 with the inclusion
// boundaries resolved exactly by mesh lines, and the broken degree-of-freedom
// numbering that duplicates every node sitting on an interface into an
// interior and an exterior trace.

#include <array>
#include <vector>

#include "gapforge/cell_geometry.hpp"

namespace gapforge::fem {

/// Mesh edge lying on the boundary of one inclusion.
struct InterfaceEdge {
    int node_a = -1; ///< endpoint node ids, a < b in node numbering
    int node_b = -1;
    int inclusion = -1;
};

/// Uniform N x N grid over the unit cell with subdomain labels per element.
/// Element corner order is SW, SE, NE, NW throughout.
struct StructuredMesh {
    int resolution = 0; ///< N, h = 1/N
    double h = 0.0;
    geom::CellSpec cell; ///< the aligned cell the labels refer to
    std::vector<int> element_label; ///< N*N entries, 0 = matrix, j+1 = inclusion j
    std::vector<InterfaceEdge> interface_edges;

    int n_nodes() const { return (resolution + 1) * (resolution + 1); }
    int n_elements() const { return resolution * resolution; }
    int node_id(int ix, int iy) const { return iy * (resolution + 1) + ix; }
    int elem_id(int ex, int ey) const { return ey * resolution + ex; }
    std::array<int, 4> element_nodes(int e) const {
        const int ex = e % resolution;
        const int ey = e / resolution;
        return {node_id(ex, ey), node_id(ex + 1, ey), node_id(ex + 1, ey + 1),
                node_id(ex, ey + 1)};
    }
    std::array<double, 2> node_xy(int n) const {
        const int stride = resolution + 1;
        return {h * (n % stride), h * (n / stride)};
    }
};

/// Builds the labeled mesh.  The cell must be rectangle-only and grid-aligned
/// at the requested resolution; otherwise a ValidationError points at
/// grid_align.
StructuredMesh build_mesh(const geom::CellSpec& cell, int resolution);

/// Identification of a boundary node with its master under quasi-periodic
/// conditions; crossings count how many times each period direction is
/// crossed (the corner crosses both).
struct SlavePair {
    int slave_node = -1;
    int master_node = -1;
    int crossings_x = 0;
    int crossings_y = 0;
};

/// Broken DOF numbering.  Every node owns the primary DOF with its own node
/// id; nodes on an interface own a second, interior-trace DOF numbered after
/// all primaries.  Elements inside inclusion j see the interior trace on
/// Gamma_j, elements in the matrix see the primary (exterior) one.
struct DofMap {
    int n_nodes = 0;
    int n_broken = 0; ///< n_nodes + number of interface nodes
    std::vector<int> gamma_of_node; ///< -1 off interfaces, else inclusion id
    std::vector<int> interior_dof;  ///< -1 or the duplicated DOF id
    std::vector<SlavePair> slaves;  ///< right/top boundary nodes
    std::vector<int> cell_boundary_nodes; ///< all nodes on dY

    /// DOF ids of an element's corners (SW, SE, NE, NW) with traces resolved
    /// by the element's subdomain label.
    std::array<int, 4> element_dofs(const StructuredMesh& mesh, int element) const;
};

DofMap build_dof_map(const StructuredMesh& mesh);

} // namespace gapforge::fem

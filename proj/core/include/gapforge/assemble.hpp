#pragma once

// Fiber forms on the broken FE space: H = (1/eps^2) * stiffness + interface
// jump terms, M = mass, with the cell-boundary condition applied by DOF
// reduction (nothing for Neumann, elimination for Dirichlet, phase-folding
// of slave DOFs for quasi-periodic).

#include <complex>
#include <filesystem>
#include <string>

#include <Eigen/SparseCore>

#include "gapforge/mesh.hpp"

namespace gapforge::fem {

enum class BCKind { Neumann, Dirichlet, Quasi };

struct BCMode {
    BCKind kind = BCKind::Neumann;
    double phi1 = 0.0; ///< quasi phases in [0, 2pi)
    double phi2 = 0.0;

    static BCMode neumann() { return {BCKind::Neumann, 0.0, 0.0}; }
    static BCMode dirichlet() { return {BCKind::Dirichlet, 0.0, 0.0}; }
    /// Phases wrap into [0, 2pi); pi passes through exactly.
    static BCMode quasi(double phi1, double phi2);

    /// True when every phase factor is +-1, so the system stays real.
    bool real_phases() const;
    std::string name() const; ///< "neumann" | "dirichlet" | "quasi"
};

struct AssembledSystem {
    int n = 0;
    bool real_valued = true;
    double eps = 1.0;
    BCMode mode;
    Eigen::SparseMatrix<double> H_real, M_real;
    Eigen::SparseMatrix<std::complex<double>> H_cplx, M_cplx;
};

/// Full fiber form on Y: all elements, plus q_j-weighted jump terms on every
/// interface edge.  `cell` supplies the strengths and must be the cell the
/// mesh was built from.
AssembledSystem assemble(const StructuredMesh& mesh, const DofMap& dofmap,
                         const geom::CellSpec& cell, double eps, BCMode mode);

/// Matrix-component form: only elements labeled Omega_0, natural (Neumann)
/// conditions on the interfaces, eps = 1, no jump terms.  Unreferenced DOFs
/// are pruned.  mode must be Quasi or Dirichlet.
AssembledSystem assemble_matrix_component(const StructuredMesh& mesh, const DofMap& dofmap,
                                          BCMode mode);

/// Coordinate-format dump "row col re im" (0-based), one header line
/// "# n n nnz", for external cross-checking.
void dump_system(const AssembledSystem& system, const std::filesystem::path& h_path,
                 const std::filesystem::path& m_path);

} // namespace gapforge::fem

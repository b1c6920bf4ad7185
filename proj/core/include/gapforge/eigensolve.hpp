#pragma once

// Smallest eigenpairs of H u = lambda M u for the assembled fiber systems.
// Shift-invert block subspace iteration at sigma = -1 (H + M is positive
// definite), with a dense fallback for small systems.  Deterministic: the
// start block comes from a fixed-seed generator.

#include <vector>

#include <Eigen/Dense>

#include "gapforge/assemble.hpp"

namespace gapforge::fem {

struct EigenSolveOptions {
    double tol = 1e-8;        ///< relative residual ||Hu - lambda Mu|| / ||Mu||
    int max_iterations = 400;
    int block_extra = 8;      ///< block size p = max(2k, k + block_extra)
    unsigned seed = 0x5eed;
    int dense_cutoff = 600;   ///< dense solve when n <= cutoff or p >= n/2
};

struct EigenSolveResult {
    std::vector<double> values;    ///< k smallest, ascending
    Eigen::MatrixXcd vectors;      ///< n x k, M-orthonormal
    std::vector<double> residuals; ///< per returned eigenpair
    int iterations = 0;
};

/// k smallest eigenvalues, ascending, each with relative residual <= tol.
/// Throws ValidationError if k exceeds the system size and NumericalError
/// (carrying the best residuals) if the iteration cap is hit.
EigenSolveResult solve_smallest(const AssembledSystem& system, int k,
                                const EigenSolveOptions& options = {});

/// Smallest eigenvalue of the matrix-component Laplacian on Omega_0 with
/// natural conditions on the interfaces: Lambda_phi for Quasi(phi) on dY,
/// Lambda_D for Dirichlet.  The cell must be grid-aligned at the resolution.
double lambda_phi(const geom::CellSpec& cell, BCMode mode, int resolution,
                  const EigenSolveOptions& options = {});

} // namespace gapforge::fem

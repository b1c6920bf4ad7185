#include "gapforge/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/SparseCholesky>

#include "gapforge/errors.hpp"

namespace gapforge::fem {

namespace {

using Complex = std::complex<double>;

template <typename Scalar>
using DenseMat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// Deterministic uniform in [-1, 1); independent of distribution internals.
double next_unit(std::mt19937& rng) {
    return static_cast<double>(rng()) * (2.0 / 4294967296.0) - 1.0;
}

template <typename Scalar>
Scalar random_entry(std::mt19937& rng);
template <>
double random_entry<double>(std::mt19937& rng) {
    return next_unit(rng);
}
template <>
Complex random_entry<Complex>(std::mt19937& rng) {
    const double re = next_unit(rng);
    const double im = next_unit(rng);
    return {re, im};
}

template <typename Scalar>
struct Outcome {
    Eigen::VectorXd values;
    DenseMat<Scalar> vectors;
    std::vector<double> residuals;
    int iterations = 0;
};

template <typename Scalar>
std::vector<double> pencil_residuals(const Eigen::SparseMatrix<Scalar>& H,
                                     const Eigen::SparseMatrix<Scalar>& M,
                                     const Eigen::VectorXd& values,
                                     const DenseMat<Scalar>& vectors) {
    std::vector<double> res(static_cast<std::size_t>(values.size()));
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        const auto x = vectors.col(i);
        const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> mx = M * x;
        const double denom = mx.norm();
        res[static_cast<std::size_t>(i)] = (H * x - values(i) * mx).norm() / denom;
    }
    return res;
}

// MGS with the M-inner product, two passes per column; near-null columns are
// replaced from the generator so the block keeps full rank.
template <typename Scalar>
void m_orthonormalize(DenseMat<Scalar>& X, const Eigen::SparseMatrix<Scalar>& M,
                      DenseMat<Scalar>& MX, std::mt19937& rng) {
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();
    MX.resize(n, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v = X.col(j);
        for (int attempt = 0;; ++attempt) {
            for (int pass = 0; pass < 2; ++pass) {
                for (Eigen::Index i = 0; i < j; ++i) {
                    const Scalar c = MX.col(i).dot(v);
                    v -= c * X.col(i);
                }
            }
            Eigen::Matrix<Scalar, Eigen::Dynamic, 1> mv = M * v;
            const double nrm = std::sqrt(std::abs(std::real(v.dot(mv))));
            if (nrm > 1e-14 * std::sqrt(static_cast<double>(n))) {
                X.col(j) = v / nrm;
                MX.col(j) = mv / nrm;
                break;
            }
            if (attempt >= 3)
                throw NumericalError("eigensolve: start block lost rank beyond repair");
            for (Eigen::Index r = 0; r < n; ++r) v(r) = random_entry<Scalar>(rng);
        }
    }
}

template <typename Scalar>
Outcome<Scalar> dense_solve(const Eigen::SparseMatrix<Scalar>& H,
                            const Eigen::SparseMatrix<Scalar>& M, int k) {
    const DenseMat<Scalar> Hd(H);
    const DenseMat<Scalar> Md(M);
    Eigen::GeneralizedSelfAdjointEigenSolver<DenseMat<Scalar>> solver(Hd, Md);
    if (solver.info() != Eigen::Success)
        throw NumericalError("eigensolve: dense generalized solver failed");
    Outcome<Scalar> out;
    out.values = solver.eigenvalues().head(k);
    out.vectors = solver.eigenvectors().leftCols(k);
    out.residuals = pencil_residuals(H, M, out.values, out.vectors);
    out.iterations = 0;
    return out;
}

template <typename Scalar>
Outcome<Scalar> subspace_solve(const Eigen::SparseMatrix<Scalar>& H,
                               const Eigen::SparseMatrix<Scalar>& M, int k,
                               const EigenSolveOptions& opts) {
    const Eigen::Index n = H.rows();
    const int p = std::min<int>(static_cast<int>(n), std::max(2 * k, k + opts.block_extra));
    if (n <= opts.dense_cutoff || 2 * p >= n) return dense_solve(H, M, k);

    // Shift -1 keeps the operator positive definite: H is PSD, M is PD.
    Eigen::SparseMatrix<Scalar> K = H + M;
    K.makeCompressed();
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<Scalar>> ldlt(K);
    if (ldlt.info() != Eigen::Success)
        throw NumericalError("eigensolve: factorization of the shifted operator failed");

    std::mt19937 rng(opts.seed);
    DenseMat<Scalar> X(n, p), MX(n, p);
    for (Eigen::Index c = 0; c < p; ++c)
        for (Eigen::Index r = 0; r < n; ++r) X(r, c) = random_entry<Scalar>(rng);
    m_orthonormalize(X, M, MX, rng);

    Outcome<Scalar> out;
    std::vector<double> res;
    for (int iter = 1; iter <= opts.max_iterations; ++iter) {
        X = ldlt.solve(MX);
        m_orthonormalize(X, M, MX, rng);

        const DenseMat<Scalar> HX = H * X;
        DenseMat<Scalar> Ap = X.adjoint() * HX;
        DenseMat<Scalar> Bp = X.adjoint() * MX;
        Ap = Scalar(0.5) * (Ap + Ap.adjoint()).eval();
        Bp = Scalar(0.5) * (Bp + Bp.adjoint()).eval();
        Eigen::GeneralizedSelfAdjointEigenSolver<DenseMat<Scalar>> small(Ap, Bp);
        if (small.info() != Eigen::Success)
            throw NumericalError("eigensolve: Rayleigh-Ritz projection failed");

        X = (X * small.eigenvectors()).eval();
        MX = (MX * small.eigenvectors()).eval();
        const Eigen::VectorXd ritz = small.eigenvalues();

        res.assign(static_cast<std::size_t>(k), 0.0);
        bool done = true;
        for (int i = 0; i < k; ++i) {
            const auto x = X.col(i);
            const auto mx = MX.col(i);
            res[static_cast<std::size_t>(i)] = (H * x - ritz(i) * mx).norm() / mx.norm();
            done = done && res[static_cast<std::size_t>(i)] <= opts.tol;
        }
        if (done) {
            out.values = ritz.head(k);
            out.vectors = X.leftCols(k);
            out.residuals = res;
            out.iterations = iter;
            return out;
        }
    }

    std::ostringstream msg;
    msg << "eigensolve: no convergence after " << opts.max_iterations
        << " iterations; residuals:";
    for (double r : res) msg << " " << r;
    throw NumericalError(msg.str());
}

template <typename Scalar>
EigenSolveResult run(const Eigen::SparseMatrix<Scalar>& H, const Eigen::SparseMatrix<Scalar>& M,
                     int k, const EigenSolveOptions& opts) {
    Outcome<Scalar> out = subspace_solve(H, M, k, opts);

    // Sanity on the pencil: eigenvalues must be essentially nonnegative.
    const double scale = std::max(1.0, std::abs(out.values(out.values.size() - 1)));
    if (out.values(0) < -opts.tol * scale)
        throw NumericalError("eigensolve: negative eigenvalue from a nonnegative form");

    EigenSolveResult result;
    result.values.assign(out.values.data(), out.values.data() + out.values.size());
    result.vectors = out.vectors.template cast<Complex>();
    result.residuals = out.residuals;
    result.iterations = out.iterations;
    return result;
}

} // namespace

EigenSolveResult solve_smallest(const AssembledSystem& system, int k,
                                const EigenSolveOptions& options) {
    if (k < 1) throw ValidationError("eigensolve: k must be at least 1");
    if (k > system.n)
        throw ValidationError("eigensolve: k exceeds the system size " +
                              std::to_string(system.n));
    if (!(options.tol > 0.0)) throw ValidationError("eigensolve: tol must be positive");

    if (system.real_valued) return run<double>(system.H_real, system.M_real, k, options);
    return run<Complex>(system.H_cplx, system.M_cplx, k, options);
}

double lambda_phi(const geom::CellSpec& cell, BCMode mode, int resolution,
                  const EigenSolveOptions& options) {
    const StructuredMesh mesh = build_mesh(cell, resolution);
    const DofMap dofmap = build_dof_map(mesh);
    const AssembledSystem sys = assemble_matrix_component(mesh, dofmap, mode);
    return solve_smallest(sys, 1, options).values.front();
}

} // namespace gapforge::fem

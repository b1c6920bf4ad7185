#include "gapforge/assemble.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <vector>

#include "gapforge/errors.hpp"
#include "gapforge/format.hpp"

namespace gapforge::fem {

namespace {

using Complex = std::complex<double>;

// Reference element matrices for bilinear quads on a square of side h,
// corner order SW, SE, NE, NW.  Stiffness is h-independent in 2D; mass
// carries h^2/36.
constexpr double kStiff[4][4] = {
    {4.0 / 6.0, -1.0 / 6.0, -2.0 / 6.0, -1.0 / 6.0},
    {-1.0 / 6.0, 4.0 / 6.0, -1.0 / 6.0, -2.0 / 6.0},
    {-2.0 / 6.0, -1.0 / 6.0, 4.0 / 6.0, -1.0 / 6.0},
    {-1.0 / 6.0, -2.0 / 6.0, -1.0 / 6.0, 4.0 / 6.0}};
constexpr double kMass[4][4] = {{4.0, 2.0, 1.0, 2.0},
                                {2.0, 4.0, 2.0, 1.0},
                                {1.0, 2.0, 4.0, 2.0},
                                {2.0, 1.0, 2.0, 4.0}};

// 1D linear mass on an edge of length h acting on the jump values at the two
// endpoints, expanded to (ext_a, int_a, ext_b, int_b).
constexpr double kJump[4][4] = {{2.0, -2.0, 1.0, -1.0},
                                {-2.0, 2.0, -1.0, 1.0},
                                {1.0, -1.0, 2.0, -2.0},
                                {-1.0, 1.0, -2.0, 2.0}};

struct Reduction {
    std::vector<int> index; ///< broken dof -> reduced dof, -1 eliminated
    std::vector<Complex> phase;
    int n = 0;
};

Complex phase_factor(double phi) {
    if (phi == 0.0) return {1.0, 0.0};
    if (phi == std::numbers::pi) return {-1.0, 0.0};
    return {std::cos(phi), std::sin(phi)};
}

// referenced == nullptr keeps every DOF; otherwise unreferenced DOFs are
// dropped from the numbering (slave references count toward the master).
Reduction build_reduction(const DofMap& dofmap, BCMode mode,
                          const std::vector<char>* referenced) {
    const auto nb = static_cast<std::size_t>(dofmap.n_broken);
    std::vector<char> keep(nb, referenced ? 0 : 1);
    if (referenced) keep = *referenced;

    std::vector<int> slave_of(nb, -1);
    if (mode.kind == BCKind::Quasi) {
        for (std::size_t s = 0; s < dofmap.slaves.size(); ++s) {
            const auto& pair = dofmap.slaves[s];
            slave_of[static_cast<std::size_t>(pair.slave_node)] = static_cast<int>(s);
            if (keep[static_cast<std::size_t>(pair.slave_node)])
                keep[static_cast<std::size_t>(pair.master_node)] = 1;
        }
    }

    std::vector<char> eliminated(nb, 0);
    if (mode.kind == BCKind::Dirichlet) {
        for (int node : dofmap.cell_boundary_nodes)
            eliminated[static_cast<std::size_t>(node)] = 1;
    }

    Reduction red;
    red.index.assign(nb, -1);
    red.phase.assign(nb, Complex{1.0, 0.0});
    for (std::size_t d = 0; d < nb; ++d) {
        if (!keep[d] || eliminated[d] || slave_of[d] >= 0) continue;
        red.index[d] = red.n++;
    }
    for (std::size_t d = 0; d < nb; ++d) {
        const int s = slave_of[d];
        if (s < 0 || !keep[d]) continue;
        const auto& pair = dofmap.slaves[static_cast<std::size_t>(s)];
        red.index[d] = red.index[static_cast<std::size_t>(pair.master_node)];
        Complex factor{1.0, 0.0};
        if (pair.crossings_x) factor *= phase_factor(mode.phi1);
        if (pair.crossings_y) factor *= phase_factor(mode.phi2);
        red.phase[d] = factor;
    }
    return red;
}

template <typename Scalar>
Scalar to_scalar(Complex z);
template <>
double to_scalar<double>(Complex z) {
    return z.real();
}
template <>
Complex to_scalar<Complex>(Complex z) {
    return z;
}

template <typename Scalar>
void check_hermitian_and_clean(Eigen::SparseMatrix<Scalar>& mat, const char* what) {
    Eigen::SparseMatrix<Scalar> adj = mat.adjoint();
    double max_abs = 0.0;
    for (int k = 0; k < mat.outerSize(); ++k)
        for (typename Eigen::SparseMatrix<Scalar>::InnerIterator it(mat, k); it; ++it)
            max_abs = std::max(max_abs, std::abs(it.value()));
    Eigen::SparseMatrix<Scalar> diff = mat - adj;
    double max_diff = 0.0;
    for (int k = 0; k < diff.outerSize(); ++k)
        for (typename Eigen::SparseMatrix<Scalar>::InnerIterator it(diff, k); it; ++it)
            max_diff = std::max(max_diff, std::abs(it.value()));
    if (max_diff > 1e-13 * std::max(1.0, max_abs))
        throw NumericalError(std::string(what) + ": assembled matrix is not Hermitian");
    mat = Scalar(0.5) * (mat + adj);
    mat.makeCompressed();
}

template <typename Scalar>
void build_matrices(const StructuredMesh& mesh, const DofMap& dofmap,
                    const geom::CellSpec& cell, double eps, const Reduction& red,
                    bool include_jumps, bool matrix_component_only,
                    Eigen::SparseMatrix<Scalar>& H, Eigen::SparseMatrix<Scalar>& M) {
    std::vector<Eigen::Triplet<Scalar>> trip_h, trip_m;
    const std::size_t elems = static_cast<std::size_t>(mesh.n_elements());
    trip_h.reserve(elems * 16 + mesh.interface_edges.size() * 16);
    trip_m.reserve(elems * 16);

    const double h2_36 = mesh.h * mesh.h / 36.0;
    const double inv_eps2 = 1.0 / (eps * eps);

    std::vector<Scalar> phase(red.phase.size());
    for (std::size_t d = 0; d < red.phase.size(); ++d) phase[d] = to_scalar<Scalar>(red.phase[d]);

    for (int e = 0; e < mesh.n_elements(); ++e) {
        if (matrix_component_only && mesh.element_label[static_cast<std::size_t>(e)] != 0)
            continue;
        const auto dofs = dofmap.element_dofs(mesh, e);
        for (int i = 0; i < 4; ++i) {
            const int p = dofs[static_cast<std::size_t>(i)];
            const int rp = red.index[static_cast<std::size_t>(p)];
            if (rp < 0) continue;
            for (int j = 0; j < 4; ++j) {
                const int q = dofs[static_cast<std::size_t>(j)];
                const int rq = red.index[static_cast<std::size_t>(q)];
                if (rq < 0) continue;
                Scalar factor;
                if constexpr (std::is_same_v<Scalar, double>)
                    factor = phase[static_cast<std::size_t>(p)] * phase[static_cast<std::size_t>(q)];
                else
                    factor = std::conj(phase[static_cast<std::size_t>(p)]) *
                             phase[static_cast<std::size_t>(q)];
                trip_h.emplace_back(rp, rq, factor * Scalar(inv_eps2 * kStiff[i][j]));
                trip_m.emplace_back(rp, rq, factor * Scalar(h2_36 * kMass[i][j]));
            }
        }
    }

    if (include_jumps) {
        const double h_6 = mesh.h / 6.0;
        for (const auto& edge : mesh.interface_edges) {
            const double q_j = cell.strengths[static_cast<std::size_t>(edge.inclusion)];
            const int dofs[4] = {edge.node_a,
                                 dofmap.interior_dof[static_cast<std::size_t>(edge.node_a)],
                                 edge.node_b,
                                 dofmap.interior_dof[static_cast<std::size_t>(edge.node_b)]};
            for (int i = 0; i < 4; ++i) {
                const int rp = red.index[static_cast<std::size_t>(dofs[i])];
                if (rp < 0) continue;
                for (int j = 0; j < 4; ++j) {
                    const int rq = red.index[static_cast<std::size_t>(dofs[j])];
                    if (rq < 0) continue;
                    // Interface nodes never sit on dY, so their phases are 1.
                    trip_h.emplace_back(rp, rq, Scalar(q_j * h_6 * kJump[i][j]));
                }
            }
        }
    }

    H.resize(red.n, red.n);
    M.resize(red.n, red.n);
    H.setFromTriplets(trip_h.begin(), trip_h.end());
    M.setFromTriplets(trip_m.begin(), trip_m.end());
    check_hermitian_and_clean(H, "H");
    check_hermitian_and_clean(M, "M");

    for (int d = 0; d < red.n; ++d) {
        if (!(std::abs(M.coeff(d, d)) > 0.0))
            throw NumericalError("M: zero mass diagonal; dangling DOF in reduction");
    }
}

AssembledSystem assemble_impl(const StructuredMesh& mesh, const DofMap& dofmap,
                              const geom::CellSpec& cell, double eps, BCMode mode,
                              bool matrix_component_only) {
    if (!(eps > 0.0) || !std::isfinite(eps))
        throw ValidationError("assemble: eps must be positive");
    if (cell.strengths.size() != mesh.cell.strengths.size())
        throw ValidationError("assemble: cell does not match the meshed cell");

    std::vector<char> referenced;
    const std::vector<char>* filter = nullptr;
    if (matrix_component_only) {
        referenced.assign(static_cast<std::size_t>(dofmap.n_broken), 0);
        for (int e = 0; e < mesh.n_elements(); ++e) {
            if (mesh.element_label[static_cast<std::size_t>(e)] != 0) continue;
            for (int d : dofmap.element_dofs(mesh, e)) referenced[static_cast<std::size_t>(d)] = 1;
        }
        filter = &referenced;
    }

    const Reduction red = build_reduction(dofmap, mode, filter);
    if (red.n == 0) throw ValidationError("assemble: no DOFs left after reduction");

    AssembledSystem sys;
    sys.n = red.n;
    sys.eps = eps;
    sys.mode = mode;
    sys.real_valued = mode.kind != BCKind::Quasi || mode.real_phases();
    const bool jumps = !matrix_component_only;
    if (sys.real_valued)
        build_matrices<double>(mesh, dofmap, cell, eps, red, jumps, matrix_component_only,
                               sys.H_real, sys.M_real);
    else
        build_matrices<Complex>(mesh, dofmap, cell, eps, red, jumps, matrix_component_only,
                                sys.H_cplx, sys.M_cplx);
    return sys;
}

template <typename Scalar>
void dump_matrix(const Eigen::SparseMatrix<Scalar>& mat, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + path.string() + "'");
    out << "# " << mat.rows() << " " << mat.cols() << " " << mat.nonZeros() << "\n";
    for (int k = 0; k < mat.outerSize(); ++k) {
        for (typename Eigen::SparseMatrix<Scalar>::InnerIterator it(mat, k); it; ++it) {
            double re, im;
            if constexpr (std::is_same_v<Scalar, double>) {
                re = it.value();
                im = 0.0;
            } else {
                re = it.value().real();
                im = it.value().imag();
            }
            out << it.row() << " " << it.col() << " " << io::format_double(re) << " "
                << io::format_double(im) << "\n";
        }
    }
}

} // namespace

BCMode BCMode::quasi(double phi1, double phi2) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const auto wrap = [two_pi](double phi) {
        if (!std::isfinite(phi)) throw ValidationError("quasi mode: phase must be finite");
        if (phi >= 0.0 && phi < two_pi) return phi;
        double w = std::fmod(phi, two_pi);
        if (w < 0.0) w += two_pi;
        return w;
    };
    return {BCKind::Quasi, wrap(phi1), wrap(phi2)};
}

bool BCMode::real_phases() const {
    const auto is_half_turn = [](double phi) { return phi == 0.0 || phi == std::numbers::pi; };
    return is_half_turn(phi1) && is_half_turn(phi2);
}

std::string BCMode::name() const {
    switch (kind) {
        case BCKind::Neumann: return "neumann";
        case BCKind::Dirichlet: return "dirichlet";
        case BCKind::Quasi: return "quasi";
    }
    return "unknown";
}

AssembledSystem assemble(const StructuredMesh& mesh, const DofMap& dofmap,
                         const geom::CellSpec& cell, double eps, BCMode mode) {
    return assemble_impl(mesh, dofmap, cell, eps, mode, false);
}

AssembledSystem assemble_matrix_component(const StructuredMesh& mesh, const DofMap& dofmap,
                                          BCMode mode) {
    if (mode.kind == BCKind::Neumann)
        throw ValidationError("matrix component: mode must be Quasi or Dirichlet");
    return assemble_impl(mesh, dofmap, mesh.cell, 1.0, mode, true);
}

void dump_system(const AssembledSystem& system, const std::filesystem::path& h_path,
                 const std::filesystem::path& m_path) {
    if (system.real_valued) {
        dump_matrix(system.H_real, h_path);
        dump_matrix(system.M_real, m_path);
    } else {
        dump_matrix(system.H_cplx, h_path);
        dump_matrix(system.M_cplx, m_path);
    }
}

} // namespace gapforge::fem

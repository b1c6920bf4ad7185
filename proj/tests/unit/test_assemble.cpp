#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "gapforge/assemble.hpp"
#include "gapforge/errors.hpp"
#include "gapforge/mesh.hpp"

using namespace gapforge;
using namespace gapforge::fem;

namespace {

geom::CellSpec reference_square_cell() {
    geom::CellSpec cell;
    cell.inclusions = {geom::InclusionShape::rect(0.5, 0.5, 0.25, 0.25)};
    cell.strengths = {0.125};
    return cell;
}

AssembledSystem assemble_cell(const geom::CellSpec& cell, int n, double eps, BCMode mode) {
    const auto mesh = build_mesh(cell, n);
    const auto dofs = build_dof_map(mesh);
    return assemble(mesh, dofs, cell, eps, mode);
}

} // namespace

TEST_CASE("system sizes per boundary condition") {
    geom::CellSpec empty;
    CHECK(assemble_cell(empty, 4, 1.0, BCMode::neumann()).n == 25);
    CHECK(assemble_cell(empty, 4, 1.0, BCMode::quasi(0.0, 0.0)).n == 16);
    CHECK(assemble_cell(empty, 4, 1.0, BCMode::dirichlet()).n == 9);

    const auto cell = reference_square_cell();
    CHECK(assemble_cell(cell, 4, 1.0, BCMode::neumann()).n == 33);
    CHECK(assemble_cell(cell, 4, 1.0, BCMode::quasi(0.0, 0.0)).n == 24);
    CHECK(assemble_cell(cell, 4, 1.0, BCMode::dirichlet()).n == 17);
}

TEST_CASE("real modes stay real, generic phases go complex") {
    geom::CellSpec empty;
    const double pi = std::numbers::pi;
    CHECK(assemble_cell(empty, 4, 1.0, BCMode::neumann()).real_valued);
    CHECK(assemble_cell(empty, 4, 1.0, BCMode::dirichlet()).real_valued);
    CHECK(assemble_cell(empty, 4, 1.0, BCMode::quasi(0.0, 0.0)).real_valued);
    CHECK(assemble_cell(empty, 4, 1.0, BCMode::quasi(pi, pi)).real_valued);
    CHECK_FALSE(assemble_cell(empty, 4, 1.0, BCMode::quasi(pi / 2, 0.0)).real_valued);
}

TEST_CASE("constants are in the kernel of the periodic and free systems") {
    const auto cell = reference_square_cell();
    for (const auto mode : {BCMode::neumann(), BCMode::quasi(0.0, 0.0)}) {
        const auto sys = assemble_cell(cell, 8, 0.5, mode);
        REQUIRE(sys.real_valued);
        const Eigen::VectorXd ones = Eigen::VectorXd::Ones(sys.n);
        CHECK((sys.H_real * ones).lpNorm<Eigen::Infinity>() < 1e-10);
        // Total mass is the cell area.
        CHECK(ones.dot(sys.M_real * ones) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("jump energy of the matrix indicator equals q times the perimeter") {
    // u = 1 on the matrix side, 0 inside the inclusion: the quadratic form
    // reduces to sum_j q_j |Gamma_j| independent of eps.
    const auto cell = reference_square_cell();
    const auto mesh = build_mesh(cell, 8);
    const auto dofs = build_dof_map(mesh);
    for (double eps : {1.0, 0.25}) {
        const auto sys = assemble(mesh, dofs, cell, eps, BCMode::neumann());
        Eigen::VectorXd u = Eigen::VectorXd::Zero(sys.n);
        for (int node = 0; node < mesh.n_nodes(); ++node) {
            const auto [x, y] = mesh.node_xy(node);
            const bool inside = x > 0.25 && x < 0.75 && y > 0.25 && y < 0.75;
            if (!inside) u[node] = 1.0; // exterior trace on the interface keeps node id
        }
        const double energy = u.dot(sys.H_real * u);
        CHECK(energy == doctest::Approx(0.125 * 2.0).epsilon(1e-12));
    }
}

TEST_CASE("complex assembly is hermitian with unit-modulus phase factors") {
    const auto sys = assemble_cell(reference_square_cell(), 8, 0.5, BCMode::quasi(1.0, 2.0));
    REQUIRE_FALSE(sys.real_valued);
    CHECK(sys.n == 64 + 16);
    const Eigen::MatrixXcd H = Eigen::MatrixXcd(sys.H_cplx);
    CHECK((H - H.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    const Eigen::MatrixXcd M = Eigen::MatrixXcd(sys.M_cplx);
    CHECK((M - M.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    // Quasi-periodic mass still integrates |u|^2 with positive diagonal.
    for (int i = 0; i < sys.n; ++i) CHECK(M(i, i).real() > 0.0);
}

TEST_CASE("dirichlet system is positive definite") {
    const auto sys = assemble_cell(reference_square_cell(), 8, 1.0, BCMode::dirichlet());
    std::mt19937 rng(17u);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        Eigen::VectorXd u(sys.n);
        for (int i = 0; i < sys.n; ++i) u[i] = unit(rng);
        CHECK(u.dot(sys.H_real * u) > 0.0);
    }
}

TEST_CASE("matrix component drops inclusion interiors and jumps") {
    const auto cell = reference_square_cell();
    const auto mesh = build_mesh(cell, 4);
    const auto dofs = build_dof_map(mesh);
    CHECK(assemble_matrix_component(mesh, dofs, BCMode::dirichlet()).n == 8);
    CHECK(assemble_matrix_component(mesh, dofs, BCMode::quasi(0.0, 0.0)).n == 15);
    CHECK_THROWS_AS(assemble_matrix_component(mesh, dofs, BCMode::neumann()), ValidationError);
}

TEST_CASE("phase wrapping lands exactly on the real special cases") {
    const double pi = std::numbers::pi;
    CHECK(BCMode::quasi(2.0 * pi, 0.0).phi1 == 0.0);
    CHECK(BCMode::quasi(-pi, 0.0).phi1 == pi);
    CHECK(BCMode::quasi(3.0 * pi, 0.0).phi1 == pi);
    CHECK(BCMode::quasi(0.0, -3.0 * pi).phi2 == pi);
    CHECK(BCMode::quasi(0.0, 0.0).real_phases());
    CHECK(BCMode::quasi(pi, 0.0).real_phases());
    CHECK_FALSE(BCMode::quasi(0.5, 0.0).real_phases());
}

TEST_CASE("eps must be positive and finite") {
    geom::CellSpec empty;
    CHECK_THROWS_AS(assemble_cell(empty, 4, 0.0, BCMode::neumann()), ValidationError);
    CHECK_THROWS_AS(assemble_cell(empty, 4, -1.0, BCMode::neumann()), ValidationError);
}

TEST_CASE("coordinate dump has one header and nnz rows per matrix") {
    geom::CellSpec empty;
    const auto sys = assemble_cell(empty, 4, 1.0, BCMode::quasi(0.0, 0.0));
    dump_system(sys, "dump_test_H.txt", "dump_test_M.txt");
    std::ifstream h("dump_test_H.txt");
    REQUIRE(h.good());
    std::string header;
    std::getline(h, header);
    CHECK(header.rfind("# 16 16 ", 0) == 0);
    int rows = 0;
    for (std::string line; std::getline(h, line);)
        if (!line.empty()) ++rows;
    const int nnz = std::stoi(header.substr(8));
    CHECK(rows == nnz);
}

// gapforge: design and verify spectral gaps of a periodic cell with
// delta'-type interfaces.  Subcommands: design, forward, bands, verify,
// lambda.  Exit codes: 0 ok, 2 invalid input, 3 numerical failure, 4 layout
// infeasible, 5 verification failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gapforge/cell_geometry.hpp"
#include "gapforge/cell_io.hpp"
#include "gapforge/eigensolve.hpp"
#include "gapforge/errors.hpp"
#include "gapforge/format.hpp"
#include "gapforge/gap_algebra.hpp"
#include "gapforge/render.hpp"
#include "gapforge/spectra_lab.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitLayout = 4;
constexpr int kExitVerification = 5;

struct DesignArgs {
    std::string targets_path, out_cell, out_summary;
    int mesh = 64;
};

struct ForwardArgs {
    std::string cell_path, out_path;
};

struct BandsArgs {
    std::string cell_path, out_path, svg_path, dump_prefix;
    double eps = 0.25;
    int mesh = 64;
    int phi_grid = 4;
    int k = 3;
    double tol = 1e-8;
};

struct VerifyArgs {
    std::string cell_path, out_path, eps_list;
    int mesh = 64;
    double tol = 1e-8;
};

struct LambdaArgs {
    std::string cell_path;
    int mesh = 64;
    int phi_grid = 0;
    double tol = 1e-8;
};

std::vector<double> parse_eps_list(const std::string& text) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = text.find(',', start);
        const std::string item =
            text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        if (item.empty()) throw gapforge::ValidationError("eps list: empty entry");
        out.push_back(gapforge::io::parse_double(item));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

void check_eps(double eps) {
    if (!(eps > 0.0) || eps > 1.0)
        throw gapforge::ValidationError("eps must lie in (0, 1]");
}

gapforge::geom::CellSpec read_valid_cell(const std::string& path) {
    const gapforge::geom::CellSpec cell = gapforge::io::read_cell_file(path);
    const auto diag = gapforge::geom::validate_cell(cell);
    if (!diag.valid)
        throw gapforge::ValidationError("invalid cell: " + diag.violations.front());
    return cell;
}

int cmd_design(const DesignArgs& args) {
    if (args.mesh % 2 != 0)
        throw gapforge::ValidationError("design: --mesh must be even");
    const auto targets = gapforge::io::read_targets_file(args.targets_path);
    const auto params = gapforge::alg::inverse_design(targets);
    const auto cell = gapforge::geom::realize_design(params);
    // Align on the half grid: verify at the same --mesh also meshes the
    // coarse N/2 grid for its discretization margin, and edges on the
    // 1/(N/2) lines stay on the 1/N lines.
    const auto aligned = gapforge::geom::grid_align(cell, args.mesh / 2);
    const auto diag = gapforge::geom::validate_cell(aligned.cell);

    gapforge::io::write_cell_file(args.out_cell, aligned.cell);
    gapforge::io::spill(args.out_summary,
                        gapforge::io::render_design_summary_csv(targets, params, aligned.cell,
                                                                diag.rates));
    std::cout << "cell: " << args.out_cell << " (" << cell.size() << " inclusions, max edge shift "
              << gapforge::io::format_double(aligned.max_edge_shift) << ")\n";
    std::cout << "summary: " << args.out_summary << "\n";
    return kExitOk;
}

int cmd_forward(const ForwardArgs& args) {
    const auto cell = read_valid_cell(args.cell_path);
    if (cell.size() == 0) throw gapforge::ValidationError("forward: cell has no inclusions");
    const auto diag = gapforge::geom::validate_cell(cell);
    if (!diag.rates_strictly_increasing)
        throw gapforge::ValidationError(
            "forward: realized coupling rates must be strictly increasing in inclusion order");

    std::vector<double> perims(cell.size()), vols(cell.size()), vols_with_matrix(cell.size() + 1);
    vols_with_matrix[0] = diag.matrix_volume;
    for (std::size_t j = 0; j < cell.size(); ++j) {
        perims[j] = diag.measures[j].surface_area;
        vols[j] = diag.measures[j].volume;
        vols_with_matrix[j + 1] = vols[j];
    }

    const auto coeffs = gapforge::alg::SecularCoefficients::from_measures(
        cell.strengths, perims, vols, diag.matrix_volume);
    const auto roots_bisection = gapforge::alg::gap_roots(coeffs);
    const auto matrix = gapforge::alg::limit_neumann_matrix(cell.strengths, perims,
                                                            vols_with_matrix);
    const auto matrix_eigs = gapforge::alg::limit_neumann_eigenvalues(matrix, vols_with_matrix);
    const std::vector<double> roots_matrix(matrix_eigs.begin() + 1, matrix_eigs.end());

    gapforge::io::spill(args.out_path,
                        gapforge::io::render_forward_csv(coeffs.poles, roots_bisection,
                                                         roots_matrix));
    double worst = 0.0;
    for (std::size_t j = 0; j < roots_bisection.size(); ++j)
        worst = std::max(worst, std::abs(roots_bisection[j] - roots_matrix[j]));
    std::cout << "limits: " << args.out_path << " (bisection vs matrix max diff "
              << gapforge::io::format_double(worst) << ")\n";
    if (worst > 1e-7)
        throw gapforge::NumericalError("forward: bisection and matrix roots disagree");
    return kExitOk;
}

int cmd_bands(const BandsArgs& args) {
    check_eps(args.eps);
    const auto cell = read_valid_cell(args.cell_path);
    gapforge::fem::EigenSolveOptions opts;
    opts.tol = args.tol;

    const auto samples =
        gapforge::lab::band_sweep(cell, args.eps, args.mesh, args.phi_grid, args.k, opts);
    gapforge::io::spill(args.out_path, gapforge::io::render_bands_csv(samples));
    std::cout << "bands: " << args.out_path << " (" << samples.size() << " phi samples, k = "
              << args.k << ")\n";

    if (!args.dump_prefix.empty()) {
        const auto mesh = gapforge::fem::build_mesh(cell, args.mesh);
        const auto dofmap = gapforge::fem::build_dof_map(mesh);
        const auto sys = gapforge::fem::assemble(mesh, dofmap, cell, args.eps,
                                                 gapforge::fem::BCMode::quasi(0.0, 0.0));
        gapforge::fem::dump_system(sys, args.dump_prefix + "_H.txt", args.dump_prefix + "_M.txt");
        std::cout << "matrices: " << args.dump_prefix << "_H.txt, " << args.dump_prefix
                  << "_M.txt\n";
    }

    if (!args.svg_path.empty()) {
        std::vector<double> lower, upper;
        if (cell.size() > 0) {
            const auto limit = gapforge::lab::cell_limit_spectra(cell);
            lower = limit.dirichlet;
            upper.assign(limit.neumann.begin() + 1, limit.neumann.end());
        }
        const int per_segment = std::max(8, args.phi_grid);
        const auto path =
            gapforge::lab::band_path_sweep(cell, args.eps, args.mesh, per_segment, args.k, opts);
        gapforge::io::spill(args.svg_path,
                            gapforge::io::render_band_svg(path, args.k, lower, upper));
        std::cout << "svg: " << args.svg_path << "\n";
    }
    return kExitOk;
}

int cmd_verify(const VerifyArgs& args) {
    const auto cell = read_valid_cell(args.cell_path);
    const auto eps_list = parse_eps_list(args.eps_list);
    gapforge::fem::EigenSolveOptions opts;
    opts.tol = args.tol;

    const auto report = gapforge::lab::convergence_sweep(cell, eps_list, args.mesh, opts);
    gapforge::io::spill(args.out_path, gapforge::io::render_verify_csv(report));
    std::cout << gapforge::io::render_verify_verdicts(report);
    std::cout << "table: " << args.out_path << "\n";
    return report.all_pass ? kExitOk : kExitVerification;
}

int cmd_lambda(const LambdaArgs& args) {
    const auto cell = read_valid_cell(args.cell_path);
    gapforge::fem::EigenSolveOptions opts;
    opts.tol = args.tol;

    const double lambda_d =
        gapforge::fem::lambda_phi(cell, gapforge::fem::BCMode::dirichlet(), args.mesh, opts);
    std::cout << "Lambda_D = " << gapforge::io::format_double(lambda_d) << "\n";

    if (args.phi_grid > 0) {
        const double two_pi = 2.0 * std::numbers::pi;
        double best = 0.0;
        for (int g1 = 0; g1 < args.phi_grid; ++g1) {
            for (int g2 = 0; g2 < args.phi_grid; ++g2) {
                const auto mode =
                    gapforge::fem::BCMode::quasi(two_pi * g1 / args.phi_grid,
                                                 two_pi * g2 / args.phi_grid);
                const double value = gapforge::fem::lambda_phi(cell, mode, args.mesh, opts);
                best = std::max(best, value);
                std::cout << "Lambda_phi(" << gapforge::io::format_double(mode.phi1) << ","
                          << gapforge::io::format_double(mode.phi2)
                          << ") = " << gapforge::io::format_double(value) << "\n";
            }
        }
        std::cout << "max Lambda_phi = " << gapforge::io::format_double(best)
                  << " (<= Lambda_D)\n";
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral gap design and Floquet-Bloch verification for periodic cells "
                 "with delta'-interfaces"};
    app.require_subcommand(1);

    DesignArgs design;
    auto* cmd_design_p = app.add_subcommand("design", "targets JSON -> cell JSON + summary CSV");
    cmd_design_p->add_option("--targets", design.targets_path, "targets JSON with gaps [[A,B],...]")
        ->required()
        ->check(CLI::ExistingFile);
    cmd_design_p->add_option("--out-cell", design.out_cell, "output cell JSON")->required();
    cmd_design_p->add_option("--out-summary", design.out_summary, "output summary CSV")->required();
    cmd_design_p
        ->add_option("--mesh", design.mesh,
                     "even grid resolution the cell is aligned for (meshable at N and N/2)")
        ->check(CLI::Range(8, 512));

    ForwardArgs forward;
    auto* cmd_forward_p = app.add_subcommand("forward", "cell JSON -> limit gap edges CSV");
    cmd_forward_p->add_option("--cell", forward.cell_path, "cell JSON")
        ->required()
        ->check(CLI::ExistingFile);
    cmd_forward_p->add_option("--out", forward.out_path, "output CSV")->required();

    BandsArgs bands;
    auto* cmd_bands_p = app.add_subcommand("bands", "quasi-periodic band samples over a phi grid");
    cmd_bands_p->add_option("--cell", bands.cell_path, "cell JSON")
        ->required()
        ->check(CLI::ExistingFile);
    cmd_bands_p->add_option("--eps", bands.eps, "interface scale in (0,1]")->required();
    cmd_bands_p->add_option("--mesh", bands.mesh, "grid resolution N")->check(CLI::Range(8, 512));
    cmd_bands_p->add_option("--phi-grid", bands.phi_grid, "G for the G x G phase grid")
        ->check(CLI::Range(1, 64));
    cmd_bands_p->add_option("--k", bands.k, "bands per phase point")->check(CLI::Range(1, 64));
    cmd_bands_p->add_option("--out", bands.out_path, "output CSV")->required();
    cmd_bands_p->add_option("--svg", bands.svg_path, "optional band diagram SVG");
    cmd_bands_p->add_option("--dump-matrices", bands.dump_prefix,
                            "write H/M of the periodic fiber in coordinate format");
    cmd_bands_p->add_option("--tol", bands.tol, "eigensolver residual tolerance");

    VerifyArgs verify;
    auto* cmd_verify_p =
        app.add_subcommand("verify", "convergence sweep against the limit gap edges");
    cmd_verify_p->add_option("--cell", verify.cell_path, "cell JSON")
        ->required()
        ->check(CLI::ExistingFile);
    cmd_verify_p->add_option("--eps-list", verify.eps_list, "comma-separated eps, decreasing")
        ->required();
    cmd_verify_p->add_option("--mesh", verify.mesh, "grid resolution N")->check(CLI::Range(8, 512));
    cmd_verify_p->add_option("--out", verify.out_path, "output CSV")->required();
    cmd_verify_p->add_option("--tol", verify.tol, "eigensolver residual tolerance");

    LambdaArgs lambda;
    auto* cmd_lambda_p =
        app.add_subcommand("lambda", "decoupling threshold of the matrix component");
    cmd_lambda_p->add_option("--cell", lambda.cell_path, "cell JSON")
        ->required()
        ->check(CLI::ExistingFile);
    cmd_lambda_p->add_option("--mesh", lambda.mesh, "grid resolution N")->check(CLI::Range(8, 512));
    cmd_lambda_p->add_option("--phi-grid", lambda.phi_grid,
                             "also sample Lambda_phi on a G x G grid");
    cmd_lambda_p->add_option("--tol", lambda.tol, "eigensolver residual tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    try {
        if (cmd_design_p->parsed()) return cmd_design(design);
        if (cmd_forward_p->parsed()) return cmd_forward(forward);
        if (cmd_bands_p->parsed()) return cmd_bands(bands);
        if (cmd_verify_p->parsed()) return cmd_verify(verify);
        if (cmd_lambda_p->parsed()) return cmd_lambda(lambda);
    } catch (const gapforge::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const gapforge::LayoutError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitLayout;
    } catch (const gapforge::NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitInvalid;
}

// Acceptance gate: one check per shipped guarantee, each printing a PASS or
// FAIL line.  Exits nonzero if anything fails.  All tolerances are pinned
// here, not configurable.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gapforge/assemble.hpp"
#include "gapforge/cell_geometry.hpp"
#include "gapforge/cell_io.hpp"
#include "gapforge/eigensolve.hpp"
#include "gapforge/gap_algebra.hpp"
#include "gapforge/mesh.hpp"
#include "gapforge/spectra_lab.hpp"

namespace fs = std::filesystem;
using namespace gapforge;

namespace {

constexpr double kPi = std::numbers::pi;

std::string g_binary;

void require(bool ok, const std::string& what) {
    if (!ok) throw std::runtime_error(what);
}

double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(1.0, std::abs(want));
}

int run_cli(const std::string& args) {
    const std::string cmd = g_binary + " " + args + " >acc_stdout.txt 2>acc_stderr.txt";
    const int status = std::system(cmd.c_str());
    require(status != -1, "failed to launch " + cmd);
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), "cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spill(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), "cannot write " + path);
    out << text;
}

alg::TargetGaps random_targets(std::mt19937& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int m = 1 + static_cast<int>(rng() % 8u);
    std::vector<double> a(m);
    a[0] = 0.5 + 4.5 * unit(rng);
    for (int j = 1; j < m; ++j) a[j] = a[j - 1] * (1.05 + 0.8 * unit(rng));
    if (a.back() > 50.0) {
        const double scale = 50.0 / a.back();
        for (double& x : a) x *= scale;
    }
    alg::TargetGaps t;
    for (int j = 0; j < m; ++j) {
        const double hi = (j + 1 < m) ? a[j] + (0.1 + 0.8 * unit(rng)) * (a[j + 1] - a[j])
                                      : a[j] * (1.1 + unit(rng));
        t.intervals.emplace_back(a[j], hi);
    }
    return t;
}

geom::CellSpec one_gap_cell(int mesh) {
    alg::TargetGaps targets;
    targets.intervals = {{1.0, 4.0 / 3.0}};
    const auto cell = geom::realize_design(alg::inverse_design(targets));
    return geom::grid_align(cell, mesh).cell;
}

double dispersion_1d(double kappa, double h) {
    return (6.0 / (h * h)) * (1.0 - std::cos(kappa * h)) / (2.0 + std::cos(kappa * h));
}

// 1. Inverse/forward round trip, 100 random target sets, relative 1e-10.
void criterion_round_trip() {
    std::mt19937 rng(0xF00Du);
    for (int trial = 0; trial < 100; ++trial) {
        const auto targets = random_targets(rng);
        const auto coeffs =
            alg::SecularCoefficients::from_design(alg::inverse_design(targets));
        const auto roots = alg::gap_roots(coeffs);
        require(roots.size() == targets.intervals.size(), "root count mismatch");
        for (std::size_t j = 0; j < roots.size(); ++j) {
            require(rel_err(coeffs.poles[j], targets.intervals[j].first) < 1e-10,
                    "pole drifted beyond relative 1e-10");
            require(rel_err(roots[j], targets.intervals[j].second) < 1e-10,
                    "root drifted beyond relative 1e-10");
        }
    }
}

// 2. Matrix spectrum matches bisection roots; kernel eigenvalue at zero.
void criterion_matrix_equivalence() {
    std::mt19937 rng(0xBEEFu);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const auto targets = random_targets(rng);
        const std::size_t m = targets.intervals.size();
        std::vector<double> vols(m), perims(m), q(m);
        double occupied = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            vols[j] = 0.01 + 0.8 * unit(rng) / static_cast<double>(m);
            perims[j] = 0.1 + 2.9 * unit(rng);
            occupied += vols[j];
        }
        if (occupied > 0.9) {
            for (double& v : vols) v *= 0.9 / occupied;
        }
        occupied = 0.0;
        for (double v : vols) occupied += v;
        for (std::size_t j = 0; j < m; ++j)
            q[j] = targets.intervals[j].first * vols[j] / perims[j];

        const auto coeffs =
            alg::SecularCoefficients::from_measures(q, perims, vols, 1.0 - occupied);
        const auto roots = alg::gap_roots(coeffs);

        std::vector<double> vols_full(m + 1);
        vols_full[0] = 1.0 - occupied;
        for (std::size_t j = 0; j < m; ++j) vols_full[j + 1] = vols[j];
        const auto eigs = alg::limit_neumann_eigenvalues(
            alg::limit_neumann_matrix(q, perims, vols_full), vols_full);

        require(std::abs(eigs[0]) <= 1e-10, "kernel eigenvalue above 1e-10");
        for (std::size_t j = 0; j < m; ++j)
            require(std::abs(eigs[j + 1] - roots[j]) <= 1e-8,
                    "matrix and bisection roots differ beyond 1e-8");
    }
}

// 3. Closed forms: B = A/(1-b) for one gap; the two-gap quadratic oracle.
void criterion_closed_forms() {
    for (const auto [A, b] : {std::pair{1.0, 0.25}, std::pair{2.5, 0.1}, std::pair{0.7, 0.6}}) {
        alg::DesignParams p;
        p.b = {b};
        p.a = {A * b};
        p.b0 = 1.0 - b;
        const auto roots = alg::gap_roots(alg::SecularCoefficients::from_design(p));
        require(std::abs(roots[0] - A / (1.0 - b)) < 1e-12, "one-gap closed form beyond 1e-12");
    }

    alg::DesignParams p;
    p.b = {0.2, 0.1};
    p.a = {0.2, 0.2};
    p.b0 = 0.7;
    const auto roots = alg::gap_roots(alg::SecularCoefficients::from_design(p));
    require(std::abs(roots[0] - 1.2098387323) < 1e-9, "quadratic oracle root 1 beyond 1e-9");
    require(std::abs(roots[1] - 2.3615898391) < 1e-9, "quadratic oracle root 2 beyond 1e-9");
}

// 4. Empty-cell FEM oracle at two resolutions with order-2 error decay.
void criterion_fem_oracle() {
    geom::CellSpec empty;
    fem::EigenSolveOptions opts;
    opts.tol = 1e-10;

    const auto solve_one = [&](int n, fem::BCMode mode, int k) {
        const auto mesh = fem::build_mesh(empty, n);
        const auto sys = fem::assemble(mesh, fem::build_dof_map(mesh), empty, 1.0, mode);
        return fem::solve_smallest(sys, k, opts).values[static_cast<std::size_t>(k - 1)];
    };

    struct Track {
        fem::BCMode mode;
        int k;
        double exact;
        const char* label;
    };
    const std::vector<Track> tracks = {
        {fem::BCMode::dirichlet(), 1, 2.0 * kPi * kPi, "dirichlet ground state"},
        {fem::BCMode::neumann(), 2, kPi * kPi, "first excited free state"},
        {fem::BCMode::quasi(kPi, kPi), 1, 2.0 * kPi * kPi, "antiperiodic ground state"},
    };
    for (const auto& t : tracks) {
        const double coarse = solve_one(32, t.mode, t.k);
        const double fine = solve_one(64, t.mode, t.k);
        require(std::abs(fine - t.exact) / t.exact < 0.01,
                std::string(t.label) + " off by more than 1% at N=64");
        const double ratio = std::abs(coarse - t.exact) / std::abs(fine - t.exact);
        require(ratio >= 3.0 && ratio <= 5.0,
                std::string(t.label) + " error ratio outside [3,5]");
    }
}

// 5. Discrete bracketing at 8 random phases, slack at most 1e-7.
void criterion_bracketing() {
    const auto cell = one_gap_cell(64);
    const auto mesh = fem::build_mesh(cell, 64);
    const auto dofs = fem::build_dof_map(mesh);
    fem::EigenSolveOptions opts;
    opts.tol = 1e-10;
    const double eps = 0.25;
    const int k = 3;

    const auto neumann =
        fem::solve_smallest(fem::assemble(mesh, dofs, cell, eps, fem::BCMode::neumann()), k, opts);
    const auto dirichlet = fem::solve_smallest(
        fem::assemble(mesh, dofs, cell, eps, fem::BCMode::dirichlet()), k, opts);

    std::mt19937 rng(0xCAFEu);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
    for (int sample = 0; sample < 8; ++sample) {
        const auto mode = fem::BCMode::quasi(angle(rng), angle(rng));
        const auto quasi = fem::solve_smallest(fem::assemble(mesh, dofs, cell, eps, mode), k, opts);
        for (int i = 0; i < k; ++i) {
            const double lo = neumann.values[static_cast<std::size_t>(i)];
            const double mid = quasi.values[static_cast<std::size_t>(i)];
            const double hi = dirichlet.values[static_cast<std::size_t>(i)];
            require(lo <= mid + 1e-7, "free edge exceeds quasi eigenvalue beyond 1e-7");
            require(mid <= hi + 1e-7, "quasi eigenvalue exceeds pinned edge beyond 1e-7");
        }
    }
}

// 6. Convergence rate via the verify subcommand on the one-gap design.
void criterion_rate() {
    fs::create_directories("acc_scratch");
    spill("acc_scratch/targets.json", R"({"gaps": [[1.0, 1.3333333333333333]]})");
    require(run_cli("design --targets acc_scratch/targets.json"
                    " --out-cell acc_scratch/cell.json"
                    " --out-summary acc_scratch/summary.csv --mesh 64") == 0,
            "design subcommand failed");
    require(run_cli("verify --cell acc_scratch/cell.json --eps-list 0.5,0.25,0.125,0.0625"
                    " --mesh 64 --out acc_scratch/verify.csv") == 0,
            "verify subcommand did not exit 0");
    const std::string out = slurp("acc_stdout.txt");
    require(out.find("VERDICT PASS") != std::string::npos, "verify verdict missing PASS");
}

// 7. Gap count stays within the designed number below the decoupling window.
void criterion_gap_count() {
    alg::DesignParams p;
    p.b = {0.2, 0.1};
    p.a = {0.2, 0.2};
    p.b0 = 0.7;
    const auto cell = geom::grid_align(geom::realize_design(p), 48).cell;

    lab::GapCountOptions opts;
    opts.solver.tol = 1e-9;
    const auto report = lab::gap_count_check(cell, 0.125, 48, 6, opts);
    require(!report.covered.empty(), "no covered bands below the decoupling window");
    require(report.gap_count <= 2, "more than two gaps below the window");
    require(report.count_within_bound, "gap count bound violated");

    const auto empty = lab::gap_count_check(geom::CellSpec{}, 0.125, 32, 6, opts);
    require(empty.gap_count == 0, "empty cell reported a spurious gap");
}

// 8. Decoupling: tail eigenvalue times eps^2 dominates the matrix threshold.
void criterion_decoupling() {
    const auto cell = one_gap_cell(64);
    std::mt19937 rng(0xD1CEu);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
    std::vector<fem::BCMode> modes;
    for (int sample = 0; sample < 8; ++sample)
        modes.push_back(fem::BCMode::quasi(angle(rng), angle(rng)));

    fem::EigenSolveOptions opts;
    opts.tol = 1e-9;
    const auto samples = lab::check_decoupling(cell, 0.25, 64, modes, opts);
    for (const auto& s : samples)
        require(s.lambda_m1 * 0.25 * 0.25 >= s.lambda_phi * 0.25 * 0.25 - 1e-6,
                "tail eigenvalue fell below the decoupling threshold");
}

// 9. Perturbation bound: identity, hand value, undefined denominator.
void criterion_perturbation_bound() {
    const auto at_zero = alg::ep05_bound(3.0, 0.0, 0.0, 2.0, 2.0);
    require(at_zero.has_value() && *at_zero == 3.0, "zero-perturbation identity broken");

    const auto hand = alg::ep05_bound(2.0, 0.01, 0.01, 1.0, 1.0);
    require(hand.has_value(), "hand example unexpectedly undefined");
    require(std::abs(*hand - 2.0927835052) <= 1e-10, "hand example beyond 1e-10");

    require(!alg::ep05_bound(2.0, 0.5, 0.0, 1.0, 1.0).has_value(),
            "nonpositive denominator not flagged");
}

// 10. Byte-identical CSVs across repeated forward and verify runs.
void criterion_determinism() {
    fs::create_directories("acc_scratch");
    const auto cell = one_gap_cell(32);
    io::write_cell_file("acc_scratch/det_cell.json", cell);

    require(run_cli("forward --cell acc_scratch/det_cell.json --out acc_scratch/f1.csv") == 0,
            "forward run 1 failed");
    require(run_cli("forward --cell acc_scratch/det_cell.json --out acc_scratch/f2.csv") == 0,
            "forward run 2 failed");
    require(slurp("acc_scratch/f1.csv") == slurp("acc_scratch/f2.csv"),
            "forward CSVs differ between runs");

    const std::string verify_args = "verify --cell acc_scratch/det_cell.json"
                                    " --eps-list 0.5,0.25,0.125 --mesh 32";
    require(run_cli(verify_args + " --out acc_scratch/v1.csv") == 0, "verify run 1 failed");
    require(run_cli(verify_args + " --out acc_scratch/v2.csv") == 0, "verify run 2 failed");
    require(slurp("acc_scratch/v1.csv") == slurp("acc_scratch/v2.csv"),
            "verify CSVs differ between runs");
}

struct Criterion {
    int id;
    const char* label;
    std::function<void()> body;
    double budget_seconds;
};

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: %s <path-to-gapforge-binary>\n", argv[0]);
        return 2;
    }
    g_binary = argv[1];

    const std::vector<Criterion> criteria = {
        {1, "inverse/forward round trip to relative 1e-10", criterion_round_trip, 5.0},
        {2, "limit matrix spectrum matches bisection roots", criterion_matrix_equivalence, 5.0},
        {3, "closed-form one-gap and two-gap oracles", criterion_closed_forms, 5.0},
        {4, "empty-cell FEM oracle with order-2 decay", criterion_fem_oracle, 60.0},
        {5, "discrete eigenvalue bracketing at random phases", criterion_bracketing, 600.0},
        {6, "convergence rate toward the designed gap", criterion_rate, 600.0},
        {7, "gap count below the decoupling window", criterion_gap_count, 600.0},
        {8, "decoupling bound at sampled phases", criterion_decoupling, 600.0},
        {9, "spectral perturbation bound suite", criterion_perturbation_bound, 5.0},
        {10, "byte-identical repeated runs", criterion_determinism, 600.0},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string failure;
        try {
            c.body();
        } catch (const std::exception& e) {
            failure = e.what();
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (failure.empty() && seconds > c.budget_seconds) {
            failure = "exceeded time budget of " + std::to_string(c.budget_seconds) + " s";
        }
        if (failure.empty()) {
            std::printf("PASS criterion %d: %s (%.1f s)\n", c.id, c.label, seconds);
        } else {
            std::printf("FAIL criterion %d: %s: %s (%.1f s)\n", c.id, c.label, failure.c_str(),
                        seconds);
            ++failures;
        }
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}

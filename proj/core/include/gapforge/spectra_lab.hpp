#pragma once

// Orchestration of band computations into verifiable claims: certified gap
// enclosures from the four edge modes, convergence sweeps against the limit
// spectra, gap counting below the decoupling window, and the decoupling
// bound itself.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gapforge/cell_geometry.hpp"
#include "gapforge/eigensolve.hpp"
#include "gapforge/gap_algebra.hpp"

namespace gapforge::lab {

struct BandRow {
    fem::BCMode mode;
    int k = 0; ///< 1-based band index
    double lambda = 0.0;
};

/// Eigenvalue lists for the four bracketing modes on one (eps, N) problem.
struct BandTable {
    double eps = 0.0;
    int resolution = 0;
    std::size_t cell_hash = 0;
    std::vector<BandRow> rows;
    std::vector<double> neumann, quasi0, quasipi, dirichlet; ///< k_max each
    double bracketing_slack = 0.0; ///< worst observed violation, <= tolerance
};

/// Solves the four modes {Neumann, Quasi(0,0), Quasi(pi,pi), Dirichlet} for
/// k_max eigenvalues each and verifies the discrete bracketing
/// lambda_{k,N} <= lambda_{k,phi} <= lambda_{k,D} up to solver slack.
BandTable compute_band_edges(const geom::CellSpec& cell, double eps, int resolution,
                             int k_max, const fem::EigenSolveOptions& options = {});

struct GapEnclosure {
    int j = 0; ///< 1-based gap index
    std::pair<double, double> inner{0.0, 0.0}; ///< (lambda_{j,D}, lambda_{j+1,N})
    bool inner_nonempty = false;               ///< false: not certified at this eps/N
    std::pair<double, double> outer{0.0, 0.0}; ///< (lambda_{j,QuasiPi}, lambda_{j+1,Quasi0})
    std::pair<double, double> limit{0.0, 0.0}; ///< (A_j, B_j)
};

/// Per-gap certification: the inner interval surely avoids the spectrum, the
/// outer interval surely contains both true gap edges.
std::vector<GapEnclosure> certified_gaps(const BandTable& edges, const alg::LimitSpectra& limit);

struct ConvergenceEntry {
    double eps = 0.0;
    int k = 0;
    std::string mode; ///< "neumann" | "quasi0" | "quasipi" | "dirichlet"
    double lambda = 0.0;
    double limit = 0.0;
    double abs_err = 0.0;
    double mesh_margin = 0.0; ///< |lambda_N - lambda_{N/2}| / 3
};

struct TrackVerdict {
    std::string mode;
    int k = 0;
    double limit = 0.0;
    double slope = 0.0; ///< log-log fit over the last three eps points
    bool monotone = true;
    bool slope_ok = false;
    bool pass = false;
    bool paper_side_ok = true; ///< lambda <= limit + mesh margin everywhere
    double empirical_c = 0.0;  ///< max err / eps above the mesh floor
};

struct ConvergenceReport {
    std::vector<ConvergenceEntry> entries;
    std::vector<TrackVerdict> verdicts;
    bool all_pass = false;
};

/// Eigenvalue errors against the limit spectra along a strictly decreasing
/// eps sweep (length >= 3), with mesh margins from an N vs N/2 comparison.
/// Tracks lambda_{k,N} and lambda_{k,Quasi0} against B_{k-1} (k = 2..m+1)
/// and lambda_{k,D}, lambda_{k,QuasiPi} against A_k (k = 1..m).  Rejects
/// empty cells; the cell must be grid-aligned at N and N/2.
ConvergenceReport convergence_sweep(const geom::CellSpec& cell,
                                    const std::vector<double>& eps_list, int resolution,
                                    const fem::EigenSolveOptions& options = {});

struct GapCountOptions {
    fem::EigenSolveOptions solver;
    bool compute_lambda_phi_max = false; ///< also max of Lambda_phi over the grid
};

struct GapCountReport {
    double eps = 0.0;
    int resolution = 0;
    int grid = 0;      ///< G
    double lambda_d = 0.0; ///< Lambda_D on Omega_0
    double window = 0.0;   ///< Lambda_D / eps^2; the bound in use
    std::string bound = "dirichlet"; ///< window uses Lambda_D, not Lambda
    std::optional<double> lambda_phi_max;
    std::vector<std::pair<double, double>> covered; ///< merged inflated bands
    std::vector<std::pair<double, double>> gaps;    ///< counted open intervals
    int gap_count = 0;
    int bands_used = 0;
    double sample_slack = 0.0; ///< worst grid-sample bracketing violation
    bool count_within_bound = false; ///< gap_count <= m
};

/// Counts maximal open intervals of [0, Lambda_D eps^{-2}] not covered by the
/// per-band enclosures [lambda_{k,N}, lambda_{k,D}], after validating every
/// G x G quasi sample against its bracket.  At most m gaps can appear.
GapCountReport gap_count_check(const geom::CellSpec& cell, double eps, int resolution,
                               int grid, const GapCountOptions& options = {});

struct DecouplingSample {
    fem::BCMode mode;
    double lambda_phi = 0.0;     ///< smallest Omega_0 eigenvalue at this phi
    double lambda_m1 = 0.0;      ///< lambda_{m+1, Quasi(phi)} of the full system
    double slack = 0.0;          ///< lambda_m1 * eps^2 - lambda_phi
};

/// Discrete decoupling bound lambda_{m+1,Quasi(phi)} * eps^2 >= Lambda_phi
/// at each supplied phi; slack is reported per sample (negative = violation).
std::vector<DecouplingSample> check_decoupling(const geom::CellSpec& cell, double eps,
                                               int resolution,
                                               const std::vector<fem::BCMode>& quasi_modes,
                                               const fem::EigenSolveOptions& options = {});

/// Limit spectra from a cell's realized measures, in inclusion order.
alg::LimitSpectra cell_limit_spectra(const geom::CellSpec& cell);

/// One quasi-periodic sample: grid index g1 * G + g2, phases, eigenvalues.
struct PhiSample {
    int index = 0;
    double phi1 = 0.0;
    double phi2 = 0.0;
    std::vector<double> values;
};

/// Full G x G quasi sweep with phi_d = 2 pi g_d / G, k eigenvalues each,
/// ordered by grid index.
std::vector<PhiSample> band_sweep(const geom::CellSpec& cell, double eps, int resolution,
                                  int grid, int k,
                                  const fem::EigenSolveOptions& options = {});

/// Samples along the path (0,0) -> (pi,0) -> (pi,pi) -> (0,0); `index` here
/// is the position along the path with `samples_per_segment` steps per leg.
std::vector<PhiSample> band_path_sweep(const geom::CellSpec& cell, double eps, int resolution,
                                       int samples_per_segment, int k,
                                       const fem::EigenSolveOptions& options = {});

} // namespace gapforge::lab

#include "gapforge/gap_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "gapforge/errors.hpp"

namespace gapforge::alg {

namespace {

// Relative tolerance deciding when two rates count as coincident.
constexpr double kTieRelTol = 1e-10;

void require(bool ok, const std::string& message) {
    if (!ok) throw ValidationError(message);
}

bool strictly_increasing(const std::vector<double>& v, double rel_tol) {
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] - v[i - 1] <= rel_tol * std::abs(v[i])) return false;
    }
    return true;
}

} // namespace

void TargetGaps::validate() const {
    require(!intervals.empty(), "target gaps: need at least one interval");
    double prev = 0.0;
    for (std::size_t j = 0; j < intervals.size(); ++j) {
        const auto [a, b] = intervals[j];
        const std::string at = " at interval " + std::to_string(j);
        require(std::isfinite(a) && std::isfinite(b), "target gaps: non-finite edge" + at);
        require(a > prev, "target gaps: edges must satisfy 0 < A_1 < B_1 < A_2 < ..." + at);
        require(b > a, "target gaps: right edge must exceed left edge" + at);
        prev = b;
    }
}

std::vector<double> DesignParams::rates() const {
    std::vector<double> out(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) out[j] = a[j] / b[j];
    return out;
}

void DesignParams::validate() const {
    require(!a.empty() && a.size() == b.size(), "design params: a and b must be nonempty and equal length");
    double bsum = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const std::string at = " at index " + std::to_string(j);
        require(std::isfinite(a[j]) && a[j] > 0.0, "design params: a_j must be positive" + at);
        require(std::isfinite(b[j]) && b[j] > 0.0, "design params: b_j must be positive" + at);
        bsum += b[j];
    }
    require(bsum < 1.0, "design params: volume fractions must sum below 1");
    require(std::abs(b0 - (1.0 - bsum)) <= 1e-12 * std::max(1.0, std::abs(b0)),
            "design params: b0 inconsistent with 1 - sum(b)");
    require(strictly_increasing(rates(), kTieRelTol),
            "design params: rates a_j/b_j must be strictly increasing");
}

void SecularCoefficients::validate() const {
    require(!poles.empty() && poles.size() == weights.size(),
            "secular coefficients: poles and weights must be nonempty and equal length");
    require(std::isfinite(complement) && complement > 0.0,
            "secular coefficients: complement must be positive");
    require(poles.front() > 0.0, "secular coefficients: poles must be positive");
    require(strictly_increasing(poles, kTieRelTol),
            "secular coefficients: poles must be strictly increasing");
    for (double w : weights)
        require(std::isfinite(w) && w > 0.0, "secular coefficients: weights must be positive");
}

SecularCoefficients SecularCoefficients::from_design(const DesignParams& params) {
    params.validate();
    SecularCoefficients coeffs;
    coeffs.poles = params.rates();
    coeffs.weights = params.b;
    coeffs.complement = params.b0;
    return coeffs;
}

SecularCoefficients SecularCoefficients::from_measures(const std::vector<double>& strengths,
                                                       const std::vector<double>& perimeters,
                                                       const std::vector<double>& volumes,
                                                       double volume0) {
    require(strengths.size() == perimeters.size() && strengths.size() == volumes.size(),
            "secular coefficients: strengths, perimeters, volumes must have equal length");
    SecularCoefficients coeffs;
    coeffs.poles.resize(strengths.size());
    coeffs.weights = volumes;
    coeffs.complement = volume0;
    for (std::size_t j = 0; j < strengths.size(); ++j)
        coeffs.poles[j] = coupling_rate(strengths[j], perimeters[j], volumes[j]);
    coeffs.validate();
    return coeffs;
}

double coupling_rate(double strength, double surface_area, double volume) {
    require(std::isfinite(strength) && strength > 0.0, "coupling rate: strength must be positive");
    require(std::isfinite(surface_area) && surface_area > 0.0,
            "coupling rate: surface area must be positive");
    require(std::isfinite(volume) && volume > 0.0, "coupling rate: volume must be positive");
    return strength * surface_area / volume;
}

SecularValue eval_secular(const SecularCoefficients& coeffs, double lambda) {
    const std::size_t m = coeffs.size();
    SecularValue out;

    // Cleared numerator: b0 prod(A_i - l) + sum_j A_j b_j prod_{i!=j}(A_i - l).
    // Evaluated directly; degree m keeps this stable for the sizes we use.
    double prod_all = coeffs.complement;
    for (std::size_t i = 0; i < m; ++i) prod_all *= coeffs.poles[i] - lambda;
    double acc = prod_all;
    for (std::size_t j = 0; j < m; ++j) {
        double term = coeffs.poles[j] * coeffs.weights[j];
        for (std::size_t i = 0; i < m; ++i) {
            if (i != j) term *= coeffs.poles[i] - lambda;
        }
        acc += term;
    }
    out.numerator = acc;

    for (std::size_t j = 0; j < m; ++j) {
        const double gap = coeffs.poles[j] - lambda;
        if (std::abs(gap) <= 64.0 * std::numeric_limits<double>::epsilon() *
                                 std::max(1.0, std::abs(coeffs.poles[j]))) {
            out.value_defined = false;
            out.value = std::numeric_limits<double>::quiet_NaN();
            return out;
        }
    }
    double f = 1.0;
    for (std::size_t j = 0; j < m; ++j)
        f += coeffs.poles[j] * coeffs.weights[j] / (coeffs.complement * (coeffs.poles[j] - lambda));
    out.value = f;
    return out;
}

std::vector<double> gap_roots(const SecularCoefficients& coeffs) {
    coeffs.validate();
    const std::size_t m = coeffs.size();

    const auto numer = [&coeffs](double lambda) {
        return eval_secular(coeffs, lambda).numerator;
    };

    // One strict sign change of the cleared numerator per bracket:
    // (A_j, A_{j+1}) for j < m, then (A_m, U) with U pushed right until the
    // sign flips.  F decreases from +inf to -inf across each pole pair.
    std::vector<double> roots;
    roots.reserve(m);
    for (std::size_t j = 0; j < m; ++j) {
        double lo = coeffs.poles[j];
        double hi;
        if (j + 1 < m) {
            hi = coeffs.poles[j + 1];
        } else {
            double mass = 0.0;
            for (std::size_t i = 0; i < m; ++i) mass += coeffs.poles[i] * coeffs.weights[i];
            double offset = mass / coeffs.complement + 1.0;
            hi = coeffs.poles[m - 1] + offset;
            int doublings = 0;
            while (numer(hi) * numer(lo) > 0.0) {
                offset *= 2.0;
                hi = coeffs.poles[m - 1] + offset;
                if (++doublings > 64)
                    throw NumericalError("gap roots: no sign change right of the last pole");
            }
        }

        double flo = numer(lo);
        double fhi = numer(hi);
        if (flo == 0.0 || fhi == 0.0 || flo * fhi > 0.0)
            throw NumericalError("gap roots: bracket lost its sign change at index " +
                                 std::to_string(j));

        // Plain bisection; monotone convergence regardless of conditioning.
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double width = hi - lo;
            if (width <= 1e-12 || width <= 1e-12 * std::abs(mid)) break;
            const double fmid = numer(mid);
            if (fmid == 0.0) {
                lo = hi = mid;
                break;
            }
            if (fmid * flo < 0.0) {
                hi = mid;
                fhi = fmid;
            } else {
                lo = mid;
                flo = fmid;
            }
        }
        roots.push_back(0.5 * (lo + hi));
    }
    return roots;
}

DesignParams inverse_design(const TargetGaps& targets) {
    targets.validate();
    const std::size_t m = targets.size();

    std::vector<double> rho(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double aj = targets.intervals[j].first;
        double r = (targets.intervals[j].second - aj) / aj;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == j) continue;
            r *= (targets.intervals[i].second - aj) / (targets.intervals[i].first - aj);
        }
        // Interlacing makes every factor positive; a nonpositive rho means
        // the input slipped past validate() somehow.
        if (!(r > 0.0) || !std::isfinite(r))
            throw NumericalError("inverse design: nonpositive weight at index " +
                                 std::to_string(j));
        rho[j] = r;
    }

    double rho_sum = 0.0;
    for (double r : rho) rho_sum += r;

    DesignParams params;
    params.a.resize(m);
    params.b.resize(m);
    double bsum = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        params.b[j] = rho[j] / (1.0 + rho_sum);
        params.a[j] = targets.intervals[j].first * params.b[j];
        bsum += params.b[j];
    }
    params.b0 = 1.0 - bsum;
    params.validate();
    return params;
}

Eigen::MatrixXd limit_neumann_matrix(const std::vector<double>& strengths,
                                     const std::vector<double>& perimeters,
                                     const std::vector<double>& volumes) {
    require(!strengths.empty(), "limit matrix: need at least one inclusion");
    require(volumes.size() == strengths.size() + 1,
            "limit matrix: volumes must hold the matrix component first");
    require(perimeters.size() == strengths.size(),
            "limit matrix: perimeters must match strengths");
    const std::size_t m = strengths.size();
    const double vol0 = volumes[0];
    require(vol0 > 0.0, "limit matrix: matrix-component volume must be positive");

    Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m) + 1,
                                                static_cast<Eigen::Index>(m) + 1);
    for (std::size_t j = 0; j < m; ++j) {
        const double flux = coupling_rate(strengths[j], perimeters[j], 1.0); // q |Gamma|
        const double volj = volumes[j + 1];
        require(volj > 0.0, "limit matrix: inclusion volume must be positive");
        const auto row = static_cast<Eigen::Index>(j) + 1;
        mat(0, 0) += flux / vol0;
        mat(0, row) = -flux / vol0;
        mat(row, 0) = -flux / volj;
        mat(row, row) = flux / volj;
    }
    return mat;
}

std::vector<double> limit_neumann_eigenvalues(const Eigen::MatrixXd& matrix,
                                              const std::vector<double>& volumes) {
    const auto n = matrix.rows();
    require(matrix.cols() == n, "limit eigenvalues: matrix must be square");
    require(static_cast<Eigen::Index>(volumes.size()) == n,
            "limit eigenvalues: need one volume per row");

    // D^{1/2} M D^{-1/2} is symmetric when M is self-adjoint in the
    // volume-weighted inner product; symmetrize explicitly to shed the
    // rounding asymmetry before calling the symmetric solver.
    Eigen::VectorXd sqrt_vol(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        require(volumes[static_cast<std::size_t>(i)] > 0.0,
                "limit eigenvalues: volumes must be positive");
        sqrt_vol(i) = std::sqrt(volumes[static_cast<std::size_t>(i)]);
    }
    Eigen::MatrixXd sym = sqrt_vol.asDiagonal() * matrix *
                          sqrt_vol.cwiseInverse().asDiagonal();
    sym = 0.5 * (sym + sym.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw NumericalError("limit eigenvalues: symmetric eigensolver failed");

    std::vector<double> out(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
    std::sort(out.begin(), out.end());
    return out;
}

DirichletSpectrum limit_dirichlet_spectrum(const std::vector<double>& strengths,
                                           const std::vector<double>& perimeters,
                                           const std::vector<double>& volumes) {
    require(!strengths.empty() && strengths.size() == perimeters.size() &&
                strengths.size() == volumes.size(),
            "limit Dirichlet spectrum: inputs must be nonempty and equal length");
    DirichletSpectrum spec;
    spec.values.resize(strengths.size());
    for (std::size_t j = 0; j < strengths.size(); ++j)
        spec.values[j] = coupling_rate(strengths[j], perimeters[j], volumes[j]);
    std::sort(spec.values.begin(), spec.values.end());
    for (std::size_t j = 1; j < spec.values.size(); ++j) {
        if (spec.values[j] - spec.values[j - 1] <= kTieRelTol * spec.values[j]) {
            spec.duplicate_warning = true;
            break;
        }
    }
    return spec;
}

std::optional<double> ep05_bound(double lambda_k, double delta1, double delta2,
                                 double n1, double n2) {
    require(std::isfinite(lambda_k) && lambda_k >= 0.0, "comparison bound: lambda must be >= 0");
    require(delta1 >= 0.0 && delta2 >= 0.0, "comparison bound: deltas must be >= 0");
    require(n1 >= 0.0 && n2 >= 0.0, "comparison bound: exponents must be >= 0");

    const double p1 = 1.0 + std::pow(lambda_k, n1);
    const double p2 = 1.0 + std::pow(lambda_k, n2);
    const double denom = 1.0 - p1 * delta1;
    if (!(denom > 0.0)) return std::nullopt;
    return lambda_k + (lambda_k * p1 * delta1 + p2 * delta2) / denom;
}

LimitSpectra limit_spectra(const SecularCoefficients& coeffs) {
    LimitSpectra spectra;
    spectra.dirichlet = coeffs.poles;
    spectra.neumann.reserve(coeffs.size() + 1);
    spectra.neumann.push_back(0.0);
    for (double root : gap_roots(coeffs)) spectra.neumann.push_back(root);
    return spectra;
}

} // namespace gapforge::alg

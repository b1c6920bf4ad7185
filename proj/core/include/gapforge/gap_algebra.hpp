#pragma once

// Zero-size limit model for a periodic lattice of delta'-type traps.
//
// Each inclusion j contributes a coupling rate
//
//     A_j = q_j * |boundary_j| / |volume_j|,
//
// and the right gap edges B_j are the roots of the rational secular function
//
//     F(lambda) = 1 + sum_j  A_j b_j / (b0 (A_j - lambda)),
//
// where b_j is the volume fraction of inclusion j and b0 the complement.
// The poles A_j and roots B_j strictly interlace:
// A_1 < B_1 < A_2 < ... < A_m < B_m.  The map (a, b) -> (A, B) with
// a_j = A_j b_j is a bijection onto the interlaced tuples, so any requested
// gap family can be hit exactly in the limit; inverse_design evaluates the
// closed-form inverse.

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace gapforge::alg {

/// Requested limit gaps (A_j, B_j), strictly interlaced and positive.
struct TargetGaps {
    std::vector<std::pair<double, double>> intervals;

    std::size_t size() const { return intervals.size(); }
    /// Throws ValidationError unless 0 < A_1 < B_1 < A_2 < ... < A_m < B_m.
    void validate() const;
};

/// Point in the design domain: a_j = A_j b_j and volume fractions b_j.
struct DesignParams {
    std::vector<double> a;
    std::vector<double> b;
    double b0 = 0.0; ///< complement volume fraction, 1 - sum(b)

    std::size_t size() const { return a.size(); }
    std::vector<double> rates() const; ///< A_j = a_j / b_j
    /// Throws ValidationError unless a_j > 0, b_j > 0, sum(b) < 1 and
    /// a_j/b_j is strictly increasing.
    void validate() const;
};

/// Coefficients of the secular function F: poles A_j, weights b_j, and b0.
struct SecularCoefficients {
    std::vector<double> poles;   ///< A_j, strictly increasing
    std::vector<double> weights; ///< b_j > 0
    double complement = 0.0;     ///< b0 > 0

    std::size_t size() const { return poles.size(); }
    void validate() const;

    static SecularCoefficients from_design(const DesignParams& params);
    /// Builds coefficients from concrete measures, in the given inclusion
    /// order.  Here weights are |Omega_j| and the complement is |Omega_0|;
    /// only the ratios enter F, so absolute volumes are fine.
    static SecularCoefficients from_measures(const std::vector<double>& strengths,
                                             const std::vector<double>& perimeters,
                                             const std::vector<double>& volumes,
                                             double volume0);
};

/// Limit fiber spectra: Neumann {0, B_1..B_m} and Dirichlet {A_1..A_m}.
struct LimitSpectra {
    std::vector<double> neumann;
    std::vector<double> dirichlet;
};

/// A = q * |boundary| / |volume|.  All arguments must be positive.
double coupling_rate(double strength, double surface_area, double volume);

struct SecularValue {
    double value = 0.0;     ///< F(lambda); meaningful only if value_defined
    double numerator = 0.0; ///< pole-cleared degree-m polynomial, same roots
    bool value_defined = true;
};

/// Evaluates F(lambda) and its pole-cleared numerator
///   b0 * prod_i (A_i - lambda) + sum_j A_j b_j prod_{i != j} (A_i - lambda).
/// The rational value is flagged undefined within machine tolerance of a
/// pole; the numerator is defined everywhere.
SecularValue eval_secular(const SecularCoefficients& coeffs, double lambda);

/// All m roots of F, ascending.  Each root is isolated by the sign change of
/// the cleared numerator between consecutive poles (the last one between A_m
/// and a doubling upper bracket) and resolved by bisection.
std::vector<double> gap_roots(const SecularCoefficients& coeffs);

/// Closed-form inverse of the gap map: from interlaced targets to (a, b).
/// With rho_j = ((B_j - A_j)/A_j) * prod_{i != j} (B_i - A_j)/(A_i - A_j),
/// b_j = rho_j / (1 + sum rho_i) and a_j = A_j b_j.
DesignParams inverse_design(const TargetGaps& targets);

/// The (m+1) x (m+1) one-cell limit operator in the Neumann/periodic case.
/// Row 0 couples the matrix component to every inclusion; the matrix is
/// symmetric w.r.t. the volume-weighted inner product, and its spectrum is
/// {0, B_1, ..., B_m}.  `volumes` holds |Omega_0| first, then |Omega_j|.
Eigen::MatrixXd limit_neumann_matrix(const std::vector<double>& strengths,
                                     const std::vector<double>& perimeters,
                                     const std::vector<double>& volumes);

/// Eigenvalues of the limit Neumann matrix, ascending.  The matrix is
/// conjugated by diag(volumes)^{1/2} to an ordinary symmetric problem.
std::vector<double> limit_neumann_eigenvalues(const Eigen::MatrixXd& matrix,
                                              const std::vector<double>& volumes);

struct DirichletSpectrum {
    std::vector<double> values; ///< {A_j} ascending
    bool duplicate_warning = false;
};

/// Limit Dirichlet spectrum {q_j |boundary_j| / |volume_j|}, sorted.  Flags
/// (but does not reject) near-duplicate rates.
DirichletSpectrum limit_dirichlet_spectrum(const std::vector<double>& strengths,
                                           const std::vector<double>& perimeters,
                                           const std::vector<double>& volumes);

/// Eigenvalue comparison bound
///   lambda + (lambda (1 + lambda^n1) d1 + (1 + lambda^n2) d2)
///          / (1 - (1 + lambda^n1) d1),
/// valid while the denominator stays positive; nullopt otherwise.
std::optional<double> ep05_bound(double lambda_k, double delta1, double delta2,
                                 double n1, double n2);

/// Neumann {0, roots} and Dirichlet {poles} limit spectra in one struct.
LimitSpectra limit_spectra(const SecularCoefficients& coeffs);

} // namespace gapforge::alg

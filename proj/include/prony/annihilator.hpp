#pragma once

#include <vector>

#include "prony/numerics.hpp"

namespace prony {

/// Measurements y_l in C^S for l = 0..L. Row l, column s holds y_l(s).
class MeasurementRecord {
public:
    explicit MeasurementRecord(ComplexMatrix values);

    /// Scalar record (S = 1).
    static MeasurementRecord scalar(std::span<const cplx> samples);

    const ComplexMatrix& values() const noexcept { return values_; }
    Index L() const noexcept { return values_.rows() - 1; }
    Index S() const noexcept { return values_.cols(); }

    /// Largest Euclidean norm over the rows y_l.
    double max_row_norm() const;

    /// Row-major flattening: index l * S + s.
    ComplexVector flattened() const;

private:
    ComplexMatrix values_;
};

struct RecoveryConfig {
    Index kappa = 1;  ///< upper bound on the number of spectral points
    Index M = 1;      ///< upper bound on the dimension of each spectral submodule
    double rank_rel_tol = 1e-10;
    double zero_root_tol = 1e-8;
    double root_match_tol = 1e-6;
    /// Roots closer than this are merged into one point of multiplicity > 1.
    /// Only applied when M > 1.
    double root_cluster_tol = 5e-2;
    /// Relative annihilation residual above which the fit is flagged.
    double annihilation_tol = 1e-8;
    /// Modes whose whole coefficient vector is below this are dropped.
    double coeff_drop_tol = 1e-10;

    Index annihilator_degree() const noexcept { return kappa * M; }
    Index required_L() const noexcept { return 2 * kappa * M - 1; }

    void validate() const;
};

struct AnnihilatorResult {
    ComplexPolynomial poly;
    /// Distinct nonzero roots (cluster centroids when M > 1).
    std::vector<cplx> r_min;
    /// Multiplicity of each entry of r_min.
    std::vector<Index> multiplicities;
    Index hankel_rank = 0;
    /// max_k |sum_l alpha_l y_{l+k}| / max_l |y_l|; zero for the zero record.
    double annihilation_residual = 0.0;
    /// True when the rank reached kappa * M, so a larger spectrum cannot be
    /// ruled out from the measurements alone.
    bool rank_saturated = false;
};

/// Channel-major stack of the per-channel Hankel blocks: row s * (L - degree + 1) + k,
/// column l holds y_{l+k}(s).
ComplexMatrix build_block_hankel(const MeasurementRecord& meas, Index degree);

AnnihilatorResult minimal_annihilator(const MeasurementRecord& meas, const RecoveryConfig& cfg);

/// Largest relative annihilation residual of `poly` against the measurements.
double annihilation_residual(const MeasurementRecord& meas, const ComplexPolynomial& poly);

/// Merges roots within `tol` of each other into centroids, at most
/// `max_multiplicity` roots per cluster. Output is sorted by (real, imag).
void cluster_roots(std::span<const cplx> roots, double tol, Index max_multiplicity,
                   std::vector<cplx>& centroids, std::vector<Index>& multiplicities);

}  // namespace prony

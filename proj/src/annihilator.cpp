#include "prony/annihilator.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numeric>

#include "prony/errors.hpp"

namespace prony {

MeasurementRecord::MeasurementRecord(ComplexMatrix values) : values_(std::move(values)) {
    if (values_.rows() < 2) throw ContractViolation("measurement record needs L >= 1 (at least two rows)");
    if (values_.cols() < 1) throw ContractViolation("measurement record needs at least one channel");
    if (!values_.allFinite()) throw ContractViolation("measurement record contains non-finite values");
}

MeasurementRecord MeasurementRecord::scalar(std::span<const cplx> samples) {
    ComplexMatrix v(static_cast<Index>(samples.size()), 1);
    for (std::size_t i = 0; i < samples.size(); ++i) v(static_cast<Index>(i), 0) = samples[i];
    return MeasurementRecord(std::move(v));
}

double MeasurementRecord::max_row_norm() const { return values_.rowwise().norm().maxCoeff(); }

ComplexVector MeasurementRecord::flattened() const {
    ComplexVector out(values_.size());
    for (Index l = 0; l < values_.rows(); ++l)
        for (Index s = 0; s < values_.cols(); ++s) out(l * values_.cols() + s) = values_(l, s);
    return out;
}

void RecoveryConfig::validate() const {
    if (kappa < 1) throw ContractViolation("kappa must be at least 1");
    if (M < 1) throw ContractViolation("M must be at least 1");
    for (double tol : {rank_rel_tol, zero_root_tol, root_match_tol, root_cluster_tol, annihilation_tol,
                       coeff_drop_tol}) {
        if (!(tol > 0.0) || !std::isfinite(tol)) throw ContractViolation("tolerances must be positive and finite");
    }
}

ComplexMatrix build_block_hankel(const MeasurementRecord& meas, Index degree) {
    if (degree < 0) throw ContractViolation("build_block_hankel: negative degree");
    const Index L = meas.L();
    if (L < 2 * degree - 1) throw InsufficientMeasurements(2 * degree - 1, L);
    const Index blocks = L - degree + 1;
    const Index S = meas.S();
    ComplexMatrix h(S * blocks, degree + 1);
    for (Index s = 0; s < S; ++s)
        for (Index k = 0; k < blocks; ++k)
            for (Index l = 0; l <= degree; ++l) h(s * blocks + k, l) = meas.values()(l + k, s);
    return h;
}

double annihilation_residual(const MeasurementRecord& meas, const ComplexPolynomial& poly) {
    const double scale = meas.max_row_norm();
    if (scale == 0.0) return 0.0;
    const Index deg = poly.degree();
    const auto& a = poly.coeffs();
    double worst = 0.0;
    for (Index k = 0; k + deg <= meas.L(); ++k) {
        ComplexVector acc = ComplexVector::Zero(meas.S());
        for (Index l = 0; l <= deg; ++l) acc += a[static_cast<std::size_t>(l)] * meas.values().row(l + k).transpose();
        worst = std::max(worst, acc.norm());
    }
    return worst / scale;
}

void cluster_roots(std::span<const cplx> roots, double tol, Index max_multiplicity, std::vector<cplx>& centroids,
                   std::vector<Index>& multiplicities) {
    // Agglomerative: repeatedly merge the two closest clusters whose combined
    // size stays within the multiplicity bound, until the gap exceeds tol.
    struct Cluster {
        cplx sum;
        Index size;
        cplx centroid() const { return sum / static_cast<double>(size); }
    };
    std::vector<Cluster> cl;
    for (const cplx z : roots) cl.push_back({z, 1});
    for (;;) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0, bj = 0;
        for (std::size_t i = 0; i < cl.size(); ++i)
            for (std::size_t j = i + 1; j < cl.size(); ++j) {
                if (cl[i].size + cl[j].size > max_multiplicity) continue;
                const double d = std::abs(cl[i].centroid() - cl[j].centroid());
                if (d < best) best = d, bi = i, bj = j;
            }
        if (!(best <= tol)) break;
        cl[bi].sum += cl[bj].sum;
        cl[bi].size += cl[bj].size;
        cl.erase(cl.begin() + static_cast<std::ptrdiff_t>(bj));
    }
    auto lex = [](const Cluster& a, const Cluster& b) {
        const cplx x = a.centroid(), y = b.centroid();
        return x.real() < y.real() || (x.real() == y.real() && x.imag() < y.imag());
    };
    std::sort(cl.begin(), cl.end(), lex);
    centroids.clear();
    multiplicities.clear();
    for (const auto& c : cl) {
        centroids.push_back(c.centroid());
        multiplicities.push_back(c.size);
    }
}

AnnihilatorResult minimal_annihilator(const MeasurementRecord& meas, const RecoveryConfig& cfg) {
    cfg.validate();
    const Index full_degree = cfg.annihilator_degree();
    if (meas.L() < cfg.required_L()) throw InsufficientMeasurements(cfg.required_L(), meas.L());

    AnnihilatorResult out;
    const ComplexMatrix hankel = build_block_hankel(meas, full_degree);
    Index r = numerical_rank(hankel, cfg.rank_rel_tol);
    if (r >= full_degree) {
        out.rank_saturated = true;
        r = full_degree;
    }
    out.hankel_rank = r;
    if (r == 0) return out;

    // Monic degree-r annihilator: every valid shift k gives one equation.
    const ComplexMatrix h = build_block_hankel(meas, r);
    const ComplexVector alpha = least_squares_solve(h.leftCols(r), -h.col(r));
    std::vector<cplx> coeffs(static_cast<std::size_t>(r + 1));
    for (Index l = 0; l < r; ++l) coeffs[static_cast<std::size_t>(l)] = alpha(l);
    coeffs.back() = cplx{1.0, 0.0};
    out.poly = ComplexPolynomial(std::move(coeffs));
    out.annihilation_residual = annihilation_residual(meas, out.poly);

    std::vector<cplx> nonzero;
    for (const cplx z : polynomial_roots(out.poly))
        if (std::abs(z) > cfg.zero_root_tol) nonzero.push_back(z);

    if (cfg.M > 1) {
        cluster_roots(nonzero, cfg.root_cluster_tol, cfg.M, out.r_min, out.multiplicities);
    } else {
        cluster_roots(nonzero, 0.0, 1, out.r_min, out.multiplicities);
    }
    return out;
}

}  // namespace prony

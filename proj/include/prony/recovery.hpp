#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "prony/annihilator.hpp"
#include "prony/errors.hpp"
#include "prony/numerics.hpp"

namespace prony {

/// Everything the generic recovery driver needs to know about one family
/// of signals. `Point` is the coordinate of a spectral point (a frequency,
/// an eigenvalue, a time-frequency shift, ...).
template <class Point>
struct InstanceDescriptor {
    std::function<cplx(const Point&)> symbol;
    /// Preimage of a root on Omega; throws SpuriousRoot when there is none.
    /// The second argument is the matching tolerance in the root plane.
    std::function<Point(cplx, double)> symbol_inverse;
    std::function<bool(const Point&)> omega_contains;
    /// Matrix whose column block j holds the forward measurements (row-major
    /// over (l, s), l = 0..L) of the basis of the spectral submodule at F[j].
    std::function<ComplexMatrix(const std::vector<Point>&, Index L)> coefficient_system;
    /// Number of coefficient columns that coefficient_system emits for a point.
    std::function<Index(const Point&)> modes_at;
    std::function<double(const Point&, const Point&)> distance;
    std::function<bool(const Point&, const Point&)> less;
    Index mode_dimension = 1;
};

template <class Point>
struct Mode {
    Point gamma;
    ComplexVector coeffs;
};

template <class Point>
struct SparseSignalModel {
    std::vector<Mode<Point>> modes;

    bool empty() const noexcept { return modes.empty(); }
    std::size_t size() const noexcept { return modes.size(); }
};

template <class Point>
struct SpectrumMatch {
    std::vector<Point> points;
    std::vector<cplx> spurious_roots;
    std::vector<std::string> reasons;
};

template <class Point>
struct CoefficientFit {
    SparseSignalModel<Point> model;
    double residual = 0.0;           ///< |G c - y|
    double relative_residual = 0.0;  ///< residual / |y|, zero for y = 0
    Index rank = 0;
    Index unknowns = 0;
    bool non_unique = false;
};

template <class Point>
struct RecoveryResult {
    SparseSignalModel<Point> model;
    AnnihilatorResult annihilator;
    CoefficientFit<Point> fit;
    std::vector<cplx> spurious_roots;
    std::vector<std::string> warnings;

    bool clean() const noexcept { return warnings.empty(); }
};

enum class RootPolicy { Strict, Lenient };

/// Inverts every root of the annihilator that has a preimage on Omega and
/// collects the rest. Points are returned in the instance's coordinate order;
/// roots mapping to the same point are merged.
template <class Point>
SpectrumMatch<Point> match_spectrum(const AnnihilatorResult& ann, const InstanceDescriptor<Point>& inst,
                                    const RecoveryConfig& cfg) {
    SpectrumMatch<Point> out;
    for (const cplx z : ann.r_min) {
        try {
            Point g = inst.symbol_inverse(z, cfg.root_match_tol);
            if (!inst.omega_contains(g)) throw SpuriousRoot(z, "preimage outside the parameter domain");
            if (std::abs(inst.symbol(g) - z) > cfg.root_match_tol)
                throw SpuriousRoot(z, "symbol round trip misses the root");
            out.points.push_back(std::move(g));
        } catch (const SpuriousRoot& e) {
            out.spurious_roots.push_back(z);
            out.reasons.push_back(e.reason());
        }
    }
    std::sort(out.points.begin(), out.points.end(), inst.less);
    auto same = [&](const Point& a, const Point& b) { return inst.distance(a, b) == 0.0; };
    out.points.erase(std::unique(out.points.begin(), out.points.end(), same), out.points.end());
    return out;
}

template <class Point>
std::vector<Point> recover_spectrum(const AnnihilatorResult& ann, const InstanceDescriptor<Point>& inst,
                                    const RecoveryConfig& cfg) {
    auto match = match_spectrum(ann, inst, cfg);
    if (!match.spurious_roots.empty()) throw SpuriousRoot(match.spurious_roots.front(), match.reasons.front());
    return std::move(match.points);
}

template <class Point>
CoefficientFit<Point> recover_coefficients(const std::vector<Point>& F, const MeasurementRecord& meas,
                                           const InstanceDescriptor<Point>& inst, const RecoveryConfig& cfg) {
    CoefficientFit<Point> fit;
    const ComplexVector y = meas.flattened();
    const double y_norm = y.norm();
    if (F.empty()) {
        fit.residual = y_norm;
        fit.relative_residual = y_norm == 0.0 ? 0.0 : 1.0;
        return fit;
    }
    const ComplexMatrix g = inst.coefficient_system(F, meas.L());
    if (g.rows() != y.size())
        throw ContractViolation("coefficient system has " + std::to_string(g.rows()) + " rows, measurements have " +
                                std::to_string(y.size()));
    const ComplexVector c = least_squares_solve(g, y);
    fit.unknowns = g.cols();
    fit.rank = numerical_rank(g, cfg.rank_rel_tol);
    fit.non_unique = fit.rank < fit.unknowns;
    fit.residual = (g * c - y).norm();
    fit.relative_residual = y_norm == 0.0 ? 0.0 : fit.residual / y_norm;

    Index offset = 0;
    for (const Point& p : F) {
        const Index width = inst.modes_at(p);
        ComplexVector block = c.segment(offset, width);
        offset += width;
        if (block.cwiseAbs().maxCoeff() < cfg.coeff_drop_tol) continue;
        fit.model.modes.push_back({p, std::move(block)});
    }
    return fit;
}

/// Annihilator, spectrum, coefficients. With RootPolicy::Strict a spurious
/// root aborts with SpuriousRoot; with Lenient it is recorded as a warning
/// and the remaining points are still fitted.
template <class Point>
RecoveryResult<Point> run_recovery(const MeasurementRecord& meas, const InstanceDescriptor<Point>& inst,
                                   const RecoveryConfig& cfg, RootPolicy policy = RootPolicy::Strict) {
    RecoveryResult<Point> out;
    out.annihilator = minimal_annihilator(meas, cfg);

    auto match = match_spectrum(out.annihilator, inst, cfg);
    if (!match.spurious_roots.empty()) {
        if (policy == RootPolicy::Strict) throw SpuriousRoot(match.spurious_roots.front(), match.reasons.front());
        out.spurious_roots = match.spurious_roots;
        for (std::size_t i = 0; i < match.reasons.size(); ++i)
            out.warnings.push_back(SpuriousRoot(match.spurious_roots[i], match.reasons[i]).what());
    }

    out.fit = recover_coefficients(match.points, meas, inst, cfg);
    out.model = out.fit.model;

    if (out.fit.non_unique) out.warnings.emplace_back("non-unique coefficients: coefficient system is rank deficient");
    if (out.annihilator.annihilation_residual > cfg.annihilation_tol)
        out.warnings.emplace_back("annihilation residual exceeds tolerance");
    if (out.annihilator.rank_saturated && !out.warnings.empty())
        out.warnings.emplace_back("rank saturation: Hankel rank reached kappa*M; the spectrum may exceed kappa");
    return out;
}

struct SymbolValidation {
    double min_pairwise_separation = std::numeric_limits<double>::infinity();
    double min_modulus = std::numeric_limits<double>::infinity();
    double max_round_trip_error = 0.0;
    bool injective = false;
    bool nonvanishing = false;
    bool round_trip_ok = false;

    bool passed() const noexcept { return injective && nonvanishing && round_trip_ok; }
};

struct SymbolValidationTolerances {
    double separation = 0.0;   ///< injective iff min separation is strictly above this
    double modulus = 0.0;      ///< nonvanishing iff min |h| is strictly above this
    double round_trip = 1e-9;  ///< in the instance's coordinate metric
    double root_match = 1e-6;  ///< handed to symbol_inverse
};

template <class Point>
SymbolValidation validate_symbol(const InstanceDescriptor<Point>& inst, const std::vector<Point>& grid,
                                 const SymbolValidationTolerances& tol = {}) {
    SymbolValidation rep;
    std::vector<cplx> values;
    values.reserve(grid.size());
    for (const auto& g : grid) values.push_back(inst.symbol(g));

    for (std::size_t i = 0; i < values.size(); ++i) {
        rep.min_modulus = std::min(rep.min_modulus, std::abs(values[i]));
        for (std::size_t j = i + 1; j < values.size(); ++j)
            rep.min_pairwise_separation = std::min(rep.min_pairwise_separation, std::abs(values[i] - values[j]));
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double err = std::numeric_limits<double>::infinity();
        try {
            err = inst.distance(inst.symbol_inverse(values[i], tol.root_match), grid[i]);
        } catch (const std::exception&) {
        }
        rep.max_round_trip_error = std::max(rep.max_round_trip_error, err);
    }
    rep.injective = rep.min_pairwise_separation > tol.separation;
    rep.nonvanishing = rep.min_modulus > tol.modulus;
    rep.round_trip_ok = rep.max_round_trip_error <= tol.round_trip;
    return rep;
}

}  // namespace prony

#include "prony/confluent.hpp"

#include <cmath>
#include <numbers>

#include "prony/errors.hpp"

namespace prony {

cplx confluent_sample(const std::vector<PolynomialMode>& modes, double t) {
    cplx acc{};
    for (const auto& m : modes) {
        cplx q{};
        for (Index k = m.q.size() - 1; k >= 0; --k) q = q * t + m.q(k);
        acc += q * std::polar(1.0, 2.0 * std::numbers::pi * m.gamma * t);
    }
    return acc;
}

ComplexMatrix confluent_system(const std::vector<cplx>& thetas, Index D, Index K) {
    if (D < 0 || K < 0) throw ContractViolation("confluent_system: negative size");
    for (std::size_t i = 0; i < thetas.size(); ++i)
        for (std::size_t j = i + 1; j < thetas.size(); ++j)
            if (thetas[i] == thetas[j]) throw ContractViolation("confluent_system: duplicate nodes");

    const Index width = D + 1;
    ComplexMatrix v(K + 1, static_cast<Index>(thetas.size()) * width);
    for (std::size_t n = 0; n < thetas.size(); ++n) {
        cplx power{1.0, 0.0};
        for (Index k = 0; k <= K; ++k) {
            double km = 1.0;
            for (Index m = 0; m <= D; ++m) {
                v(k, static_cast<Index>(n) * width + m) = km * power;
                km *= static_cast<double>(k);
            }
            power *= thetas[n];
        }
    }
    return v;
}

PolynomialFit recover_polynomials(const std::vector<Frequency>& F, Index D, std::span<const cplx> samples,
                                  double rank_rel_tol) {
    const auto n = static_cast<Index>(samples.size());
    if (n < static_cast<Index>(F.size()) * (D + 1))
        throw ContractViolation("recover_polynomials: need at least |F|(D+1) samples");
    PolynomialFit fit;
    if (F.empty()) return fit;

    std::vector<cplx> thetas;
    for (const auto g : F) thetas.push_back(classic_symbol(g));
    const ComplexMatrix v = confluent_system(thetas, D, n - 1);
    const ComplexVector y = Eigen::Map<const ComplexVector>(samples.data(), n);
    const ComplexVector c = least_squares_solve(v, y);
    fit.residual = (v * c - y).norm();
    fit.non_unique = numerical_rank(v, rank_rel_tol) < v.cols();
    for (std::size_t j = 0; j < F.size(); ++j)
        fit.modes.push_back({F[j], c.segment(static_cast<Index>(j) * (D + 1), D + 1)});
    return fit;
}

MeasurementRecord confluent_measure(const std::vector<PolynomialMode>& modes, Index L) {
    ComplexMatrix y(L + 1, 1);
    for (Index l = 0; l <= L; ++l) y(l, 0) = confluent_sample(modes, static_cast<double>(l));
    return MeasurementRecord(std::move(y));
}

InstanceDescriptor<Frequency> confluent_instance(Index D) {
    if (D < 0) throw ContractViolation("confluent_instance: negative degree");
    InstanceDescriptor<Frequency> inst = classic_instance();
    inst.coefficient_system = [D](const std::vector<Frequency>& F, Index L) {
        std::vector<cplx> thetas;
        for (const auto g : F) thetas.push_back(classic_symbol(g));
        return confluent_system(thetas, D, L);
    };
    inst.modes_at = [D](const Frequency&) { return D + 1; };
    inst.mode_dimension = D + 1;
    return inst;
}

SparseSignalModel<Frequency> to_signal_model(const std::vector<PolynomialMode>& modes, Index D) {
    SparseSignalModel<Frequency> model;
    for (const auto& m : modes) {
        if (m.q.size() > D + 1) throw ContractViolation("polynomial amplitude exceeds the degree bound");
        ComplexVector c = ComplexVector::Zero(D + 1);
        c.head(m.q.size()) = m.q;
        model.modes.push_back({m.gamma, std::move(c)});
    }
    return model;
}

std::vector<PolynomialMode> to_polynomial_modes(const SparseSignalModel<Frequency>& model) {
    std::vector<PolynomialMode> out;
    for (const auto& m : model.modes) out.push_back({m.gamma, m.coeffs});
    return out;
}

}  // namespace prony

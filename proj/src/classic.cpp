#include "prony/classic.hpp"

#include <cmath>
#include <numbers>

#include "prony/errors.hpp"
#include "symbol_search.hpp"

namespace prony {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;

cplx unit(double phase) { return std::polar(1.0, two_pi * phase); }

double reduce_unit_interval(double x) {
    double r = x - std::floor(x);
    if (r >= 1.0) r = 0.0;
    return r;
}
}  // namespace

bool RealShiftCombination::is_unit_translation() const noexcept {
    return terms.size() == 1 && terms[0].b == cplx{1.0, 0.0} && terms[0].g == 1.0;
}

cplx RealShiftCombination::symbol(Frequency gamma) const {
    cplx acc{};
    for (const auto& t : terms) acc += t.b * unit(gamma * t.g);
    return acc;
}

cplx RealShiftCombination::symbol_derivative(Frequency gamma) const {
    cplx acc{};
    for (const auto& t : terms) acc += t.b * cplx{0.0, two_pi * t.g} * unit(gamma * t.g);
    return acc;
}

double circle_distance(Frequency a, Frequency b) {
    const double d = reduce_unit_interval(a - b);
    return std::min(d, 1.0 - d);
}

cplx classic_symbol(Frequency gamma) { return unit(gamma); }

Frequency classic_symbol_inverse(cplx z, double tol) {
    if (std::abs(std::abs(z) - 1.0) > tol) throw SpuriousRoot(z, "root is off the unit circle");
    return reduce_unit_interval(std::arg(z) / two_pi);
}

ComplexMatrix classic_coefficient_system(const std::vector<Frequency>& F, Index L) {
    for (std::size_t i = 0; i < F.size(); ++i)
        for (std::size_t j = i + 1; j < F.size(); ++j)
            if (circle_distance(F[i], F[j]) == 0.0) throw ContractViolation("duplicate frequencies");
    ComplexMatrix v(L + 1, static_cast<Index>(F.size()));
    for (Index l = 0; l <= L; ++l)
        for (std::size_t j = 0; j < F.size(); ++j) v(l, static_cast<Index>(j)) = unit(F[j] * static_cast<double>(l));
    return v;
}

namespace {
ComplexMatrix shifted_system(const std::vector<Frequency>& F, Index L, const RealShiftCombination& shift) {
    if (shift.is_unit_translation()) return classic_coefficient_system(F, L);
    ComplexMatrix v(L + 1, static_cast<Index>(F.size()));
    for (std::size_t j = 0; j < F.size(); ++j) {
        const cplx h = shift.symbol(F[j]);
        cplx p{1.0, 0.0};
        for (Index l = 0; l <= L; ++l) {
            v(l, static_cast<Index>(j)) = p;
            p *= h;
        }
    }
    return v;
}
}  // namespace

MeasurementRecord classic_measure(const SparseSignalModel<Frequency>& model, Index L,
                                  const RealShiftCombination& shift) {
    ComplexMatrix y = ComplexMatrix::Zero(L + 1, 1);
    for (const auto& mode : model.modes) {
        if (mode.coeffs.size() != 1) throw ContractViolation("classic modes carry exactly one coefficient");
        y.col(0) += mode.coeffs(0) * shifted_system({mode.gamma}, L, shift).col(0);
    }
    return MeasurementRecord(std::move(y));
}

InstanceDescriptor<Frequency> classic_instance(const RealShiftCombination& shift) {
    InstanceDescriptor<Frequency> inst;
    inst.symbol = [shift](const Frequency& g) { return shift.symbol(g); };
    if (shift.is_unit_translation()) {
        inst.symbol_inverse = [](cplx z, double tol) { return classic_symbol_inverse(z, tol); };
    } else {
        inst.symbol_inverse = [shift](cplx z, double tol) {
            double g = detail::search_1d([&](double x) { return shift.symbol(x); },
                                               [&](double x) { return shift.symbol_derivative(x); }, z);
            g = detail::snap_to_unit_interval(g, tol);
            if (std::abs(shift.symbol(g) - z) > tol) throw SpuriousRoot(z, "no preimage of the symbol");
            return g;
        };
    }
    inst.omega_contains = [](const Frequency& g) { return g >= 0.0 && g < 1.0; };
    inst.coefficient_system = [shift](const std::vector<Frequency>& F, Index L) {
        return shifted_system(F, L, shift);
    };
    inst.modes_at = [](const Frequency&) { return Index{1}; };
    inst.distance = [](const Frequency& a, const Frequency& b) { return circle_distance(a, b); };
    inst.less = [](const Frequency& a, const Frequency& b) { return a < b; };
    inst.mode_dimension = 1;
    return inst;
}

std::vector<Frequency> uniform_frequency_grid(Index n) {
    std::vector<Frequency> grid;
    grid.reserve(static_cast<std::size_t>(n));
    for (Index k = 0; k < n; ++k) grid.push_back(static_cast<double>(k) / static_cast<double>(n));
    return grid;
}

}  // namespace prony

#pragma once

#include <vector>

#include "prony/recovery.hpp"

namespace prony {

/// Frequency in cycles per unit time, normalised to [0, 1).
using Frequency = double;

/// B = sum_n b_n T(g_n) for real translations g_n. The symbol is
/// h(gamma) = sum_n b_n exp(2 pi i gamma g_n).
struct RealShiftCombination {
    struct Term {
        cplx b;
        double g;
    };
    std::vector<Term> terms{{cplx{1.0, 0.0}, 1.0}};

    bool is_unit_translation() const noexcept;
    cplx symbol(Frequency gamma) const;
    cplx symbol_derivative(Frequency gamma) const;
};

/// min(|a - b|, 1 - |a - b|) after reduction mod 1.
double circle_distance(Frequency a, Frequency b);

cplx classic_symbol(Frequency gamma);

/// arg(z) / 2 pi reduced to [0, 1). Throws SpuriousRoot if | |z| - 1 | > tol.
Frequency classic_symbol_inverse(cplx z, double tol = 1e-6);

/// (L+1) x |F| Vandermonde matrix, entry (l, j) = exp(2 pi i gamma_j l).
ComplexMatrix classic_coefficient_system(const std::vector<Frequency>& F, Index L);

/// Samples y_l = (B^l x)(0) for x(t) = sum c_gamma exp(2 pi i gamma t).
MeasurementRecord classic_measure(const SparseSignalModel<Frequency>& model, Index L,
                                  const RealShiftCombination& shift = {});

InstanceDescriptor<Frequency> classic_instance(const RealShiftCombination& shift = {});

/// {k / n : k = 0..n-1}
std::vector<Frequency> uniform_frequency_grid(Index n);

}  // namespace prony

#pragma once

#include <vector>

#include "prony/classic.hpp"

namespace prony {

/// One term q(t) exp(2 pi i gamma t) of an exponential sum with polynomial
/// amplitude; q is stored in ascending monomial order.
struct PolynomialMode {
    Frequency gamma = 0.0;
    ComplexVector q;
};

cplx confluent_sample(const std::vector<PolynomialMode>& modes, double t);

/// Confluent Vandermonde matrix: (K+1) x N(D+1), block n has entry
/// (k, m) = k^m theta_n^k, with 0^0 = 1.
ComplexMatrix confluent_system(const std::vector<cplx>& thetas, Index D, Index K);

struct PolynomialFit {
    std::vector<PolynomialMode> modes;
    double residual = 0.0;
    bool non_unique = false;
};

/// Least-squares fit of degree-D amplitudes for known frequencies.
PolynomialFit recover_polynomials(const std::vector<Frequency>& F, Index D, std::span<const cplx> samples,
                                  double rank_rel_tol = 1e-10);

/// Samples x(l), l = 0..L.
MeasurementRecord confluent_measure(const std::vector<PolynomialMode>& modes, Index L);

/// Instance with degree bound D; its spectral submodules have dimension D+1.
InstanceDescriptor<Frequency> confluent_instance(Index D);

SparseSignalModel<Frequency> to_signal_model(const std::vector<PolynomialMode>& modes, Index D);
std::vector<PolynomialMode> to_polynomial_modes(const SparseSignalModel<Frequency>& model);

}  // namespace prony

#pragma once

#include <vector>

#include "prony/recovery.hpp"

namespace prony {

/// Jordan chains x^1..x^m of A: A x^1 = lambda x^1, (A - lambda) x^j = x^{j-1}.
struct GeneralizedEigenbasis {
    struct Chain {
        cplx lambda;
        std::vector<ComplexVector> vectors;
    };
    std::vector<Chain> chains;

    Index dimension() const;
    Index max_chain_length() const;
    std::vector<cplx> spectrum() const;
};

/// x' = A x sampled at times beta * l through the functionals <., e_s>, s in I.
struct DynamicalProblem {
    ComplexMatrix A;
    GeneralizedEigenbasis basis;
    ComplexMatrix sample_basis;  ///< columns are the orthonormal vectors e_s
    std::vector<Index> I;        ///< zero-based indices into sample_basis
    double beta = 1.0;

    void validate() const;
};

/// Largest deviation from the chain relations, relative to |A|.
double basis_residual(const DynamicalProblem& prob);

/// Unitary DFT basis: e_s(j) = exp(2 pi i s j / d) / sqrt(d).
ComplexMatrix fourier_basis(Index d);

ComplexMatrix build_propagator(const DynamicalProblem& prob);

/// values(l, s) = <B^l x0, e_{I[s]}>, B applied one step at a time.
MeasurementRecord dynamical_measure(const DynamicalProblem& prob, const ComplexVector& x0, Index L);
MeasurementRecord dynamical_measure(const DynamicalProblem& prob, const ComplexMatrix& propagator,
                                    const ComplexVector& x0, Index L);

/// The unique lambda in sigma(A) with |exp(beta lambda) - z| <= tol.
cplx dynamical_symbol_inverse(cplx z, const DynamicalProblem& prob, double tol);

bool check_observability(const DynamicalProblem& prob, double tol = 1e-12);

/// x0 = sum over modes of sum_m c_m x_lambda^m. Every mode must name an
/// eigenvalue of the basis.
ComplexVector initial_state(const DynamicalProblem& prob, const SparseSignalModel<cplx>& model);

InstanceDescriptor<cplx> dynamical_instance(const DynamicalProblem& prob);

}  // namespace prony

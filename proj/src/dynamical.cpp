#include "prony/dynamical.hpp"

#include <cmath>
#include <memory>
#include <numbers>

#include "prony/errors.hpp"

namespace prony {

namespace {
constexpr double spectrum_match_tol = 1e-12;

bool lex_less(cplx a, cplx b) { return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag()); }

const GeneralizedEigenbasis::Chain& chain_for(const DynamicalProblem& prob, cplx lambda) {
    for (const auto& c : prob.basis.chains)
        if (std::abs(c.lambda - lambda) <= spectrum_match_tol) return c;
    throw ContractViolation("eigenvalue is not part of the generalized eigenbasis");
}
}  // namespace

Index GeneralizedEigenbasis::dimension() const {
    return chains.empty() || chains.front().vectors.empty() ? 0 : chains.front().vectors.front().size();
}

Index GeneralizedEigenbasis::max_chain_length() const {
    Index m = 0;
    for (const auto& c : chains) m = std::max(m, static_cast<Index>(c.vectors.size()));
    return m;
}

std::vector<cplx> GeneralizedEigenbasis::spectrum() const {
    std::vector<cplx> s;
    for (const auto& c : chains) s.push_back(c.lambda);
    return s;
}

void DynamicalProblem::validate() const {
    const Index d = A.rows();
    if (A.cols() != d || d == 0) throw ContractViolation("A must be square and nonempty");
    if (sample_basis.rows() != d) throw ContractViolation("sample basis has the wrong dimension");
    if (I.empty()) throw ContractViolation("index set I must be nonempty");
    for (Index s : I)
        if (s < 0 || s >= sample_basis.cols()) throw ContractViolation("index in I is out of range");
    if (!(beta > 0.0)) throw ContractViolation("beta must be positive");
    Index total = 0;
    for (const auto& c : basis.chains) {
        if (c.vectors.empty()) throw ContractViolation("empty Jordan chain");
        for (const auto& v : c.vectors)
            if (v.size() != d) throw ContractViolation("chain vector has the wrong dimension");
        total += static_cast<Index>(c.vectors.size());
    }
    if (total != d) throw ContractViolation("generalized eigenbasis must contain exactly d vectors");
}

double basis_residual(const DynamicalProblem& prob) {
    const double scale = std::max(1.0, prob.A.norm());
    double worst = 0.0;
    for (const auto& c : prob.basis.chains) {
        for (std::size_t j = 0; j < c.vectors.size(); ++j) {
            ComplexVector r = prob.A * c.vectors[j] - c.lambda * c.vectors[j];
            if (j > 0) r -= c.vectors[j - 1];
            worst = std::max(worst, r.norm() / scale);
        }
    }
    return worst;
}

ComplexMatrix fourier_basis(Index d) {
    ComplexMatrix f(d, d);
    const double norm = 1.0 / std::sqrt(static_cast<double>(d));
    for (Index j = 0; j < d; ++j)
        for (Index s = 0; s < d; ++s)
            f(j, s) = std::polar(norm, 2.0 * std::numbers::pi * static_cast<double>((s * j) % d) / static_cast<double>(d));
    return f;
}

ComplexMatrix build_propagator(const DynamicalProblem& prob) {
    if (prob.A.rows() != prob.A.cols()) throw ContractViolation("A must be square");
    return matrix_exponential(prob.beta * prob.A);
}

MeasurementRecord dynamical_measure(const DynamicalProblem& prob, const ComplexMatrix& propagator,
                                    const ComplexVector& x0, Index L) {
    if (x0.size() != prob.A.rows()) throw ContractViolation("x0 has the wrong dimension");
    const auto S = static_cast<Index>(prob.I.size());
    ComplexMatrix sampled(prob.A.rows(), S);
    for (Index s = 0; s < S; ++s) sampled.col(s) = prob.sample_basis.col(prob.I[static_cast<std::size_t>(s)]);

    ComplexMatrix y(L + 1, S);
    ComplexVector x = x0;
    for (Index l = 0; l <= L; ++l) {
        // <x, e_s> = e_s^H x
        y.row(l) = (sampled.adjoint() * x).transpose();
        if (l < L) x = propagator * x;
    }
    return MeasurementRecord(std::move(y));
}

MeasurementRecord dynamical_measure(const DynamicalProblem& prob, const ComplexVector& x0, Index L) {
    return dynamical_measure(prob, build_propagator(prob), x0, L);
}

cplx dynamical_symbol_inverse(cplx z, const DynamicalProblem& prob, double tol) {
    const cplx* hit = nullptr;
    for (const auto& c : prob.basis.chains) {
        if (std::abs(std::exp(prob.beta * c.lambda) - z) <= tol) {
            if (hit != nullptr && *hit != c.lambda)
                throw SymbolNotInjective("symbol not injective for this beta: two eigenvalues share the root");
            hit = &c.lambda;
        }
    }
    if (hit == nullptr) throw SpuriousRoot(z, "no eigenvalue lambda with exp(beta lambda) at the root");
    return *hit;
}

bool check_observability(const DynamicalProblem& prob, double tol) {
    for (const auto& c : prob.basis.chains) {
        double norm2 = 0.0;
        for (Index s : prob.I) norm2 += std::norm(prob.sample_basis.col(s).dot(c.vectors.front()));
        if (!(std::sqrt(norm2) > tol)) return false;
    }
    return true;
}

ComplexVector initial_state(const DynamicalProblem& prob, const SparseSignalModel<cplx>& model) {
    ComplexVector x0 = ComplexVector::Zero(prob.A.rows());
    for (const auto& mode : model.modes) {
        const auto& chain = chain_for(prob, mode.gamma);
        if (mode.coeffs.size() > static_cast<Index>(chain.vectors.size()))
            throw ContractViolation("more coefficients than the Jordan chain length");
        for (Index m = 0; m < mode.coeffs.size(); ++m) x0 += mode.coeffs(m) * chain.vectors[static_cast<std::size_t>(m)];
    }
    return x0;
}

InstanceDescriptor<cplx> dynamical_instance(const DynamicalProblem& prob) {
    prob.validate();
    auto shared = std::make_shared<const DynamicalProblem>(prob);
    auto propagator = std::make_shared<const ComplexMatrix>(build_propagator(prob));

    InstanceDescriptor<cplx> inst;
    inst.symbol = [shared](const cplx& lambda) { return std::exp(shared->beta * lambda); };
    inst.symbol_inverse = [shared](cplx z, double tol) { return dynamical_symbol_inverse(z, *shared, tol); };
    inst.omega_contains = [shared](const cplx& lambda) {
        for (const auto& c : shared->basis.chains)
            if (std::abs(c.lambda - lambda) <= spectrum_match_tol) return true;
        return false;
    };
    inst.modes_at = [shared](const cplx& lambda) {
        return static_cast<Index>(chain_for(*shared, lambda).vectors.size());
    };
    inst.coefficient_system = [shared, propagator](const std::vector<cplx>& F, Index L) {
        std::vector<ComplexVector> columns;
        for (const auto& lambda : F)
            for (const auto& v : chain_for(*shared, lambda).vectors)
                columns.push_back(dynamical_measure(*shared, *propagator, v, L).flattened());
        const Index rows = (L + 1) * static_cast<Index>(shared->I.size());
        ComplexMatrix g(rows, static_cast<Index>(columns.size()));
        for (std::size_t j = 0; j < columns.size(); ++j) g.col(static_cast<Index>(j)) = columns[j];
        return g;
    };
    inst.distance = [](const cplx& a, const cplx& b) { return std::abs(a - b); };
    inst.less = [](const cplx& a, const cplx& b) { return lex_less(a, b); };
    inst.mode_dimension = prob.basis.max_chain_length();
    return inst;
}

}  // namespace prony

#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace prony {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Index = Eigen::Index;

/// Dense complex polynomial, coefficients in ascending degree order.
///
/// The empty coefficient list is not a valid state; the constant 1 stands
/// for the trivial annihilator.
class ComplexPolynomial {
public:
    ComplexPolynomial() : coeffs_{cplx{1.0, 0.0}} {}
    explicit ComplexPolynomial(std::vector<cplx> coeffs);

    /// Monic polynomial prod (z - r) over the given roots.
    static ComplexPolynomial from_roots(std::span<const cplx> roots);

    const std::vector<cplx>& coeffs() const noexcept { return coeffs_; }
    Index degree() const noexcept { return static_cast<Index>(coeffs_.size()) - 1; }
    cplx leading() const noexcept { return coeffs_.back(); }
    bool is_monic() const noexcept { return coeffs_.back() == cplx{1.0, 0.0}; }

    cplx operator()(cplx z) const;
    cplx derivative_at(cplx z) const;

    /// Number of exactly-zero low-order coefficients, i.e. the k in z^k q(z).
    Index leading_zero_count() const;

    /// Drops the z^k factor: returns q with q(0) != 0 (or the constant 1 when
    /// the polynomial is a pure monomial).
    ComplexPolynomial without_zero_roots() const;

private:
    std::vector<cplx> coeffs_;
};

/// Minimum-norm least-squares solution of m x = rhs.
ComplexVector least_squares_solve(const ComplexMatrix& m, const ComplexVector& rhs);

/// Count of singular values strictly above rel_tol * sigma_max.
Index numerical_rank(const ComplexMatrix& m, double rel_tol = 1e-10);

Eigen::VectorXd singular_values(const ComplexMatrix& m);

/// All roots with multiplicity, from the eigenvalues of the balanced
/// companion matrix followed by guarded Newton polishing. Exactly-zero
/// low-order coefficients are deflated and reported as exact zeros.
std::vector<cplx> polynomial_roots(const ComplexPolynomial& p);

ComplexMatrix matrix_exponential(const ComplexMatrix& m);

}  // namespace prony

#include "prony/numerics.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

#include "prony/errors.hpp"

namespace prony {

ComplexPolynomial::ComplexPolynomial(std::vector<cplx> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) throw ContractViolation("polynomial needs at least one coefficient");
    for (const auto& c : coeffs_) {
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            throw ContractViolation("polynomial coefficient is not finite");
    }
    if (coeffs_.size() > 1 && coeffs_.back() == cplx{})
        throw ContractViolation("leading coefficient must be nonzero");
    if (coeffs_.size() == 1 && coeffs_.front() == cplx{})
        throw ContractViolation("the zero polynomial is not representable");
}

ComplexPolynomial ComplexPolynomial::from_roots(std::span<const cplx> roots) {
    std::vector<cplx> c{cplx{1.0, 0.0}};
    for (const cplx r : roots) {
        std::vector<cplx> next(c.size() + 1, cplx{});
        for (std::size_t i = 0; i < c.size(); ++i) {
            next[i + 1] += c[i];
            next[i] -= r * c[i];
        }
        c = std::move(next);
    }
    return ComplexPolynomial(std::move(c));
}

cplx ComplexPolynomial::operator()(cplx z) const {
    cplx acc{};
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
    return acc;
}

cplx ComplexPolynomial::derivative_at(cplx z) const {
    cplx acc{};
    for (std::size_t i = coeffs_.size() - 1; i >= 1; --i) acc = acc * z + static_cast<double>(i) * coeffs_[i];
    return acc;
}

Index ComplexPolynomial::leading_zero_count() const {
    Index k = 0;
    while (k < degree() && coeffs_[static_cast<std::size_t>(k)] == cplx{}) ++k;
    return k;
}

ComplexPolynomial ComplexPolynomial::without_zero_roots() const {
    const auto k = static_cast<std::size_t>(leading_zero_count());
    return ComplexPolynomial(std::vector<cplx>(coeffs_.begin() + static_cast<std::ptrdiff_t>(k), coeffs_.end()));
}

ComplexVector least_squares_solve(const ComplexMatrix& m, const ComplexVector& rhs) {
    if (m.rows() < 1 || m.cols() < 1) throw ContractViolation("least_squares_solve: empty matrix");
    if (m.rows() != rhs.size())
        throw ContractViolation("least_squares_solve: matrix has " + std::to_string(m.rows()) +
                                " rows but rhs has length " + std::to_string(rhs.size()));
    Eigen::CompleteOrthogonalDecomposition<ComplexMatrix> cod(m);
    ComplexVector x = cod.solve(rhs);

    // Iterative refinement with residuals accumulated in extended precision.
    // Corrections of an exact least-squares solution vanish, so this only
    // removes the factorisation's rounding error.
    using wide = std::complex<long double>;
    for (int iter = 0; iter < 3; ++iter) {
        ComplexVector r(m.rows());
        for (Index i = 0; i < m.rows(); ++i) {
            wide acc{static_cast<long double>(rhs(i).real()), static_cast<long double>(rhs(i).imag())};
            for (Index j = 0; j < m.cols(); ++j) acc -= wide(m(i, j)) * wide(x(j));
            r(i) = cplx{static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
        }
        const ComplexVector dx = cod.solve(r);
        x += dx;
        if (dx.norm() <= 1e-17 * x.norm()) break;
    }
    return x;
}

Eigen::VectorXd singular_values(const ComplexMatrix& m) {
    if (m.size() == 0) return {};
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    return svd.singularValues();
}

Index numerical_rank(const ComplexMatrix& m, double rel_tol) {
    if (!(rel_tol > 0.0)) throw ContractViolation("numerical_rank: rel_tol must be positive");
    const Eigen::VectorXd sv = singular_values(m);
    if (sv.size() == 0 || sv(0) == 0.0) return 0;
    const double cut = rel_tol * sv(0);
    return static_cast<Index>((sv.array() > cut).count());
}

namespace {

// Parlett-Reinsch diagonal similarity scaling with radix-2 factors, so the
// eigenvalues are unchanged to the last bit.
void balance(ComplexMatrix& a) {
    const Index n = a.rows();
    constexpr double radix = 2.0;
    bool converged = false;
    while (!converged) {
        converged = true;
        for (Index i = 0; i < n; ++i) {
            double col = 0.0;
            double row = 0.0;
            for (Index j = 0; j < n; ++j) {
                if (j == i) continue;
                col += std::abs(a(j, i));
                row += std::abs(a(i, j));
            }
            if (col == 0.0 || row == 0.0) continue;
            double g = row / radix;
            double f = 1.0;
            const double s = col + row;
            while (col < g) {
                f *= radix;
                col *= radix * radix;
            }
            g = row * radix;
            while (col > g) {
                f /= radix;
                col /= radix * radix;
            }
            if ((col + row) / f < 0.95 * s) {
                converged = false;
                a.row(i) /= f;
                a.col(i) *= f;
            }
        }
    }
}

using wide = std::complex<long double>;

std::pair<wide, wide> eval_wide(const ComplexPolynomial& p, wide z) {
    wide value{};
    wide deriv{};
    const auto& c = p.coeffs();
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        deriv = deriv * z + value;
        value = value * z + wide(*it);
    }
    return {value, deriv};
}

// Newton steps in extended precision, each accepted only if |p| decreases.
cplx polish(const ComplexPolynomial& p, cplx start) {
    wide z(start);
    auto [value, deriv] = eval_wide(p, z);
    for (int iter = 0; iter < 4; ++iter) {
        if (deriv == wide{}) break;
        const wide candidate = z - value / deriv;
        const auto [cv, cd] = eval_wide(p, candidate);
        if (!(std::abs(cv) < std::abs(value))) break;
        z = candidate;
        value = cv;
        deriv = cd;
    }
    return cplx{static_cast<double>(z.real()), static_cast<double>(z.imag())};
}

}  // namespace

std::vector<cplx> polynomial_roots(const ComplexPolynomial& p) {
    if (p.degree() < 1) throw ContractViolation("polynomial_roots: degree must be at least 1");

    const Index zeros = p.leading_zero_count();
    std::vector<cplx> roots(static_cast<std::size_t>(zeros), cplx{});
    const ComplexPolynomial q = p.without_zero_roots();
    const Index n = q.degree();
    if (n == 0) return roots;

    const auto& c = q.coeffs();
    const cplx lead = q.leading();
    if (n == 1) {
        roots.push_back(-c[0] / lead);
        return roots;
    }

    // Companion matrix in upper Hessenberg form: subdiagonal ones, last
    // column holds -c_k / c_n.
    ComplexMatrix comp = ComplexMatrix::Zero(n, n);
    for (Index i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
    for (Index i = 0; i < n; ++i) comp(i, n - 1) = -c[static_cast<std::size_t>(i)] / lead;
    balance(comp);

    Eigen::ComplexEigenSolver<ComplexMatrix> solver(comp, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) throw std::runtime_error("polynomial_roots: QR iteration failed");
    const ComplexVector& eig = solver.eigenvalues();
    for (Index i = 0; i < n; ++i) roots.push_back(polish(q, eig(i)));
    return roots;
}

ComplexMatrix matrix_exponential(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) throw ContractViolation("matrix_exponential: matrix must be square");
    if (m.size() == 0) return m;
    return m.exp();
}

}  // namespace prony

#include "prony/oracle.hpp"

#include <cmath>
#include <random>

#include "prony/errors.hpp"

namespace prony {

namespace {

MeasurementRecord forward(const ClassicTruth& t, Index L) { return classic_measure(t.model, L, t.shift); }
MeasurementRecord forward(const ConfluentTruth& t, Index L) { return confluent_measure(t.modes, L); }
MeasurementRecord forward(const DynamicalTruth& t, Index L) {
    t.problem.validate();
    return dynamical_measure(t.problem, initial_state(t.problem, t.model), L);
}
MeasurementRecord forward(const ChannelTruth& t, Index L) { return channel_measure(t.model, t.setup, L); }

}  // namespace

MeasurementRecord synthesize(const SynthesisRequest& req) {
    if (req.L < 1) throw ContractViolation("synthesis needs L >= 1");
    if (!(req.noise_sigma >= 0.0) || !std::isfinite(req.noise_sigma))
        throw ContractViolation("noise level must be a finite non-negative number");
    MeasurementRecord clean = std::visit([&](const auto& truth) { return forward(truth, req.L); }, req.truth);
    if (req.noise_sigma == 0.0) return clean;

    std::mt19937_64 rng(req.seed);
    std::normal_distribution<double> normal(0.0, req.noise_sigma / std::sqrt(2.0));
    ComplexMatrix noisy = clean.values();
    for (Index i = 0; i < noisy.rows(); ++i)
        for (Index j = 0; j < noisy.cols(); ++j) noisy(i, j) += cplx{normal(rng), normal(rng)};
    return MeasurementRecord(std::move(noisy));
}

namespace {

cplx tf_shift_of_gaussian(const TFShift& lambda, double r) {
    const double x = r + lambda.t;
    return std::polar(std::exp(-x * x), 2.0 * M_PI * r * lambda.nu);
}

cplx trapezoid(const TFShift& gamma, const TFShift& s, long intervals) {
    constexpr double R = 8.0;
    const double h = 2.0 * R / static_cast<double>(intervals);
    cplx acc{};
    for (long k = 0; k <= intervals; ++k) {
        const double r = -R + h * static_cast<double>(k);
        // (pi_gamma pi_s u)(r) = e^{2 pi i r nu_gamma} (pi_s u)(r + t_gamma)
        const cplx lhs = std::polar(1.0, 2.0 * M_PI * r * gamma.nu) * tf_shift_of_gaussian(s, r + gamma.t);
        const cplx rhs = tf_shift_of_gaussian(s, r);
        const double w = (k == 0 || k == intervals) ? 0.5 : 1.0;
        acc += w * lhs * std::conj(rhs);
    }
    return h * acc;
}

}  // namespace

cplx quadrature_inner_product(const TFShift& gamma, const TFShift& s) {
    long intervals = 512;
    cplx prev = trapezoid(gamma, s, intervals);
    for (int round = 0; round < 8; ++round) {
        intervals *= 2;
        const cplx next = trapezoid(gamma, s, intervals);
        if (std::abs(next - prev) <= 1e-12) return next;
        prev = next;
    }
    return prev;
}

ComplexPolynomial brute_force_annihilator(const MeasurementRecord& meas, Index degree, double residual_tol) {
    if (degree < 1) throw ContractViolation("brute_force_annihilator: degree must be at least 1");
    if (degree > 6) throw ContractViolation("brute_force_annihilator: meant for degree <= 6");
    const ComplexMatrix h = build_block_hankel(meas, degree);
    const ComplexVector rhs = -h.col(degree);
    const double scale = std::max(meas.max_row_norm(), 1e-300);

    // zeros = number of forced low-order coefficients; zeros = degree is z^degree.
    std::vector<cplx> best;
    for (Index zeros = 0; zeros <= degree; ++zeros) {
        std::vector<cplx> coeffs(static_cast<std::size_t>(degree + 1), cplx{});
        coeffs.back() = cplx{1.0, 0.0};
        double residual = rhs.norm();
        const Index free = degree - zeros;
        if (free > 0) {
            const ComplexMatrix cols = h.middleCols(zeros, free);
            const ComplexVector a = least_squares_solve(cols, rhs);
            residual = (cols * a - rhs).norm();
            for (Index i = 0; i < free; ++i) coeffs[static_cast<std::size_t>(zeros + i)] = a(i);
        }
        if (residual / scale >= residual_tol && meas.max_row_norm() > 0.0) break;
        best = std::move(coeffs);
    }
    if (best.empty()) {
        // Not even the full system is consistent; report its least-squares fit.
        const ComplexVector a = least_squares_solve(h.leftCols(degree), rhs);
        best.assign(static_cast<std::size_t>(degree + 1), cplx{});
        for (Index i = 0; i < degree; ++i) best[static_cast<std::size_t>(i)] = a(i);
        best.back() = cplx{1.0, 0.0};
    }
    return ComplexPolynomial(std::move(best));
}

}  // namespace prony

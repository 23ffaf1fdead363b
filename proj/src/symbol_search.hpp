#pragma once

// Numerical preimage search for symbols without a closed-form inverse.
// Coarse grid scan followed by Gauss-Newton refinement.

#include <array>
#include <cmath>
#include <functional>
#include <limits>

#include "prony/numerics.hpp"

namespace prony::detail {

// Pulls values within `slack` outside [0, 1) back onto the boundary.
inline double snap_to_unit_interval(double x, double slack) {
    if (x < 0.0 && x >= -slack) return 0.0;
    if (x >= 1.0 && x < 1.0 + slack) return std::nextafter(1.0, 0.0);
    return x;
}

inline double search_1d(const std::function<cplx(double)>& h, const std::function<cplx(double)>& dh, cplx z,
                        int grid = 4096) {
    double best = 0.0;
    double best_err = std::numeric_limits<double>::infinity();
    for (int k = 0; k < grid; ++k) {
        const double x = static_cast<double>(k) / grid;
        const double err = std::abs(h(x) - z);
        if (err < best_err) {
            best_err = err;
            best = x;
        }
    }
    double x = best;
    for (int iter = 0; iter < 60; ++iter) {
        const cplx d = dh(x);
        const double n2 = std::norm(d);
        if (n2 == 0.0) break;
        const double step = std::real(std::conj(d) * (z - h(x))) / n2;
        x += step;
        if (std::abs(step) < 1e-15) break;
    }
    return x;
}

// J columns are the complex partial derivatives; solves the real 2x2
// linearisation in the least-squares sense.
inline std::array<double, 2> search_2d(const std::function<cplx(double, double)>& h,
                                       const std::function<std::array<cplx, 2>(double, double)>& grad, cplx z,
                                       int grid = 128) {
    std::array<double, 2> best{0.0, 0.0};
    double best_err = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid; ++i) {
        for (int j = 0; j < grid; ++j) {
            const double a = static_cast<double>(i) / grid;
            const double b = static_cast<double>(j) / grid;
            const double err = std::abs(h(a, b) - z);
            if (err < best_err) {
                best_err = err;
                best = {a, b};
            }
        }
    }
    auto [a, b] = best;
    for (int iter = 0; iter < 60; ++iter) {
        const auto g = grad(a, b);
        const cplx r = z - h(a, b);
        // Normal equations of [Re; Im] J delta = [Re r; Im r].
        const double j11 = g[0].real(), j12 = g[1].real(), j21 = g[0].imag(), j22 = g[1].imag();
        const double det = j11 * j22 - j12 * j21;
        if (det == 0.0) break;
        const double da = (j22 * r.real() - j12 * r.imag()) / det;
        const double db = (-j21 * r.real() + j11 * r.imag()) / det;
        a += da;
        b += db;
        if (std::abs(da) + std::abs(db) < 1e-15) break;
    }
    return {a, b};
}

}  // namespace prony::detail

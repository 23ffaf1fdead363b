#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "prony/channel.hpp"
#include "prony/classic.hpp"
#include "prony/confluent.hpp"
#include "prony/dynamical.hpp"

namespace prony {

struct ClassicTruth {
    SparseSignalModel<Frequency> model;
    RealShiftCombination shift;
};

struct ConfluentTruth {
    std::vector<PolynomialMode> modes;
};

struct DynamicalTruth {
    DynamicalProblem problem;
    SparseSignalModel<cplx> model;
};

struct ChannelTruth {
    ChannelModel model;
    ChannelProbeSetup setup = ChannelProbeSetup::standard();
};

using GroundTruth = std::variant<ClassicTruth, ConfluentTruth, DynamicalTruth, ChannelTruth>;

struct SynthesisRequest {
    GroundTruth truth;
    Index L = 1;
    double noise_sigma = 0.0;  ///< circular complex Gaussian, E|n|^2 = sigma^2
    std::uint64_t seed = 0;
};

/// Forward model of the matching instance, plus optional seeded noise.
MeasurementRecord synthesize(const SynthesisRequest& req);

/// <pi_gamma pi_s u, pi_s u> for u(t) = exp(-t^2) by the composite
/// trapezoid rule on [-8, 8], halving the step until two successive values
/// agree to 1e-12.
cplx quadrature_inner_product(const TFShift& gamma, const TFShift& s);

/// Fixed-degree annihilator: monic of the given degree, with as many
/// low-order coefficients forced to zero as the homogeneous system allows
/// (relative least-squares residual below `residual_tol`).
ComplexPolynomial brute_force_annihilator(const MeasurementRecord& meas, Index degree, double residual_tol = 1e-10);

}  // namespace prony

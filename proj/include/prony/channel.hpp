#pragma once

#include <vector>

#include "prony/recovery.hpp"

namespace prony {

/// Time-frequency shift lambda = (t, nu); pi_lambda = M_nu T_t acts as
/// (pi_lambda u)(r) = exp(2 pi i r nu) u(r + t).
struct TFShift {
    double t = 0.0;
    double nu = 0.0;

    friend bool operator==(const TFShift&, const TFShift&) = default;
};

/// X = sum_gamma c_gamma pi_gamma; each mode carries one gain.
using ChannelModel = SparseSignalModel<TFShift>;

struct ShiftTerm {
    cplx b;
    TFShift g;
};

struct ChannelProbeSetup {
    std::vector<TFShift> probes{TFShift{}};
    std::vector<ShiftTerm> shift_terms;

    /// b = (1, i) with shifts (0, -1/12) and (-1/12, 0), which yields
    /// h(t, nu) = exp(2 pi i t / 12) + i exp(-2 pi i nu / 12).
    static ChannelProbeSetup standard();
    bool is_standard() const;
};

/// gamma(x, xi) = exp(2 pi i (x nu_gamma - t_gamma xi)) for g = (x, xi).
cplx eval_character(const TFShift& gamma, const TFShift& g);

cplx channel_symbol(const TFShift& gamma, const ChannelProbeSetup& setup);

/// Closed-form inverse of the standard symbol on [0,1)^2. Throws
/// SpuriousRoot outside its range; `tol` is the slack allowed on arcsin
/// arguments and on the domain boundary.
TFShift goodh_inverse(cplx z, double tol = 1e-9);

/// <pi_gamma pi_s u, pi_s u> for the Gaussian u(t) = exp(-t^2).
cplx gaussian_cross_term(const TFShift& gamma, const TFShift& s);

/// values(l, s) = sum_gamma c_gamma h(gamma)^l m_gamma(s).
MeasurementRecord channel_measure(const ChannelModel& model, const ChannelProbeSetup& setup, Index L);

/// Torus metric on [0,1)^2.
double torus_distance(const TFShift& a, const TFShift& b);

/// Euclidean metric in the plane.
double plane_distance(const TFShift& a, const TFShift& b);

InstanceDescriptor<TFShift> channel_instance(const ChannelProbeSetup& setup = ChannelProbeSetup::standard());

std::vector<TFShift> uniform_tf_grid(Index n);

/// Spectrum recovery with several operators B_j whose symbols need not be
/// injective on their own. For each record j the nonzero annihilator roots
/// R_j are computed; candidates are grid points gamma with h_j(gamma) close
/// to R_j for every j, refined jointly by Gauss-Newton and merged. Gains are
/// then fitted against all records at once; ghost candidates come out with
/// (near) zero gain and are dropped.
struct MultiShiftResult {
    ChannelModel model;
    std::vector<TFShift> candidates;
    std::vector<AnnihilatorResult> annihilators;
    double relative_residual = 0.0;
};

MultiShiftResult recover_channel_multi(const std::vector<MeasurementRecord>& records,
                                       const std::vector<ChannelProbeSetup>& setups, const RecoveryConfig& cfg,
                                       Index grid = 256);

}  // namespace prony

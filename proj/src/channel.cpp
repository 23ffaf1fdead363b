#include "prony/channel.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include <Eigen/QR>

#include "prony/errors.hpp"
#include "symbol_search.hpp"

namespace prony {

namespace {
constexpr double pi = std::numbers::pi;
constexpr double two_pi = 2.0 * pi;

cplx symbol_at(const ChannelProbeSetup& setup, double t, double nu) { return channel_symbol({t, nu}, setup); }

std::array<cplx, 2> symbol_gradient(const ChannelProbeSetup& setup, double t, double nu) {
    // d/dt gamma(x, xi) = -2 pi i xi gamma(g); d/dnu = 2 pi i x gamma(g)
    std::array<cplx, 2> g{cplx{}, cplx{}};
    for (const auto& term : setup.shift_terms) {
        const cplx v = term.b * eval_character({t, nu}, term.g);
        g[0] += cplx{0.0, -two_pi * term.g.nu} * v;
        g[1] += cplx{0.0, two_pi * term.g.t} * v;
    }
    return g;
}

double wrap(double d) {
    d = std::fabs(d - std::floor(d));
    return std::min(d, 1.0 - d);
}

bool in_unit_square(const TFShift& p) { return p.t >= 0.0 && p.t < 1.0 && p.nu >= 0.0 && p.nu < 1.0; }

ComplexMatrix channel_columns(const std::vector<TFShift>& F, Index L, const ChannelProbeSetup& setup) {
    const auto S = static_cast<Index>(setup.probes.size());
    ComplexMatrix g(S * (L + 1), static_cast<Index>(F.size()));
    for (std::size_t j = 0; j < F.size(); ++j) {
        const cplx h = channel_symbol(F[j], setup);
        std::vector<cplx> cross;
        for (const auto& s : setup.probes) cross.push_back(gaussian_cross_term(F[j], s));
        cplx p{1.0, 0.0};
        for (Index l = 0; l <= L; ++l) {
            for (Index s = 0; s < S; ++s) g(l * S + s, static_cast<Index>(j)) = p * cross[static_cast<std::size_t>(s)];
            p *= h;
        }
    }
    return g;
}
}  // namespace

ChannelProbeSetup ChannelProbeSetup::standard() {
    ChannelProbeSetup s;
    s.shift_terms = {{cplx{1.0, 0.0}, {0.0, -1.0 / 12.0}}, {cplx{0.0, 1.0}, {-1.0 / 12.0, 0.0}}};
    return s;
}

bool ChannelProbeSetup::is_standard() const {
    const auto ref = standard().shift_terms;
    if (shift_terms.size() != ref.size()) return false;
    for (std::size_t i = 0; i < ref.size(); ++i)
        if (shift_terms[i].b != ref[i].b || !(shift_terms[i].g == ref[i].g)) return false;
    return true;
}

cplx eval_character(const TFShift& gamma, const TFShift& g) {
    return std::polar(1.0, two_pi * (g.t * gamma.nu - gamma.t * g.nu));
}

cplx channel_symbol(const TFShift& gamma, const ChannelProbeSetup& setup) {
    cplx acc{};
    for (const auto& term : setup.shift_terms) acc += term.b * eval_character(gamma, term.g);
    return acc;
}

TFShift goodh_inverse(cplx z, double tol) {
    const double x2 = z.real() * z.real();
    const double y2 = z.imag() * z.imag();
    const double r2 = x2 + y2;
    if (r2 == 0.0) throw SpuriousRoot(z, "zero is not in the range of the symbol");

    auto checked = [&](double a) {
        if (std::fabs(a) > 1.0 + tol) throw SpuriousRoot(z, "arcsin argument out of range");
        return std::asin(std::clamp(a, -1.0, 1.0));
    };
    const double sum = checked((r2 - 2.0) / 2.0);
    const double diff = checked((x2 - y2) / r2);

    TFShift p{(3.0 / pi) * (sum - diff), (3.0 / pi) * (sum + diff)};
    p.t = detail::snap_to_unit_interval(p.t, tol);
    p.nu = detail::snap_to_unit_interval(p.nu, tol);
    if (!in_unit_square(p)) throw SpuriousRoot(z, "preimage outside [0,1)^2");
    if (std::abs(channel_symbol(p, ChannelProbeSetup::standard()) - z) > tol)
        throw SpuriousRoot(z, "not in the range of the symbol");
    return p;
}

cplx gaussian_cross_term(const TFShift& gamma, const TFShift& s) {
    // <pi_gamma u, u> = sqrt(pi/2) exp(-t^2/2 - pi^2 nu^2/2 - i pi t nu); conjugating
    // by pi_s contributes the commutation phase exp(2 pi i (t_g nu_s - t_s nu_g)).
    const double t = gamma.t;
    const double nu = gamma.nu;
    const double modulus = std::sqrt(pi / 2.0) * std::exp(-0.5 * t * t - 0.5 * pi * pi * nu * nu);
    const double phase = -pi * t * nu + two_pi * (t * s.nu - s.t * nu);
    return std::polar(modulus, phase);
}

MeasurementRecord channel_measure(const ChannelModel& model, const ChannelProbeSetup& setup, Index L) {
    if (setup.probes.empty()) throw ContractViolation("channel setup needs at least one probe");
    const auto S = static_cast<Index>(setup.probes.size());
    ComplexVector flat = ComplexVector::Zero(S * (L + 1));
    for (const auto& mode : model.modes) {
        if (mode.coeffs.size() != 1) throw ContractViolation("channel paths carry exactly one gain");
        flat += mode.coeffs(0) * channel_columns({mode.gamma}, L, setup).col(0);
    }
    ComplexMatrix y(L + 1, S);
    for (Index l = 0; l <= L; ++l)
        for (Index s = 0; s < S; ++s) y(l, s) = flat(l * S + s);
    return MeasurementRecord(std::move(y));
}

double torus_distance(const TFShift& a, const TFShift& b) { return std::hypot(wrap(a.t - b.t), wrap(a.nu - b.nu)); }

double plane_distance(const TFShift& a, const TFShift& b) { return std::hypot(a.t - b.t, a.nu - b.nu); }

InstanceDescriptor<TFShift> channel_instance(const ChannelProbeSetup& setup) {
    if (setup.probes.empty()) throw ContractViolation("channel setup needs at least one probe");
    for (const auto& term : setup.shift_terms)
        if (term.b == cplx{}) throw ContractViolation("shift term coefficients must be nonzero");
    auto shared = std::make_shared<const ChannelProbeSetup>(setup);

    InstanceDescriptor<TFShift> inst;
    inst.symbol = [shared](const TFShift& g) { return channel_symbol(g, *shared); };
    if (setup.is_standard()) {
        inst.symbol_inverse = [](cplx z, double tol) { return goodh_inverse(z, tol); };
    } else {
        inst.symbol_inverse = [shared](cplx z, double tol) {
            const auto [t, nu] = detail::search_2d([&](double a, double b) { return symbol_at(*shared, a, b); },
                                                   [&](double a, double b) { return symbol_gradient(*shared, a, b); },
                                                   z);
            TFShift p{detail::snap_to_unit_interval(t, tol), detail::snap_to_unit_interval(nu, tol)};
            if (std::abs(channel_symbol(p, *shared) - z) > tol) throw SpuriousRoot(z, "no preimage of the symbol");
            return p;
        };
    }
    inst.omega_contains = in_unit_square;
    inst.coefficient_system = [shared](const std::vector<TFShift>& F, Index L) {
        return channel_columns(F, L, *shared);
    };
    inst.modes_at = [](const TFShift&) { return Index{1}; };
    // Omega = [0,1)^2 is not a torus for a general symbol, so recovery
    // compares points in the plane.
    inst.distance = plane_distance;
    inst.less = [](const TFShift& a, const TFShift& b) { return a.t < b.t || (a.t == b.t && a.nu < b.nu); };
    inst.mode_dimension = 1;
    return inst;
}

std::vector<TFShift> uniform_tf_grid(Index n) {
    std::vector<TFShift> grid;
    grid.reserve(static_cast<std::size_t>(n * n));
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
            grid.push_back({static_cast<double>(i) / static_cast<double>(n), static_cast<double>(j) / static_cast<double>(n)});
    return grid;
}

MultiShiftResult recover_channel_multi(const std::vector<MeasurementRecord>& records,
                                       const std::vector<ChannelProbeSetup>& setups, const RecoveryConfig& cfg,
                                       Index grid) {
    if (records.size() != setups.size() || records.empty())
        throw ContractViolation("recover_channel_multi: need one setup per measurement record");
    MultiShiftResult out;
    for (const auto& rec : records) out.annihilators.push_back(minimal_annihilator(rec, cfg));

    // Slack for the grid scan: half a cell diagonal times the Lipschitz bound of h_j.
    const double cell = 1.0 / static_cast<double>(grid);
    std::vector<double> slack;
    for (const auto& setup : setups) {
        double lip = 0.0;
        for (const auto& term : setup.shift_terms) lip += std::abs(term.b) * two_pi * std::hypot(term.g.t, term.g.nu);
        slack.push_back(lip * cell * std::numbers::sqrt2 * 0.5 + cfg.root_match_tol);
    }

    auto nearest_root = [&](std::size_t j, cplx h) {
        const auto& roots = out.annihilators[j].r_min;
        std::size_t best = roots.size();
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < roots.size(); ++k) {
            const double d = std::abs(roots[k] - h);
            if (d < best_d) {
                best_d = d;
                best = k;
            }
        }
        return std::pair{best, best_d};
    };

    std::vector<TFShift> refined;
    for (Index i = 0; i < grid; ++i) {
        for (Index k = 0; k < grid; ++k) {
            TFShift p{static_cast<double>(i) * cell, static_cast<double>(k) * cell};
            std::vector<cplx> targets;
            bool ok = true;
            for (std::size_t j = 0; j < setups.size() && ok; ++j) {
                const auto [idx, d] = nearest_root(j, channel_symbol(p, setups[j]));
                ok = idx < out.annihilators[j].r_min.size() && d <= slack[j];
                if (ok) targets.push_back(out.annihilators[j].r_min[idx]);
            }
            if (!ok) continue;

            // Joint Gauss-Newton on sum_j |h_j(p) - z_j|^2.
            for (int iter = 0; iter < 50; ++iter) {
                Eigen::MatrixXd jac(2 * setups.size(), 2);
                Eigen::VectorXd res(2 * setups.size());
                for (std::size_t j = 0; j < setups.size(); ++j) {
                    const auto gr = symbol_gradient(setups[j], p.t, p.nu);
                    const cplx r = targets[j] - channel_symbol(p, setups[j]);
                    const auto row = static_cast<Index>(2 * j);
                    jac(row, 0) = gr[0].real();
                    jac(row, 1) = gr[1].real();
                    jac(row + 1, 0) = gr[0].imag();
                    jac(row + 1, 1) = gr[1].imag();
                    res(row) = r.real();
                    res(row + 1) = r.imag();
                }
                const Eigen::Vector2d step = jac.completeOrthogonalDecomposition().solve(res);
                p.t += step(0);
                p.nu += step(1);
                if (step.cwiseAbs().sum() < 1e-15) break;
            }
            p.t = detail::snap_to_unit_interval(p.t, cfg.root_match_tol);
            p.nu = detail::snap_to_unit_interval(p.nu, cfg.root_match_tol);
            if (!in_unit_square(p)) continue;
            bool fits = true;
            for (std::size_t j = 0; j < setups.size(); ++j)
                fits = fits && std::abs(channel_symbol(p, setups[j]) - targets[j]) <= cfg.root_match_tol;
            if (!fits) continue;
            const bool seen = std::any_of(refined.begin(), refined.end(),
                                          [&](const TFShift& q) { return plane_distance(p, q) <= cfg.root_match_tol; });
            if (!seen) refined.push_back(p);
        }
    }
    std::sort(refined.begin(), refined.end(),
              [](const TFShift& a, const TFShift& b) { return a.t < b.t || (a.t == b.t && a.nu < b.nu); });
    out.candidates = refined;
    if (refined.empty()) return out;

    Index rows = 0;
    for (const auto& rec : records) rows += rec.values().size();
    ComplexMatrix g(rows, static_cast<Index>(refined.size()));
    ComplexVector y(rows);
    Index offset = 0;
    for (std::size_t j = 0; j < records.size(); ++j) {
        const Index n = records[j].values().size();
        g.middleRows(offset, n) = channel_columns(refined, records[j].L(), setups[j]);
        y.segment(offset, n) = records[j].flattened();
        offset += n;
    }
    const ComplexVector c = least_squares_solve(g, y);
    out.relative_residual = y.norm() == 0.0 ? 0.0 : (g * c - y).norm() / y.norm();
    // Ghosts are fitted at round-off level; anything this small relative to
    // the largest gain is not a path.
    const double cut = std::max(cfg.coeff_drop_tol, 1e-8 * c.cwiseAbs().maxCoeff());
    for (std::size_t j = 0; j < refined.size(); ++j) {
        if (std::abs(c(static_cast<Index>(j))) < cut) continue;
        ComplexVector gain(1);
        gain(0) = c(static_cast<Index>(j));
        out.model.modes.push_back({refined[j], gain});
    }
    return out;
}

}  // namespace prony

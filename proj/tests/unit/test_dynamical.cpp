#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numbers>

#include "prony/classic.hpp"
#include "prony/dynamical.hpp"
#include "prony/errors.hpp"
#include "support/generators.hpp"

using namespace prony;
using namespace prony::testing;

namespace {
const cplx I{0.0, 1.0};
constexpr double pi = std::numbers::pi;

DynamicalProblem diagonal_problem(const std::vector<cplx>& spectrum) {
    const auto d = static_cast<Index>(spectrum.size());
    DynamicalProblem p;
    p.A = ComplexMatrix::Zero(d, d);
    for (Index j = 0; j < d; ++j) {
        p.A(j, j) = spectrum[static_cast<std::size_t>(j)];
        p.basis.chains.push_back({p.A(j, j), {ComplexVector::Unit(d, j)}});
    }
    p.sample_basis = ComplexMatrix::Identity(d, d);
    p.I = {0};
    return p;
}

DynamicalProblem on_grid_problem(Index d) {
    std::vector<cplx> spectrum;
    for (Index j = 0; j < d; ++j) spectrum.push_back(2.0 * pi * I * static_cast<double>(j) / static_cast<double>(d));
    auto p = diagonal_problem(spectrum);
    p.sample_basis = fourier_basis(d);
    return p;
}

SparseSignalModel<cplx> one_mode(cplx lambda, ComplexVector c) {
    SparseSignalModel<cplx> m;
    m.modes.push_back({lambda, std::move(c)});
    return m;
}

ComplexVector scalar_vec(cplx c) {
    ComplexVector v(1);
    v(0) = c;
    return v;
}
}  // namespace

TEST_CASE("build_propagator examples") {
    SUBCASE("zero generator") {
        auto p = diagonal_problem({0.0, 0.0});
        p.beta = 3.7;
        CHECK((build_propagator(p) - ComplexMatrix::Identity(2, 2)).norm() < 1e-15);
    }
    SUBCASE("diag(i pi, 0)") {
        const auto b = build_propagator(diagonal_problem({I * pi, 0.0}));
        CHECK(std::abs(b(0, 0) + 1.0) < 1e-15);
        CHECK(std::abs(b(1, 1) - 1.0) < 1e-15);
        CHECK(std::abs(b(0, 1)) + std::abs(b(1, 0)) < 1e-15);
    }
    SUBCASE("on-grid d = 4") {
        const auto b = build_propagator(on_grid_problem(4));
        const std::vector<cplx> expected{1.0, I, -1.0, -I};
        for (Index j = 0; j < 4; ++j) CHECK(std::abs(b(j, j) - expected[static_cast<std::size_t>(j)]) < 1e-14);
        CHECK((b - ComplexMatrix(b.diagonal().asDiagonal())).norm() < 1e-14);
    }
}

TEST_CASE("dynamical_measure examples") {
    SUBCASE("zero state") {
        const auto p = on_grid_problem(4);
        CHECK(dynamical_measure(p, ComplexVector::Zero(4), 3).values().norm() == 0.0);
    }
    SUBCASE("constant solution") {
        const auto p = diagonal_problem({0.0, 0.0});
        const auto rec = dynamical_measure(p, ComplexVector::Unit(2, 0), 2);
        REQUIRE(rec.L() == 2);
        for (Index l = 0; l <= 2; ++l) CHECK(std::abs(rec.values()(l, 0) - 1.0) < 1e-15);
    }
    SUBCASE("on-grid Fourier mode is geometric") {
        // x0 = e_2 evolves as i^{2l} e_2; <., f_0> = f_0^H e_2 = 1/2 for the d = 4 DFT basis.
        const auto p = on_grid_problem(4);
        const auto rec = dynamical_measure(p, ComplexVector::Unit(4, 2), 5);
        for (Index l = 0; l <= 5; ++l) CHECK(std::abs(rec.values()(l, 0) - 0.5 * std::pow(-1.0, static_cast<double>(l))) < 1e-14);
    }
}

TEST_CASE("dynamical_symbol_inverse examples") {
    const auto p = diagonal_problem({0.0, I * pi});
    CHECK(dynamical_symbol_inverse(1.0, p, 1e-6) == cplx{});
    CHECK(dynamical_symbol_inverse(-1.0, p, 1e-6) == I * pi);
    CHECK_THROWS_AS(dynamical_symbol_inverse(I, p, 1e-6), SpuriousRoot);

    auto aliased = diagonal_problem({0.0, 2.0 * pi * I});
    CHECK_THROWS_AS(dynamical_symbol_inverse(1.0, aliased, 1e-6), SymbolNotInjective);
}

TEST_CASE("check_observability examples") {
    SUBCASE("Fourier sampling sees every standard vector") {
        auto p = on_grid_problem(5);
        for (Index s = 0; s < 5; ++s) {
            p.I = {s};
            CHECK(check_observability(p));
        }
    }
    SUBCASE("orthogonal sample") {
        auto p = diagonal_problem({0.0, I});
        p.I = {1};
        CHECK_FALSE(check_observability(p));
    }
    SUBCASE("full index set") {
        Rng rng(51);
        auto p = random_dynamical_problem(rng, 6, 0.3);
        p.I = {0, 1, 2, 3, 4, 5};
        CHECK(check_observability(p));
    }
}

TEST_CASE("problem validation") {
    auto p = diagonal_problem({0.0, I});
    p.I.clear();
    CHECK_THROWS_AS(p.validate(), ContractViolation);
    p.I = {0};
    p.beta = 0.0;
    CHECK_THROWS_AS(p.validate(), ContractViolation);
    p.beta = 1.0;
    p.basis.chains.pop_back();
    CHECK_THROWS_AS(p.validate(), ContractViolation);
}

TEST_CASE("dynamical round trip") {
    Rng rng(52);
    for (int trial = 0; trial < 50; ++trial) {
        auto p = random_dynamical_problem(rng, 16, 0.2);
        choose_observable_indices(rng, p, 4);
        CHECK(basis_residual(p) < 1e-9);
        const Index support = uniform_int(rng, 1, 4);
        std::vector<std::size_t> picks(16);
        for (std::size_t j = 0; j < picks.size(); ++j) picks[j] = j;
        std::shuffle(picks.begin(), picks.end(), rng);
        SparseSignalModel<cplx> truth;
        for (Index k = 0; k < support; ++k)
            truth.modes.push_back({p.basis.chains[picks[static_cast<std::size_t>(k)]].lambda,
                                   scalar_vec(random_amplitude(rng, 0.5, 2.0))});
        RecoveryConfig cfg;
        cfg.kappa = 4;
        const auto meas = dynamical_measure(p, initial_state(p, truth), cfg.required_L());
        const auto res = run_recovery(meas, dynamical_instance(p), cfg, RootPolicy::Lenient);
        REQUIRE(res.model.size() == truth.size());
        for (const auto& t : truth.modes) {
            const auto it = std::find_if(res.model.modes.begin(), res.model.modes.end(),
                                         [&](const auto& m) { return m.gamma == t.gamma; });
            REQUIRE(it != res.model.modes.end());
            CHECK(std::abs(it->coeffs(0) - t.coeffs(0)) <= 1e-6);
        }
    }
}

TEST_CASE("on-grid setup reproduces classic samples") {
    Rng rng(53);
    for (int trial = 0; trial < 50; ++trial) {
        const Index d = uniform_int(rng, 2, 16);
        auto p = on_grid_problem(d);
        p.I = {uniform_int(rng, 0, d - 1)};
        const Index s = p.I[0];
        // <e_j, f_s> = conj(f_s(j)) = exp(-2 pi i s j / d) / sqrt(d); fold it into the classic coefficient.
        SparseSignalModel<cplx> dyn;
        SparseSignalModel<Frequency> classic;
        for (Index j = 0; j < d; ++j) {
            if (uniform(rng, 0.0, 1.0) < 0.5) continue;
            const cplx c = random_amplitude(rng, 0.1, 10.0);
            dyn.modes.push_back({p.basis.chains[static_cast<std::size_t>(j)].lambda, scalar_vec(c)});
            const cplx weight = std::conj(p.sample_basis(j, s));
            classic.modes.push_back({static_cast<double>(j) / static_cast<double>(d), scalar_vec(c * weight)});
        }
        const Index L = 2 * d;
        const auto a = dynamical_measure(p, initial_state(p, dyn), L);
        const auto b = classic_measure(classic, L);
        CHECK((a.values() - b.values()).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("Jordan chain multiplicity") {
    // A = lambda I + N on a 2-block plus a simple eigenvalue mu.
    const cplx lambda = 0.7 * I;
    const cplx mu = 2.1 * I;
    DynamicalProblem p;
    p.A = ComplexMatrix::Zero(3, 3);
    p.A(0, 0) = lambda;
    p.A(1, 1) = lambda;
    p.A(0, 1) = 1.0;
    p.A(2, 2) = mu;
    p.basis.chains.push_back({lambda, {ComplexVector::Unit(3, 0), ComplexVector::Unit(3, 1)}});
    p.basis.chains.push_back({mu, {ComplexVector::Unit(3, 2)}});
    p.sample_basis = fourier_basis(3);
    p.I = {1};
    CHECK(basis_residual(p) < 1e-15);

    RecoveryConfig cfg;
    cfg.kappa = 2;
    cfg.M = 2;
    const auto inst = dynamical_instance(p);
    CHECK(inst.mode_dimension == 2);

    SUBCASE("full chain in the support") {
        SparseSignalModel<cplx> truth;
        ComplexVector c(2);
        c << cplx{1.0, 0.5}, cplx{-0.8, 0.2};
        truth.modes.push_back({lambda, c});
        truth.modes.push_back({mu, scalar_vec(1.3)});
        const auto meas = dynamical_measure(p, initial_state(p, truth), cfg.required_L());
        const auto ann = minimal_annihilator(meas, cfg);
        REQUIRE(ann.r_min.size() == 2);
        for (std::size_t k = 0; k < 2; ++k) {
            const bool at_lambda = std::abs(ann.r_min[k] - std::exp(lambda)) < 1e-6;
            CHECK(ann.multiplicities[k] == (at_lambda ? 2 : 1));
        }
        const auto res = run_recovery(meas, inst, cfg);
        REQUIRE(res.model.size() == 2);
        const auto& lam_mode = res.model.modes[0].gamma == lambda ? res.model.modes[0] : res.model.modes[1];
        CHECK(std::abs(lam_mode.coeffs(0) - c(0)) < 1e-8);
        CHECK(std::abs(lam_mode.coeffs(1) - c(1)) < 1e-8);
    }
    SUBCASE("only the eigenvector in the support") {
        SparseSignalModel<cplx> truth;
        truth.modes.push_back({lambda, scalar_vec(1.0)});
        const auto ann = minimal_annihilator(dynamical_measure(p, initial_state(p, truth), cfg.required_L()), cfg);
        REQUIRE(ann.r_min.size() == 1);
        CHECK(ann.multiplicities[0] == 1);
        CHECK(std::abs(ann.r_min[0] - std::exp(lambda)) < 1e-10);
    }
}

TEST_CASE("fourier_basis is unitary") {
    for (Index d = 1; d <= 9; ++d) {
        const auto f = fourier_basis(d);
        CHECK((f.adjoint() * f - ComplexMatrix::Identity(d, d)).norm() < 1e-13);
    }
}

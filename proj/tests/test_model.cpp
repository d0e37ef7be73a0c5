#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>
#include <string>
#include <vector>

#include "modecoupler/errors.hpp"
#include "modecoupler/linalg.hpp"
#include "modecoupler/model.hpp"
#include "modecoupler/types.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "support/random_models.hpp"

using namespace modecoupler;

TEST_CASE("model validation rejects broken inputs") {
    CouplingModel good = fixtures::case2_center();
    CHECK_NOTHROW(validate(good));

    CouplingModel m = good;
    m.modes[0].omega = 0.0;
    CHECK_THROWS_AS(validate(m), InvalidModelError);

    m = good;
    m.modes[1].beta_ext = -1e-9;
    CHECK_THROWS_AS(validate(m), InvalidModelError);

    m = good;
    m.modes[0].alpha_int = std::nan("");
    CHECK_THROWS_AS(validate(m), InvalidModelError);

    m = good;
    m.direct_coupling(0, 1) = Complex{0.12, 0.0};
    m.direct_coupling(1, 0) = Complex{0.13, 0.0};  // asymmetric
    CHECK_THROWS_AS(validate(m), InvalidModelError);

    m = good;
    m.direct_coupling(0, 0) = Complex{0.01, 0.0};  // non-zero diagonal
    CHECK_THROWS_AS(validate(m), InvalidModelError);

    m = good;
    m.direct_coupling = CMatrix(3, 3);  // size mismatch
    CHECK_THROWS_AS(validate(m), InvalidModelError);

    // The empty model is legal: a bare transmission line.
    CouplingModel bare;
    CHECK_NOTHROW(validate(bare));
}

TEST_CASE("effective Hamiltonian entries") {
    // Case-1 pair: H_12 = Delta - i sqrt(beta1 beta2) = -i sqrt(0.076 * 0.048)
    const CMatrix h = build_effective_hamiltonian(fixtures::case1_center(0.0, 0.0));
    CHECK(h.rows() == 2);
    CHECK(h(0, 0).real() == doctest::Approx(6.75).epsilon(1e-15));
    CHECK(h(0, 0).imag() == doctest::Approx(-0.076).epsilon(1e-15));
    CHECK(h(1, 1).imag() == doctest::Approx(-0.048).epsilon(1e-15));
    CHECK(h(0, 1).real() == doctest::Approx(0.0));
    CHECK(h(0, 1).imag() == doctest::Approx(-0.060399).epsilon(1e-6));
    CHECK(h(0, 1) == h(1, 0));

    // Three modes with betas picked so every channel term is exact in binary.
    CouplingModel m3;
    m3.modes = {{6.0, 0.04, 0.01}, {6.5, 0.09, 0.02}, {7.0, 0.16, 0.03}};
    m3.direct_coupling = CMatrix(3, 3);
    const CMatrix h3 = build_effective_hamiltonian(m3);
    CHECK(h3(0, 0) == Complex{6.0, -0.05});
    CHECK(h3(1, 1) == Complex{6.5, -0.11});
    CHECK(h3(2, 2) == Complex{7.0, -0.19});
    CHECK(h3(0, 1) == Complex{0.0, -0.06});   // sqrt(0.04 * 0.09)
    CHECK(h3(0, 2) == Complex{0.0, -0.08});   // sqrt(0.04 * 0.16)
    CHECK(h3(1, 2) == Complex{0.0, -0.12});   // sqrt(0.09 * 0.16)

    // Direct coupling adds on top of the channel term.
    const CMatrix h2 = build_effective_hamiltonian(fixtures::case2_center(0.003, 0.004));
    CHECK(h2(0, 1).real() == doctest::Approx(0.12).epsilon(1e-15));
    CHECK(h2(0, 1).imag() == doctest::Approx(-oracles::kSqrtBeta1Beta2).epsilon(1e-12));
    CHECK(h2(0, 0).imag() == doctest::Approx(-(0.0227 + 0.003)).epsilon(1e-15));
}

TEST_CASE("eigenvalues: exact special cases") {
    // Decoupled pair: Delta = 0 and beta2 = 0 kills the off-diagonal entirely.
    CouplingModel dec = two_mode_model({6.0, 0.05, 0.01}, {7.0, 0.0, 0.02}, Complex{0.0, 0.0});
    auto ev = eigenvalues(dec);
    REQUIRE(ev.size() == 2);
    CHECK(ev[0].re == doctest::Approx(6.0).epsilon(1e-15));
    CHECK(ev[0].im == doctest::Approx(-0.06).epsilon(1e-12));
    CHECK(ev[1].re == doctest::Approx(7.0).epsilon(1e-15));
    CHECK(ev[1].im == doctest::Approx(-0.02).epsilon(1e-12));

    // Identical modes: dark state {omega0, 0} and bright state {omega0, -2 beta}.
    CouplingModel db = two_mode_model({6.5, 0.03, 0.0}, {6.5, 0.03, 0.0}, Complex{0.0, 0.0});
    ev = eigenvalues(db);
    REQUIRE(ev.size() == 2);
    // equal real parts sort by imaginary part ascending: bright first
    CHECK(ev[0].re == doctest::Approx(6.5).epsilon(1e-15));
    CHECK(ev[0].im == doctest::Approx(-0.06).epsilon(1e-12));
    CHECK(ev[1].re == doctest::Approx(6.5).epsilon(1e-15));
    CHECK(std::abs(ev[1].im) < 1e-15);

    // Zero and one mode.
    CHECK(eigenvalues(CouplingModel{}).empty());
    CouplingModel one = fixtures::single_notch(6.75, 0.048, 0.01);
    ev = eigenvalues(one);
    REQUIRE(ev.size() == 1);
    CHECK(ev[0].re == doctest::Approx(6.75).epsilon(1e-15));
    CHECK(ev[0].im == doctest::Approx(-0.058).epsilon(1e-15));
}

TEST_CASE("eigenvalues: frozen case-2 crossing branches") {
    auto ev = eigenvalues(fixtures::case2_center());
    REQUIRE(ev.size() == 2);
    CHECK(ev[0].re == doctest::Approx(oracles::kCase2CenterEig0Re).epsilon(1e-12));
    CHECK(ev[0].im == doctest::Approx(oracles::kCase2CenterEig0Im).epsilon(1e-9));
    CHECK(ev[1].re == doctest::Approx(oracles::kCase2CenterEig1Re).epsilon(1e-12));
    CHECK(ev[1].im == doctest::Approx(oracles::kCase2CenterEig1Im).epsilon(1e-9));

    // Case 1 at the crossing: dissipative regime, real parts coincide.
    ev = eigenvalues(fixtures::case1_center());
    REQUIRE(ev.size() == 2);
    CHECK(std::abs(ev[0].re - ev[1].re) < 1e-9);
    CHECK(std::abs(std::abs(ev[0].im - ev[1].im) - oracles::kCase1CenterGapIm) < 1e-12);
}

TEST_CASE("eigenvalues: trace and determinant laws, N = 2..8") {
    std::mt19937_64 rng(404);
    for (std::size_t n = 2; n <= 8; ++n) {
        for (int trial = 0; trial < 5; ++trial) {
            CouplingModel m = random_models::lossy_model(rng, n);
            const CMatrix h = build_effective_hamiltonian(m);
            auto ev = eigenvalues(m);
            REQUIRE(ev.size() == n);

            Complex tr_h{0.0, 0.0};
            for (std::size_t i = 0; i < n; ++i) tr_h += h(i, i);
            Complex sum{0.0, 0.0}, prod{1.0, 0.0};
            for (const auto& b : ev) {
                sum += Complex{b.re, b.im};
                prod *= Complex{b.re, b.im};
            }
            CHECK(std::abs(sum - tr_h) < 1e-10 * std::max(1.0, std::abs(tr_h)));
            const Complex det_h = linalg::determinant(h);
            CHECK(std::abs(prod - det_h) < 1e-8 * std::max(1.0, std::abs(det_h)));
        }
    }
}

TEST_CASE("eigenvalues: passive models decay") {
    std::mt19937_64 rng(505);
    for (int trial = 0; trial < 30; ++trial) {
        std::size_t n = 1 + static_cast<std::size_t>(rng() % 4);
        CouplingModel m = random_models::passive_model(rng, n);
        REQUIRE(is_passive(m));
        for (const auto& b : eigenvalues(m)) CHECK(b.im <= 1e-10);
    }
}

TEST_CASE("eigenvalues: closed form agrees with the polynomial path") {
    std::mt19937_64 rng(606);
    for (int trial = 0; trial < 25; ++trial) {
        CouplingModel m = random_models::lossy_model(rng, 2);
        auto ev = eigenvalues(m);  // closed form for N = 2
        const CMatrix h = build_effective_hamiltonian(m);
        auto roots = linalg::polynomial_roots(linalg::characteristic_polynomial(h));
        std::sort(roots.begin(), roots.end(), [](const Complex& a, const Complex& b) {
            if (a.real() != b.real()) return a.real() < b.real();
            return a.imag() < b.imag();
        });
        REQUIRE(roots.size() == 2);
        for (std::size_t i = 0; i < 2; ++i) {
            CHECK(std::abs(roots[i].real() - ev[i].re) < 1e-10);
            CHECK(std::abs(roots[i].imag() - ev[i].im) < 1e-10);
        }
    }
}

TEST_CASE("eigenvalues rejects N > 8") {
    CouplingModel m;
    for (int j = 0; j < 9; ++j) m.modes.push_back({6.0 + 0.1 * j, 0.01, 0.0});
    m.direct_coupling = CMatrix(9, 9);
    CHECK_THROWS_AS(eigenvalues(m), UnsupportedModelError);
}

TEST_CASE("s21: single notch hits the exact interference floor") {
    // S21(omega0) = (alpha - beta) / (alpha + beta) = -19/29 for 0.01 / 0.048.
    const Complex v = s21(fixtures::single_notch(6.75, 0.048, 0.01), 6.75);
    CHECK(v.real() == doctest::Approx(oracles::kNotchS21).epsilon(1e-12));
    CHECK(std::abs(v.imag()) < 1e-14);

    // beta = 0: the mode never talks to the line, S21 is exactly 1.
    CouplingModel silent = fixtures::single_notch(6.75, 0.0, 0.01);
    CHECK(s21(silent, 6.75) == Complex{1.0, 0.0});

    // Empty model: bare line.
    CHECK(s21(CouplingModel{}, 6.0) == Complex{1.0, 0.0});
}

TEST_CASE("s21: all-pass identity for lossless models") {
    std::mt19937_64 rng(707);
    const auto freqs = linspace(5.0, 9.0, 41);
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t n = 1 + static_cast<std::size_t>(rng() % 4);
        CouplingModel m = random_models::passive_model(rng, n);
        for (auto& mode : m.modes) mode.alpha_int = 0.0;
        for (double f : freqs) CHECK(std::abs(std::abs(s21(m, f)) - 1.0) < 1e-9);
    }
}

TEST_CASE("s21: direct and Sherman-Morrison paths agree") {
    std::mt19937_64 rng(808);
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t n = 1 + static_cast<std::size_t>(rng() % 4);
        CouplingModel m = random_models::lossy_model(rng, n);
        for (int probe = 0; probe < 5; ++probe) {
            const double f = random_models::uniform(rng, 5.0, 9.0);
            const Complex a = s21(m, f);
            const Complex b = s21_rank_one(m, f);
            CHECK(std::abs(a - b) < 1e-12 * std::max(1.0, std::abs(a)));
        }
    }
}

TEST_CASE("s21: far-detuned asymptotics approach unity") {
    const CouplingModel m = fixtures::case2_center(0.01, 0.01);
    CHECK(std::abs(s21(m, 1000.0) - Complex{1.0, 0.0}) < 1e-3);
    CHECK(std::abs(s21(m, 0.5) - Complex{1.0, 0.0}) < 2e-2);
    // and the approach is monotone in the tail
    CHECK(std::abs(s21(m, 2000.0) - Complex{1.0, 0.0}) <
          std::abs(s21(m, 1000.0) - Complex{1.0, 0.0}));
}

TEST_CASE("s21: singular response at a lossless decoupled resonance") {
    // Mode 2 has beta = alpha = 0 and no direct coupling: a real eigenvalue at
    // omega2 makes (omega I - H) exactly singular there.
    CouplingModel m = two_mode_model({6.5, 0.1, 0.0}, {6.0, 0.0, 0.0}, Complex{0.0, 0.0});
    CHECK_THROWS_AS(s21(m, 6.0), SingularResponseError);
    CHECK_NOTHROW(s21(m, 6.0001));
}

TEST_CASE("s21: non-finite frequency is rejected") {
    const CouplingModel m = fixtures::case2_center();
    CHECK_THROWS_AS(s21(m, std::nan("")), InvalidInputError);
    CHECK_THROWS_AS(s21(m, std::numeric_limits<double>::infinity()), InvalidInputError);
}

TEST_CASE("s21_spectrum: grid semantics") {
    const CouplingModel m = fixtures::case2_center(0.005, 0.005);

    // empty and single-point grids are legal
    CHECK(s21_spectrum(m, {}).s21.empty());
    auto single = s21_spectrum(m, {6.65});
    REQUIRE(single.s21.size() == 1);
    CHECK(std::abs(single.s21[0] - s21(m, 6.65)) == 0.0);

    // element-wise equality with pointwise evaluation
    const auto freqs = linspace(6.0, 7.2, 97);
    const auto grid = s21_spectrum(m, freqs);
    REQUIRE(grid.s21.size() == freqs.size());
    for (std::size_t i = 0; i < freqs.size(); ++i) CHECK(grid.s21[i] == s21(m, freqs[i]));

    // non-increasing grids are rejected
    CHECK_THROWS_AS(s21_spectrum(m, std::vector<double>{6.0, 6.0}), InvalidInputError);
    CHECK_THROWS_AS(s21_spectrum(m, std::vector<double>{6.5, 6.0}), InvalidInputError);

    // errors carry the offending sample index
    CouplingModel sing = two_mode_model({6.5, 0.1, 0.0}, {6.0, 0.0, 0.0}, Complex{0.0, 0.0});
    try {
        s21_spectrum(sing, {5.9, 6.0, 6.1});
        FAIL("expected SingularResponseError");
    } catch (const SingularResponseError& e) {
        CHECK(std::string(e.what()).find("grid sample 1") != std::string::npos);
    }
}

TEST_CASE("s21: equal-alpha gauge orbits are indistinguishable") {
    const auto freqs = linspace(6.0, 7.3, 401);

    auto max_diff = [&](const CouplingModel& a, const CouplingModel& b) {
        double worst = 0.0;
        for (double f : freqs) worst = std::max(worst, std::abs(s21(a, f) - s21(b, f)));
        return worst;
    };

    // pair A: centered column; pair B: far-detuned column
    const double alpha = 0.005;
    CHECK(max_diff(fixtures::from_orbit(oracles::kOrbitTruthA, alpha, alpha),
                   fixtures::from_orbit(oracles::kOrbitAltA, alpha, alpha)) < 1e-11);
    CHECK(max_diff(fixtures::from_orbit(oracles::kOrbitTruthB, alpha, alpha),
                   fixtures::from_orbit(oracles::kOrbitAltB, alpha, alpha)) < 5e-12);

    // Distinct alphas break the orbit: the same parameter pairs now disagree.
    CHECK(max_diff(fixtures::from_orbit(oracles::kOrbitTruthA, 0.02, 0.002),
                   fixtures::from_orbit(oracles::kOrbitAltA, 0.02, 0.002)) > 0.1);
    CHECK(max_diff(fixtures::from_orbit(oracles::kOrbitTruthB, 0.02, 0.002),
                   fixtures::from_orbit(oracles::kOrbitAltB, 0.02, 0.002)) > 1e-3);
}

TEST_CASE("linewidth conservation: branch linewidths sum to the total damping") {
    std::mt19937_64 rng(909);
    for (int trial = 0; trial < 20; ++trial) {
        CouplingModel m = random_models::lossy_model(rng, 2);
        m.direct_coupling(0, 1) = Complex{m.direct_coupling(0, 1).real(), 0.0};
        m.direct_coupling(1, 0) = m.direct_coupling(0, 1);
        auto ev = eigenvalues(m);
        const double total = -(m.modes[0].beta_ext + m.modes[0].alpha_int +
                               m.modes[1].beta_ext + m.modes[1].alpha_int);
        CHECK(ev[0].im + ev[1].im == doctest::Approx(total).epsilon(1e-10));
    }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "modecoupler/errors.hpp"
#include "modecoupler/fit.hpp"
#include "modecoupler/model.hpp"
#include "modecoupler/types.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace modecoupler;
using namespace modecoupler::fit;

namespace {

// +-frac box around each packed value; beta/alpha lower bounds clamped at 0.
std::vector<Interval> box_around(const std::vector<double>& packed, std::size_t n_modes,
                                 double frac) {
    std::vector<Interval> bounds(packed.size());
    for (std::size_t i = 0; i < packed.size(); ++i) {
        const double w = frac * std::abs(packed[i]);
        bounds[i] = {packed[i] - w, packed[i] + w};
        if (i >= n_modes && i < 3 * n_modes) bounds[i].lo = std::max(0.0, bounds[i].lo);
    }
    return bounds;
}

double objective_of(const CouplingModel& model, const FitProblem& problem) {
    const SpectrumGrid pred = s21_spectrum(model, problem.observed.freqs);
    double total = 0.0;
    for (std::size_t i = 0; i < pred.s21.size(); ++i) {
        if (problem.loss == Loss::COMPLEX_RESIDUAL) {
            const Complex d = pred.s21[i] - problem.observed.s21[i];
            total += d.real() * d.real() + d.imag() * d.imag();
        } else {
            const double d = std::abs(pred.s21[i]) - std::abs(problem.observed.s21[i]);
            total += d * d;
        }
    }
    return total;
}

std::size_t residuals_of(const FitProblem& problem) {
    return problem.observed.freqs.size() * (problem.loss == Loss::COMPLEX_RESIDUAL ? 2 : 1);
}

}  // namespace

TEST_CASE("parameter layout: count, names, indices") {
    CHECK(param_count(1) == 3);
    CHECK(param_count(2) == 8);
    CHECK(param_count(3) == 15);
    CHECK(param_count(4) == 24);

    CHECK(param_name(0, 2) == "omega1");
    CHECK(param_name(1, 2) == "omega2");
    CHECK(param_name(2, 2) == "beta1");
    CHECK(param_name(3, 2) == "beta2");
    CHECK(param_name(4, 2) == "alpha1");
    CHECK(param_name(5, 2) == "alpha2");
    CHECK(param_name(6, 2) == "delta_re_1_2");
    CHECK(param_name(7, 2) == "delta_im_1_2");

    // pair ordering for three modes: (1,2), (1,3), (2,3)
    CHECK(param_name(9, 3) == "delta_re_1_2");
    CHECK(param_name(10, 3) == "delta_re_1_3");
    CHECK(param_name(11, 3) == "delta_re_2_3");
    CHECK(param_name(12, 3) == "delta_im_1_2");

    // index-name round trip
    for (std::size_t n : {1u, 2u, 3u, 4u})
        for (std::size_t i = 0; i < param_count(n); ++i)
            CHECK(param_index(param_name(i, n), n) == i);

    // two-mode shorthands
    CHECK(param_index("delta_re", 2) == 6);
    CHECK(param_index("delta_im", 2) == 7);

    CHECK_THROWS_AS(param_name(8, 2), InvalidInputError);
    CHECK_THROWS_AS(param_index("delta_re", 3), InvalidInputError);  // ambiguous off two modes
    CHECK_THROWS_AS(param_index("gamma1", 2), InvalidInputError);
}

TEST_CASE("pack/unpack: layout order and round trip") {
    CouplingModel m;
    m.modes = {{6.0, 0.01, 0.001}, {6.5, 0.02, 0.002}, {7.0, 0.03, 0.003}};
    m.direct_coupling = CMatrix(3, 3);
    const Complex d12{0.1, 0.4}, d13{0.2, 0.5}, d23{0.3, 0.6};
    m.direct_coupling(0, 1) = d12;
    m.direct_coupling(1, 0) = d12;
    m.direct_coupling(0, 2) = d13;
    m.direct_coupling(2, 0) = d13;
    m.direct_coupling(1, 2) = d23;
    m.direct_coupling(2, 1) = d23;

    const std::vector<double> expected{6.0, 6.5,  7.0,  0.01, 0.02, 0.03, 0.001, 0.002,
                                       0.003, 0.1, 0.2,  0.3,  0.4,  0.5,  0.6};
    CHECK(pack(m) == expected);

    const CouplingModel back = unpack(expected, 3);
    CHECK(pack(back) == expected);

    // unpack enforces model invariants and vector size
    CHECK_THROWS_AS(unpack(std::vector<double>(14, 1.0), 3), InvalidInputError);
    std::vector<double> bad = expected;
    bad[3] = -0.01;  // negative beta
    CHECK_THROWS_AS(unpack(bad, 3), InvalidModelError);
}

TEST_CASE("fit problem validation") {
    const CouplingModel truth = fixtures::case2_center(0.005, 0.005);
    FitProblem p;
    p.observed = s21_spectrum(truth, linspace(6.3, 7.0, 51));
    p.initial = truth;
    p.free_mask.assign(8, false);
    p.free_mask[0] = true;
    p.bounds = box_around(pack(truth), 2, 0.2);
    CHECK_NOTHROW(validate(p));

    FitProblem q = p;
    q.observed.freqs.clear();
    q.observed.s21.clear();
    CHECK_THROWS_AS(validate(q), InvalidInputError);

    q = p;
    q.free_mask.assign(8, false);  // nothing to fit
    CHECK_THROWS_AS(validate(q), InvalidInputError);

    q = p;
    q.free_mask.assign(7, true);  // wrong mask size
    CHECK_THROWS_AS(validate(q), InvalidInputError);

    q = p;
    q.bounds[2].lo = -0.01;  // negative beta bound
    CHECK_THROWS_AS(validate(q), InvalidInputError);

    q = p;
    q.bounds[0] = {6.9, 6.8};  // inverted interval
    CHECK_THROWS_AS(validate(q), InvalidInputError);

    q = p;
    q.bounds[1] = {6.0, 6.1};  // initial omega2 = 6.65 outside its bounds
    CHECK_THROWS_AS(validate(q), InvalidInputError);

    q = p;
    q.bounds[0].hi = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(validate(q), InvalidInputError);
}

TEST_CASE("initial_guess: single notch") {
    const auto grid = s21_spectrum(fixtures::single_notch(), linspace(5.5, 8.0, 2001));
    const CouplingModel guess = initial_guess(grid, 1);
    REQUIRE(guess.size() == 1);
    CHECK(std::abs(guess.modes[0].omega - 6.75) < 0.01);
    // alpha and beta split the half-width evenly; the sum lands within a
    // factor two of the true alpha + beta = 0.058
    CHECK(guess.modes[0].beta_ext == guess.modes[0].alpha_int);
    const double width_sum = guess.modes[0].beta_ext + guess.modes[0].alpha_int;
    CHECK(width_sum > 0.058 / 2.0);
    CHECK(width_sum < 0.058 * 2.0);
}

TEST_CASE("initial_guess: featureless spectrum falls back to even spacing") {
    SpectrumGrid flat;
    flat.freqs = linspace(5.5, 8.0, 101);
    flat.s21.assign(101, Complex{1.0, 0.0});
    const CouplingModel guess = initial_guess(flat, 2);
    REQUIRE(guess.size() == 2);
    CHECK(guess.modes[0].omega == doctest::Approx(6.125).epsilon(1e-12));
    CHECK(guess.modes[1].omega == doctest::Approx(7.375).epsilon(1e-12));
    CHECK(guess.direct_coupling(0, 1) == Complex{0.0, 0.0});
    // fallback width: 1% of the span, split across alpha + beta
    CHECK(guess.modes[0].alpha_int + guess.modes[0].beta_ext ==
          doctest::Approx(0.025 / 2.0).epsilon(1e-12));

    // two points cannot host extrema -> same fallback path
    SpectrumGrid tiny;
    tiny.freqs = {6.0, 7.0};
    tiny.s21 = {Complex{1.0, 0.0}, Complex{1.0, 0.0}};
    const CouplingModel g2 = initial_guess(tiny, 2);
    CHECK(g2.modes[0].omega == doctest::Approx(6.25).epsilon(1e-12));
    CHECK(g2.modes[1].omega == doctest::Approx(6.75).epsilon(1e-12));
}

TEST_CASE("initial_guess: case-2 hybridized dips set omegas and Delta") {
    const auto grid =
        s21_spectrum(fixtures::case2_center(0.005, 0.005), linspace(5.5, 8.0, 2001));
    const CouplingModel guess = initial_guess(grid, 2);
    REQUIRE(guess.size() == 2);
    CHECK(guess.modes[0].omega < guess.modes[1].omega);
    CHECK(std::abs(guess.modes[0].omega - oracles::kCase2Dip1Freq) < 0.01);
    CHECK(std::abs(guess.modes[1].omega - oracles::kCase2Dip2Freq) < 0.01);
    // dips are close (separation < 10x mean width): Delta = separation / 2
    const double delta = guess.direct_coupling(0, 1).real();
    CHECK(delta > 0.06);
    CHECK(delta < 0.24);
    CHECK(delta == doctest::Approx(oracles::kCase2DipSeparation / 2.0).epsilon(2e-2));
}

TEST_CASE("initial_guess: far-detuned dips leave Delta at zero") {
    const auto grid =
        s21_spectrum(fixtures::case2_detuned(5.7, 0.005, 0.005), linspace(5.5, 8.0, 2001));
    const CouplingModel guess = initial_guess(grid, 2);
    REQUIRE(guess.size() == 2);
    CHECK(guess.modes[0].omega > 5.6);
    CHECK(guess.modes[0].omega < 5.8);
    CHECK(guess.modes[1].omega > 6.6);
    CHECK(guess.modes[1].omega < 6.75);
    CHECK(guess.direct_coupling(0, 1) == Complex{0.0, 0.0});
}

TEST_CASE("initial_guess: input validation") {
    SpectrumGrid empty;
    CHECK_THROWS_AS(initial_guess(empty, 2), InvalidInputError);

    SpectrumGrid grid;
    grid.freqs = linspace(6.0, 7.0, 11);
    grid.s21.assign(11, Complex{1.0, 0.0});
    CHECK_THROWS_AS(initial_guess(grid, 0), UnsupportedModelError);
    CHECK_THROWS_AS(initial_guess(grid, 3), UnsupportedModelError);
}

TEST_CASE("fit_spectrum: an already-optimal start returns immediately") {
    const CouplingModel truth =
        two_mode_model({oracles::kCase2CenterSampleOmega1, 0.0227, 0.02}, {6.65, 0.0057, 0.002},
                       Complex{0.12, 0.0});
    FitProblem p;
    p.observed = s21_spectrum(truth, linspace(6.3, 7.0, 201));
    p.initial = truth;
    p.free_mask.assign(8, true);
    p.bounds = box_around(pack(truth), 2, 0.2);
    p.bounds[7] = {-0.05, 0.05};  // give the zero Im Delta slot real width

    const FitResult result = fit_spectrum(p, 42);
    CHECK(result.converged);
    CHECK(result.iterations == 0);  // the zero objective cannot be improved
    CHECK(result.rms_residual == 0.0);
    CHECK(pack(result.model) == pack(truth));
    REQUIRE(result.objective_history.size() == 1);
    CHECK(result.objective_history[0] == 0.0);
}

TEST_CASE("fit_spectrum: recovers a perturbed two-mode model (distinct alphas)") {
    // Distinct fixed alphas break the equal-alpha gauge orbit, so the five
    // free parameters are identifiable from noiseless data.
    const CouplingModel truth =
        two_mode_model({oracles::kCase2CenterSampleOmega1, 0.0227, 0.02}, {6.65, 0.0057, 0.002},
                       Complex{0.12, 0.0});
    const CouplingModel start =
        two_mode_model({6.68, 0.024, 0.02}, {6.62, 0.0052, 0.002}, Complex{0.13, 0.0});

    FitProblem p;
    p.observed = s21_spectrum(truth, linspace(6.3, 7.0, 301));
    p.initial = start;
    p.free_mask.assign(8, false);
    for (std::size_t i : {0u, 1u, 2u, 3u, 6u}) p.free_mask[i] = true;
    p.bounds = box_around(pack(truth), 2, 0.2);

    const FitResult result = fit_spectrum(p, 42);
    CHECK(result.converged);
    CHECK(result.rms_residual < 1e-6);

    const std::vector<double> got = pack(result.model);
    const std::vector<double> want = pack(truth);
    for (std::size_t i : {0u, 1u, 2u, 3u, 6u})
        CHECK(std::abs(got[i] - want[i]) < 1e-3 * std::abs(want[i]));

    // fixed slots never move
    CHECK(got[4] == want[4]);
    CHECK(got[5] == want[5]);
    CHECK(got[7] == want[7]);

    // invariant: the objective history decreases monotonically from the
    // initial objective down to rms^2 * n_residuals
    REQUIRE(!result.objective_history.empty());
    CHECK(result.objective_history.front() == doctest::Approx(objective_of(start, p)).epsilon(1e-12));
    for (std::size_t i = 1; i < result.objective_history.size(); ++i)
        CHECK(result.objective_history[i] <= result.objective_history[i - 1]);
    const double final_objective = objective_of(result.model, p);
    CHECK(std::abs(result.objective_history.back() - final_objective) <=
          1e-12 * std::max(1.0, final_objective));
    CHECK(std::abs(final_objective - result.rms_residual * result.rms_residual *
                                         static_cast<double>(residuals_of(p))) <=
          1e-12 * std::max(1.0, final_objective));
}

TEST_CASE("fit_spectrum: equal alphas converge onto the gauge orbit") {
    // With equal fixed alphas the five free parameters are not identifiable:
    // the fit reaches a near-zero residual whose parameters may differ from
    // the generator, but the four orbit invariants are pinned.
    const CouplingModel truth = two_mode_model({oracles::kCase2CenterSampleOmega1, 0.0227, 0.005},
                                               {6.65, 0.0057, 0.005}, Complex{0.12, 0.0});
    const CouplingModel start =
        two_mode_model({6.7, 0.025, 0.005}, {6.62, 0.005, 0.005}, Complex{0.1, 0.0});

    FitProblem p;
    p.observed = s21_spectrum(truth, linspace(6.3, 7.0, 201));
    p.initial = start;
    p.free_mask.assign(8, false);
    for (std::size_t i : {0u, 1u, 2u, 3u, 6u}) p.free_mask[i] = true;
    p.bounds = box_around(pack(truth), 2, 0.2);

    const FitResult result = fit_spectrum(p, 42);
    CHECK(result.rms_residual < 1e-6);

    auto invariants = [](const CouplingModel& m) {
        const double w1 = m.modes[0].omega, w2 = m.modes[1].omega;
        const double b1 = m.modes[0].beta_ext, b2 = m.modes[1].beta_ext;
        const double d = m.direct_coupling(0, 1).real();
        return std::vector<double>{b1 + b2, w1 + w2,
                                   b1 * w2 + b2 * w1 - 2.0 * std::sqrt(b1 * b2) * d,
                                   w1 * w2 - d * d};
    };
    const auto got = invariants(result.model);
    const auto want = invariants(truth);
    for (std::size_t i = 0; i < got.size(); ++i)
        CHECK(std::abs(got[i] - want[i]) < 1e-4 * std::max(1.0, std::abs(want[i])));
}

TEST_CASE("fit_spectrum: magnitude loss ignores a global phase") {
    // Rotating the observed data by a unit phase leaves every |s21| unchanged
    // up to rounding, so both fits descend to the same minimum. (The rotation
    // does perturb the objective at the last ulp, so the trajectories are not
    // bitwise identical; the recovered minima are compared instead.)
    const CouplingModel truth = fixtures::case2_center(0.02, 0.002);
    FitProblem p;
    p.observed = s21_spectrum(truth, linspace(6.4, 6.95, 151));
    p.initial = two_mode_model({6.66, 0.024, 0.02}, {6.64, 0.0054, 0.002}, Complex{0.115, 0.0});
    p.free_mask.assign(8, false);
    for (std::size_t i : {0u, 1u, 2u, 3u, 6u}) p.free_mask[i] = true;
    p.bounds = box_around(pack(truth), 2, 0.2);
    p.loss = Loss::MAGNITUDE_RESIDUAL;

    FitProblem rotated = p;
    const Complex phase = std::polar(1.0, 0.7);
    for (Complex& v : rotated.observed.s21) v *= phase;

    const FitResult a = fit_spectrum(p, 11);
    const FitResult b = fit_spectrum(rotated, 11);
    CHECK(a.rms_residual < 1e-6);
    CHECK(b.rms_residual < 1e-6);
    const std::vector<double> pa = pack(a.model);
    const std::vector<double> pb = pack(b.model);
    for (std::size_t i : {0u, 1u, 2u, 3u, 6u})
        CHECK(std::abs(pa[i] - pb[i]) < 1e-6 * std::abs(pa[i]));
}

TEST_CASE("fit_spectrum: deterministic for a fixed seed") {
    const CouplingModel truth = fixtures::case2_center(0.02, 0.002);
    FitProblem p;
    p.observed = s21_spectrum(truth, linspace(6.4, 6.95, 101));
    p.initial = two_mode_model({6.67, 0.021, 0.02}, {6.63, 0.006, 0.002}, Complex{0.125, 0.0});
    p.free_mask.assign(8, false);
    for (std::size_t i : {0u, 1u, 2u, 3u, 6u}) p.free_mask[i] = true;
    p.bounds = box_around(pack(truth), 2, 0.2);

    const FitResult a = fit_spectrum(p, 987);
    const FitResult b = fit_spectrum(p, 987);
    CHECK(pack(a.model) == pack(b.model));
    CHECK(a.rms_residual == b.rms_residual);
    CHECK(a.iterations == b.iterations);
    CHECK(a.objective_history == b.objective_history);
}

TEST_CASE("fit_spectrum: non-finite initial objective is rejected") {
    // The initial model has a lossless decoupled mode resonant at a grid point,
    // so the spectrum evaluation is singular before the search even starts.
    FitProblem p;
    p.observed.freqs = {6.4, 6.5, 6.6};
    p.observed.s21.assign(3, Complex{1.0, 0.0});
    p.initial = two_mode_model({6.45, 0.1, 0.01}, {6.5, 0.0, 0.0}, Complex{0.0, 0.0});
    p.free_mask.assign(8, false);
    p.free_mask[0] = true;
    p.bounds.assign(8, Interval{});
    const std::vector<double> packed = pack(p.initial);
    for (std::size_t i = 0; i < 8; ++i) p.bounds[i] = {packed[i], packed[i]};
    p.bounds[0] = {6.3, 6.6};

    CHECK_THROWS_AS(fit_spectrum(p, 1), InvalidInputError);
}

TEST_CASE("fit_sweep: a single problem reduces to fit_spectrum") {
    const CouplingModel truth = fixtures::case2_center(0.02, 0.002);
    FitProblem p;
    p.observed = s21_spectrum(truth, linspace(6.4, 6.95, 101));
    p.initial = two_mode_model({6.67, 0.021, 0.02}, {6.63, 0.006, 0.002}, Complex{0.125, 0.0});
    p.free_mask.assign(8, false);
    for (std::size_t i : {0u, 1u, 2u, 3u, 6u}) p.free_mask[i] = true;
    p.bounds = box_around(pack(truth), 2, 0.2);

    std::vector<bool> shared(8, false);
    shared[2] = shared[3] = true;

    const SharedFitResult sweep_result = fit_sweep({p}, shared, 555);
    const FitResult direct = fit_spectrum(p, 555);
    REQUIRE(sweep_result.results.size() == 1);
    CHECK(pack(sweep_result.results[0].model) == pack(direct.model));
    CHECK(sweep_result.results[0].iterations == direct.iterations);
    CHECK(sweep_result.results[0].objective_history == direct.objective_history);
    CHECK(sweep_result.pooled_history == direct.objective_history);
    REQUIRE(sweep_result.shared_values.size() == 2);
    CHECK(sweep_result.shared_values[0] == pack(direct.model)[2]);
    CHECK(sweep_result.shared_values[1] == pack(direct.model)[3]);
}

TEST_CASE("fit_sweep: an empty shared set fits every problem independently") {
    const CouplingModel t1 = fixtures::case2_center(0.02, 0.002);
    const CouplingModel t2 = fixtures::case2_detuned(6.75, 0.02, 0.002);
    FitProblem p1, p2;
    p1.observed = s21_spectrum(t1, linspace(6.4, 6.95, 101));
    p1.initial = two_mode_model({6.67, 0.021, 0.02}, {6.63, 0.006, 0.002}, Complex{0.125, 0.0});
    p1.free_mask.assign(8, false);
    for (std::size_t i : {0u, 1u, 2u, 3u, 6u}) p1.free_mask[i] = true;
    p1.bounds = box_around(pack(t1), 2, 0.2);
    p2 = p1;
    p2.observed = s21_spectrum(t2, linspace(6.4, 7.1, 101));
    p2.initial = two_mode_model({6.77, 0.021, 0.02}, {6.63, 0.006, 0.002}, Complex{0.125, 0.0});
    p2.bounds = box_around(pack(t2), 2, 0.2);

    const SharedFitResult shared = fit_sweep({p1, p2}, std::vector<bool>(8, false), 777);
    REQUIRE(shared.results.size() == 2);
    CHECK(pack(shared.results[0].model) == pack(fit_spectrum(p1, 777).model));
    CHECK(pack(shared.results[1].model) == pack(fit_spectrum(p2, 777).model));
    CHECK(shared.shared_values.empty());

    // the pooled record collapses to the combined final objective
    REQUIRE(shared.pooled_history.size() == 1);
    double expected_pooled = 0.0;
    for (const FitResult& r : shared.results)
        expected_pooled += r.rms_residual * r.rms_residual * 202.0;  // 101 complex points
    CHECK(shared.pooled_history[0] == expected_pooled);
}

TEST_CASE("fit_sweep: columns sharing (beta1, beta2, Delta) pin the orbit") {
    // One column alone cannot identify the shared triple under equal alphas,
    // but three columns at different detunings can: the orbit transformations
    // disagree across columns except at the generator values.
    const double alpha = 0.005;
    const std::vector<double> omega1{6.5, oracles::kCase2CenterSampleOmega1, 6.8};
    std::vector<FitProblem> problems;
    for (double w1 : omega1) {
        const CouplingModel truth =
            two_mode_model({w1, 0.0227, alpha}, {6.65, 0.0057, alpha}, Complex{0.12, 0.0});
        FitProblem p;
        p.observed = s21_spectrum(truth, linspace(6.25, 7.05, 151));
        p.initial = two_mode_model({w1 + 0.02, 0.0235, alpha}, {6.63, 0.0054, alpha},
                                   Complex{0.125, 0.0});
        p.free_mask.assign(8, false);
        for (std::size_t i : {0u, 1u, 2u, 3u, 6u}) p.free_mask[i] = true;
        // shared slots must carry identical bounds in every problem
        p.bounds = box_around(pack(truth), 2, 0.2);
        p.bounds[0] = {w1 - 0.3, w1 + 0.3};
        p.bounds[1] = {6.4, 6.9};
        p.bounds[2] = {0.015, 0.03};
        p.bounds[3] = {0.003, 0.009};
        p.bounds[6] = {0.08, 0.16};
        problems.push_back(p);
    }

    std::vector<bool> shared_mask(8, false);
    shared_mask[2] = shared_mask[3] = shared_mask[6] = true;

    const SharedFitResult result = fit_sweep(problems, shared_mask, 2024);
    REQUIRE(result.shared_values.size() == 3);
    CHECK(std::abs(result.shared_values[0] - 0.0227) < 1e-3);
    CHECK(std::abs(result.shared_values[1] - 0.0057) < 1e-3);
    CHECK(std::abs(result.shared_values[2] - 0.12) < 1e-3);

    // every per-problem result carries the shared values verbatim
    for (const FitResult& r : result.results) {
        const std::vector<double> packed = pack(r.model);
        CHECK(packed[2] == result.shared_values[0]);
        CHECK(packed[3] == result.shared_values[1]);
        CHECK(packed[6] == result.shared_values[2]);
    }

    // pooled objective decreases across outer rounds
    REQUIRE(!result.pooled_history.empty());
    for (std::size_t i = 1; i < result.pooled_history.size(); ++i)
        CHECK(result.pooled_history[i] <= result.pooled_history[i - 1] * (1.0 + 1e-12));

    // per-problem histories keep the monotone invariant
    for (const FitResult& r : result.results)
        for (std::size_t i = 1; i < r.objective_history.size(); ++i)
            CHECK(r.objective_history[i] <= r.objective_history[i - 1]);
}

TEST_CASE("fit_sweep: validation") {
    const CouplingModel truth = fixtures::case2_center(0.02, 0.002);
    FitProblem p;
    p.observed = s21_spectrum(truth, linspace(6.4, 6.95, 51));
    p.initial = truth;
    p.free_mask.assign(8, false);
    p.free_mask[0] = p.free_mask[2] = true;
    p.bounds = box_around(pack(truth), 2, 0.2);

    CHECK_THROWS_AS(fit_sweep({}, std::vector<bool>(8, false), 1), InvalidInputError);
    CHECK_THROWS_AS(fit_sweep({p}, std::vector<bool>(7, false), 1), InvalidInputError);

    // shared slot not free in the problem
    std::vector<bool> shared(8, false);
    shared[3] = true;
    CHECK_THROWS_AS(fit_sweep({p}, shared, 1), InvalidInputError);

    // inconsistent bounds on a shared slot
    shared.assign(8, false);
    shared[2] = true;
    FitProblem q = p;
    q.bounds[2].hi *= 1.5;
    CHECK_THROWS_AS(fit_sweep({p, q}, shared, 1), InvalidInputError);

    // mode-count mismatch
    FitProblem one;
    one.observed = s21_spectrum(fixtures::single_notch(), linspace(6.5, 7.0, 51));
    one.initial = fixtures::single_notch();
    one.free_mask.assign(3, true);
    one.bounds = box_around(pack(one.initial), 1, 0.2);
    CHECK_THROWS_AS(fit_sweep({p, one}, shared, 1), InvalidInputError);
}

#include "modecoupler/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "modecoupler/linalg.hpp"

namespace modecoupler {

namespace {

constexpr std::size_t kMaxModes = 8;

std::vector<Complex> channel_vector(const CouplingModel& model) {
    std::vector<Complex> v(model.size());
    for (std::size_t j = 0; j < model.size(); ++j)
        v[j] = Complex{std::sqrt(model.modes[j].beta_ext), 0.0};
    return v;
}

bool all_beta_zero(const CouplingModel& model) {
    for (const ModeParams& m : model.modes)
        if (m.beta_ext != 0.0) return false;
    return true;
}

void sort_branches(std::vector<ComplexFrequency>& branches) {
    std::sort(branches.begin(), branches.end(), [](const ComplexFrequency& a, const ComplexFrequency& b) {
        if (a.re != b.re) return a.re < b.re;
        return a.im < b.im;
    });
}

}  // namespace

CMatrix build_effective_hamiltonian(const CouplingModel& model) {
    validate(model);
    const std::size_t n = model.size();
    CMatrix h(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        const ModeParams& m = model.modes[j];
        h(j, j) = Complex{m.omega, -(m.alpha_int + m.beta_ext)};
        for (std::size_t k = 0; k < n; ++k) {
            if (j == k) continue;
            const double channel = std::sqrt(model.modes[j].beta_ext * model.modes[k].beta_ext);
            h(j, k) = model.direct_coupling(j, k) + Complex{0.0, -channel};
        }
    }
    return h;
}

std::vector<ComplexFrequency> eigenvalues(const CouplingModel& model) {
    const std::size_t n = model.size();
    if (n > kMaxModes)
        throw UnsupportedModelError("eigenvalues supports at most " + std::to_string(kMaxModes) +
                                    " modes, got " + std::to_string(n));
    const CMatrix h = build_effective_hamiltonian(model);

    std::vector<ComplexFrequency> branches;
    if (n == 0) return branches;
    if (n == 1) {
        branches.push_back({h(0, 0).real(), h(0, 0).imag()});
        return branches;
    }
    if (n == 2) {
        // lambda = mean +- sqrt(((h11-h22)/2)^2 + h12*h21)
        const Complex mean = (h(0, 0) + h(1, 1)) * 0.5;
        const Complex half_diff = (h(0, 0) - h(1, 1)) * 0.5;
        const Complex s = std::sqrt(half_diff * half_diff + h(0, 1) * h(1, 0));
        const Complex a = mean + s;
        const Complex b = mean - s;
        branches.push_back({a.real(), a.imag()});
        branches.push_back({b.real(), b.imag()});
        sort_branches(branches);
        return branches;
    }

    const std::vector<Complex> coeffs = linalg::characteristic_polynomial(h);
    const std::vector<Complex> roots = linalg::polynomial_roots(coeffs);
    branches.reserve(n);
    for (const Complex& r : roots) branches.push_back({r.real(), r.imag()});
    sort_branches(branches);
    return branches;
}

Complex s21(const CouplingModel& model, double omega) {
    if (!std::isfinite(omega)) throw InvalidInputError("s21 requires a finite frequency");
    const CMatrix h = build_effective_hamiltonian(model);
    if (all_beta_zero(model)) return Complex{1.0, 0.0};  // v = 0: bare line

    const std::size_t n = model.size();
    CMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            a(i, j) = (i == j ? Complex{omega, 0.0} : Complex{0.0, 0.0}) - h(i, j);

    const std::vector<Complex> v = channel_vector(model);
    std::vector<Complex> x;
    try {
        x = linalg::lu_solve(std::move(a), v);
    } catch (const NumericalError&) {
        throw SingularResponseError(omega);
    }
    Complex form{0.0, 0.0};
    for (std::size_t j = 0; j < n; ++j) form += v[j] * x[j];
    return Complex{1.0, 0.0} - Complex{0.0, 2.0} * form;
}

Complex s21_rank_one(const CouplingModel& model, double omega) {
    if (!std::isfinite(omega)) throw InvalidInputError("s21 requires a finite frequency");
    validate(model);
    if (all_beta_zero(model)) return Complex{1.0, 0.0};

    // H = H_nr - i v v^T, so omega*I - H = (omega*I - H_nr) + i v v^T and
    // Sherman-Morrison collapses the response to g = v^T (omega*I - H_nr)^{-1} v.
    const std::size_t n = model.size();
    CMatrix b(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        const ModeParams& m = model.modes[j];
        b(j, j) = Complex{omega - m.omega, m.alpha_int};
        for (std::size_t k = 0; k < n; ++k)
            if (j != k) b(j, k) = -model.direct_coupling(j, k);
    }
    const std::vector<Complex> v = channel_vector(model);
    std::vector<Complex> x;
    try {
        x = linalg::lu_solve(std::move(b), v);
    } catch (const NumericalError&) {
        throw SingularResponseError(omega, "lossless subsystem resonance");
    }
    Complex g{0.0, 0.0};
    for (std::size_t j = 0; j < n; ++j) g += v[j] * x[j];

    const Complex denom = Complex{1.0, 0.0} + Complex{0.0, 1.0} * g;
    if (denom == Complex{0.0, 0.0}) throw SingularResponseError(omega);
    return (Complex{1.0, 0.0} - Complex{0.0, 1.0} * g) / denom;
}

SpectrumGrid s21_spectrum(const CouplingModel& model, const std::vector<double>& freqs) {
    for (std::size_t i = 1; i < freqs.size(); ++i)
        if (!(freqs[i] > freqs[i - 1]))
            throw InvalidInputError("frequency grid must be strictly increasing");

    const CMatrix h = build_effective_hamiltonian(model);
    const std::vector<Complex> v = channel_vector(model);
    const bool bare = all_beta_zero(model);
    const std::size_t n = model.size();

    SpectrumGrid grid;
    grid.freqs = freqs;
    grid.s21.resize(freqs.size());
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        if (bare) {
            grid.s21[i] = Complex{1.0, 0.0};
            continue;
        }
        CMatrix a(n, n);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c)
                a(r, c) = (r == c ? Complex{freqs[i], 0.0} : Complex{0.0, 0.0}) - h(r, c);
        std::vector<Complex> x;
        try {
            x = linalg::lu_solve(std::move(a), v);
        } catch (const NumericalError&) {
            throw SingularResponseError(freqs[i], "grid sample " + std::to_string(i));
        }
        Complex form{0.0, 0.0};
        for (std::size_t j = 0; j < n; ++j) form += v[j] * x[j];
        grid.s21[i] = Complex{1.0, 0.0} - Complex{0.0, 2.0} * form;
    }
    return grid;
}

}  // namespace modecoupler

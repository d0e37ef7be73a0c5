#include "modecoupler/types.hpp"

#include <cmath>
#include <string>

namespace modecoupler {

namespace {

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

void validate(const CouplingModel& model) {
    const std::size_t n = model.modes.size();
    for (std::size_t j = 0; j < n; ++j) {
        const ModeParams& m = model.modes[j];
        if (!std::isfinite(m.omega) || !std::isfinite(m.beta_ext) || !std::isfinite(m.alpha_int))
            throw InvalidModelError("mode " + std::to_string(j + 1) + " has non-finite parameters");
        if (m.omega <= 0.0)
            throw InvalidModelError("mode " + std::to_string(j + 1) + " omega must be > 0 GHz");
        if (m.beta_ext < 0.0)
            throw InvalidModelError("mode " + std::to_string(j + 1) + " beta_ext must be >= 0");
        if (m.alpha_int < 0.0)
            throw InvalidModelError("mode " + std::to_string(j + 1) + " alpha_int must be >= 0");
    }
    if (model.direct_coupling.rows() != n || model.direct_coupling.cols() != n)
        throw InvalidModelError("direct_coupling must be " + std::to_string(n) + "x" +
                                std::to_string(n));
    for (std::size_t j = 0; j < n; ++j) {
        if (model.direct_coupling(j, j) != Complex{0.0, 0.0})
            throw InvalidModelError("direct_coupling diagonal must be exactly zero");
        for (std::size_t k = 0; k < n; ++k) {
            if (!finite(model.direct_coupling(j, k)))
                throw InvalidModelError("direct_coupling has non-finite entries");
            if (model.direct_coupling(j, k) != model.direct_coupling(k, j))
                throw InvalidModelError("direct_coupling must be symmetric");
        }
    }
}

void validate(const SpectrumGrid& grid) {
    if (grid.freqs.size() != grid.s21.size())
        throw InvalidInputError("spectrum freqs and s21 lengths differ");
    for (std::size_t i = 0; i < grid.freqs.size(); ++i) {
        if (!std::isfinite(grid.freqs[i]) || !finite(grid.s21[i]))
            throw InvalidInputError("spectrum contains non-finite values");
        if (i > 0 && grid.freqs[i] <= grid.freqs[i - 1])
            throw InvalidInputError("spectrum frequencies must be strictly increasing");
    }
}

bool is_passive(const CouplingModel& model) {
    for (const ModeParams& m : model.modes)
        if (m.beta_ext < 0.0 || m.alpha_int < 0.0) return false;
    const std::size_t n = model.modes.size();
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
            if (j != k && model.direct_coupling(j, k).imag() != 0.0) return false;
    return true;
}

CouplingModel two_mode_model(const ModeParams& m1, const ModeParams& m2, Complex delta) {
    CouplingModel model;
    model.modes = {m1, m2};
    model.direct_coupling = CMatrix(2, 2);
    model.direct_coupling(0, 1) = delta;
    model.direct_coupling(1, 0) = delta;
    return model;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> out;
    out.reserve(n);
    if (n == 1) {
        out.push_back(a);
        return out;
    }
    for (std::size_t i = 0; i < n; ++i)
        out.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    return out;
}

}  // namespace modecoupler

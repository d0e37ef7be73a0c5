#include "modecoupler/sweep.hpp"

#include <cmath>
#include <string>

#include "modecoupler/model.hpp"
#include "modecoupler/parallel.hpp"

namespace modecoupler::sweep {

namespace {

void validate_calibration(const GapCalibration& cal) {
    if (!std::isfinite(cal.g_min) || !std::isfinite(cal.g_max) ||
        !std::isfinite(cal.omega_start) || !std::isfinite(cal.omega_end))
        throw InvalidInputError("calibration has non-finite values");
    if (!(cal.g_min < cal.g_max))
        throw InvalidInputError("calibration requires g_min < g_max");
    if (cal.omega_start == cal.omega_end)
        throw InvalidInputError("calibration mapping must be monotone (omega_start != omega_end)");
}

}  // namespace

double omega_of_gap(const GapCalibration& cal, double g) {
    validate_calibration(cal);
    if (!(g >= cal.g_min && g <= cal.g_max))
        throw RangeError("gap " + std::to_string(g) + " mm outside calibration range [" +
                         std::to_string(cal.g_min) + ", " + std::to_string(cal.g_max) + "]");
    return cal.omega_start + (cal.omega_end - cal.omega_start) * (g - cal.g_min) /
                                 (cal.g_max - cal.g_min);
}

double gap_of_omega(const GapCalibration& cal, double omega) {
    validate_calibration(cal);
    return cal.g_min + (omega - cal.omega_start) * (cal.g_max - cal.g_min) /
                           (cal.omega_end - cal.omega_start);
}

void validate(const SweepSpec& spec) {
    modecoupler::validate(spec.base_model);
    validate_calibration(spec.calibration);
    if (spec.varying_mode_index >= spec.base_model.size())
        throw InvalidInputError("varying_mode_index out of range");
    for (std::size_t i = 0; i < spec.gap_samples.size(); ++i) {
        const double g = spec.gap_samples[i];
        if (!(g >= spec.calibration.g_min && g <= spec.calibration.g_max))
            throw InvalidInputError("gap sample " + std::to_string(i) +
                                    " outside the calibration range");
        if (i > 0 && !(g > spec.gap_samples[i - 1]))
            throw InvalidInputError("gap samples must be strictly increasing");
    }
    for (std::size_t i = 1; i < spec.freq_grid.size(); ++i)
        if (!(spec.freq_grid[i] > spec.freq_grid[i - 1]))
            throw InvalidInputError("frequency grid must be strictly increasing");
}

CouplingModel model_at_gap(const SweepSpec& spec, double g) {
    CouplingModel model = spec.base_model;
    model.modes[spec.varying_mode_index].omega = omega_of_gap(spec.calibration, g);
    return model;
}

SpectrumGrid SweepResult::column(std::size_t gap_index) const {
    SpectrumGrid grid;
    grid.freqs = freqs;
    grid.s21.reserve(freqs.size());
    for (std::size_t i = 0; i < freqs.size(); ++i)
        grid.s21.push_back(std::polar(magnitude_at(i, gap_index), phase_at(i, gap_index)));
    return grid;
}

SweepResult run_sweep(const SweepSpec& spec, std::size_t threads) {
    validate(spec);
    SweepResult result;
    result.gaps = spec.gap_samples;
    result.freqs = spec.freq_grid;
    const std::size_t nf = result.freqs.size();
    const std::size_t ng = result.gaps.size();
    result.magnitude.assign(nf * ng, 0.0);
    result.phase.assign(nf * ng, 0.0);

    parallel_for(
        ng,
        [&](std::size_t j) {
            try {
                const CouplingModel model = model_at_gap(spec, result.gaps[j]);
                const SpectrumGrid column = s21_spectrum(model, result.freqs);
                for (std::size_t i = 0; i < nf; ++i) {
                    result.magnitude[i * ng + j] = std::abs(column.s21[i]);
                    result.phase[i * ng + j] = std::arg(column.s21[i]);
                }
            } catch (const NumericalError& e) {
                throw NumericalError("gap sample " + std::to_string(j) + ": " + e.what(),
                                     e.residual());
            } catch (const DomainError& e) {
                throw InvalidInputError("gap sample " + std::to_string(j) + ": " + e.what());
            }
        },
        threads);
    return result;
}

namespace {

SweepSpec make_preset(double beta_varying, double omega_fixed, double beta_fixed, Complex delta,
                      GapCalibration cal, double alpha_varying, double alpha_fixed) {
    if (alpha_varying < 0.0 || alpha_fixed < 0.0)
        throw InvalidInputError("preset alphas must be >= 0");
    SweepSpec spec;
    spec.base_model = two_mode_model({cal.omega_start, beta_varying, alpha_varying},
                                     {omega_fixed, beta_fixed, alpha_fixed}, delta);
    spec.varying_mode_index = 0;
    spec.calibration = cal;
    spec.gap_samples = linspace(cal.g_min, cal.g_max, 57);
    spec.freq_grid = linspace(5.5, 8.0, 2001);
    return spec;
}

}  // namespace

SweepSpec case1_preset(double alpha_varying, double alpha_fixed) {
    return make_preset(0.076, 6.75, 0.048, Complex{0.0, 0.0}, {0.1, 1.5, 6.0, 7.4},
                       alpha_varying, alpha_fixed);
}

SweepSpec case2_preset(double alpha_varying, double alpha_fixed) {
    return make_preset(0.0227, 6.65, 0.0057, Complex{0.12, 0.0}, {0.1, 2.2, 5.7, 7.5},
                       alpha_varying, alpha_fixed);
}

}  // namespace modecoupler::sweep

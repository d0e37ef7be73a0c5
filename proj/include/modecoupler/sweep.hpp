#pragma once

#include <cstddef>
#include <vector>

#include "modecoupler/types.hpp"

namespace modecoupler::sweep {

// Affine map from the CSRR split-gap size g (mm) to the varying mode's
// resonance frequency (GHz), anchored on measured endpoints.
struct GapCalibration {
    double g_min = 0.0;        // mm
    double g_max = 0.0;        // mm
    double omega_start = 0.0;  // GHz at g_min
    double omega_end = 0.0;    // GHz at g_max
};

// omega = omega_start + (omega_end - omega_start) * (g - g_min) / (g_max - g_min).
// Throws RangeError when g lies outside [g_min, g_max].
double omega_of_gap(const GapCalibration& cal, double g);

// Inverse of omega_of_gap; used to locate named frequencies on the gap axis.
double gap_of_omega(const GapCalibration& cal, double omega);

struct SweepSpec {
    CouplingModel base_model;
    std::size_t varying_mode_index = 0;
    GapCalibration calibration;
    std::vector<double> gap_samples;  // mm, strictly increasing, within calibration range
    std::vector<double> freq_grid;    // GHz, strictly increasing
};

// Throws InvalidModelError / InvalidInputError on violated invariants.
void validate(const SweepSpec& spec);

// Copy of the base model with the varying mode's omega set via the calibration.
CouplingModel model_at_gap(const SweepSpec& spec, double g);

// |S21| and phase over (gap, frequency).  Row-major with rows = frequencies:
// value for (freq i, gap j) sits at index i * gaps.size() + j.
struct SweepResult {
    std::vector<double> gaps;       // mm
    std::vector<double> freqs;      // GHz
    std::vector<double> magnitude;  // |S21|
    std::vector<double> phase;      // radians

    double magnitude_at(std::size_t freq_index, std::size_t gap_index) const {
        return magnitude[freq_index * gaps.size() + gap_index];
    }
    double phase_at(std::size_t freq_index, std::size_t gap_index) const {
        return phase[freq_index * gaps.size() + gap_index];
    }
    // One spectrum column (all frequencies at a fixed gap).
    SpectrumGrid column(std::size_t gap_index) const;
};

// Evaluates every (gap, frequency) cell.  Columns are independent and may be
// computed concurrently; the result is identical to sequential evaluation.
// Errors are rethrown with the gap index attached.
SweepResult run_sweep(const SweepSpec& spec, std::size_t threads = 0);

// Case 1: varying CSRR beta = 0.076, fixed CELC (6.75 GHz, beta = 0.048),
// Delta = 0; gap 0.1-1.5 mm maps to 6.0-7.4 GHz.  Defaults: 57 gap samples,
// 2001 frequencies over [5.5, 8.0] GHz.  The alphas are intrinsic losses for
// the (varying, fixed) modes; they are not measured quantities and default to
// 0.01 GHz only to render dips with visible contrast.
SweepSpec case1_preset(double alpha_varying = 0.01, double alpha_fixed = 0.01);

// Case 2: varying CSRR beta = 0.0227, fixed CELC (6.65 GHz, beta = 0.0057),
// Delta = 0.12; gap 0.1-2.2 mm maps to 5.7-7.5 GHz.  Same default grids.
SweepSpec case2_preset(double alpha_varying = 0.01, double alpha_fixed = 0.01);

}  // namespace modecoupler::sweep

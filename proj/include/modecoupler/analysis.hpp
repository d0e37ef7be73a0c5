#pragma once

#include <optional>
#include <vector>

#include "modecoupler/sweep.hpp"
#include "modecoupler/types.hpp"

namespace modecoupler::analysis {

// A located Friedrich-Wintgen point along a frequency sweep.
struct BicPoint {
    double sweep_value = 0.0;  // control-parameter value (mm)
    double omega_bic = 0.0;    // GHz, real part of the trapped eigenvalue
    double residual = 0.0;     // GHz^2, Eq.-4 residual at the located point
    double min_im = 0.0;       // GHz, smallest |Im lambda + alpha floor| among branches
    bool verified = false;     // min |Im lambda| <= 1e-9 + max(alpha_j)
};

enum class RegimeLabel { LEVEL_REPULSION, LEVEL_ATTRACTION, DEGENERATE };

const char* to_string(RegimeLabel label);

struct RegimeReport {
    double gap_re = 0.0;  // GHz, |Re(lambda+ - lambda-)| at zero detuning
    double gap_im = 0.0;  // GHz, |Im(lambda+ - lambda-)| at zero detuning
    RegimeLabel label = RegimeLabel::DEGENERATE;
};

enum class FeatureKind { DIP, PEAK };

struct SpectralFeature {
    FeatureKind kind = FeatureKind::DIP;
    double freq = 0.0;          // GHz, quadratically refined extremum position
    double magnitude = 0.0;     // |S21| at the refined extremum
    std::optional<double> fwhm; // GHz; absent when a flank never recrosses half level
    double prominence = 0.0;    // topographic prominence used for selection
};

struct TransparencyWindow {
    double window_height = 0.0;   // |S21| of the peak between the two deepest dips
    double dip_separation = 0.0;  // GHz
};

// Friedrich-Wintgen residual Re(Delta)*(beta1 - beta2) - sqrt(beta1*beta2)*(omega1 - omega2).
// Zero exactly when interference through the shared channel traps one mode.
// Requires N = 2 and real Delta; anything else is an UnsupportedModelError.
double fw_residual(const CouplingModel& two_mode_model);

// Brackets every sign change of fw_residual along the sweep's gap axis and
// refines each by bisection to |residual| <= tol (GHz^2).  Every point is then
// verified through the eigenvalues: min |Im lambda| <= 1e-9 + max(alpha);
// failing points are flagged (verified = false), not dropped.  Returns points
// sorted by sweep value; no sign change yields an empty list.
std::vector<BicPoint> find_bic(const sweep::SweepSpec& spec, double tol = 1e-10);

// Coherent-vs-dissipative classification at zero detuning.  The caller must
// supply omega1 == omega2 (within 1e-9 GHz); tie margin between the gaps is
// 1e-9 GHz.
RegimeReport classify_regime(const CouplingModel& model_at_zero_detuning);

// Local extrema of |S21| with topographic prominence >= the given threshold.
// Each extremum is refined by a parabola through the three nearest samples;
// FWHM is measured at the half-prominence level by linear interpolation and
// omitted when either flank never recrosses that level inside the grid.
std::vector<SpectralFeature> extract_features(const SpectrumGrid& spectrum, double prominence);

// Prominence used by transparency_window when scanning for dips.
inline constexpr double kWindowProminence = 0.01;

// The coupling-induced-transparency window: present when the spectrum has at
// least two dips (prominence >= kWindowProminence) with a peak strictly
// between the two deepest ones.
std::optional<TransparencyWindow> transparency_window(const SpectrumGrid& spectrum);

}  // namespace modecoupler::analysis

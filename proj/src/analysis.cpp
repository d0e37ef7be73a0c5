#include "modecoupler/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "modecoupler/model.hpp"

namespace modecoupler::analysis {

namespace {

constexpr double kTieMargin = 1e-9;        // GHz, regime-label tie margin
constexpr double kZeroDetuning = 1e-9;     // GHz, classify_regime precondition
constexpr double kBicImTolerance = 1e-9;   // GHz, BIC verification floor above alpha
constexpr int kMaxBisectionSteps = 200;

double max_alpha(const CouplingModel& model) {
    double a = 0.0;
    for (const ModeParams& m : model.modes) a = std::max(a, m.alpha_int);
    return a;
}

// Eigenvalue summary at a candidate BIC: the trapped branch is the one whose
// radiative half-linewidth |Im lambda + alpha floor| is smallest.
struct TrappedBranch {
    double omega = 0.0;
    double min_im = 0.0;       // min |Im lambda + alpha floor|
    double min_abs_im = 0.0;   // min |Im lambda|, used for verification
};

TrappedBranch trapped_branch(const CouplingModel& model) {
    const double floor = max_alpha(model);
    TrappedBranch best;
    best.min_im = std::numeric_limits<double>::infinity();
    best.min_abs_im = std::numeric_limits<double>::infinity();
    for (const ComplexFrequency& branch : eigenvalues(model)) {
        const double shifted = std::abs(branch.im + floor);
        if (shifted < best.min_im) {
            best.min_im = shifted;
            best.omega = branch.re;
        }
        best.min_abs_im = std::min(best.min_abs_im, std::abs(branch.im));
    }
    return best;
}

}  // namespace

const char* to_string(RegimeLabel label) {
    switch (label) {
        case RegimeLabel::LEVEL_REPULSION: return "LEVEL_REPULSION";
        case RegimeLabel::LEVEL_ATTRACTION: return "LEVEL_ATTRACTION";
        case RegimeLabel::DEGENERATE: return "DEGENERATE";
    }
    return "DEGENERATE";
}

double fw_residual(const CouplingModel& model) {
    validate(model);
    if (model.size() != 2)
        throw UnsupportedModelError("Friedrich-Wintgen residual requires exactly 2 modes");
    const Complex delta = model.direct_coupling(0, 1);
    if (delta.imag() != 0.0)
        throw UnsupportedModelError("Friedrich-Wintgen residual requires real direct coupling");
    const ModeParams& m1 = model.modes[0];
    const ModeParams& m2 = model.modes[1];
    return delta.real() * (m1.beta_ext - m2.beta_ext) -
           std::sqrt(m1.beta_ext * m2.beta_ext) * (m1.omega - m2.omega);
}

std::vector<BicPoint> find_bic(const sweep::SweepSpec& spec, double tol) {
    sweep::validate(spec);
    if (spec.base_model.size() != 2)
        throw UnsupportedModelError("find_bic requires exactly 2 modes");
    if (!(tol > 0.0)) throw InvalidInputError("find_bic tolerance must be > 0");

    const std::vector<double>& gaps = spec.gap_samples;
    std::vector<double> residuals(gaps.size());
    for (std::size_t i = 0; i < gaps.size(); ++i)
        residuals[i] = fw_residual(sweep::model_at_gap(spec, gaps[i]));

    auto make_point = [&](double g, double residual) {
        const CouplingModel model = sweep::model_at_gap(spec, g);
        const TrappedBranch trapped = trapped_branch(model);
        BicPoint point;
        point.sweep_value = g;
        point.omega_bic = trapped.omega;
        point.residual = residual;
        point.min_im = trapped.min_im;
        point.verified = trapped.min_abs_im <= kBicImTolerance + max_alpha(model);
        return point;
    };

    std::vector<BicPoint> points;
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        if (residuals[i] == 0.0) {
            points.push_back(make_point(gaps[i], 0.0));
            continue;
        }
        if (i + 1 >= gaps.size()) break;
        if (residuals[i + 1] == 0.0 || !(residuals[i] * residuals[i + 1] < 0.0)) continue;

        double lo = gaps[i], hi = gaps[i + 1];
        double r_lo = residuals[i];
        double g_mid = 0.5 * (lo + hi);
        double r_mid = fw_residual(sweep::model_at_gap(spec, g_mid));
        for (int step = 0; step < kMaxBisectionSteps && std::abs(r_mid) > tol; ++step) {
            if (r_lo * r_mid <= 0.0) {
                hi = g_mid;
            } else {
                lo = g_mid;
                r_lo = r_mid;
            }
            g_mid = 0.5 * (lo + hi);
            r_mid = fw_residual(sweep::model_at_gap(spec, g_mid));
        }
        points.push_back(make_point(g_mid, r_mid));
    }
    return points;  // gap samples increase, so points are already sorted
}

RegimeReport classify_regime(const CouplingModel& model) {
    validate(model);
    if (model.size() != 2)
        throw UnsupportedModelError("classify_regime requires exactly 2 modes");
    const double detuning = std::abs(model.modes[0].omega - model.modes[1].omega);
    if (detuning > kZeroDetuning)
        throw InvalidInputError("classify_regime requires zero detuning (|omega1 - omega2| = " +
                                std::to_string(detuning) + " GHz)");

    const std::vector<ComplexFrequency> branches = eigenvalues(model);
    RegimeReport report;
    report.gap_re = std::abs(branches[1].re - branches[0].re);
    report.gap_im = std::abs(branches[1].im - branches[0].im);
    if (report.gap_re > report.gap_im + kTieMargin)
        report.label = RegimeLabel::LEVEL_REPULSION;
    else if (report.gap_im > report.gap_re + kTieMargin)
        report.label = RegimeLabel::LEVEL_ATTRACTION;
    else
        report.label = RegimeLabel::DEGENERATE;
    return report;
}

namespace {

// Topographic prominence of a strict local extremum at index i: walk each side
// until the first sample strictly beyond the extremum, keeping that side's
// barrier (highest sample for a dip, lowest for a peak); a side that reaches
// the grid edge uses its full extent.  Prominence is the smaller barrier's
// height above the dip (below the peak).
double prominence_at(const std::vector<double>& mag, std::size_t i, bool dip) {
    const double center = mag[i];
    auto side_barrier = [&](bool leftward) {
        double barrier = center;
        bool found = false;
        std::size_t j = i;
        while (leftward ? j > 0 : j + 1 < mag.size()) {
            j = leftward ? j - 1 : j + 1;
            const double v = mag[j];
            if (dip ? v < center : v > center) break;
            barrier = found ? (dip ? std::max(barrier, v) : std::min(barrier, v)) : v;
            found = true;
        }
        return barrier;
    };
    const double left = side_barrier(true);
    const double right = side_barrier(false);
    return dip ? std::min(left, right) - center : center - std::max(left, right);
}

// Vertex of the parabola through three samples; falls back to the middle
// sample when the points are collinear.
void refine_extremum(const std::vector<double>& freqs, const std::vector<double>& mag,
                     std::size_t i, double& freq_out, double& mag_out) {
    const double x0 = freqs[i - 1], x1 = freqs[i], x2 = freqs[i + 1];
    const double y0 = mag[i - 1], y1 = mag[i], y2 = mag[i + 1];
    const double denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
    const double a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom;
    const double b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom;
    if (a == 0.0) {
        freq_out = x1;
        mag_out = y1;
        return;
    }
    const double c = y0 - a * x0 * x0 - b * x0;
    freq_out = -b / (2.0 * a);
    mag_out = a * freq_out * freq_out + b * freq_out + c;
}

// Width of the extremum at its half-prominence level, by linear interpolation
// on each flank; absent when either flank never recrosses the level.
std::optional<double> fwhm_at(const std::vector<double>& freqs, const std::vector<double>& mag,
                              std::size_t i, bool dip, double prominence) {
    const double level = dip ? mag[i] + prominence / 2.0 : mag[i] - prominence / 2.0;
    auto flank = [&](bool leftward) -> std::optional<double> {
        std::size_t j = i;
        while (leftward ? j > 0 : j + 1 < mag.size()) {
            const std::size_t next = leftward ? j - 1 : j + 1;
            const bool crossed = dip ? mag[next] >= level : mag[next] <= level;
            if (crossed) {
                const double t = (level - mag[j]) / (mag[next] - mag[j]);
                return freqs[j] + t * (freqs[next] - freqs[j]);
            }
            j = next;
        }
        return std::nullopt;
    };
    const std::optional<double> left = flank(true);
    const std::optional<double> right = flank(false);
    if (!left || !right) return std::nullopt;
    return *right - *left;
}

}  // namespace

std::vector<SpectralFeature> extract_features(const SpectrumGrid& spectrum, double prominence) {
    validate(spectrum);
    if (spectrum.freqs.size() < 3)
        throw InvalidInputError("feature extraction requires at least 3 grid points");
    if (!(prominence >= 0.0)) throw InvalidInputError("prominence must be >= 0");

    std::vector<double> mag(spectrum.s21.size());
    for (std::size_t i = 0; i < spectrum.s21.size(); ++i) mag[i] = std::abs(spectrum.s21[i]);

    std::vector<SpectralFeature> features;
    for (std::size_t i = 1; i + 1 < mag.size(); ++i) {
        bool dip;
        if (mag[i] < mag[i - 1] && mag[i] < mag[i + 1])
            dip = true;
        else if (mag[i] > mag[i - 1] && mag[i] > mag[i + 1])
            dip = false;
        else
            continue;

        const double prom = prominence_at(mag, i, dip);
        if (prom < prominence) continue;

        SpectralFeature feature;
        feature.kind = dip ? FeatureKind::DIP : FeatureKind::PEAK;
        feature.prominence = prom;
        refine_extremum(spectrum.freqs, mag, i, feature.freq, feature.magnitude);
        feature.fwhm = fwhm_at(spectrum.freqs, mag, i, dip, prom);
        features.push_back(feature);
    }
    return features;
}

std::optional<TransparencyWindow> transparency_window(const SpectrumGrid& spectrum) {
    if (spectrum.freqs.size() < 3) return std::nullopt;
    const std::vector<SpectralFeature> features = extract_features(spectrum, kWindowProminence);

    std::vector<const SpectralFeature*> dips;
    for (const SpectralFeature& f : features)
        if (f.kind == FeatureKind::DIP) dips.push_back(&f);
    if (dips.size() < 2) return std::nullopt;

    // The two deepest dips, ordered by frequency.
    std::sort(dips.begin(), dips.end(),
              [](const SpectralFeature* a, const SpectralFeature* b) {
                  return a->magnitude < b->magnitude;
              });
    const SpectralFeature* lo = dips[0];
    const SpectralFeature* hi = dips[1];
    if (lo->freq > hi->freq) std::swap(lo, hi);

    const SpectralFeature* window_peak = nullptr;
    for (const SpectralFeature& f : features) {
        if (f.kind != FeatureKind::PEAK || f.freq <= lo->freq || f.freq >= hi->freq) continue;
        if (window_peak == nullptr || f.magnitude > window_peak->magnitude) window_peak = &f;
    }
    if (window_peak == nullptr) return std::nullopt;

    return TransparencyWindow{window_peak->magnitude, hi->freq - lo->freq};
}

}  // namespace modecoupler::analysis

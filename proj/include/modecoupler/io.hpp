#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "modecoupler/sweep.hpp"
#include "modecoupler/types.hpp"

namespace modecoupler::io {

enum class FreqUnit { Hz, kHz, MHz, GHz };
enum class TouchstoneFormat { RI, MA, DB };

const char* to_string(FreqUnit unit);
const char* to_string(TouchstoneFormat format);

struct TouchstoneRow {
    double freq_ghz = 0.0;  // normalized to GHz at parse time
    Complex s11, s21, s12, s22;
};

struct TouchstoneData {
    FreqUnit freq_unit = FreqUnit::GHz;          // unit declared in the source
    TouchstoneFormat format = TouchstoneFormat::MA;  // format declared in the source
    double reference_ohms = 50.0;
    std::vector<TouchstoneRow> rows;
};

// Touchstone v1 two-port subset: '!' comments, a single '#' option line with
// defaults (GHz S MA R 50) for omitted tokens, and data records of 9
// whitespace-separated numbers (freq + 4 complex pairs in S11 S21 S12 S22
// order) that may continue across lines.  MA angles are degrees; DB converts
// magnitude via 10^(dB/20).  Frequencies must increase strictly.  Touchstone
// v2 ([Version] and other bracketed keywords) is rejected.  All structural
// errors carry the offending 1-based line number.
TouchstoneData parse_touchstone(const std::string& text);

// Inverse of parse_touchstone in the requested format with 17 significant
// digits; the option line is normalized to "# GHz S <FMT> R <ohms>".
// Re-parsing reproduces every value within 1e-12.
std::string write_touchstone(const TouchstoneData& data, TouchstoneFormat format);

// Spectrum CSV with exact header "freq_ghz,re_s21,im_s21"; strictly three
// columns per row, strictly increasing frequencies.
SpectrumGrid read_spectrum_csv(const std::string& text);
std::string write_spectrum_csv(const SpectrumGrid& grid);

struct SweepMetadata {
    std::string preset = "custom";  // "case1", "case2", or "custom"
    sweep::GapCalibration calibration;
    double alpha_varying = 0.0;  // GHz
    double alpha_fixed = 0.0;    // GHz
    std::size_t varying_mode_index = 0;
};

struct SweepExport {
    std::string matrix_csv;     // first row = gaps, first column = freqs, cells = |S21|
    std::string long_csv;       // one (gap, freq, magnitude, phase) row per cell
    std::string metadata_json;  // preset, calibration, alphas, grid shape
};

SweepExport export_sweep(const sweep::SweepResult& result, const SweepMetadata& meta);

// Parses a matrix produced by export_sweep back into its arrays (round-trip
// within 1e-12; the matrix file carries magnitudes only).
struct SweepMatrix {
    std::vector<double> gaps;
    std::vector<double> freqs;
    std::vector<double> magnitude;  // same row-major layout as SweepResult
};

SweepMatrix import_sweep_matrix(const std::string& text);

// JSON model configuration:
//   {
//     "modes": [{"omega": 6.75, "beta": 0.076, "alpha": 0.01}, ...],
//     "coupling": 0.12,                 // N=2 shorthand; or [re, im]; or an
//                                       // NxN matrix of numbers / [re, im]
//     "sweep": {                        // optional
//       "varying_mode": 0,
//       "calibration": {"g_min": 0.1, "g_max": 1.5,
//                        "omega_start": 6.0, "omega_end": 7.4},
//       "gaps":  {"count": 57} | {"count": n, "min": a, "max": b} | [ ... ],
//       "freqs": {"min": 5.5, "max": 8.0, "count": 2001} | [ ... ]
//     }
//   }
// Unknown keys anywhere are rejected; every physical invariant is revalidated
// on load.
struct ModelConfig {
    CouplingModel model;
    std::optional<sweep::SweepSpec> sweep_spec;  // base_model duplicates `model`
};

ModelConfig read_model_config(const std::string& text);
std::string write_model_config(const ModelConfig& config);

}  // namespace modecoupler::io

#include "modecoupler/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>
#include <string_view>

#include <json.hpp>

namespace modecoupler::io {

namespace {

using OrderedJson = nlohmann::ordered_json;

constexpr double kDegPerRad = 180.0 / std::numbers::pi;
constexpr double kZeroMagnitudeDb = -2000.0;  // stands in for log10(0)

// %.17g: loss-free for IEEE doubles, and the precision the file formats promise.
std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

// Splits on \n after normalizing \r\n and lone \r, so parsers see one dialect.
std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string current;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '\r') {
            if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
            lines.push_back(std::move(current));
            current.clear();
        } else if (c == '\n') {
            lines.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    if (!current.empty()) lines.push_back(std::move(current));
    return lines;
}

// Locale-independent full-token number parse.
double parse_number(std::string_view token, std::size_t line, const std::string& what) {
    std::string_view body = token;
    if (!body.empty() && body.front() == '+') body.remove_prefix(1);
    double value = 0.0;
    const auto [end, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
    if (ec != std::errc{} || end != body.data() + body.size() || body.empty() ||
        body.front() == '+')
        throw ParseError("invalid " + what + ": '" + std::string(token) + "'", line);
    return value;
}

std::vector<std::string_view> split_whitespace(std::string_view text) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
        std::size_t start = i;
        while (i < text.size() && text[i] != ' ' && text[i] != '\t') ++i;
        if (i > start) tokens.push_back(text.substr(start, i - start));
    }
    return tokens;
}

std::vector<std::string_view> split_cells(std::string_view text) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = text.find(',', start);
        if (comma == std::string_view::npos) {
            cells.push_back(text.substr(start));
            return cells;
        }
        cells.push_back(text.substr(start, comma - start));
        start = comma + 1;
    }
}

std::string upper(std::string_view token) {
    std::string out(token);
    for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

double unit_to_ghz(FreqUnit unit) {
    switch (unit) {
        case FreqUnit::Hz: return 1e-9;
        case FreqUnit::kHz: return 1e-6;
        case FreqUnit::MHz: return 1e-3;
        case FreqUnit::GHz: return 1.0;
    }
    return 1.0;
}

Complex pair_to_complex(TouchstoneFormat format, double a, double b, std::size_t line) {
    switch (format) {
        case TouchstoneFormat::RI: return {a, b};
        case TouchstoneFormat::MA: return std::polar(a, b / kDegPerRad);
        case TouchstoneFormat::DB: return std::polar(std::pow(10.0, a / 20.0), b / kDegPerRad);
    }
    throw ParseError("unknown Touchstone format", line);  // unreachable
}

void option_token_once(bool& seen, const std::string& token, std::size_t line) {
    if (seen) throw ParseError("duplicate option-line token '" + token + "'", line);
    seen = true;
}

std::size_t line_of_byte(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    const std::size_t limit = std::min(byte > 0 ? byte - 1 : std::size_t{0}, text.size());
    for (std::size_t i = 0; i < limit; ++i)
        if (text[i] == '\n') ++line;
    return line;
}

}  // namespace

const char* to_string(FreqUnit unit) {
    switch (unit) {
        case FreqUnit::Hz: return "Hz";
        case FreqUnit::kHz: return "kHz";
        case FreqUnit::MHz: return "MHz";
        case FreqUnit::GHz: return "GHz";
    }
    return "GHz";
}

const char* to_string(TouchstoneFormat format) {
    switch (format) {
        case TouchstoneFormat::RI: return "RI";
        case TouchstoneFormat::MA: return "MA";
        case TouchstoneFormat::DB: return "DB";
    }
    return "RI";
}

// ---------------------------------------------------------------------------
// Touchstone v1, two-port.
// ---------------------------------------------------------------------------

TouchstoneData parse_touchstone(const std::string& text) {
    TouchstoneData data;
    bool saw_option_line = false;
    std::vector<double> record;   // pending numeric fields of the current row
    std::size_t record_line = 0;  // line where the pending row started
    const std::vector<std::string> lines = split_lines(text);

    for (std::size_t li = 0; li < lines.size(); ++li) {
        const std::size_t line_no = li + 1;
        std::string_view line = lines[li];
        if (const std::size_t bang = line.find('!'); bang != std::string_view::npos)
            line = line.substr(0, bang);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[')
            throw ParseError("Touchstone v2 keywords are not supported (only v1 two-port)",
                             line_no);

        if (line.front() == '#') {
            if (saw_option_line) throw ParseError("second option line", line_no);
            if (!data.rows.empty() || !record.empty())
                throw ParseError("option line after data", line_no);
            saw_option_line = true;

            bool seen_unit = false, seen_param = false, seen_format = false, seen_ref = false;
            const std::vector<std::string_view> tokens = split_whitespace(line.substr(1));
            for (std::size_t t = 0; t < tokens.size(); ++t) {
                const std::string token = upper(tokens[t]);
                if (token == "HZ" || token == "KHZ" || token == "MHZ" || token == "GHZ") {
                    option_token_once(seen_unit, token, line_no);
                    data.freq_unit = token == "HZ"    ? FreqUnit::Hz
                                     : token == "KHZ" ? FreqUnit::kHz
                                     : token == "MHZ" ? FreqUnit::MHz
                                                      : FreqUnit::GHz;
                } else if (token == "S") {
                    option_token_once(seen_param, token, line_no);
                } else if (token == "Y" || token == "Z" || token == "G" || token == "H") {
                    throw ParseError("only S-parameter files are supported (got '" + token + "')",
                                     line_no);
                } else if (token == "RI" || token == "MA" || token == "DB") {
                    option_token_once(seen_format, token, line_no);
                    data.format = token == "RI"   ? TouchstoneFormat::RI
                                  : token == "MA" ? TouchstoneFormat::MA
                                                  : TouchstoneFormat::DB;
                } else if (token == "R") {
                    option_token_once(seen_ref, token, line_no);
                    if (t + 1 >= tokens.size())
                        throw ParseError("option-line 'R' without a resistance value", line_no);
                    data.reference_ohms =
                        parse_number(tokens[++t], line_no, "reference resistance");
                    if (!(data.reference_ohms > 0.0))
                        throw ParseError("reference resistance must be positive", line_no);
                } else {
                    throw ParseError("malformed option line near '" + std::string(tokens[t]) + "'",
                                     line_no);
                }
            }
            continue;
        }

        // Data line: numeric fields accumulate into 9-field records, so a row
        // may continue across lines.
        for (const std::string_view token : split_whitespace(line)) {
            if (record.empty()) record_line = line_no;
            record.push_back(parse_number(token, line_no, "data field"));
            if (record.size() < 9) continue;

            TouchstoneRow row;
            row.freq_ghz = record[0] * unit_to_ghz(data.freq_unit);
            row.s11 = pair_to_complex(data.format, record[1], record[2], record_line);
            row.s21 = pair_to_complex(data.format, record[3], record[4], record_line);
            row.s12 = pair_to_complex(data.format, record[5], record[6], record_line);
            row.s22 = pair_to_complex(data.format, record[7], record[8], record_line);
            if (!data.rows.empty() && row.freq_ghz <= data.rows.back().freq_ghz)
                throw ParseError("frequencies must increase strictly", record_line);
            data.rows.push_back(row);
            record.clear();
        }
    }

    if (!record.empty())
        throw ParseError("incomplete data record (" + std::to_string(record.size()) +
                             " of 9 fields)",
                         record_line);
    return data;
}

namespace {

void append_pair(std::string& out, TouchstoneFormat format, Complex value) {
    double a, b;
    switch (format) {
        case TouchstoneFormat::RI:
            a = value.real();
            b = value.imag();
            break;
        case TouchstoneFormat::MA:
            a = std::abs(value);
            b = std::arg(value) * kDegPerRad;
            break;
        case TouchstoneFormat::DB: {
            const double mag = std::abs(value);
            a = mag > 0.0 ? 20.0 * std::log10(mag) : kZeroMagnitudeDb;
            b = std::arg(value) * kDegPerRad;
            break;
        }
        default: a = b = 0.0;
    }
    out += ' ';
    out += format_double(a);
    out += ' ';
    out += format_double(b);
}

}  // namespace

std::string write_touchstone(const TouchstoneData& data, TouchstoneFormat format) {
    for (std::size_t i = 1; i < data.rows.size(); ++i)
        if (data.rows[i].freq_ghz <= data.rows[i - 1].freq_ghz)
            throw InvalidInputError("Touchstone rows must have strictly increasing frequencies");
    if (!(data.reference_ohms > 0.0))
        throw InvalidInputError("Touchstone reference resistance must be positive");

    std::string out = "# GHz S ";
    out += to_string(format);
    out += " R ";
    out += format_double(data.reference_ohms);
    out += '\n';
    for (const TouchstoneRow& row : data.rows) {
        out += format_double(row.freq_ghz);
        append_pair(out, format, row.s11);
        append_pair(out, format, row.s21);
        append_pair(out, format, row.s12);
        append_pair(out, format, row.s22);
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// Spectrum CSV.
// ---------------------------------------------------------------------------

namespace {
constexpr const char* kSpectrumHeader = "freq_ghz,re_s21,im_s21";
}

SpectrumGrid read_spectrum_csv(const std::string& text) {
    const std::vector<std::string> lines = split_lines(text);
    if (lines.empty() || trim(lines[0]) != kSpectrumHeader)
        throw ParseError(std::string("expected header '") + kSpectrumHeader + "'", 1);

    SpectrumGrid grid;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        const std::size_t line_no = li + 1;
        const std::string_view line = trim(lines[li]);
        if (line.empty()) continue;
        const std::vector<std::string_view> cells = split_cells(line);
        if (cells.size() != 3)
            throw ParseError("expected 3 columns, found " + std::to_string(cells.size()), line_no);
        const double freq = parse_number(trim(cells[0]), line_no, "frequency");
        const double re = parse_number(trim(cells[1]), line_no, "re_s21");
        const double im = parse_number(trim(cells[2]), line_no, "im_s21");
        if (!grid.freqs.empty() && freq <= grid.freqs.back())
            throw ParseError("frequencies must increase strictly", line_no);
        grid.freqs.push_back(freq);
        grid.s21.emplace_back(re, im);
    }
    return grid;
}

std::string write_spectrum_csv(const SpectrumGrid& grid) {
    validate(grid);
    std::string out = kSpectrumHeader;
    out += '\n';
    for (std::size_t i = 0; i < grid.freqs.size(); ++i) {
        out += format_double(grid.freqs[i]);
        out += ',';
        out += format_double(grid.s21[i].real());
        out += ',';
        out += format_double(grid.s21[i].imag());
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sweep export / import.
// ---------------------------------------------------------------------------

SweepExport export_sweep(const sweep::SweepResult& result, const SweepMetadata& meta) {
    SweepExport files;

    // Matrix: corner cell empty, first row gaps, first column freqs.
    std::string& matrix = files.matrix_csv;
    for (const double gap : result.gaps) {
        matrix += ',';
        matrix += format_double(gap);
    }
    matrix += '\n';
    for (std::size_t i = 0; i < result.freqs.size(); ++i) {
        matrix += format_double(result.freqs[i]);
        for (std::size_t j = 0; j < result.gaps.size(); ++j) {
            matrix += ',';
            matrix += format_double(result.magnitude_at(i, j));
        }
        matrix += '\n';
    }

    // Long format, gap-major: one row per cell.
    std::string& longf = files.long_csv;
    longf = "gap_mm,freq_ghz,magnitude,phase_rad\n";
    for (std::size_t j = 0; j < result.gaps.size(); ++j)
        for (std::size_t i = 0; i < result.freqs.size(); ++i) {
            longf += format_double(result.gaps[j]);
            longf += ',';
            longf += format_double(result.freqs[i]);
            longf += ',';
            longf += format_double(result.magnitude_at(i, j));
            longf += ',';
            longf += format_double(result.phase_at(i, j));
            longf += '\n';
        }

    OrderedJson meta_json;
    meta_json["preset"] = meta.preset;
    meta_json["calibration"] = {{"g_min", meta.calibration.g_min},
                                {"g_max", meta.calibration.g_max},
                                {"omega_start", meta.calibration.omega_start},
                                {"omega_end", meta.calibration.omega_end}};
    meta_json["alpha_varying"] = meta.alpha_varying;
    meta_json["alpha_fixed"] = meta.alpha_fixed;
    meta_json["varying_mode_index"] = meta.varying_mode_index;
    meta_json["shape"] = {{"gaps", result.gaps.size()}, {"freqs", result.freqs.size()}};
    files.metadata_json = meta_json.dump(2) + "\n";
    return files;
}

SweepMatrix import_sweep_matrix(const std::string& text) {
    const std::vector<std::string> lines = split_lines(text);
    if (lines.empty()) throw ParseError("empty sweep matrix", 1);

    SweepMatrix matrix;
    const std::vector<std::string_view> header = split_cells(trim(lines[0]));
    if (header.size() < 2 || !trim(header[0]).empty())
        throw ParseError("sweep matrix must start with an empty corner cell plus gap values", 1);
    for (std::size_t j = 1; j < header.size(); ++j) {
        const double gap = parse_number(trim(header[j]), 1, "gap value");
        if (!matrix.gaps.empty() && gap <= matrix.gaps.back())
            throw ParseError("gap values must increase strictly", 1);
        matrix.gaps.push_back(gap);
    }

    for (std::size_t li = 1; li < lines.size(); ++li) {
        const std::size_t line_no = li + 1;
        const std::string_view line = trim(lines[li]);
        if (line.empty()) continue;
        const std::vector<std::string_view> cells = split_cells(line);
        if (cells.size() != matrix.gaps.size() + 1)
            throw ParseError("expected " + std::to_string(matrix.gaps.size() + 1) +
                                 " columns, found " + std::to_string(cells.size()),
                             line_no);
        const double freq = parse_number(trim(cells[0]), line_no, "frequency");
        if (!matrix.freqs.empty() && freq <= matrix.freqs.back())
            throw ParseError("frequencies must increase strictly", line_no);
        matrix.freqs.push_back(freq);
        for (std::size_t j = 1; j < cells.size(); ++j)
            matrix.magnitude.push_back(parse_number(trim(cells[j]), line_no, "magnitude"));
    }
    return matrix;
}

// ---------------------------------------------------------------------------
// Model configuration (JSON).
// ---------------------------------------------------------------------------

namespace {

void require_keys(const OrderedJson& obj, std::initializer_list<const char*> allowed,
                  const char* context) {
    if (!obj.is_object())
        throw InvalidInputError(std::string(context) + " must be a JSON object");
    for (const auto& item : obj.items()) {
        if (std::none_of(allowed.begin(), allowed.end(),
                         [&](const char* key) { return item.key() == key; }))
            throw InvalidInputError("unknown key '" + item.key() + "' in " + context);
    }
}

double require_number(const OrderedJson& obj, const char* key, const char* context) {
    if (!obj.contains(key))
        throw InvalidInputError(std::string("missing '") + key + "' in " + context);
    const OrderedJson& v = obj.at(key);
    if (!v.is_number())
        throw InvalidInputError(std::string("'") + key + "' in " + context + " must be a number");
    return v.get<double>();
}

double optional_number(const OrderedJson& obj, const char* key, const char* context,
                       double fallback) {
    if (!obj.contains(key)) return fallback;
    const OrderedJson& v = obj.at(key);
    if (!v.is_number())
        throw InvalidInputError(std::string("'") + key + "' in " + context + " must be a number");
    return v.get<double>();
}

std::size_t require_count(const OrderedJson& obj, const char* key, const char* context) {
    if (!obj.contains(key))
        throw InvalidInputError(std::string("missing '") + key + "' in " + context);
    const OrderedJson& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 1)
        throw InvalidInputError(std::string("'") + key + "' in " + context +
                                " must be a positive integer");
    return static_cast<std::size_t>(v.get<long long>());
}

Complex json_to_complex(const OrderedJson& v, const char* context) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    throw InvalidInputError(std::string(context) + " must be a number or an [re, im] pair");
}

std::vector<double> json_to_increasing(const OrderedJson& v, const char* context) {
    std::vector<double> values;
    for (const OrderedJson& item : v) {
        if (!item.is_number())
            throw InvalidInputError(std::string(context) + " entries must be numbers");
        values.push_back(item.get<double>());
    }
    return values;
}

OrderedJson complex_to_json(Complex value) {
    if (value.imag() == 0.0) return OrderedJson(value.real());
    return OrderedJson::array({value.real(), value.imag()});
}

}  // namespace

ModelConfig read_model_config(const std::string& text) {
    OrderedJson root;
    try {
        root = OrderedJson::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what(), line_of_byte(text, e.byte));
    }
    require_keys(root, {"modes", "coupling", "sweep"}, "model configuration");
    if (!root.contains("modes") || !root.at("modes").is_array())
        throw InvalidInputError("model configuration requires a 'modes' array");

    ModelConfig config;
    for (const OrderedJson& mode_json : root.at("modes")) {
        require_keys(mode_json, {"omega", "beta", "alpha"}, "mode entry");
        ModeParams mode;
        mode.omega = require_number(mode_json, "omega", "mode entry");
        mode.beta_ext = optional_number(mode_json, "beta", "mode entry", 0.0);
        mode.alpha_int = optional_number(mode_json, "alpha", "mode entry", 0.0);
        config.model.modes.push_back(mode);
    }

    const std::size_t n = config.model.size();
    config.model.direct_coupling = CMatrix(n, n);
    if (root.contains("coupling")) {
        const OrderedJson& coupling = root.at("coupling");
        if (coupling.is_array() && coupling.size() == n &&
            (n != 2 || (coupling[0].is_array() && coupling[0].size() == n))) {
            // Full NxN matrix of numbers / [re, im] pairs.
            for (std::size_t j = 0; j < n; ++j) {
                const OrderedJson& row = coupling[j];
                if (!row.is_array() || row.size() != n)
                    throw InvalidInputError("'coupling' matrix must be " + std::to_string(n) +
                                            "x" + std::to_string(n));
                for (std::size_t k = 0; k < n; ++k)
                    config.model.direct_coupling(j, k) =
                        json_to_complex(row[k], "'coupling' matrix entry");
            }
        } else if (n == 2) {
            // Scalar (or [re, im]) shorthand for the single off-diagonal pair.
            const Complex delta = json_to_complex(coupling, "'coupling'");
            config.model.direct_coupling(0, 1) = delta;
            config.model.direct_coupling(1, 0) = delta;
        } else {
            throw InvalidInputError("'coupling' must be an " + std::to_string(n) + "x" +
                                    std::to_string(n) +
                                    " matrix (scalar shorthand needs exactly 2 modes)");
        }
    }
    validate(config.model);

    if (root.contains("sweep")) {
        const OrderedJson& sweep_json = root.at("sweep");
        require_keys(sweep_json, {"varying_mode", "calibration", "gaps", "freqs"}, "'sweep'");

        sweep::SweepSpec spec;
        spec.base_model = config.model;
        if (!sweep_json.contains("varying_mode") ||
            !sweep_json.at("varying_mode").is_number_integer() ||
            sweep_json.at("varying_mode").get<long long>() < 0)
            throw InvalidInputError("'sweep' requires a non-negative integer 'varying_mode'");
        spec.varying_mode_index =
            static_cast<std::size_t>(sweep_json.at("varying_mode").get<long long>());

        if (!sweep_json.contains("calibration"))
            throw InvalidInputError("'sweep' requires a 'calibration' object");
        const OrderedJson& cal = sweep_json.at("calibration");
        require_keys(cal, {"g_min", "g_max", "omega_start", "omega_end"}, "'calibration'");
        spec.calibration.g_min = require_number(cal, "g_min", "'calibration'");
        spec.calibration.g_max = require_number(cal, "g_max", "'calibration'");
        spec.calibration.omega_start = require_number(cal, "omega_start", "'calibration'");
        spec.calibration.omega_end = require_number(cal, "omega_end", "'calibration'");

        if (!sweep_json.contains("gaps"))
            throw InvalidInputError("'sweep' requires 'gaps'");
        const OrderedJson& gaps = sweep_json.at("gaps");
        if (gaps.is_array()) {
            spec.gap_samples = json_to_increasing(gaps, "'gaps'");
        } else {
            require_keys(gaps, {"count", "min", "max"}, "'gaps'");
            const std::size_t count = require_count(gaps, "count", "'gaps'");
            const double lo = optional_number(gaps, "min", "'gaps'", spec.calibration.g_min);
            const double hi = optional_number(gaps, "max", "'gaps'", spec.calibration.g_max);
            spec.gap_samples = linspace(lo, hi, count);
        }

        if (!sweep_json.contains("freqs"))
            throw InvalidInputError("'sweep' requires 'freqs'");
        const OrderedJson& freqs = sweep_json.at("freqs");
        if (freqs.is_array()) {
            spec.freq_grid = json_to_increasing(freqs, "'freqs'");
        } else {
            require_keys(freqs, {"min", "max", "count"}, "'freqs'");
            const std::size_t count = require_count(freqs, "count", "'freqs'");
            spec.freq_grid = linspace(require_number(freqs, "min", "'freqs'"),
                                      require_number(freqs, "max", "'freqs'"), count);
        }

        sweep::validate(spec);
        config.sweep_spec = std::move(spec);
    }
    return config;
}

std::string write_model_config(const ModelConfig& config) {
    validate(config.model);
    OrderedJson root;
    root["modes"] = OrderedJson::array();
    for (const ModeParams& mode : config.model.modes)
        root["modes"].push_back(
            {{"omega", mode.omega}, {"beta", mode.beta_ext}, {"alpha", mode.alpha_int}});

    const std::size_t n = config.model.size();
    if (n == 2) {
        root["coupling"] = complex_to_json(config.model.direct_coupling(0, 1));
    } else if (n > 2) {
        OrderedJson matrix = OrderedJson::array();
        for (std::size_t j = 0; j < n; ++j) {
            OrderedJson row = OrderedJson::array();
            for (std::size_t k = 0; k < n; ++k)
                row.push_back(complex_to_json(config.model.direct_coupling(j, k)));
            matrix.push_back(row);
        }
        root["coupling"] = matrix;
    }

    if (config.sweep_spec) {
        const sweep::SweepSpec& spec = *config.sweep_spec;
        OrderedJson sweep_json;
        sweep_json["varying_mode"] = spec.varying_mode_index;
        sweep_json["calibration"] = {{"g_min", spec.calibration.g_min},
                                     {"g_max", spec.calibration.g_max},
                                     {"omega_start", spec.calibration.omega_start},
                                     {"omega_end", spec.calibration.omega_end}};
        sweep_json["gaps"] = spec.gap_samples;
        sweep_json["freqs"] = spec.freq_grid;
        root["sweep"] = sweep_json;
    }
    return root.dump(2) + "\n";
}

}  // namespace modecoupler::io

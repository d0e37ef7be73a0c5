#include "modecoupler/cli.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "modecoupler/analysis.hpp"
#include "modecoupler/errors.hpp"
#include "modecoupler/fit.hpp"
#include "modecoupler/io.hpp"
#include "modecoupler/model.hpp"
#include "modecoupler/sweep.hpp"
#include "modecoupler/types.hpp"

namespace modecoupler::cli {

namespace {

using OrderedJson = nlohmann::ordered_json;

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

std::string read_file(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw InvalidInputError("cannot read file: " + path);
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw InvalidInputError("cannot write file: " + path);
    file << text;
    if (!file) throw InvalidInputError("failed while writing file: " + path);
}

// Writes to the --out file when given, else to the command's stdout stream.
void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
    if (out_path.empty())
        out << text;
    else
        write_file(out_path, text);
}

std::vector<double> parse_doubles(const std::string& text, std::size_t expected,
                                  const std::string& what) {
    std::vector<double> values;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = text.find(',', start);
        const std::string token =
            text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        double value = 0.0;
        const char* begin = token.data();
        const char* end = token.data() + token.size();
        if (!token.empty() && token.front() == '+') ++begin;
        const auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc{} || ptr != end || begin == end)
            throw InvalidInputError("invalid number '" + token + "' in " + what);
        values.push_back(value);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (values.size() != expected)
        throw InvalidInputError(what + " needs " + std::to_string(expected) +
                                " comma-separated numbers");
    return values;
}

bool ends_with_ci(const std::string& text, const std::string& suffix) {
    if (text.size() < suffix.size()) return false;
    for (std::size_t i = 0; i < suffix.size(); ++i) {
        const char a = static_cast<char>(
            std::tolower(static_cast<unsigned char>(text[text.size() - suffix.size() + i])));
        if (a != suffix[i]) return false;
    }
    return true;
}

CouplingModel load_model(const std::string& path) {
    return io::read_model_config(read_file(path)).model;
}

io::TouchstoneFormat parse_format(const std::string& name) {
    if (name == "RI" || name == "ri") return io::TouchstoneFormat::RI;
    if (name == "MA" || name == "ma") return io::TouchstoneFormat::MA;
    if (name == "DB" || name == "db") return io::TouchstoneFormat::DB;
    throw InvalidInputError("unknown Touchstone format '" + name + "' (use RI, MA, or DB)");
}

SpectrumGrid load_spectrum(const std::string& path) {
    const std::string text = read_file(path);
    if (ends_with_ci(path, ".s2p")) {
        const io::TouchstoneData data = io::parse_touchstone(text);
        SpectrumGrid grid;
        grid.freqs.reserve(data.rows.size());
        grid.s21.reserve(data.rows.size());
        for (const io::TouchstoneRow& row : data.rows) {
            grid.freqs.push_back(row.freq_ghz);
            grid.s21.push_back(row.s21);
        }
        return grid;
    }
    return io::read_spectrum_csv(text);
}

// Resolves the sweep definition shared by `sweep`, `bic`, and `eigen --sweep`:
// a preset name (optionally with --alpha), or a model file whose config has a
// sweep block, or a model file plus an explicit --calibration quadruple.
struct ResolvedSweep {
    sweep::SweepSpec spec;
    io::SweepMetadata meta;
};

ResolvedSweep resolve_sweep(const std::string& preset, const std::string& alpha_arg,
                            const std::string& model_path, const std::string& calibration_arg) {
    ResolvedSweep resolved;
    if (!preset.empty()) {
        double alpha_varying = 0.01, alpha_fixed = 0.01;  // render visible dips by default
        if (!alpha_arg.empty()) {
            const std::vector<double> alphas = parse_doubles(alpha_arg, 2, "--alpha");
            alpha_varying = alphas[0];
            alpha_fixed = alphas[1];
        }
        resolved.spec = preset == "case1" ? sweep::case1_preset(alpha_varying, alpha_fixed)
                                          : sweep::case2_preset(alpha_varying, alpha_fixed);
        resolved.meta.preset = preset;
        resolved.meta.alpha_varying = alpha_varying;
        resolved.meta.alpha_fixed = alpha_fixed;
        resolved.meta.calibration = resolved.spec.calibration;
        resolved.meta.varying_mode_index = resolved.spec.varying_mode_index;
        return resolved;
    }

    if (model_path.empty())
        throw InvalidInputError("either --preset or --model is required");
    if (!alpha_arg.empty())
        throw InvalidInputError("--alpha applies to --preset runs only (set alpha in the model file)");
    const io::ModelConfig config = io::read_model_config(read_file(model_path));

    if (!calibration_arg.empty()) {
        const std::vector<double> cal = parse_doubles(calibration_arg, 4, "--calibration");
        sweep::SweepSpec spec;
        spec.base_model = config.model;
        spec.varying_mode_index = 0;
        spec.calibration = {cal[0], cal[1], cal[2], cal[3]};
        spec.gap_samples = linspace(cal[0], cal[1], 57);
        const double lo = std::min(cal[2], cal[3]);
        const double hi = std::max(cal[2], cal[3]);
        spec.freq_grid = linspace(lo - 0.5, hi + 0.5, 2001);
        resolved.spec = std::move(spec);
    } else if (config.sweep_spec) {
        resolved.spec = *config.sweep_spec;
    } else {
        throw InvalidInputError("model file has no sweep block; pass --calibration "
                                "g_min,g_max,omega_start,omega_end");
    }
    sweep::validate(resolved.spec);

    resolved.meta.preset = "custom";
    resolved.meta.calibration = resolved.spec.calibration;
    resolved.meta.varying_mode_index = resolved.spec.varying_mode_index;
    const std::vector<ModeParams>& modes = resolved.spec.base_model.modes;
    const std::size_t varying = resolved.spec.varying_mode_index;
    resolved.meta.alpha_varying = modes[varying].alpha_int;
    for (std::size_t j = 0; j < modes.size(); ++j)
        if (j != varying) {
            resolved.meta.alpha_fixed = modes[j].alpha_int;
            break;
        }
    return resolved;
}

OrderedJson spectrum_to_json(const SpectrumGrid& grid) {
    OrderedJson object;
    object["freq_ghz"] = grid.freqs;
    OrderedJson re = OrderedJson::array(), im = OrderedJson::array();
    for (const Complex& v : grid.s21) {
        re.push_back(v.real());
        im.push_back(v.imag());
    }
    object["re_s21"] = re;
    object["im_s21"] = im;
    return object;
}

OrderedJson branches_to_json(const std::vector<ComplexFrequency>& branches) {
    OrderedJson array = OrderedJson::array();
    for (const ComplexFrequency& branch : branches)
        array.push_back({{"re_ghz", branch.re}, {"im_ghz", branch.im}});
    return array;
}

OrderedJson model_to_json(const CouplingModel& model) {
    // Reuses the model-config schema so fitted models reload directly.
    return OrderedJson::parse(io::write_model_config({model, std::nullopt}));
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Coupled-resonator transmission model: spectra, eigenvalue branches, "
                 "Friedrich-Wintgen BIC location, regime classification, sweeps, and fits"};
    app.require_subcommand(1);

    // --- spectrum ---------------------------------------------------------
    auto* spectrum_cmd = app.add_subcommand("spectrum", "Synthesize an S21 spectrum from a model");
    std::string spectrum_model, spectrum_out;
    double fmin = 5.5, fmax = 8.0;
    std::size_t points = 2001;
    bool spectrum_json = false;
    spectrum_cmd->add_option("--model", spectrum_model, "model configuration JSON")->required();
    spectrum_cmd->add_option("--fmin", fmin, "grid start, GHz (default 5.5)");
    spectrum_cmd->add_option("--fmax", fmax, "grid end, GHz (default 8.0)");
    spectrum_cmd->add_option("--points", points, "grid size (default 2001)");
    spectrum_cmd->add_option("--out", spectrum_out, "output file (default stdout)");
    spectrum_cmd->add_flag("--json", spectrum_json, "emit JSON instead of CSV");
    spectrum_cmd->callback([&] {
        const CouplingModel model = load_model(spectrum_model);
        SpectrumGrid grid;
        grid.freqs = linspace(fmin, fmax, points);
        grid.s21 = s21_spectrum(model, grid.freqs).s21;
        emit(spectrum_json ? spectrum_to_json(grid).dump(2) + "\n" : io::write_spectrum_csv(grid),
             spectrum_out, out);
    });

    // --- eigen ------------------------------------------------------------
    auto* eigen_cmd = app.add_subcommand("eigen", "Complex eigenvalue branches of a model");
    std::string eigen_model, eigen_out;
    bool eigen_sweep = false, eigen_json = false;
    eigen_cmd->add_option("--model", eigen_model, "model configuration JSON")->required();
    eigen_cmd->add_flag("--sweep", eigen_sweep,
                        "evaluate branches along the model's sweep block");
    eigen_cmd->add_option("--out", eigen_out, "output file (default stdout)");
    eigen_cmd->add_flag("--json", eigen_json, "emit JSON instead of CSV");
    eigen_cmd->callback([&] {
        const io::ModelConfig config = io::read_model_config(read_file(eigen_model));
        std::string text;
        if (eigen_sweep) {
            if (!config.sweep_spec)
                throw InvalidInputError("--sweep requires a sweep block in the model file");
            OrderedJson rows = OrderedJson::array();
            text = "gap_mm,branch,re_ghz,im_ghz\n";
            for (const double gap : config.sweep_spec->gap_samples) {
                const std::vector<ComplexFrequency> branches =
                    eigenvalues(sweep::model_at_gap(*config.sweep_spec, gap));
                for (std::size_t b = 0; b < branches.size(); ++b)
                    text += format_double(gap) + "," + std::to_string(b) + "," +
                            format_double(branches[b].re) + "," + format_double(branches[b].im) +
                            "\n";
                rows.push_back({{"gap_mm", gap}, {"branches", branches_to_json(branches)}});
            }
            if (eigen_json) text = OrderedJson{{"sweep", rows}}.dump(2) + "\n";
        } else {
            const std::vector<ComplexFrequency> branches = eigenvalues(config.model);
            if (eigen_json) {
                text = OrderedJson{{"branches", branches_to_json(branches)}}.dump(2) + "\n";
            } else {
                text = "branch,re_ghz,im_ghz\n";
                for (std::size_t b = 0; b < branches.size(); ++b)
                    text += std::to_string(b) + "," + format_double(branches[b].re) + "," +
                            format_double(branches[b].im) + "\n";
            }
        }
        emit(text, eigen_out, out);
    });

    // --- sweep ------------------------------------------------------------
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a gap sweep and export the colormap data");
    std::string sweep_preset, sweep_alpha, sweep_model, sweep_calibration, sweep_dir = ".";
    sweep_cmd->add_option("--preset", sweep_preset, "case1 or case2")
        ->check(CLI::IsMember({"case1", "case2"}));
    sweep_cmd->add_option("--alpha", sweep_alpha,
                          "intrinsic damping pair a_varying,a_fixed GHz (presets only; "
                          "default 0.01,0.01)");
    sweep_cmd->add_option("--model", sweep_model, "model configuration JSON with a sweep block");
    sweep_cmd->add_option("--calibration", sweep_calibration,
                          "g_min,g_max,omega_start,omega_end overriding the model's sweep block");
    sweep_cmd->add_option("--out", sweep_dir, "output directory (default .)");
    sweep_cmd->callback([&] {
        if (!sweep_preset.empty() && !sweep_model.empty())
            throw InvalidInputError("--preset and --model are mutually exclusive");
        const ResolvedSweep resolved =
            resolve_sweep(sweep_preset, sweep_alpha, sweep_model, sweep_calibration);
        const sweep::SweepResult result = sweep::run_sweep(resolved.spec);
        const io::SweepExport files = io::export_sweep(result, resolved.meta);
        std::filesystem::create_directories(sweep_dir);
        const std::filesystem::path dir(sweep_dir);
        write_file((dir / "sweep_magnitude.csv").string(), files.matrix_csv);
        write_file((dir / "sweep_long.csv").string(), files.long_csv);
        write_file((dir / "sweep_metadata.json").string(), files.metadata_json);
        out << "wrote " << (dir / "sweep_magnitude.csv").string() << "\n"
            << "wrote " << (dir / "sweep_long.csv").string() << "\n"
            << "wrote " << (dir / "sweep_metadata.json").string() << "\n";
    });

    // --- bic --------------------------------------------------------------
    auto* bic_cmd = app.add_subcommand("bic", "Locate Friedrich-Wintgen BIC points along a sweep");
    std::string bic_preset, bic_alpha, bic_model, bic_calibration, bic_out;
    double bic_tol = 1e-10;
    bool bic_json = false;
    bic_cmd->add_option("--preset", bic_preset, "case1 or case2")
        ->check(CLI::IsMember({"case1", "case2"}));
    bic_cmd->add_option("--alpha", bic_alpha,
                        "intrinsic damping pair a_varying,a_fixed GHz (presets only)");
    bic_cmd->add_option("--model", bic_model, "model configuration JSON with a sweep block");
    bic_cmd->add_option("--calibration", bic_calibration,
                        "g_min,g_max,omega_start,omega_end overriding the model's sweep block");
    bic_cmd->add_option("--tol", bic_tol, "residual tolerance, GHz (default 1e-10)");
    bic_cmd->add_option("--out", bic_out, "output file (default stdout)");
    bic_cmd->add_flag("--json", bic_json, "emit JSON instead of CSV");
    bic_cmd->callback([&] {
        if (!bic_preset.empty() && !bic_model.empty())
            throw InvalidInputError("--preset and --model are mutually exclusive");
        const ResolvedSweep resolved =
            resolve_sweep(bic_preset, bic_alpha, bic_model, bic_calibration);
        const std::vector<analysis::BicPoint> points = analysis::find_bic(resolved.spec, bic_tol);
        std::string text;
        if (bic_json) {
            OrderedJson array = OrderedJson::array();
            for (const analysis::BicPoint& p : points)
                array.push_back({{"gap_mm", p.sweep_value},
                                 {"omega_bic_ghz", p.omega_bic},
                                 {"residual", p.residual},
                                 {"min_im", p.min_im},
                                 {"verified", p.verified}});
            text = array.dump(2) + "\n";
        } else {
            text = "gap_mm,omega_bic_ghz,residual,min_im,verified\n";
            for (const analysis::BicPoint& p : points)
                text += format_double(p.sweep_value) + "," + format_double(p.omega_bic) + "," +
                        format_double(p.residual) + "," + format_double(p.min_im) + "," +
                        (p.verified ? "1" : "0") + "\n";
        }
        emit(text, bic_out, out);
    });

    // --- classify ---------------------------------------------------------
    auto* classify_cmd =
        app.add_subcommand("classify", "Coupling-regime label at zero detuning");
    std::string classify_model, classify_out;
    bool classify_json = false;
    classify_cmd->add_option("--model", classify_model, "model configuration JSON")->required();
    classify_cmd->add_option("--out", classify_out, "output file (default stdout)");
    classify_cmd->add_flag("--json", classify_json, "emit JSON instead of CSV");
    classify_cmd->callback([&] {
        const analysis::RegimeReport report = analysis::classify_regime(load_model(classify_model));
        std::string text;
        if (classify_json) {
            text = OrderedJson{{"label", analysis::to_string(report.label)},
                               {"gap_re_ghz", report.gap_re},
                               {"gap_im_ghz", report.gap_im}}
                       .dump(2) +
                   "\n";
        } else {
            text = "label,gap_re_ghz,gap_im_ghz\n";
            text += std::string(analysis::to_string(report.label)) + "," +
                    format_double(report.gap_re) + "," + format_double(report.gap_im) + "\n";
        }
        emit(text, classify_out, out);
    });

    // --- fit ----------------------------------------------------------------
    auto* fit_cmd = app.add_subcommand("fit", "Least-squares fit of a model to a spectrum");
    std::string fit_data, fit_model, fit_free, fit_loss = "complex", fit_out, fit_report_out;
    std::uint64_t fit_seed = 12345;
    double bound_scale = 0.2;
    bool fit_json = false;
    fit_cmd->add_option("--data", fit_data, "observed spectrum (.s2p or .csv)")->required();
    fit_cmd->add_option("--model", fit_model, "initial model configuration JSON")->required();
    fit_cmd->add_option("--free", fit_free,
                        "comma-separated free parameters, e.g. omega1,beta1,delta_re")
        ->required();
    fit_cmd->add_option("--loss", fit_loss, "complex or mag (default complex)")
        ->check(CLI::IsMember({"complex", "mag"}));
    fit_cmd->add_option("--seed", fit_seed, "restart jitter seed (default 12345)");
    fit_cmd->add_option("--bound-scale", bound_scale,
                        "half-width of the search box relative to each initial value "
                        "(default 0.2)");
    fit_cmd->add_option("--out", fit_out, "write the fitted model configuration here");
    fit_cmd->add_option("--report", fit_report_out, "write the fit report here (default stdout)");
    fit_cmd->add_flag("--json", fit_json, "emit a JSON report instead of CSV");
    fit_cmd->callback([&] {
        fit::FitProblem problem;
        problem.observed = load_spectrum(fit_data);
        problem.initial = load_model(fit_model);
        problem.loss = fit_loss == "mag" ? fit::Loss::MAGNITUDE_RESIDUAL
                                         : fit::Loss::COMPLEX_RESIDUAL;
        const std::size_t n = problem.initial.size();
        const std::vector<double> initial = fit::pack(problem.initial);
        problem.free_mask.assign(initial.size(), false);

        std::size_t start = 0;
        while (start <= fit_free.size() && !fit_free.empty()) {
            const std::size_t comma = fit_free.find(',', start);
            const std::string name = fit_free.substr(
                start, comma == std::string::npos ? std::string::npos : comma - start);
            if (name.empty()) throw InvalidInputError("empty name in --free list");
            problem.free_mask[fit::param_index(name, n)] = true;
            if (comma == std::string::npos) break;
            start = comma + 1;
        }

        if (!(bound_scale > 0.0)) throw InvalidInputError("--bound-scale must be > 0");
        problem.bounds.resize(initial.size());
        for (std::size_t i = 0; i < initial.size(); ++i) {
            if (!problem.free_mask[i]) {
                problem.bounds[i] = {initial[i], initial[i]};
                continue;
            }
            // Box half-width: relative to the value, with a 1 GHz-scale floor
            // so zero-valued slots (e.g. delta_re = 0) can still move.
            const double width =
                bound_scale * std::max(std::abs(initial[i]), initial[i] == 0.0 ? 1.0 : 0.0);
            double lo = initial[i] - width;
            if (i >= n && i < 3 * n && lo < 0.0) lo = 0.0;  // beta/alpha stay nonnegative
            problem.bounds[i] = {lo, initial[i] + width};
        }

        const fit::FitResult result = fit::fit_spectrum(problem, fit_seed);
        std::string text;
        if (fit_json) {
            OrderedJson report;
            report["model"] = model_to_json(result.model);
            report["rms_residual"] = result.rms_residual;
            report["iterations"] = result.iterations;
            report["converged"] = result.converged;
            report["objective_history"] = result.objective_history;
            text = report.dump(2) + "\n";
        } else {
            text = "parameter,value\n";
            const std::vector<double> fitted = fit::pack(result.model);
            for (std::size_t i = 0; i < fitted.size(); ++i)
                text += fit::param_name(i, n) + "," + format_double(fitted[i]) + "\n";
            text += "rms_residual," + format_double(result.rms_residual) + "\n";
            text += "iterations," + std::to_string(result.iterations) + "\n";
            text += std::string("converged,") + (result.converged ? "1" : "0") + "\n";
        }
        emit(text, fit_report_out, out);
        if (!fit_out.empty())
            write_file(fit_out, io::write_model_config({result.model, std::nullopt}));
    });

    // --- convert ------------------------------------------------------------
    auto* convert_cmd =
        app.add_subcommand("convert", "Convert between Touchstone .s2p and spectrum CSV");
    std::string convert_in, convert_out, convert_param = "s21", convert_format = "RI";
    convert_cmd->add_option("--in", convert_in, "input file (.s2p or .csv)")->required();
    convert_cmd->add_option("--out", convert_out, "output file (.s2p or .csv)")->required();
    convert_cmd->add_option("--param", convert_param,
                            "S-parameter column for s2p -> csv (default s21)")
        ->check(CLI::IsMember({"s11", "s21", "s12", "s22"}));
    convert_cmd->add_option("--format", convert_format,
                            "Touchstone number format for .s2p output (default RI)")
        ->check(CLI::IsMember({"RI", "MA", "DB", "ri", "ma", "db"}));
    convert_cmd->callback([&] {
        const bool in_s2p = ends_with_ci(convert_in, ".s2p");
        const bool in_csv = ends_with_ci(convert_in, ".csv");
        const bool out_s2p = ends_with_ci(convert_out, ".s2p");
        const bool out_csv = ends_with_ci(convert_out, ".csv");
        if (!in_s2p && !in_csv)
            throw InvalidInputError("--in must end in .s2p or .csv: " + convert_in);
        if (!out_s2p && !out_csv)
            throw InvalidInputError("--out must end in .s2p or .csv: " + convert_out);

        if (in_s2p) {
            const io::TouchstoneData data = io::parse_touchstone(read_file(convert_in));
            if (out_s2p) {
                write_file(convert_out, io::write_touchstone(data, parse_format(convert_format)));
                return;
            }
            SpectrumGrid grid;
            for (const io::TouchstoneRow& row : data.rows) {
                grid.freqs.push_back(row.freq_ghz);
                grid.s21.push_back(convert_param == "s11"   ? row.s11
                                   : convert_param == "s12" ? row.s12
                                   : convert_param == "s22" ? row.s22
                                                            : row.s21);
            }
            write_file(convert_out, io::write_spectrum_csv(grid));
            return;
        }

        const SpectrumGrid grid = io::read_spectrum_csv(read_file(convert_in));
        if (out_csv) {
            write_file(convert_out, io::write_spectrum_csv(grid));
            return;
        }
        io::TouchstoneData data;
        data.format = parse_format(convert_format);
        for (std::size_t i = 0; i < grid.freqs.size(); ++i) {
            io::TouchstoneRow row;
            row.freq_ghz = grid.freqs[i];
            row.s21 = grid.s21[i];
            data.rows.push_back(row);
        }
        write_file(convert_out, io::write_touchstone(data, data.format));
    });

    try {
        app.parse(argc, argv);
        return 0;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        err << app.help();
        return 1;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace modecoupler::cli

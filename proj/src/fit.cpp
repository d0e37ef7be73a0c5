#include "modecoupler/fit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>

#include "modecoupler/analysis.hpp"
#include "modecoupler/errors.hpp"
#include "modecoupler/model.hpp"

namespace modecoupler::fit {

namespace {

constexpr double kRelTol = 1e-12;          // simplex spread convergence, relative
constexpr double kObjectiveFloor = 1e-28;  // floor for the relative spread test
constexpr double kJitterFrac = 0.05;       // restart jitter, fraction of box width
constexpr double kGuessProminence = 0.02;  // dip threshold for initial_guess
constexpr std::size_t kMaxEvals = 5000;    // per restart
constexpr int kRestarts = 3;
constexpr int kStagnationLimit = 200;      // iterations without improvement before re-seed

std::size_t pair_count(std::size_t n_modes) { return n_modes * (n_modes - 1) / 2; }

// Portable uniform in [0, 1): top 53 bits of the engine output.
double u01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double clip(double x, const Interval& box) { return std::clamp(x, box.lo, box.hi); }

// ---------------------------------------------------------------------------
// Bounded Nelder-Mead core over an arbitrary objective.
// ---------------------------------------------------------------------------

struct NmOptions {
    int restarts = kRestarts;
    std::size_t max_evals = kMaxEvals;  // per restart
    std::uint64_t seed = 12345;
};

struct NmOutcome {
    std::vector<double> x;
    double f = std::numeric_limits<double>::infinity();
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<double> history;  // strict improvements of the running best
};

using Objective = std::function<double(const std::vector<double>&)>;

struct Vertex {
    std::vector<double> x;
    double f = 0.0;
};

// One restart of the simplex search from `start` (already inside the box).
// Updates the cross-restart best/history in `out`.
void simplex_search(const Objective& objective, const std::vector<double>& start,
                    const std::vector<Interval>& box, const NmOptions& opt,
                    std::mt19937_64& rng, NmOutcome& out) {
    const std::size_t n = start.size();
    std::size_t evals = 0;

    auto record = [&](const std::vector<double>& x, double f) {
        if (f < out.f) {
            out.f = f;
            out.x = x;
            out.history.push_back(f);
        }
    };
    auto evaluate = [&](const std::vector<double>& x) {
        ++evals;
        const double f = objective(x);
        record(x, f);
        return std::isfinite(f) ? f : std::numeric_limits<double>::infinity();
    };

    auto build_simplex = [&](const std::vector<double>& center, bool jitter) {
        std::vector<Vertex> simplex;
        std::vector<double> x0 = center;
        if (jitter)
            for (std::size_t i = 0; i < n; ++i)
                x0[i] = clip(x0[i] + (2.0 * u01(rng) - 1.0) * kJitterFrac * (box[i].hi - box[i].lo),
                             box[i]);
        simplex.push_back({x0, evaluate(x0)});
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> xi = x0;
            const double step = kJitterFrac * (box[i].hi - box[i].lo);
            xi[i] = clip(xi[i] + step, box[i]);
            if (xi[i] == x0[i]) xi[i] = clip(xi[i] - step, box[i]);  // hugging the upper bound
            simplex.push_back({xi, evaluate(xi)});
        }
        return simplex;
    };

    std::vector<Vertex> simplex = build_simplex(start, false);
    auto by_f = [](const Vertex& a, const Vertex& b) { return a.f < b.f; };
    std::sort(simplex.begin(), simplex.end(), by_f);

    int stagnation = 0;
    while (true) {
        const double f_best = simplex.front().f;
        const double f_worst = simplex.back().f;
        if (f_best == 0.0 ||
            f_worst - f_best <= kRelTol * std::max(std::abs(f_best), kObjectiveFloor)) {
            out.converged = true;
            return;
        }
        if (evals >= opt.max_evals) return;

        ++out.iterations;
        if (++stagnation > kStagnationLimit) {
            // Degenerate / stalled simplex: re-seed around the current best.
            simplex = build_simplex(simplex.front().x, true);
            std::sort(simplex.begin(), simplex.end(), by_f);
            stagnation = 0;
            continue;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t v = 0; v + 1 < simplex.size(); ++v)
            for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[v].x[i];
        for (std::size_t i = 0; i < n; ++i) centroid[i] /= static_cast<double>(n);

        auto blend = [&](double scale) {
            std::vector<double> x(n);
            for (std::size_t i = 0; i < n; ++i)
                x[i] = clip(centroid[i] + scale * (centroid[i] - simplex.back().x[i]), box[i]);
            return x;
        };

        const std::vector<double> xr = blend(1.0);
        const double fr = evaluate(xr);
        bool improved = fr < simplex.front().f;

        if (fr < simplex.front().f) {
            const std::vector<double> xe = blend(2.0);
            const double fe = evaluate(xe);
            simplex.back() = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
        } else if (fr < simplex[simplex.size() - 2].f) {
            simplex.back() = {xr, fr};
        } else {
            const std::vector<double> xc = blend(fr < simplex.back().f ? 0.5 : -0.5);
            const double fc = evaluate(xc);
            if (fc < std::min(fr, simplex.back().f)) {
                simplex.back() = {xc, fc};
                improved = improved || fc < simplex.front().f;
            } else {
                for (std::size_t v = 1; v < simplex.size(); ++v) {
                    for (std::size_t i = 0; i < n; ++i)
                        simplex[v].x[i] =
                            clip(simplex.front().x[i] + 0.5 * (simplex[v].x[i] - simplex.front().x[i]),
                                 box[i]);
                    simplex[v].f = evaluate(simplex[v].x);
                    improved = improved || simplex[v].f < simplex.front().f;
                }
            }
        }
        std::sort(simplex.begin(), simplex.end(), by_f);
        if (improved) stagnation = 0;
    }
}

NmOutcome nelder_mead(const Objective& objective, const std::vector<double>& start,
                      const std::vector<Interval>& box, const NmOptions& opt) {
    std::mt19937_64 rng(opt.seed);
    NmOutcome out;
    for (int r = 0; r < opt.restarts; ++r) {
        if (r > 0 && out.f == 0.0) break;  // a sum of squares cannot improve on zero
        std::vector<double> start_r = start;
        if (r > 0)
            for (std::size_t i = 0; i < start_r.size(); ++i)
                start_r[i] = clip(start_r[i] + (2.0 * u01(rng) - 1.0) * kJitterFrac *
                                                   (box[i].hi - box[i].lo),
                                  box[i]);
        NmOutcome trial;
        trial.f = out.f;  // share the running best so history stays monotone
        trial.x = out.x;
        trial.history = std::move(out.history);
        trial.iterations = out.iterations;
        const bool already_converged = out.converged;
        simplex_search(objective, start_r, box, opt, rng, trial);
        trial.converged = trial.converged || already_converged;
        out = std::move(trial);
    }
    if (out.x.empty()) out.x = start;
    return out;
}

// ---------------------------------------------------------------------------
// Model-space objective plumbing.
// ---------------------------------------------------------------------------

struct SlotMap {
    std::vector<std::size_t> free_slots;  // layout indices of the varied parameters
    std::vector<double> full;             // full layout vector with frozen values
    std::size_t n_modes = 0;
};

SlotMap make_slot_map(const FitProblem& problem, const std::vector<bool>& mask) {
    SlotMap map;
    map.n_modes = problem.initial.size();
    map.full = pack(problem.initial);
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i]) map.free_slots.push_back(i);
    return map;
}

// Sum of squared residuals for one spectrum; +inf on numerical failure so the
// simplex backs away from singular parameter points.
double sum_squares(const CouplingModel& model, const SpectrumGrid& observed, Loss loss,
                   const std::vector<double>& observed_mag) {
    std::vector<Complex> predicted;
    try {
        predicted = s21_spectrum(model, observed.freqs).s21;
    } catch (const NumericalError&) {
        return std::numeric_limits<double>::infinity();
    }
    double total = 0.0;
    if (loss == Loss::COMPLEX_RESIDUAL) {
        for (std::size_t k = 0; k < predicted.size(); ++k) {
            const Complex r = predicted[k] - observed.s21[k];
            total += r.real() * r.real() + r.imag() * r.imag();
        }
    } else {
        for (std::size_t k = 0; k < predicted.size(); ++k) {
            const double r = std::abs(predicted[k]) - observed_mag[k];
            total += r * r;
        }
    }
    return std::isfinite(total) ? total : std::numeric_limits<double>::infinity();
}

std::vector<double> magnitudes(const SpectrumGrid& grid) {
    std::vector<double> mag(grid.s21.size());
    for (std::size_t k = 0; k < grid.s21.size(); ++k) mag[k] = std::abs(grid.s21[k]);
    return mag;
}

Objective make_objective(const FitProblem& problem, SlotMap& map) {
    return [&problem, &map, observed_mag = magnitudes(problem.observed)](
               const std::vector<double>& x) {
        for (std::size_t i = 0; i < map.free_slots.size(); ++i) map.full[map.free_slots[i]] = x[i];
        CouplingModel model;
        try {
            model = unpack(map.full, map.n_modes);
        } catch (const DomainError&) {
            // e.g. omega <= 0 inside wide bounds: a bad point, not a fatal one
            return std::numeric_limits<double>::infinity();
        }
        return sum_squares(model, problem.observed, problem.loss, observed_mag);
    };
}

std::size_t residual_count(const FitProblem& problem) {
    return problem.loss == Loss::COMPLEX_RESIDUAL ? 2 * problem.observed.freqs.size()
                                                  : problem.observed.freqs.size();
}

std::vector<Interval> gather(const std::vector<Interval>& bounds,
                             const std::vector<std::size_t>& slots) {
    std::vector<Interval> sub;
    sub.reserve(slots.size());
    for (std::size_t s : slots) sub.push_back(bounds[s]);
    return sub;
}

std::vector<double> gather(const std::vector<double>& values,
                           const std::vector<std::size_t>& slots) {
    std::vector<double> sub;
    sub.reserve(slots.size());
    for (std::size_t s : slots) sub.push_back(values[s]);
    return sub;
}

FitResult finish_result(const FitProblem& problem, const SlotMap& map, const NmOutcome& outcome) {
    std::vector<double> full = map.full;
    for (std::size_t i = 0; i < map.free_slots.size(); ++i) full[map.free_slots[i]] = outcome.x[i];
    FitResult result;
    result.model = unpack(full, map.n_modes);
    result.rms_residual = std::sqrt(outcome.f / static_cast<double>(residual_count(problem)));
    result.iterations = outcome.iterations;
    result.converged = outcome.converged;
    result.objective_history = outcome.history;
    return result;
}

FitResult fit_with_options(const FitProblem& problem, const NmOptions& opt) {
    SlotMap map = make_slot_map(problem, problem.free_mask);
    Objective objective = make_objective(problem, map);
    const std::vector<double> start = gather(pack(problem.initial), map.free_slots);
    if (!std::isfinite(objective(start)))
        throw InvalidInputError("fit objective is not finite at the initial model");
    const NmOutcome outcome =
        nelder_mead(objective, start, gather(problem.bounds, map.free_slots), opt);
    return finish_result(problem, map, outcome);
}

bool is_beta_or_alpha_slot(std::size_t index, std::size_t n_modes) {
    return index >= n_modes && index < 3 * n_modes;
}

}  // namespace

// ---------------------------------------------------------------------------
// Parameter layout.
// ---------------------------------------------------------------------------

std::size_t param_count(std::size_t n_modes) { return 3 * n_modes + 2 * pair_count(n_modes); }

std::string param_name(std::size_t index, std::size_t n_modes) {
    if (index >= param_count(n_modes))
        throw InvalidInputError("parameter index " + std::to_string(index) +
                                " out of range for " + std::to_string(n_modes) + " modes");
    const std::size_t n = n_modes;
    if (index < n) return "omega" + std::to_string(index + 1);
    if (index < 2 * n) return "beta" + std::to_string(index - n + 1);
    if (index < 3 * n) return "alpha" + std::to_string(index - 2 * n + 1);
    std::size_t pair = index - 3 * n;
    const bool re_part = pair < pair_count(n);
    if (!re_part) pair -= pair_count(n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = j + 1; k < n; ++k)
            if (pair-- == 0)
                return std::string("delta_") + (re_part ? "re" : "im") + "_" +
                       std::to_string(j + 1) + "_" + std::to_string(k + 1);
    throw InvalidInputError("parameter index out of range");  // unreachable
}

std::size_t param_index(const std::string& name, std::size_t n_modes) {
    if (n_modes == 2) {
        if (name == "delta_re") return 3 * n_modes;
        if (name == "delta_im") return 3 * n_modes + 1;
    }
    for (std::size_t i = 0; i < param_count(n_modes); ++i)
        if (param_name(i, n_modes) == name) return i;
    throw InvalidInputError("unknown parameter name: " + name);
}

std::vector<double> pack(const CouplingModel& model) {
    validate(model);
    const std::size_t n = model.size();
    std::vector<double> params;
    params.reserve(param_count(n));
    for (const ModeParams& m : model.modes) params.push_back(m.omega);
    for (const ModeParams& m : model.modes) params.push_back(m.beta_ext);
    for (const ModeParams& m : model.modes) params.push_back(m.alpha_int);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = j + 1; k < n; ++k) params.push_back(model.direct_coupling(j, k).real());
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = j + 1; k < n; ++k) params.push_back(model.direct_coupling(j, k).imag());
    return params;
}

CouplingModel unpack(const std::vector<double>& params, std::size_t n_modes) {
    if (params.size() != param_count(n_modes))
        throw InvalidInputError("parameter vector has " + std::to_string(params.size()) +
                                " entries; expected " + std::to_string(param_count(n_modes)));
    CouplingModel model;
    model.modes.resize(n_modes);
    for (std::size_t j = 0; j < n_modes; ++j) {
        model.modes[j].omega = params[j];
        model.modes[j].beta_ext = params[n_modes + j];
        model.modes[j].alpha_int = params[2 * n_modes + j];
    }
    model.direct_coupling = CMatrix(n_modes, n_modes);
    std::size_t slot = 3 * n_modes;
    const std::size_t pairs = pair_count(n_modes);
    for (std::size_t j = 0; j < n_modes; ++j)
        for (std::size_t k = j + 1; k < n_modes; ++k) {
            const Complex delta(params[slot], params[slot + pairs]);
            model.direct_coupling(j, k) = delta;
            model.direct_coupling(k, j) = delta;
            ++slot;
        }
    validate(model);
    return model;
}

// ---------------------------------------------------------------------------
// Problem validation and the starting guess.
// ---------------------------------------------------------------------------

void validate(const FitProblem& problem) {
    modecoupler::validate(problem.observed);
    if (problem.observed.freqs.empty())
        throw InvalidInputError("fit requires a non-empty observed spectrum");
    modecoupler::validate(problem.initial);
    const std::size_t count = param_count(problem.initial.size());
    if (problem.free_mask.size() != count)
        throw InvalidInputError("free_mask has " + std::to_string(problem.free_mask.size()) +
                                " entries; expected " + std::to_string(count));
    if (problem.bounds.size() != count)
        throw InvalidInputError("bounds have " + std::to_string(problem.bounds.size()) +
                                " entries; expected " + std::to_string(count));
    if (std::none_of(problem.free_mask.begin(), problem.free_mask.end(), [](bool b) { return b; }))
        throw InvalidInputError("fit requires at least one free parameter");

    const std::vector<double> initial = pack(problem.initial);
    for (std::size_t i = 0; i < count; ++i) {
        const Interval& b = problem.bounds[i];
        if (!std::isfinite(b.lo) || !std::isfinite(b.hi) || b.lo > b.hi)
            throw InvalidInputError("invalid bounds for " +
                                    param_name(i, problem.initial.size()));
        if (is_beta_or_alpha_slot(i, problem.initial.size()) && b.lo < 0.0)
            throw InvalidInputError(param_name(i, problem.initial.size()) +
                                    " lower bound must be >= 0");
        if (initial[i] < b.lo || initial[i] > b.hi)
            throw InvalidInputError("initial " + param_name(i, problem.initial.size()) +
                                    " lies outside its bounds");
    }
}

CouplingModel initial_guess(const SpectrumGrid& spectrum, std::size_t n_modes) {
    if (spectrum.freqs.empty())
        throw InvalidInputError("initial_guess requires a non-empty spectrum");
    modecoupler::validate(spectrum);
    if (n_modes < 1 || n_modes > 2)
        throw UnsupportedModelError("initial_guess supports 1 or 2 modes");

    const double span = spectrum.freqs.back() - spectrum.freqs.front();
    double fallback_width = 0.01 * span;
    if (fallback_width <= 0.0) fallback_width = 0.01;  // GHz, single-point grids

    std::vector<analysis::SpectralFeature> dips;
    if (spectrum.freqs.size() >= 3) {
        for (const analysis::SpectralFeature& f :
             analysis::extract_features(spectrum, kGuessProminence))
            if (f.kind == analysis::FeatureKind::DIP) dips.push_back(f);
    }
    std::sort(dips.begin(), dips.end(),
              [](const analysis::SpectralFeature& a, const analysis::SpectralFeature& b) {
                  return a.magnitude != b.magnitude ? a.magnitude < b.magnitude : a.freq < b.freq;
              });

    CouplingModel model;
    model.modes.resize(n_modes);
    model.direct_coupling = CMatrix(n_modes, n_modes);

    if (dips.size() >= n_modes) {
        dips.resize(n_modes);  // keep the deepest, then order them by frequency
        std::sort(dips.begin(), dips.end(),
                  [](const analysis::SpectralFeature& a, const analysis::SpectralFeature& b) {
                      return a.freq < b.freq;
                  });
        for (std::size_t j = 0; j < n_modes; ++j) {
            const double width = dips[j].fwhm.value_or(fallback_width);
            model.modes[j].omega = dips[j].freq;
            // alpha + beta = FWHM/2, split evenly
            model.modes[j].beta_ext = width / 4.0;
            model.modes[j].alpha_int = width / 4.0;
        }
        if (n_modes == 2) {
            const double separation = dips[1].freq - dips[0].freq;
            const double mean_width =
                (dips[0].fwhm.value_or(fallback_width) + dips[1].fwhm.value_or(fallback_width)) /
                2.0;
            if (separation < 10.0 * mean_width) {
                const Complex delta(separation / 2.0, 0.0);
                model.direct_coupling(0, 1) = delta;
                model.direct_coupling(1, 0) = delta;
            }
        }
    } else {
        for (std::size_t j = 0; j < n_modes; ++j) {
            model.modes[j].omega = spectrum.freqs.front() +
                                   (static_cast<double>(j) + 0.5) * span /
                                       static_cast<double>(n_modes);
            model.modes[j].beta_ext = fallback_width / 4.0;
            model.modes[j].alpha_int = fallback_width / 4.0;
        }
    }
    return model;
}

// ---------------------------------------------------------------------------
// Single-spectrum and shared-parameter fits.
// ---------------------------------------------------------------------------

FitResult fit_spectrum(const FitProblem& problem, std::uint64_t seed) {
    validate(problem);
    NmOptions opt;
    opt.seed = seed;
    return fit_with_options(problem, opt);
}

SharedFitResult fit_sweep(const std::vector<FitProblem>& problems,
                          const std::vector<bool>& shared_mask, std::uint64_t seed) {
    if (problems.empty()) throw InvalidInputError("fit_sweep requires at least one problem");
    for (const FitProblem& p : problems) validate(p);

    const std::size_t n_modes = problems.front().initial.size();
    const std::size_t count = param_count(n_modes);
    if (shared_mask.size() != count)
        throw InvalidInputError("shared_mask has " + std::to_string(shared_mask.size()) +
                                " entries; expected " + std::to_string(count));
    for (const FitProblem& p : problems) {
        if (p.initial.size() != n_modes)
            throw InvalidInputError("fit_sweep problems must share the same mode count");
        for (std::size_t i = 0; i < count; ++i) {
            if (shared_mask[i] && !p.free_mask[i])
                throw InvalidInputError("shared parameter " + param_name(i, n_modes) +
                                        " is not free in every problem");
            if (shared_mask[i] && (p.bounds[i].lo != problems.front().bounds[i].lo ||
                                   p.bounds[i].hi != problems.front().bounds[i].hi))
                throw InvalidInputError("shared parameter " + param_name(i, n_modes) +
                                        " has inconsistent bounds across problems");
        }
    }

    std::vector<std::size_t> shared_slots;
    for (std::size_t i = 0; i < count; ++i)
        if (shared_mask[i]) shared_slots.push_back(i);

    // Trivial shapes: one problem, or nothing shared, reduce to fit_spectrum.
    if (problems.size() == 1 || shared_slots.empty()) {
        SharedFitResult shared;
        shared.converged = true;
        for (const FitProblem& p : problems) {
            shared.results.push_back(fit_spectrum(p, seed));
            shared.converged = shared.converged && shared.results.back().converged;
        }
        shared.shared_values = gather(pack(shared.results.front().model), shared_slots);
        shared.pooled_history = shared.results.front().objective_history;
        if (problems.size() > 1) {
            double pooled = 0.0;
            for (std::size_t i = 0; i < problems.size(); ++i) {
                const double rms = shared.results[i].rms_residual;
                pooled += rms * rms * static_cast<double>(residual_count(problems[i]));
            }
            shared.pooled_history = {pooled};
        }
        return shared;
    }

    // Alternating minimization state: a full layout vector per problem, all
    // agreeing on the shared slots (seeded from the first problem's initial).
    std::vector<SlotMap> maps;
    std::vector<std::vector<std::size_t>> local_slots(problems.size());
    std::vector<Objective> objectives;
    maps.reserve(problems.size());
    for (std::size_t i = 0; i < problems.size(); ++i) {
        maps.push_back(make_slot_map(problems[i], problems[i].free_mask));
        for (std::size_t slot : maps[i].free_slots)
            if (!shared_mask[slot]) local_slots[i].push_back(slot);
    }
    std::vector<double> shared_values = gather(pack(problems.front().initial), shared_slots);

    // Objectives bind to maps[i].full; write shared/local values there before use.
    objectives.reserve(problems.size());
    for (std::size_t i = 0; i < problems.size(); ++i)
        objectives.push_back(make_objective(problems[i], maps[i]));
    auto apply_shared = [&](const std::vector<double>& values) {
        for (std::size_t i = 0; i < problems.size(); ++i)
            for (std::size_t s = 0; s < shared_slots.size(); ++s)
                maps[i].full[shared_slots[s]] = values[s];
    };

    const std::vector<Interval> shared_box = gather(problems.front().bounds, shared_slots);
    std::uint64_t inner_counter = 0;
    auto next_seed = [&] { return seed + 0x9e3779b97f4a7c15ULL * ++inner_counter; };

    SharedFitResult shared;
    shared.results.resize(problems.size());
    for (std::size_t i = 0; i < problems.size(); ++i)
        shared.results[i] = finish_result(problems[i], maps[i],
                                          {gather(maps[i].full, maps[i].free_slots),
                                           objectives[i](gather(maps[i].full, maps[i].free_slots)),
                                           0, false, {}});

    double prev_pooled = std::numeric_limits<double>::infinity();
    constexpr int kOuterRounds = 10;
    constexpr double kOuterRelTol = 1e-9;

    for (int round = 0; round < kOuterRounds; ++round) {
        NmOptions opt;
        opt.restarts = round == 0 ? kRestarts : 1;

        // Phase 1: shared slots against the pooled residual, locals fixed.
        Objective pooled_objective = [&](const std::vector<double>& x) {
            apply_shared(x);
            double total = 0.0;
            for (std::size_t i = 0; i < problems.size(); ++i) {
                std::vector<double> xi = gather(maps[i].full, maps[i].free_slots);
                total += objectives[i](xi);
            }
            return total;
        };
        opt.seed = next_seed();
        const NmOutcome shared_outcome =
            nelder_mead(pooled_objective, shared_values, shared_box, opt);
        shared_values = shared_outcome.x;
        apply_shared(shared_values);

        // Phase 2: each problem's remaining free slots, shared fixed.
        double pooled = 0.0;
        for (std::size_t i = 0; i < problems.size(); ++i) {
            if (local_slots[i].empty()) {
                const std::vector<double> xi = gather(maps[i].full, maps[i].free_slots);
                const double fi = objectives[i](xi);
                shared.results[i] = finish_result(problems[i], maps[i],
                                                  {xi, fi, shared.results[i].iterations, true,
                                                   shared.results[i].objective_history});
                pooled += fi;
                continue;
            }
            Objective local_objective = [&, i](const std::vector<double>& x) {
                for (std::size_t s = 0; s < local_slots[i].size(); ++s)
                    maps[i].full[local_slots[i][s]] = x[s];
                return objectives[i](gather(maps[i].full, maps[i].free_slots));
            };
            opt.seed = next_seed();
            const NmOutcome local_outcome = nelder_mead(
                local_objective, gather(maps[i].full, local_slots[i]),
                gather(problems[i].bounds, local_slots[i]), opt);
            for (std::size_t s = 0; s < local_slots[i].size(); ++s)
                maps[i].full[local_slots[i][s]] = local_outcome.x[s];

            const std::size_t prior_iterations = shared.results[i].iterations;
            shared.results[i] = finish_result(
                problems[i], maps[i],
                {gather(maps[i].full, maps[i].free_slots), local_outcome.f,
                 prior_iterations + local_outcome.iterations + shared_outcome.iterations,
                 local_outcome.converged, local_outcome.history});
            pooled += local_outcome.f;
        }

        shared.pooled_history.push_back(pooled);
        if (pooled == 0.0 ||
            (std::isfinite(prev_pooled) &&
             prev_pooled - pooled <= kOuterRelTol * std::max(prev_pooled, kObjectiveFloor))) {
            shared.converged = true;
            break;
        }
        prev_pooled = pooled;
    }

    shared.shared_values = shared_values;
    return shared;
}

}  // namespace modecoupler::fit

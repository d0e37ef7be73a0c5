#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "modecoupler/types.hpp"

namespace modecoupler::fit {

// Flat parameter layout for an N-mode model (P = N(N-1)/2 off-diagonal pairs):
//   [0, N)          omega_j
//   [N, 2N)         beta_j
//   [2N, 3N)        alpha_j
//   [3N, 3N+P)      Re Delta_jk, pairs (j,k), j < k, in row-major order
//   [3N+P, 3N+2P)   Im Delta_jk, same pair order
std::size_t param_count(std::size_t n_modes);

// Canonical name of one layout slot, e.g. "omega1", "beta2", "alpha1",
// "delta_re_1_2", "delta_im_1_2" (mode indices are 1-based in names).
std::string param_name(std::size_t index, std::size_t n_modes);

// Index of a named parameter; accepts the canonical names above plus the
// two-mode shorthands "delta_re" / "delta_im".  Throws InvalidInputError on
// unknown names.
std::size_t param_index(const std::string& name, std::size_t n_modes);

std::vector<double> pack(const CouplingModel& model);
CouplingModel unpack(const std::vector<double>& params, std::size_t n_modes);

enum class Loss { COMPLEX_RESIDUAL, MAGNITUDE_RESIDUAL };

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

struct FitProblem {
    SpectrumGrid observed;
    std::vector<bool> free_mask;   // size param_count(N)
    std::vector<Interval> bounds;  // same size; enforced by projection
    CouplingModel initial;
    Loss loss = Loss::COMPLEX_RESIDUAL;
};

struct FitResult {
    CouplingModel model;
    double rms_residual = 0.0;
    std::size_t iterations = 0;  // simplex iterations summed over restarts
    bool converged = false;
    std::vector<double> objective_history;  // objective after each accepted improvement
};

// Throws on violated invariants: non-empty observed spectrum, mask/bounds of
// layout size, at least one free parameter, finite bounds with lo <= hi,
// beta/alpha lower bounds >= 0, and the initial model inside its bounds.
void validate(const FitProblem& problem);

// Heuristic starting model from the spectrum's dip structure: omega_j from the
// n_modes deepest dips (fallback: evenly spaced over the grid), alpha_j+beta_j
// from each dip's FWHM/2 split evenly between alpha and beta (fallback: 1% of
// the grid span), and for two modes Delta = half the dip separation when the
// dips are closer than 10x their mean width, else 0.
CouplingModel initial_guess(const SpectrumGrid& spectrum, std::size_t n_modes);

// Bounded Nelder-Mead over the free parameters (projection onto the bounds
// box), restarted up to 3 times (the first from the given initial, later ones
// jittered); the best point across restarts wins, with strictly-better
// comparison so earlier restarts keep ties.  A restart stops when the simplex
// objective spread falls below 1e-12 relative (converged = true) or after
// 5000 objective evaluations (converged = false); an exactly-zero objective
// ends the whole search, since a sum of squares cannot improve on it.
// Deterministic for a fixed seed.
FitResult fit_spectrum(const FitProblem& problem, std::uint64_t seed = 12345);

struct SharedFitResult {
    std::vector<FitResult> results;      // one per problem, sharing the common values
    std::vector<double> shared_values;   // fitted values of shared slots, layout order
    std::vector<double> pooled_history;  // pooled objective after each outer round
    bool converged = false;
};

// Alternating minimization for problems that share a parameter subset (e.g.
// beta's and Delta across sweep columns): fit the shared slots against the
// pooled residual with locals fixed, then each problem's remaining free slots
// with the shared slots fixed; 10 outer rounds or pooled relative improvement
// below 1e-9.  shared_mask must select a subset of every problem's free mask,
// and all problems must agree on N and on the bounds of shared slots.
SharedFitResult fit_sweep(const std::vector<FitProblem>& problems,
                          const std::vector<bool>& shared_mask, std::uint64_t seed = 12345);

}  // namespace modecoupler::fit

#pragma once

// Canonical models used across the test suites.

#include <complex>

#include "modecoupler/types.hpp"
#include "support/oracles.hpp"

namespace fixtures {

using modecoupler::Complex;
using modecoupler::CouplingModel;
using modecoupler::ModeParams;

// Case-1 pair at the crossing: purely dissipative coupling (Delta = 0).
inline CouplingModel case1_center(double alpha1 = 0.0, double alpha2 = 0.0) {
    return modecoupler::two_mode_model({6.75, 0.076, alpha1}, {6.75, 0.048, alpha2},
                                       Complex{0.0, 0.0});
}

// Case-2 pair at the crossing: mixed coupling (Delta = 0.12).
inline CouplingModel case2_center(double alpha1 = 0.0, double alpha2 = 0.0) {
    return modecoupler::two_mode_model({6.65, 0.0227, alpha1}, {6.65, 0.0057, alpha2},
                                       Complex{0.12, 0.0});
}

// Case-2 dampings with the varying mode detuned to g (GHz offset from 6.65).
inline CouplingModel case2_detuned(double omega1, double alpha1 = 0.0, double alpha2 = 0.0) {
    return modecoupler::two_mode_model({omega1, 0.0227, alpha1}, {6.65, 0.0057, alpha2},
                                       Complex{0.12, 0.0});
}

// Single notch resonator: S21(omega0) = (alpha - beta) / (alpha + beta).
inline CouplingModel single_notch(double omega0 = 6.75, double beta = 0.048,
                                  double alpha = 0.01) {
    CouplingModel model;
    model.modes.push_back({omega0, beta, alpha});
    model.direct_coupling = modecoupler::CMatrix(1, 1);
    return model;
}

inline CouplingModel from_orbit(const oracles::OrbitModel& p, double alpha1, double alpha2) {
    return modecoupler::two_mode_model({p.omega1, p.beta1, alpha1}, {p.omega2, p.beta2, alpha2},
                                       Complex{p.delta, 0.0});
}

}  // namespace fixtures

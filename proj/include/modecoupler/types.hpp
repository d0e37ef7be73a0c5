#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "modecoupler/errors.hpp"

namespace modecoupler {

using Complex = std::complex<double>;

// Dense row-major complex matrix.  Systems here never exceed 8x8, so no
// attempt is made at blocking or views.
class CMatrix {
public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols, Complex fill = Complex{0.0, 0.0})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static CMatrix identity(std::size_t n) {
        CMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = Complex{1.0, 0.0};
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

// One resonator mode.  All rates are cyclic frequencies in GHz (omega/2pi);
// no 2pi factors appear anywhere in the library.
struct ModeParams {
    double omega = 0.0;      // resonance frequency, GHz
    double beta_ext = 0.0;   // radiative damping into the shared channel, GHz
    double alpha_int = 0.0;  // intrinsic (non-radiative) damping, GHz
};

// N coupled modes plus the direct coupling matrix Delta_jk = J_jk + i*Gamma_jk
// (symmetric, zero diagonal).  The channel-mediated term -i*sqrt(beta_j beta_k)
// is *not* stored here; it is added when the effective Hamiltonian is built.
struct CouplingModel {
    std::vector<ModeParams> modes;
    CMatrix direct_coupling;  // N x N, GHz

    std::size_t size() const noexcept { return modes.size(); }
};

// One complex eigenvalue branch; im < 0 means a decaying mode.
struct ComplexFrequency {
    double re = 0.0;  // GHz
    double im = 0.0;  // GHz (half-linewidth with sign)
};

// Sampled transmission: strictly increasing frequencies with matching S21.
struct SpectrumGrid {
    std::vector<double> freqs;  // GHz
    std::vector<Complex> s21;   // dimensionless
};

// Throws InvalidModelError if the model violates its invariants: finite
// parameters, omega > 0, beta/alpha >= 0, and a symmetric zero-diagonal
// square coupling matrix of matching size.  An empty mode list is allowed
// and describes the bare transmission line (S21 identically 1).
void validate(const CouplingModel& model);

// Throws InvalidInputError on length mismatch, non-finite values, or
// non-strictly-increasing frequencies.
void validate(const SpectrumGrid& grid);

// True when alpha, beta >= 0 and every Im(Delta_jk) == 0; the passive-system
// eigenvalue bounds (Im lambda <= 0) are guaranteed only in this regime.
bool is_passive(const CouplingModel& model);

// Convenience constructor for the ubiquitous two-mode system.
CouplingModel two_mode_model(const ModeParams& m1, const ModeParams& m2, Complex delta);

// n evenly spaced values from a to b inclusive (n >= 2), or {a} when n == 1.
std::vector<double> linspace(double a, double b, std::size_t n);

}  // namespace modecoupler

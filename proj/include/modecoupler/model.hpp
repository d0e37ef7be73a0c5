#pragma once

#include <vector>

#include "modecoupler/types.hpp"

namespace modecoupler {

// Effective non-Hermitian Hamiltonian:
//   H_jj = omega_j - i(alpha_j + beta_j)
//   H_jk = Delta_jk - i*sqrt(beta_j beta_k)   (j != k)
// With all alpha = 0 and N = 2 this is exactly the two-mode coupling matrix.
CMatrix build_effective_hamiltonian(const CouplingModel& model);

// Eigenvalue branches of the effective Hamiltonian, sorted by real part
// ascending with ties broken by imaginary part ascending.  N = 2 uses the
// closed-form quadratic; 3 <= N <= 8 goes through the characteristic
// polynomial and Aberth-Ehrlich iteration.  N > 8 is rejected.
std::vector<ComplexFrequency> eigenvalues(const CouplingModel& model);

// Transmission S21(omega) = 1 - 2i v^T (omega*I - H)^{-1} v with v_j = sqrt(beta_j),
// i.e. P_out / P_in of the shared channel.  Models with every beta = 0 return
// exactly 1 (the bilinear form vanishes identically).  Throws
// SingularResponseError when (omega*I - H) is numerically singular, which can
// happen only at a real eigenvalue of a lossless subsystem.
Complex s21(const CouplingModel& model, double omega);

// Same quantity through the Sherman-Morrison identity: H = H_nr - i v v^T with
// H_nr the model without radiative loss, so S21 = (1 - i g) / (1 + i g) where
// g = v^T (omega*I - H_nr)^{-1} v.  With all alpha = 0 and real Delta, g is
// real and |S21| = 1 identically (the all-pass identity).
Complex s21_rank_one(const CouplingModel& model, double omega);

// Element-wise s21 over a strictly increasing grid.  Errors from individual
// evaluations are rethrown tagged with the offending sample index.
SpectrumGrid s21_spectrum(const CouplingModel& model, const std::vector<double>& freqs);

}  // namespace modecoupler

#include "modecoupler/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

namespace modecoupler::linalg {

namespace {

// |z| without the overflow care of std::abs; fine at the magnitudes used here
// and noticeably cheaper inside pivot searches.
double mag2(Complex z) { return z.real() * z.real() + z.imag() * z.imag(); }

// In-place LU with partial pivoting.  Returns the permutation sign, or 0 when
// a pivot falls below the singularity threshold (relative to the largest
// input entry).
int lu_factor(CMatrix& a, std::vector<std::size_t>& perm) {
    const std::size_t n = a.rows();
    perm.resize(n);
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(a(i, j)));
    const double tiny = 1e-14 * (scale > 0.0 ? scale : 1.0);

    int sign = 1;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        double best = mag2(a(col, col));
        for (std::size_t r = col + 1; r < n; ++r) {
            const double m = mag2(a(r, col));
            if (m > best) {
                best = m;
                pivot = r;
            }
        }
        if (std::sqrt(best) <= tiny) return 0;
        if (pivot != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(pivot, j), a(col, j));
            sign = -sign;
        }
        perm[col] = pivot;
        for (std::size_t r = col + 1; r < n; ++r) {
            const Complex f = a(r, col) / a(col, col);
            a(r, col) = f;
            for (std::size_t j = col + 1; j < n; ++j) a(r, j) -= f * a(col, j);
        }
    }
    return sign;
}

}  // namespace

std::vector<Complex> lu_solve(CMatrix a, std::vector<Complex> b) {
    const std::size_t n = a.rows();
    if (a.cols() != n || b.size() != n)
        throw InvalidInputError("lu_solve requires a square matrix and a matching vector");
    if (n == 0) return b;

    std::vector<std::size_t> perm;
    if (lu_factor(a, perm) == 0)
        throw NumericalError("matrix is numerically singular");

    // The stored multipliers have every later row swap already applied, so all
    // interchanges must hit b before the forward elimination, not interleaved.
    for (std::size_t col = 0; col < n; ++col) std::swap(b[col], b[perm[col]]);
    for (std::size_t col = 0; col < n; ++col)
        for (std::size_t r = col + 1; r < n; ++r) b[r] -= a(r, col) * b[col];
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t j = i + 1; j < n; ++j) b[i] -= a(i, j) * b[j];
        b[i] /= a(i, i);
    }
    return b;
}

Complex determinant(CMatrix a) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw InvalidInputError("determinant requires a square matrix");
    if (n == 0) return Complex{1.0, 0.0};

    std::vector<std::size_t> perm;
    const int sign = lu_factor(a, perm);
    if (sign == 0) return Complex{0.0, 0.0};
    Complex det{static_cast<double>(sign), 0.0};
    for (std::size_t i = 0; i < n; ++i) det *= a(i, i);
    return det;
}

std::vector<Complex> characteristic_polynomial(const CMatrix& a) {
    const std::size_t n = a.rows();
    if (a.cols() != n)
        throw InvalidInputError("characteristic polynomial requires a square matrix");

    // Faddeev-LeVerrier: M_1 = A, c_k = -tr(A M_k)/k, M_{k+1} = A M_k + c_k I.
    std::vector<Complex> coeffs(n + 1);
    coeffs[0] = Complex{1.0, 0.0};
    CMatrix m = CMatrix::identity(n);
    for (std::size_t k = 1; k <= n; ++k) {
        CMatrix am(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                Complex acc{0.0, 0.0};
                for (std::size_t l = 0; l < n; ++l) acc += a(i, l) * m(l, j);
                am(i, j) = acc;
            }
        Complex trace{0.0, 0.0};
        for (std::size_t i = 0; i < n; ++i) trace += am(i, i);
        coeffs[k] = -trace / static_cast<double>(k);
        for (std::size_t i = 0; i < n; ++i) am(i, i) += coeffs[k];
        m = am;
    }
    return coeffs;
}

Complex polynomial_eval(const std::vector<Complex>& coeffs, Complex z) {
    Complex acc{0.0, 0.0};
    for (const Complex& c : coeffs) acc = acc * z + c;
    return acc;
}

std::vector<Complex> polynomial_roots(const std::vector<Complex>& coeffs, double tol,
                                      int max_iter) {
    if (coeffs.empty() || coeffs[0] == Complex{0.0, 0.0})
        throw InvalidInputError("polynomial_roots requires a non-zero leading coefficient");
    const std::size_t deg = coeffs.size() - 1;
    if (deg == 0) return {};

    std::vector<Complex> p(coeffs.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i) p[i] = coeffs[i] / coeffs[0];

    // Roots clustered far from the origin are ill-conditioned in the raw
    // monomial basis (evaluation noise grows like sum |p_i| |z|^(n-i)), so
    // solve q(u) = p(center + scale*u) instead: depress by the root centroid
    // via repeated synthetic division, then scale the radius to order one.
    const Complex center = -p[1] / static_cast<double>(deg);
    for (std::size_t stop = deg; stop > 0; --stop)
        for (std::size_t j = 1; j <= stop; ++j) p[j] += center * p[j - 1];
    double scale = 0.0;
    for (std::size_t k = 1; k <= deg; ++k)
        scale = std::max(scale, std::pow(std::abs(p[k]), 1.0 / static_cast<double>(k)));
    if (scale == 0.0) return std::vector<Complex>(deg, center);  // p = (z - center)^n
    double sk = 1.0;
    for (std::size_t k = 1; k <= deg; ++k) {
        sk *= scale;
        p[k] /= sk;
    }

    std::vector<Complex> dp(deg);
    for (std::size_t i = 0; i < deg; ++i) dp[i] = p[i] * static_cast<double>(deg - i);

    // Initial guesses on a circle of the (now order-one) Cauchy bound, with an
    // angular offset that avoids symmetric stalls.
    double bound = 0.0;
    for (std::size_t i = 1; i <= deg; ++i) bound = std::max(bound, std::abs(p[i]));
    const double radius = 1.0 + bound;
    std::vector<Complex> z(deg);
    for (std::size_t k = 0; k < deg; ++k) {
        const double angle =
            2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(deg) + 0.376;
        z[k] = radius * Complex{std::cos(angle), std::sin(angle)};
    }

    // Scale of the evaluation error of p at |z|: sum |p_i| |z|^(deg-i).
    auto eval_noise = [&](double zmag) {
        double acc = 0.0;
        for (const Complex& c : p) acc = acc * zmag + std::abs(c);
        return acc * std::numeric_limits<double>::epsilon() * static_cast<double>(2 * deg);
    };

    for (int iter = 0; iter < max_iter; ++iter) {
        bool all_small = true;
        for (std::size_t k = 0; k < deg; ++k) {
            const Complex pv = polynomial_eval(p, z[k]);
            if (std::abs(pv) <= eval_noise(std::abs(z[k]))) continue;  // at noise floor

            Complex dv = polynomial_eval(dp, z[k]);
            if (dv == Complex{0.0, 0.0}) dv = Complex{tol, tol};  // nudge off a stationary point
            const Complex newton = pv / dv;
            Complex repulse{0.0, 0.0};
            for (std::size_t j = 0; j < deg; ++j)
                if (j != k) repulse += Complex{1.0, 0.0} / (z[k] - z[j]);
            const Complex denom = Complex{1.0, 0.0} - newton * repulse;
            const Complex step =
                denom == Complex{0.0, 0.0} ? newton : newton / denom;  // Aberth correction
            z[k] -= step;
            if (std::abs(step) > tol * std::max(1.0, std::abs(z[k]))) all_small = false;
        }
        if (all_small) {
            for (Complex& u : z) u = center + scale * u;  // undo the substitution
            return z;
        }
    }

    double worst = 0.0;
    for (std::size_t k = 0; k < deg; ++k) worst = std::max(worst, std::abs(polynomial_eval(p, z[k])));
    throw NumericalError("polynomial root iteration did not converge after " +
                             std::to_string(max_iter) + " iterations",
                         worst);
}

}  // namespace modecoupler::linalg

#pragma once

#include <cmath>
#include <complex>

#include "nhpc/errors.hpp"

// Complex special functions underlying the non-Hermitian Fermi-Dirac
// distribution.  Everything here is self-contained (series/recurrence);
// accuracy is checked against an independent high-precision oracle in the
// test suite.
//
// Branch convention: dissipative spectra live in the closed lower half-plane,
// and all logarithms of eigenvalues take arg in [-pi, 0].  Real negative
// arguments map to arg = -pi (approach from below the cut).

namespace nhpc {

using Complex = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846264338327950288;

// Euler-Mascheroni constant, 20 digits.
inline constexpr double euler_gamma = 0.57721566490153286061;

// Default tolerance for clamping small positive imaginary parts produced by
// numerical eigensolvers; anything larger violates passivity.
inline constexpr double passivity_tol = 1e-9;

// Maps Im(z) in (0, tol] onto the lower edge of the real axis (signed -0.0),
// so downstream principal-branch logs land on arg in [-pi, 0].
inline Complex clamp_passive(Complex z, double tol_im = passivity_tol) {
    if (z.imag() > tol_im) {
        throw PassivityError("Im(z) = " + std::to_string(z.imag()) +
                             " exceeds passivity tolerance " + std::to_string(tol_im));
    }
    if (z.imag() >= 0.0) return Complex(z.real(), -0.0);
    return z;
}

// log on the branch arg in [-pi, 0]; valid for passive arguments only.
inline Complex log_lower(Complex z, double tol_im = passivity_tol) {
    z = clamp_passive(z, tol_im);
    if (std::abs(z) == 0.0) throw DomainError("log_lower at z = 0");
    // std::log is principal-valued; the signed zero from clamp_passive selects
    // the lower side of the cut, so arg(-1 - 0i) = -pi as required.
    return std::log(z);
}

namespace detail {

inline bool near_nonpositive_integer(Complex z, double tol = 1e-12) {
    if (z.real() > 0.5) return false;
    double r = std::round(z.real());
    return r <= 0.0 && std::abs(z.real() - r) < tol && std::abs(z.imag()) < tol;
}

// Lanczos approximation, g = 7, 9 coefficients.
inline Complex log_gamma_lanczos(Complex z) {
    static const double c[9] = {
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    };
    const Complex zm = z - 1.0;
    Complex a(c[0], 0.0);
    for (int i = 1; i < 9; ++i) a += c[i] / (zm + static_cast<double>(i));
    const Complex t = zm + 7.5;  // g + 1/2
    return 0.91893853320467274178 /* ln sqrt(2 pi) */
           + (zm + 0.5) * std::log(t) - t + std::log(a);
}

}  // namespace detail

// Principal log-gamma.  Direct Lanczos evaluation for Re z >= 1/2, reflection
// otherwise.  The reflection branch uses principal-valued log-sin and may
// differ from the analytically continued log-gamma by multiples of 2*pi*i for
// large |Im z|; production arguments always satisfy Re z >= 1/2.
inline Complex log_gamma(Complex z) {
    if (detail::near_nonpositive_integer(z)) {
        throw PoleError("log_gamma pole at nonpositive integer");
    }
    if (z.real() < 0.5) {
        const double log_pi = 1.1447298858494001741;
        return log_pi - std::log(std::sin(pi * z)) - log_gamma(1.0 - z);
    }
    return detail::log_gamma_lanczos(z);
}

// Digamma via recurrence shift to |z| >= 16 plus the asymptotic series.
inline Complex digamma(Complex z) {
    if (detail::near_nonpositive_integer(z)) {
        throw PoleError("digamma pole at nonpositive integer");
    }
    if (z.real() < 0.5) {
        return digamma(1.0 - z) - pi / std::tan(pi * z);
    }
    Complex acc(0.0, 0.0);
    while (std::abs(z) < 16.0) {
        acc -= 1.0 / z;
        z += 1.0;
    }
    // Psi(z) ~ ln z - 1/(2z) - sum_k B_{2k} / (2k z^{2k})
    static const double b2k_over_2k[7] = {
        1.0 / 12.0,    -1.0 / 120.0,    1.0 / 252.0, -1.0 / 240.0,
        1.0 / 132.0,   -691.0 / 32760.0, 1.0 / 12.0,
    };
    const Complex inv = 1.0 / z;
    const Complex inv2 = inv * inv;
    Complex s = std::log(z) - 0.5 * inv;
    Complex p = inv2;
    for (double coeff : b2k_over_2k) {
        s -= coeff * p;
        p *= inv2;
    }
    return acc + s;
}

// Zero-temperature NH Fermi-Dirac distribution f_eff(eps) = -(1/pi) ln eps.
// Its imaginary part reduces to the step function Theta(-eps) on the real
// axis (with Theta(0) = 1 on the lower branch).
inline Complex f_eff_zero(Complex eps, double tol_im = passivity_tol) {
    return -log_lower(eps, tol_im) / pi;
}

// Finite-temperature NH Fermi-Dirac distribution
//   f_eff(eps, beta) = -(1/pi) [ Psi(1/2 + i beta eps / 2 pi) - i pi / 2 ].
// Reduces to the conventional Fermi-Dirac function in Im(eps) -> 0 and to
// f_eff_zero (up to a real gauge constant) as beta -> infinity.
inline Complex f_eff_beta(Complex eps, double beta, double tol_im = passivity_tol) {
    if (!(beta > 0.0)) throw DomainError("f_eff_beta requires beta > 0");
    eps = clamp_passive(eps, tol_im);
    const Complex z = 0.5 + Complex(0.0, beta / (2.0 * pi)) * eps;
    return -(digamma(z) - Complex(0.0, pi / 2.0)) / pi;
}

// Conventional Fermi-Dirac occupation, overflow-safe.
inline double fermi_dirac(double eps, double beta) {
    const double x = beta * eps;
    if (x > 700.0) return 0.0;
    if (x < -700.0) return 1.0;
    return 1.0 / (std::exp(x) + 1.0);
}

// Zero-temperature occupation Theta(-eps) with the Theta(0) = 1 convention
// inherited from the lower-branch logarithm.
inline double fermi_weight_zero_t(double eps) { return eps <= 0.0 ? 1.0 : 0.0; }

}  // namespace nhpc

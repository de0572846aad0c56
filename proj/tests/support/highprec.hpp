#pragma once

#include <complex>

// Extended-precision (80-bit long double) reference implementations of
// log-gamma and digamma: recurrence shift to |z| >= 50 followed by the
// Stirling asymptotic series.  Used only as a test oracle; independent of the
// production Lanczos/short-series path.

namespace highprec {

using CL = std::complex<long double>;

inline constexpr long double pi_l = 3.14159265358979323846264338327950288L;

// Bernoulli numbers B_2 .. B_28.
inline constexpr long double bernoulli[] = {
    1.0L / 6.0L,
    -1.0L / 30.0L,
    1.0L / 42.0L,
    -1.0L / 30.0L,
    5.0L / 66.0L,
    -691.0L / 2730.0L,
    7.0L / 6.0L,
    -3617.0L / 510.0L,
    43867.0L / 798.0L,
    -174611.0L / 330.0L,
    854513.0L / 138.0L,
    -236364091.0L / 2730.0L,
    8553103.0L / 6.0L,
    -23749461029.0L / 870.0L,
};

inline CL log_gamma(CL z) {
    if (z.real() < 0.5L) {
        // reflection through principal-valued log-sin
        return std::log(pi_l / std::sin(pi_l * z)) - log_gamma(1.0L - z);
    }
    CL shift(0.0L, 0.0L);
    while (std::abs(z) < 50.0L) {
        shift -= std::log(z);
        z += 1.0L;
    }
    const CL inv = 1.0L / z;
    const CL inv2 = inv * inv;
    CL series(0.0L, 0.0L);
    CL p = inv;
    for (int k = 1; k <= 14; ++k) {
        series += bernoulli[k - 1] / (2.0L * k * (2.0L * k - 1.0L)) * p;
        p *= inv2;
    }
    const CL half_log_two_pi(0.91893853320467274178032973640561764L, 0.0L);
    return shift + (z - 0.5L) * std::log(z) - z + half_log_two_pi + series;
}

inline CL digamma(CL z) {
    if (z.real() < 0.5L) {
        return digamma(1.0L - z) - pi_l / std::tan(pi_l * z);
    }
    CL shift(0.0L, 0.0L);
    while (std::abs(z) < 50.0L) {
        shift -= 1.0L / z;
        z += 1.0L;
    }
    const CL inv = 1.0L / z;
    const CL inv2 = inv * inv;
    CL series = std::log(z) - 0.5L * inv;
    CL p = inv2;
    for (int k = 1; k <= 14; ++k) {
        series -= bernoulli[k - 1] / (2.0L * k) * p;
        p *= inv2;
    }
    return shift + series;
}

inline std::complex<double> to_double(CL v) {
    return {static_cast<double>(v.real()), static_cast<double>(v.imag())};
}

}  // namespace highprec

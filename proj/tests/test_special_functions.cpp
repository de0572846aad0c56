#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "nhpc/special_functions.hpp"
#include "support/highprec.hpp"

using namespace nhpc;
using Catch::Approx;

namespace {
double rel_err(Complex got, Complex ref) {
    return std::abs(got - ref) / std::abs(ref);
}
}  // namespace

TEST_CASE("log_lower branch convention", "[specfn]") {
    CHECK(log_lower({-1.0, 0.0}).real() == Approx(0.0).margin(1e-15));
    CHECK(log_lower({-1.0, 0.0}).imag() == Approx(-pi));
    CHECK(std::abs(log_lower({1.0, 0.0})) < 1e-15);
    CHECK(log_lower({0.0, -1.0}).imag() == Approx(-pi / 2.0));

    // small positive imaginary parts clamp onto the lower edge of the cut
    CHECK(log_lower({-2.0, 1e-10}).imag() == Approx(-pi));

    CHECK_THROWS_AS(log_lower({0.0, 0.0}), DomainError);
    CHECK_THROWS_AS(log_lower({1.0, 1e-3}), PassivityError);
}

TEST_CASE("log_gamma known values", "[specfn]") {
    CHECK(std::abs(log_gamma({1.0, 0.0})) < 1e-14);
    CHECK(std::abs(log_gamma({2.0, 0.0})) < 1e-13);
    CHECK(log_gamma({0.5, 0.0}).real() == Approx(0.57236494292470008707).epsilon(1e-14));

    // frozen oracle value for a genuinely complex argument
    const Complex ref(-0.652790644204372915273065071221, -0.955007724342569109563225128734);
    CHECK(rel_err(log_gamma({0.5, 1.0}), ref) < 1e-13);

    CHECK_THROWS_AS(log_gamma({0.0, 0.0}), PoleError);
    CHECK_THROWS_AS(log_gamma({-3.0, 0.0}), PoleError);
}

TEST_CASE("log_gamma against the extended-precision oracle", "[specfn]") {
    double worst = 0.0;
    for (double re = 0.5; re <= 5.05; re += 0.8) {
        for (double im = -5.0; im <= 5.05; im += 1.2) {
            const Complex z(re, im);
            const Complex ref = highprec::to_double(
                highprec::log_gamma({static_cast<long double>(re), static_cast<long double>(im)}));
            worst = std::max(worst, rel_err(log_gamma(z), ref));
        }
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("log_gamma recurrence identity", "[specfn]") {
    double worst = 0.0;
    for (double re = 0.5; re <= 5.05; re += 0.9) {
        for (double im = -5.0; im <= 5.05; im += 1.1) {
            const Complex z(re, im);
            const Complex lhs = std::exp(log_gamma(z + 1.0));
            const Complex rhs = z * std::exp(log_gamma(z));
            worst = std::max(worst, std::abs(lhs - rhs) / std::abs(lhs));
        }
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("digamma known values and reflection", "[specfn]") {
    CHECK(digamma({1.0, 0.0}).real() == Approx(-euler_gamma).epsilon(1e-14));
    CHECK(std::abs(digamma({1.0, 0.0}).imag()) < 1e-15);
    CHECK(digamma({0.5, 0.0}).real() ==
          Approx(-euler_gamma - 2.0 * std::log(2.0)).epsilon(1e-14));

    const Complex z(0.5, 0.7);
    const Complex residual = digamma(1.0 - z) - digamma(z) - pi / std::tan(pi * z);
    CHECK(std::abs(residual) < 1e-10);

    CHECK_THROWS_AS(digamma({0.0, 0.0}), PoleError);
    CHECK_THROWS_AS(digamma({-7.0, 0.0}), PoleError);
}

TEST_CASE("digamma against the extended-precision oracle", "[specfn]") {
    double worst = 0.0;
    for (double re = 0.5; re <= 5.05; re += 0.8) {
        for (double im = -5.0; im <= 5.05; im += 1.2) {
            const Complex ref = highprec::to_double(
                highprec::digamma({static_cast<long double>(re), static_cast<long double>(im)}));
            worst = std::max(worst, rel_err(digamma({re, im}), ref));
        }
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("digamma matches the log_gamma derivative", "[specfn]") {
    const double h = 1e-5;
    double worst = 0.0;
    for (double re = 0.5; re <= 5.05; re += 0.9) {
        for (double im = -5.0; im <= 5.05; im += 1.3) {
            const Complex z(re, im);
            const Complex fd = (log_gamma(z + h) - log_gamma(z - h)) / (2.0 * h);
            worst = std::max(worst, std::abs(fd - digamma(z)));
        }
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("zero-temperature distribution", "[specfn]") {
    CHECK(f_eff_zero({-1.0, 0.0}).real() == Approx(0.0).margin(1e-15));
    CHECK(f_eff_zero({-1.0, 0.0}).imag() == Approx(1.0));
    CHECK(std::abs(f_eff_zero({1.0, 0.0})) < 1e-15);
    CHECK(f_eff_zero({0.0, -1.0}).imag() == Approx(0.5));

    // Im f_eff on the real axis is the occupation step
    for (double e = -3.0; e <= 3.0; e += 0.37) {
        if (std::abs(e) < 1e-12) continue;
        CHECK(f_eff_zero({e, 0.0}).imag() == Approx(e < 0.0 ? 1.0 : 0.0).margin(1e-15));
    }
}

TEST_CASE("finite-temperature distribution", "[specfn]") {
    CHECK(f_eff_beta({0.0, 0.0}, 7.3).imag() == Approx(0.5).epsilon(1e-14));

    // reduces to the conventional Fermi-Dirac function on the real axis
    CHECK(f_eff_beta({0.3, -1e-12}, 40.0).imag() ==
          Approx(6.14417460221471783e-6).margin(1e-6));
    for (double e : {-0.8, -0.1, 0.2, 1.5}) {
        CHECK(f_eff_beta({e, -1e-10}, 3.7).imag() == Approx(fermi_dirac(e, 3.7)).margin(1e-8));
    }

    // beta -> infinity: zero-T limit up to a real gauge constant
    const Complex e1(-0.5, -0.2), e2(0.4, -0.35);
    const Complex d1 = f_eff_beta(e1, 1e4) - f_eff_zero(e1);
    const Complex d2 = f_eff_beta(e2, 1e4) - f_eff_zero(e2);
    CHECK(std::abs(d1.imag()) < 1e-6);
    CHECK(std::abs(d2.imag()) < 1e-6);
    CHECK(d1.real() == Approx(d2.real()).margin(1e-5));  // constant shift

    CHECK_THROWS_AS(f_eff_beta({0.1, 0.0}, -1.0), DomainError);
}

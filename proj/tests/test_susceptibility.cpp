#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "nhpc/susceptibility.hpp"
#include "support/fixtures.hpp"

using namespace nhpc;
using Catch::Approx;

namespace {

// Density-of-states matrix element from the biorthogonal resolvent.
Matrix rho_of(const BiorthogonalSpectrum& spec, double w) {
    const int n = spec.size();
    Matrix g = Matrix::Zero(n, n);
    for (int k = 0; k < n; ++k)
        g += spec.right.col(k) * spec.left.col(k).adjoint() / (w - spec.eigenvalues(k));
    return Complex(0.0, 1.0) / (2.0 * pi) * (g - g.adjoint());
}

// Simpson quadrature of the defining occupied-sector integral.
Complex p_integral_quadrature(const BiorthogonalSpectrum& spec, int i, int j, int k, int l,
                              double omega, double lo = -60.0, double h = 1e-3) {
    const int nstep = static_cast<int>(-lo / h);
    Complex acc(0.0, 0.0);
    for (int s = 0; s <= nstep; ++s) {
        const double w = lo + s * h;
        const double coef = (s == 0 || s == nstep) ? 1.0 : (s % 2 ? 4.0 : 2.0);
        acc += coef * rho_of(spec, w)(i, j) * rho_of(spec, w + omega)(k, l);
    }
    return acc * h / 3.0;
}

BiorthogonalSpectrum ring_spectrum(double phi) {
    ModelSpec m = fixtures::disordered_ring();
    m.phase = phi;
    return biorthogonal_eig(effective_hamiltonian(m, fixtures::ring_reservoirs()));
}

}  // namespace

TEST_CASE("p_integral matches brute-force quadrature", "[susceptibility]") {
    const BiorthogonalSpectrum spec = ring_spectrum(2.0);
    for (double omega : {0.35, 0.7}) {
        const Complex oracle = p_integral_quadrature(spec, 1, 0, 1, 0, omega);
        const Complex got = p_integral(spec, 1, 0, 1, 0, omega);
        CHECK(std::abs(got - oracle) < 1e-4);
    }
    const Complex cross = p_integral(spec, 0, 0, 1, 1, 0.5);
    CHECK(std::abs(cross - p_integral_quadrature(spec, 0, 0, 1, 1, 0.5)) < 1e-4);
}

TEST_CASE("p_integral index-swap conjugation", "[susceptibility]") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 3; ++trial) {
        const BiorthogonalSpectrum spec =
            biorthogonal_eig(fixtures::random_passive(6, rng), 1);
        for (double omega : {0.0, 0.8, -1.3}) {
            for (int i = 0; i < 3; ++i) {
                const Complex a = p_integral(spec, i, 2, 1, i, omega);
                const Complex b = p_integral(spec, 2, i, i, 1, omega);
                CHECK(std::abs(b - std::conj(a)) < 1e-10);
            }
        }
    }
}

TEST_CASE("p_integral guards", "[susceptibility]") {
    const BiorthogonalSpectrum spec = ring_spectrum(1.1);
    CHECK_THROWS_AS(p_integral(spec, 0, 0, 0, 99, 0.5), SpecError);
    // degenerate denominators (n = m at omega = 0) take the analytic limit
    CHECK(std::isfinite(p_integral(spec, 1, 0, 1, 0, 0.0).real()));
}

TEST_CASE("NH susceptibility is odd in frequency", "[susceptibility]") {
    const ModelSpec ring = fixtures::disordered_ring();
    for (double phi : {0.9, 2.7}) {
        ModelSpec m = ring;
        m.phase = phi;
        const BiorthogonalSpectrum spec = ring_spectrum(phi);
        CHECK(std::abs(im_susceptibility_nh(spec, m, 0.0)) < 1e-10);
        for (double w : {0.4, 1.1, 2.3}) {
            CHECK(im_susceptibility_nh(spec, m, -w) ==
                  Approx(-im_susceptibility_nh(spec, m, w)).margin(1e-8));
        }
    }
}

TEST_CASE("NH susceptibility peaks at level transitions", "[susceptibility]") {
    // weak coupling: sharp modes, peaks sit on Re-level differences
    const ModelSpec ring = fixtures::disordered_ring();
    const double phi = 2.0;
    ModelSpec m = ring;
    m.phase = phi;
    const BiorthogonalSpectrum spec = biorthogonal_eig(
        effective_hamiltonian(m, fixtures::ring_reservoirs(-0.25)));

    std::vector<double> occupied, empty;
    for (int k = 0; k < spec.size(); ++k) {
        const double e = spec.eigenvalues(k).real();
        (e <= 0.0 ? occupied : empty).push_back(e);
    }
    double best_w = 0.0, best_v = 0.0;
    for (double w = 0.05; w <= 3.0; w += 0.005) {
        const double v = std::abs(im_susceptibility_nh(spec, m, w));
        if (v > best_v) { best_v = v; best_w = w; }
    }
    // the dominant peak lands on one of the occupied -> empty transitions
    double best_match = 1e9;
    for (double eo : occupied)
        for (double ee : empty) best_match = std::min(best_match, std::abs(best_w - (ee - eo)));
    CHECK(best_match < 0.1);
}

TEST_CASE("bond restrictions", "[susceptibility]") {
    const ModelSpec ring = fixtures::disordered_ring();
    const BiorthogonalSpectrum spec = ring_spectrum(1.0);
    ModelSpec m = ring;
    m.phase = 1.0;
    CHECK_THROWS_AS(im_susceptibility_nh(spec, m, 0.5, 6), SpecError);  // flux bond
    CHECK(std::isfinite(im_susceptibility_nh(spec, m, 0.5, 3)));
}

TEST_CASE("exact two-level toy produces one Lorentzian peak", "[susceptibility]") {
    // single occupied and single empty level coupled across the bond
    RealVector eps(2);
    eps << -0.6, 0.9;
    Matrix modes(2, 2);
    modes << Complex(0.8, 0.0), Complex(-0.6, 0.0), Complex(0.6, 0.0), Complex(0.8, 0.0);
    RealVector occ(2);
    occ << 1.0, 0.0;
    const double eta = 0.04, t_bond = -1.0;

    const Vector u0 = modes.row(0).transpose();
    const Vector u1 = modes.row(1).transpose();
    std::vector<double> omegas;
    for (double w = 0.2; w <= 2.6; w += 0.005) omegas.push_back(w);
    const auto row = susceptibility_exact_core(eps, u0, u1, Vector::Zero(2), Vector::Zero(2),
                                               occ, t_bond, omegas, eta);

    // peak at the level difference
    std::size_t arg = 0;
    for (std::size_t w = 0; w < row.size(); ++w)
        if (std::abs(row[w]) > std::abs(row[arg])) arg = w;
    CHECK(omegas[arg] == Approx(1.5).margin(0.01));

    // Lorentzian peak height is weight / eta, so doubling eta halves it
    const Complex a01 = Complex(0.0, 1.0) *
                        (std::conj(u0(0)) * u1(1) - std::conj(u1(0)) * u0(1));
    const double expected_peak = std::norm(a01) * t_bond * t_bond / eta;
    CHECK(std::abs(row[arg]) == Approx(expected_peak).epsilon(0.02));

    const auto row2 = susceptibility_exact_core(eps, u0, u1, Vector::Zero(2), Vector::Zero(2),
                                                occ, t_bond, omegas, 2.0 * eta);
    CHECK(std::abs(row2[arg]) == Approx(std::abs(row[arg]) / 2.0).epsilon(0.01));
}

TEST_CASE("doubling eta keeps the integrated weight", "[susceptibility]") {
    const ModelSpec ring = fixtures::disordered_ring();
    auto res = fixtures::ring_reservoirs(-0.4, 41);
    std::vector<double> omegas;
    const double h = 0.002;
    for (double w = 0.01; w <= 3.5; w += h) omegas.push_back(w);
    const auto r1 = susceptibility_exact_row(ring, res, 1.2, omegas, 0.03);
    const auto r2 = susceptibility_exact_row(ring, res, 1.2, omegas, 0.06);

    double w1 = 0.0, w2 = 0.0;
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        w1 += r1[i] * h;
        w2 += r2[i] * h;
    }
    CHECK(w2 == Approx(w1).epsilon(0.02));
}

TEST_CASE("exact map is odd for the BdG junction", "[susceptibility]") {
    const ModelSpec sns = fixtures::sns_junction();
    auto res = fixtures::sns_reservoirs(-0.4, 31);
    std::vector<double> omegas = {-1.4, -0.7, -0.2, 0.2, 0.7, 1.4};
    const auto row = susceptibility_exact_row(sns, res, 1.9, omegas, 0.03);
    CHECK(row[0] == Approx(-row[5]).margin(1e-8));
    CHECK(row[1] == Approx(-row[4]).margin(1e-8));
    CHECK(row[2] == Approx(-row[3]).margin(1e-8));
}

TEST_CASE("NH and exact peak positions line up", "[susceptibility][cross]") {
    const ModelSpec ring = fixtures::disordered_ring();
    auto res = fixtures::ring_reservoirs();
    const double phi = 2.0;
    ModelSpec m = ring;
    m.phase = phi;
    const BiorthogonalSpectrum spec = ring_spectrum(phi);

    std::vector<double> omegas;
    const double dw = 0.02;
    for (double w = dw; w <= 2.0; w += dw) omegas.push_back(w);
    const auto ex = susceptibility_exact_row(ring, res, phi, omegas, 0.03);
    std::vector<double> nh(omegas.size());
    for (std::size_t w = 0; w < omegas.size(); ++w)
        nh[w] = im_susceptibility_nh(spec, m, omegas[w]);

    // strongest peak of each map
    std::size_t an = 0, ae = 0;
    for (std::size_t w = 0; w < omegas.size(); ++w) {
        if (std::abs(nh[w]) > std::abs(nh[an])) an = w;
        if (std::abs(ex[w]) > std::abs(ex[ae])) ae = w;
    }
    // broad NH resonances against eta-broadened exact peaks: coarse agreement
    CHECK(std::abs(omegas[an] - omegas[ae]) < 0.4);
}

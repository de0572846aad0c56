#pragma once

#include <random>

#include "nhpc/models.hpp"

// Shared model fixtures (the reference figure parameter sets) and random
// matrix helpers for property tests.

namespace fixtures {

inline nhpc::ModelSpec sns_junction() {
    nhpc::ModelSpec m;
    m.kind = nhpc::ModelKind::Sns;
    m.n_left = m.n_middle = m.n_right = 4;
    m.hopping = -1.0;
    m.pairing = 1.0;
    m.chemical_potential = -1.1;
    return m;
}

inline std::vector<nhpc::ReservoirSpec> sns_reservoirs(double kappa = -0.4, int n_e = 101) {
    return {{n_e, -1.0, -1.1, 1, kappa}, {n_e, -1.0, -1.1, 12, kappa}};
}

inline nhpc::ModelSpec disordered_ring() {
    nhpc::ModelSpec m;
    m.kind = nhpc::ModelKind::Ring;
    m.n_sites = 6;
    m.hopping = -1.0;
    m.chemical_potential = -1.0;
    m.ring_hoppings = {-0.859915, -0.884918, -0.918446, -0.846311, -1.19937, -0.984676};
    return m;
}

inline std::vector<nhpc::ReservoirSpec> ring_reservoirs(double kappa = -1.0, int n_e = 101) {
    return {{n_e, -1.0, 0.0, 6, kappa}};
}

inline nhpc::ModelSpec uniform_ring(int n, double mu = 0.0) {
    nhpc::ModelSpec m;
    m.kind = nhpc::ModelKind::Ring;
    m.n_sites = n;
    m.hopping = -1.0;
    m.chemical_potential = mu;
    m.ring_hoppings.assign(n, -1.0);
    return m;
}

inline nhpc::Matrix random_hermitian(int n, std::mt19937_64& rng, bool traceless = false) {
    std::normal_distribution<double> g(0.0, 1.0);
    nhpc::Matrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = nhpc::Complex(g(rng), g(rng));
    nhpc::Matrix h = (a + a.adjoint()) / 2.0;
    if (traceless) h -= (h.trace() / static_cast<double>(n)) * nhpc::Matrix::Identity(n, n);
    return h;
}

// Random matrix with spectrum in the closed lower half-plane.
inline nhpc::Matrix random_passive(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    nhpc::Matrix b(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) b(i, j) = nhpc::Complex(g(rng), g(rng));
    return random_hermitian(n, rng) - nhpc::Complex(0.0, 0.5) * (b * b.adjoint());
}

}  // namespace fixtures

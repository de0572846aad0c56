#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "nhpc/models.hpp"
#include "nhpc/observables.hpp"

// Exact diagonalization of the full Hermitian system (device + finite
// reservoirs): the ground-truth oracle for currents at zero and finite
// temperature.  Dense solvers only; a dimension cap keeps runtime bounded.

namespace nhpc {

struct OracleOptions {
    int dim_cap = 2000;
    double delta_phi = 1e-4;
};

struct HermitianSpectrum {
    RealVector eigenvalues;  // ascending
    Matrix eigenvectors;     // orthonormal columns
    int doubling = 1;
    TotalLayout layout;
};

namespace detail {

inline void check_dim(int dim, const OracleOptions& opt) {
    if (dim > opt.dim_cap)
        throw DimCapError("total dimension " + std::to_string(dim) +
                          " exceeds cap " + std::to_string(opt.dim_cap));
}

}  // namespace detail

inline HermitianSpectrum diagonalize_total(const ModelSpec& spec,
                                           const std::vector<ReservoirSpec>& reservoirs,
                                           double phi,
                                           const OracleOptions& opt = {}) {
    ModelSpec m = spec;
    m.phase = phi;
    TotalLayout lay;
    const Matrix h = build_total(m, reservoirs, &lay);
    detail::check_dim(static_cast<int>(h.rows()), opt);
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    if (es.info() != Eigen::Success) throw Error("Hermitian eigensolver failed");
    HermitianSpectrum s;
    s.eigenvalues = es.eigenvalues();
    s.eigenvectors = es.eigenvectors();
    s.doubling = lay.doubling;
    s.layout = lay;
    return s;
}

namespace detail {

inline double weighted_current(const HermitianSpectrum& s, const Matrix& j_ext,
                               const Temperature& temp) {
    const Matrix jv = j_ext * s.eigenvectors;
    double acc = 0.0;
    for (int k = 0; k < s.eigenvalues.size(); ++k) {
        const double w = temp.occupation(s.eigenvalues(k));
        if (w == 0.0) continue;
        acc += w * s.eigenvectors.col(k).dot(jv.col(k)).real();
    }
    return acc / s.doubling;
}

inline RealVector total_eigenvalues(const ModelSpec& spec,
                                    const std::vector<ReservoirSpec>& reservoirs,
                                    double phi, const OracleOptions& opt) {
    ModelSpec m = spec;
    m.phase = phi;
    const Matrix h = build_total(m, reservoirs);
    check_dim(static_cast<int>(h.rows()), opt);
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw Error("Hermitian eigensolver failed");
    return es.eigenvalues();
}

}  // namespace detail

// Equilibrium current of the coupled Hermitian system from the occupation-
// weighted expectation of the device current operator.
inline double exact_current(const ModelSpec& spec,
                            const std::vector<ReservoirSpec>& reservoirs, double phi,
                            const Temperature& temp = Temperature::zero_t(),
                            const OracleOptions& opt = {}, int bond = -1) {
    ModelSpec m = spec;
    m.phase = phi;
    if (bond < 0) bond = default_current_bond(m);
    const HermitianSpectrum s = diagonalize_total(m, reservoirs, phi, opt);
    return detail::weighted_current(s, current_operator_total(m, reservoirs, bond), temp);
}

// Same current from the phase derivative of the ground-state energy,
//   I = doubling * dE_0/dphi,  E_0 = sum_{eps <= 0} eps / doubling.
inline double exact_ground_energy_current(const ModelSpec& spec,
                                          const std::vector<ReservoirSpec>& reservoirs,
                                          double phi, const OracleOptions& opt = {}) {
    const double doubling = spec.doubling();
    const auto e0 = [&](double p) {
        const RealVector ev = detail::total_eigenvalues(spec, reservoirs, p, opt);
        double e = 0.0;
        for (int k = 0; k < ev.size(); ++k)
            if (ev(k) <= 0.0) e += ev(k);
        return e / doubling;
    };
    return doubling * (e0(phi + opt.delta_phi) - e0(phi - opt.delta_phi)) /
           (2.0 * opt.delta_phi);
}

// Finite-temperature current from the thermodynamic potential, overflow-safe:
//   normal:  d/dphi [ -(1/beta) sum_n ln(1 + e^{-beta eps_n}) ],
//   BdG:     d/dphi [ -(1/beta) sum_n ln(e^{+beta eps_n/2} + e^{-beta eps_n/2}) ].
inline double exact_free_energy_current(const ModelSpec& spec,
                                        const std::vector<ReservoirSpec>& reservoirs,
                                        double phi, double beta,
                                        const OracleOptions& opt = {}) {
    if (!(beta > 0.0)) throw DomainError("beta must be positive");
    const bool bdg = spec.doubling() == 2;
    const auto g_of = [&](double p) {
        const RealVector ev = detail::total_eigenvalues(spec, reservoirs, p, opt);
        double g = 0.0;
        for (int k = 0; k < ev.size(); ++k) {
            const double x = beta * ev(k);
            if (bdg) {
                // ln(e^{x/2} + e^{-x/2}) = |x|/2 + log1p(e^{-|x|})
                g -= (std::abs(x) / 2.0 + std::log1p(std::exp(-std::abs(x)))) / beta;
            } else {
                // ln(1 + e^{-x})
                g -= (x < 0.0 ? -x + std::log1p(std::exp(x)) : std::log1p(std::exp(-x))) / beta;
            }
        }
        return g;
    };
    return (g_of(phi + opt.delta_phi) - g_of(phi - opt.delta_phi)) / (2.0 * opt.delta_phi);
}

// Site-resolved exact current (conservation checks).
inline double exact_site_current(const HermitianSpectrum& s, const ModelSpec& spec,
                                 const std::vector<ReservoirSpec>& reservoirs, int bond,
                                 const Temperature& temp = Temperature::zero_t()) {
    return detail::weighted_current(s, current_operator_total(spec, reservoirs, bond), temp);
}

// Current flowing through the tunnel bond of one reservoir; vanishes in
// equilibrium (zero leakage).
inline double exact_tunnel_current(const HermitianSpectrum& s, const ModelSpec& spec,
                                   const std::vector<ReservoirSpec>& reservoirs,
                                   std::size_t which,
                                   const Temperature& temp = Temperature::zero_t()) {
    return detail::weighted_current(s, tunnel_current_operator(spec, reservoirs, which), temp);
}

}  // namespace nhpc

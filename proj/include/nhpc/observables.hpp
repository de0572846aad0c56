#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <vector>

#include "nhpc/biorthogonal.hpp"
#include "nhpc/models.hpp"
#include "nhpc/self_energy.hpp"
#include "nhpc/special_functions.hpp"

// Equilibrium observables of the dissipative system: correlators and
// quadratic expectations through the NH Fermi-Dirac distribution, and the
// persistent current in its several incarnations (trace formula, operator
// form, LR/RR mode sums, isolated reference, finite temperature).

namespace nhpc {

struct Temperature {
    bool zero = true;
    double beta = 0.0;
    static Temperature zero_t() { return {true, 0.0}; }
    static Temperature finite(double beta) {
        if (!(beta > 0.0)) throw DomainError("temperature requires beta > 0");
        return {false, beta};
    }
    Complex f_eff(Complex eps) const {
        return zero ? f_eff_zero(eps) : f_eff_beta(eps, beta);
    }
    double occupation(double eps) const {
        return zero ? fermi_weight_zero_t(eps) : fermi_dirac(eps, beta);
    }
};

// Full correlator matrix M with M(i, j) = <c'_i c_j>,
//   <c'_i c_j> = (1/2i) sum_n [ L*(i,n) R(j,n) f_eff(eps_n)
//                             - R*(i,n) L(j,n) f_eff(eps_n)^* ].
// For BdG spectra the anomalous blocks <c_i c_j> sit at the index shift
// i -> N + i of the same matrix.
inline Matrix correlator_matrix(const BiorthogonalSpectrum& spec,
                                const Temperature& temp = Temperature::zero_t()) {
    const int n = spec.size();
    Vector f(n);
    for (int k = 0; k < n; ++k) f(k) = temp.f_eff(spec.eigenvalues(k));
    const Matrix a = spec.left.conjugate() * f.asDiagonal() * spec.right.transpose();
    const Matrix b = spec.right.conjugate() * f.conjugate().asDiagonal() * spec.left.transpose();
    return (a - b) / Complex(0.0, 2.0);
}

// <O> = Im sum_n <L_n|O|R_n> f_eff(eps_n) / doubling for a quadratic
// Hermitian operator O = C^dag Omat C / doubling.
inline double expect_quadratic(const BiorthogonalSpectrum& spec, const Matrix& op,
                               const Temperature& temp = Temperature::zero_t()) {
    const int n = spec.size();
    const Matrix or_ = op * spec.right;
    Complex acc(0.0, 0.0);
    for (int k = 0; k < n; ++k)
        acc += spec.left.col(k).dot(or_.col(k)) * temp.f_eff(spec.eigenvalues(k));
    return acc.imag() / spec.doubling;
}

// Im sum_n eps_n ln eps_n on the lower branch; terms with |eps| below the
// zero guard contribute their analytic limit 0.
inline double trace_log_sum(const Vector& eigenvalues, double zero_guard = 1e-12) {
    double s = 0.0;
    for (int k = 0; k < eigenvalues.size(); ++k) {
        const Complex e = eigenvalues(k);
        if (std::abs(e) < zero_guard) continue;
        s += (e * log_lower(e)).imag();
    }
    return s;
}

// (2/beta) sum_n Re logGamma(1/2 + i beta eps_n / 2 pi).
inline double log_gamma_trace(const Vector& eigenvalues, double beta) {
    double s = 0.0;
    for (int k = 0; k < eigenvalues.size(); ++k) {
        const Complex e = clamp_passive(eigenvalues(k));
        s += log_gamma(0.5 + Complex(0.0, beta / (2.0 * pi)) * e).real();
    }
    return 2.0 * s / beta;
}

namespace detail {

inline Vector effective_eigenvalues(const ModelSpec& spec,
                                    const std::vector<ReservoirSpec>& reservoirs,
                                    double phi) {
    ModelSpec m = spec;
    m.phase = phi;
    return eigenvalues_sorted(effective_hamiltonian(m, reservoirs).matrix);
}

}  // namespace detail

// Persistent current from the spectral trace,
//   I(phi) = -(1/pi) d/dphi Im sum_n eps_n ln eps_n,
// by central finite differences.  Evaluated as an eigenvalue sum, not a
// matrix logarithm, so it stays finite and smooth through exceptional points.
inline double persistent_current_trace(const ModelSpec& spec,
                                       const std::vector<ReservoirSpec>& reservoirs,
                                       double phi, double delta_phi = 1e-4) {
    if (!(delta_phi > 0.0)) throw DomainError("delta_phi must be positive");
    const double sp = trace_log_sum(detail::effective_eigenvalues(spec, reservoirs, phi + delta_phi));
    const double sm = trace_log_sum(detail::effective_eigenvalues(spec, reservoirs, phi - delta_phi));
    return -(sp - sm) / (2.0 * delta_phi * pi);
}

// Finite-temperature trace current,
//   I(phi, beta) = (2/beta) d/dphi Re sum_n logGamma(1/2 + i beta eps_n / 2 pi).
inline double persistent_current_finite_t(const ModelSpec& spec,
                                          const std::vector<ReservoirSpec>& reservoirs,
                                          double phi, double beta,
                                          double delta_phi = 1e-4) {
    if (!(beta > 0.0)) throw DomainError("beta must be positive");
    const double rp = log_gamma_trace(detail::effective_eigenvalues(spec, reservoirs, phi + delta_phi), beta);
    const double rm = log_gamma_trace(detail::effective_eigenvalues(spec, reservoirs, phi - delta_phi), beta);
    return (rp - rm) / (2.0 * delta_phi);
}

// Supercurrent variant of the trace formula valid under NH particle-hole
// symmetry: I(phi) = (i/pi) d/dphi sum_n eps_n ln eps_n (test cross-check).
inline double supercurrent_trace_shortcut(const ModelSpec& spec,
                                          const std::vector<ReservoirSpec>& reservoirs,
                                          double phi, double delta_phi = 1e-4) {
    const auto sum_at = [&](double p) {
        const Vector ev = detail::effective_eigenvalues(spec, reservoirs, p);
        Complex s(0.0, 0.0);
        for (int k = 0; k < ev.size(); ++k) {
            if (std::abs(ev(k)) < 1e-12) continue;
            s += ev(k) * log_lower(ev(k));
        }
        return s;
    };
    const Complex d = (sum_at(phi + delta_phi) - sum_at(phi - delta_phi)) / (2.0 * delta_phi);
    return (Complex(0.0, 1.0) * d / pi).real();
}

// LR-basis current: sum over Re eps_n <= 0 of <L_n|J|R_n> / doubling.
// Complex-valued; diverges at exceptional points crossed by the sum boundary.
inline Complex current_lr(const BiorthogonalSpectrum& spec, const Matrix& j_op) {
    Complex acc(0.0, 0.0);
    for (int k = 0; k < spec.size(); ++k) {
        if (spec.eigenvalues(k).real() > 0.0) continue;
        acc += spec.left.col(k).dot(j_op * spec.right.col(k));
    }
    return acc / static_cast<double>(spec.doubling);
}

// RR-basis current with unit-norm right vectors (post-selection convention).
inline double current_rr(const BiorthogonalSpectrum& spec, const Matrix& j_op) {
    double acc = 0.0;
    for (int k = 0; k < spec.size(); ++k) {
        if (spec.eigenvalues(k).real() > 0.0) continue;
        const Vector r = spec.right.col(k) / spec.right.col(k).norm();
        acc += r.dot(j_op * r).real();
    }
    return acc / spec.doubling;
}

// RR current evaluated at each requested bond; unlike the NH operator current
// this set is not uniform (no local conservation in the RR basis).
inline std::vector<double> current_rr_site_resolved(const BiorthogonalSpectrum& spec,
                                                    const ModelSpec& model,
                                                    const std::vector<int>& bonds) {
    std::vector<double> out;
    out.reserve(bonds.size());
    for (int b : bonds) out.push_back(current_rr(spec, current_operator(model, b)));
    return out;
}

// Ground-state / thermal current of the isolated Hermitian system,
//   I_iso = sum_n w_n <psi_n|J|psi_n> / doubling.
inline double isolated_current(const ModelSpec& spec, double phi,
                               const Temperature& temp = Temperature::zero_t(),
                               int bond = -1) {
    ModelSpec m = spec;
    m.phase = phi;
    if (bond < 0) bond = default_current_bond(m);
    const Matrix h = build_system(m);
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    if (es.info() != Eigen::Success) throw Error("Hermitian eigensolver failed");
    const Matrix j = current_operator(m, bond);
    const Matrix jv = j * es.eigenvectors();
    double acc = 0.0;
    for (int k = 0; k < h.rows(); ++k) {
        const double w = temp.occupation(es.eigenvalues()(k));
        if (w == 0.0) continue;
        acc += w * es.eigenvectors().col(k).dot(jv.col(k)).real();
    }
    return acc / m.doubling();
}

}  // namespace nhpc

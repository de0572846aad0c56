#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "nhpc/biorthogonal.hpp"
#include "nhpc/exact_diagonalization.hpp"
#include "nhpc/models.hpp"

// Linear-response current susceptibility Im Pi(phi, omega) at zero
// temperature: the analytic biorthogonal-mode evaluation and the Hermitian
// exact-diagonalization counterpart with Lorentzian linewidth eta.
//
// The occupied-sector spectral integral
//   P_ijkl(omega) = int_{-inf}^0 <i|rho(w')|j> <k|rho(omega + w')|l> dw'
// has a closed form in the biorthogonal basis built from four log-kernel
// terms; all logarithms are principal-valued with passive (lower-half-plane)
// eigenvalues, so each argument keeps a definite branch side.

namespace nhpc {

namespace detail {

// (ln z1 - ln z2) / (z1 - z2) with the analytic midpoint limit 2/(z1 + z2)
// when the denominator degenerates.
inline Complex dlog(Complex z1, Complex z2, Complex lz1, Complex lz2,
                    double guard = 1e-10) {
    const Complex den = z1 - z2;
    if (std::abs(den) < guard) return 2.0 / (z1 + z2);
    return (lz1 - lz2) / den;
}

// The two independent log-kernels at frequency omega; the other two terms of
// the four-term sum are their elementwise conjugates.
struct PKernels {
    Matrix k1;  // from poles (eps_n, eps_m - omega), both retarded
    Matrix k2;  // cross term, poles (eps_n, eps*_m - omega)
    double omega = 0.0;
};

inline PKernels build_p_kernels(const Vector& eigenvalues, double omega) {
    const int n = static_cast<int>(eigenvalues.size());
    Vector eps(n), lneg(n), lpos(n);
    for (int k = 0; k < n; ++k) {
        const Complex e = clamp_passive(eigenvalues(k));
        if (std::abs(e) < 1e-300) throw DomainError("p_integral: eigenvalue at origin");
        eps(k) = e;
        lneg(k) = std::log(-e);  // upper side of the cut
        lpos(k) = std::log(e);   // lower side
    }
    Vector lneg_w(n), lpos_w(n);
    for (int m = 0; m < n; ++m) {
        const Complex zm = -eps(m) + omega;
        const Complex zp = eps(m) - omega;
        if (std::abs(zm) < 1e-300 || std::abs(zp) < 1e-300)
            throw DomainError("p_integral: log argument at origin");
        lneg_w(m) = std::log(zm);
        lpos_w(m) = std::log(zp);
    }
    PKernels ker;
    ker.omega = omega;
    ker.k1 = Matrix(n, n);
    ker.k2 = Matrix(n, n);
    for (int a = 0; a < n; ++a) {
        for (int m = 0; m < n; ++m) {
            // k1 = -dlog(-eps_n, -eps_m + omega): denominator eps_n - eps_m + omega
            ker.k1(a, m) = -dlog(-eps(a), -eps(m) + omega, lneg(a), lneg_w(m));
            // k2 = +dlog(eps_n, eps*_m - omega): denominator eps_n - eps*_m + omega
            ker.k2(a, m) = dlog(eps(a), std::conj(eps(m)) - omega, lpos(a),
                                std::conj(lpos_w(m)));
        }
    }
    return ker;
}

// Contraction of the kernels with one index pattern (0-based indices).
inline Complex p_from_kernels(const BiorthogonalSpectrum& spec, const PKernels& ker,
                              int i, int j, int k, int l) {
    const int n = spec.size();
    Vector a(n), b(n), c(n), d(n);
    for (int m = 0; m < n; ++m) {
        a(m) = spec.right(i, m) * std::conj(spec.left(j, m));
        b(m) = spec.left(i, m) * std::conj(spec.right(j, m));
        c(m) = spec.right(k, m) * std::conj(spec.left(l, m));
        d(m) = spec.left(k, m) * std::conj(spec.right(l, m));
    }
    const Complex t_ac = (a.transpose() * ker.k1 * c)(0);
    const Complex t_ad = (a.transpose() * ker.k2 * d)(0);
    const Complex t_bd = (b.transpose() * ker.k1.conjugate() * d)(0);
    const Complex t_bc = (b.transpose() * ker.k2.conjugate() * c)(0);
    // (i/2pi)^2 prefactor
    return -(t_ac - t_ad + t_bd - t_bc) / (4.0 * pi * pi);
}

}  // namespace detail

// Occupied-sector product integral of two density-of-states matrix elements;
// indices are 0-based positions in the effective-Hamiltonian basis.
inline Complex p_integral(const BiorthogonalSpectrum& spec, int i, int j, int k, int l,
                          double omega) {
    const int n = spec.size();
    if (i < 0 || j < 0 || k < 0 || l < 0 || i >= n || j >= n || k >= n || l >= n)
        throw SpecError("p_integral: index outside matrix dimension");
    const detail::PKernels ker = detail::build_p_kernels(spec.eigenvalues, omega);
    return detail::p_from_kernels(spec, ker, i, j, k, l);
}

namespace detail {

// Bond combination entering the response at one sign of omega.  For BdG
// spectra the four anomalous (hole-block) patterns are added.
inline Complex pp_combination(const BiorthogonalSpectrum& spec, const PKernels& ker,
                              int j0, int j1, int n_sites) {
    Complex p = p_from_kernels(spec, ker, j1, j0, j1, j0) -
                p_from_kernels(spec, ker, j0, j0, j1, j1) +
                p_from_kernels(spec, ker, j0, j1, j0, j1) -
                p_from_kernels(spec, ker, j1, j1, j0, j0);
    if (spec.doubling == 2) {
        const int h0 = n_sites + j0;
        const int h1 = n_sites + j1;
        p += p_from_kernels(spec, ker, h1, j0, j1, h0) -
             p_from_kernels(spec, ker, h0, j0, j1, h1) +
             p_from_kernels(spec, ker, h0, j1, j0, h1) -
             p_from_kernels(spec, ker, h1, j1, j0, h0);
    }
    return p;
}

}  // namespace detail

// Im Pi(phi, omega) = pi t_b^2 Re[ PP(+omega) - PP(-omega) ] from the
// biorthogonal modes of the effective Hamiltonian.  The bond must carry a
// phase-free hopping (any normal-segment bond; ring bonds except the flux
// bond) -- local conservation makes the choice immaterial.
inline double im_susceptibility_nh(const BiorthogonalSpectrum& spec,
                                   const ModelSpec& model, double omega,
                                   int bond = -1) {
    if (bond < 0) bond = default_current_bond(model);
    detail::check_bond(model, bond);
    if (model.kind == ModelKind::Ring && bond == model.n_sites)
        throw SpecError("susceptibility bond must not carry the flux phase");
    const int j0 = bond - 1;
    const int j1 = bond;  // never wraps for the allowed bonds
    const int n = model.total_sites();
    const double t_b = bond_hopping(model, bond);

    const detail::PKernels kp = detail::build_p_kernels(spec.eigenvalues, omega);
    const detail::PKernels km = detail::build_p_kernels(spec.eigenvalues, -omega);
    const Complex pp = detail::pp_combination(spec, kp, j0, j1, n);
    const Complex pm = detail::pp_combination(spec, km, j0, j1, n);
    return pi * t_b * t_b * (pp - pm).real();
}

// Lorentzian-broadened susceptibility from an explicit Hermitian mode set
// (Bogoliubov amplitudes u, v at the two bond sites).  Normal systems pass
// v = 0 and all modes; BdG passes the nonnegative half with occupations
// Theta(-eps).
inline std::vector<double> susceptibility_exact_core(
    const RealVector& eps, const Vector& u_j, const Vector& u_jp, const Vector& v_j,
    const Vector& v_jp, const RealVector& occ, double t_bond,
    const std::vector<double>& omegas, double eta) {
    if (!(eta > 0.0)) throw DomainError("eta must be positive");
    const int n = static_cast<int>(eps.size());
    const Complex im(0.0, 1.0);

    // pole list: contribution W / (omega - E + i eta)
    std::vector<Complex> weight;
    std::vector<double> energy;
    weight.reserve(static_cast<std::size_t>(n) * n);
    energy.reserve(static_cast<std::size_t>(n) * n);

    Matrix a = im * (u_j.conjugate() * u_jp.transpose() - u_jp.conjugate() * u_j.transpose());
    a -= im * (v_jp.conjugate() * v_j.transpose() - v_j.conjugate() * v_jp.transpose());
    const Matrix b = im * (v_j * u_jp.transpose() - v_jp * u_j.transpose());

    const double t2 = t_bond * t_bond;
    for (int p = 0; p < n; ++p) {
        for (int m = 0; m < n; ++m) {
            const double fp = occ(p), fm = occ(m);
            const Complex w1 = a(p, m) * a(m, p) * (fp - fm);
            if (std::abs(w1) > 1e-18) {
                weight.push_back(t2 * w1);
                energy.push_back(eps(m) - eps(p));
            }
            const Complex w2 = b(p, m) * (std::conj(b(m, p)) - std::conj(b(p, m))) * (fm + fp - 1.0);
            if (std::abs(w2) > 1e-18) {
                weight.push_back(t2 * w2);
                energy.push_back(eps(p) + eps(m));
            }
            const Complex w3 = std::conj(b(m, p)) * (b(p, m) - b(m, p)) * (1.0 - fm - fp);
            if (std::abs(w3) > 1e-18) {
                weight.push_back(t2 * w3);
                energy.push_back(-eps(p) - eps(m));
            }
        }
    }

    std::vector<double> out(omegas.size(), 0.0);
    for (std::size_t w = 0; w < omegas.size(); ++w) {
        const double omega = omegas[w];
        double acc = 0.0;
        for (std::size_t q = 0; q < weight.size(); ++q) {
            const double x = omega - energy[q];
            const double den = x * x + eta * eta;
            acc += (weight[q].imag() * x - weight[q].real() * eta) / den;
        }
        out[w] = acc;
    }
    return out;
}

// One phi-row of the exact susceptibility map for the coupled Hermitian
// system; eta defaults to 0.03 at the call sites.
inline std::vector<double> susceptibility_exact_row(
    const ModelSpec& spec, const std::vector<ReservoirSpec>& reservoirs, double phi,
    const std::vector<double>& omegas, double eta, const OracleOptions& opt = {},
    int bond = -1) {
    ModelSpec m = spec;
    m.phase = phi;
    if (bond < 0) bond = default_current_bond(m);
    detail::check_bond(m, bond);
    const HermitianSpectrum s = diagonalize_total(m, reservoirs, phi, opt);
    const int nn = s.layout.n_normal;
    const int j0 = bond - 1;
    const int j1 = bond;
    const double t_b = bond_hopping(m, bond);

    if (s.doubling == 1) {
        const int nm = static_cast<int>(s.eigenvalues.size());
        RealVector occ(nm);
        for (int k = 0; k < nm; ++k) occ(k) = fermi_weight_zero_t(s.eigenvalues(k));
        return susceptibility_exact_core(
            s.eigenvalues, s.eigenvectors.row(j0).transpose(),
            s.eigenvectors.row(j1).transpose(), Vector::Zero(nm), Vector::Zero(nm), occ,
            t_b, omegas, eta);
    }

    // BdG: keep the nonnegative half of the particle-hole symmetric spectrum
    RealVector eps(nn);
    Vector u0(nn), u1(nn), v0(nn), v1(nn);
    RealVector occ(nn);
    for (int k = 0; k < nn; ++k) {
        const int col = nn + k;  // ascending order: top half is nonnegative
        eps(k) = s.eigenvalues(col);
        u0(k) = s.eigenvectors(j0, col);
        u1(k) = s.eigenvectors(j1, col);
        v0(k) = s.eigenvectors(nn + j0, col);
        v1(k) = s.eigenvectors(nn + j1, col);
        occ(k) = fermi_weight_zero_t(eps(k));
    }
    return susceptibility_exact_core(eps, u0, u1, v0, v1, occ, t_b, omegas, eta);
}

struct SusceptibilityMap {
    std::vector<double> phi_grid;
    std::vector<double> omega_grid;
    RealMatrix values;  // (phi, omega)
    std::string method;
    double eta = 0.0;          // Hermitian method only
    double normalization = 0.0;  // max-abs of values

    void record_normalization() {
        normalization = values.size() ? values.cwiseAbs().maxCoeff() : 0.0;
    }
};

}  // namespace nhpc

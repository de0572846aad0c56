#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <vector>

#include "nhpc/errors.hpp"
#include "nhpc/models.hpp"
#include "nhpc/special_functions.hpp"

// Analytic reservoir edge Green's function, the wide-band self-energy at
// omega = 0, and assembly of the non-Hermitian effective Hamiltonian
//   H_eff = H_sys + Sigma(0).
// Only the omega = 0 wide-band block enters production; the omega-dependent
// form is exposed for consistency tests.

namespace nhpc {

enum class GreenBranch { Retarded, Advanced };

// Semi-infinite chain edge Green's function inside the band,
//   g_edge(omega) = [ (omega - g)/2 -+ i sqrt(t^2 - ((omega - g)/2)^2) ] / t^2,
// minus sign retarded.
inline Complex edge_green(double omega, double t, double g, GreenBranch branch) {
    if (t >= 0.0) throw SpecError("edge_green requires t < 0");
    const double x = (omega - g) / 2.0;
    const double rad = t * t - x * x;
    if (rad < 0.0) throw BandError("edge_green: |omega - g| > 2|t| (outside band)");
    const double root = std::sqrt(rad);
    const double sign = branch == GreenBranch::Retarded ? -1.0 : 1.0;
    return Complex(x, sign * root) / (t * t);
}

// Local self-energy block at the attach site.  For BdG (doubling 2) the hole
// entry carries the tau_z sign on the real part only; Im parts coincide and
// are nonpositive (retarded, passive).
struct SelfEnergyBlock {
    Complex particle;
    Complex hole;  // meaningful for doubling 2 only
    int site = 1;  // attach index l, 1-based
};

// Sigma(0) = -kappa^2/t^2 (tau_z g/2 + i sqrt(t^2 - (g/2)^2)); tau_z dropped
// for normal systems.
inline SelfEnergyBlock self_energy_wideband(const ReservoirSpec& res, int doubling) {
    res.validate();
    const double t = res.hopping, g = res.chemical_potential, k = res.tunneling;
    const double root = std::sqrt(t * t - g * g / 4.0);
    const double scale = k * k / (t * t);
    SelfEnergyBlock blk;
    blk.site = res.attach_site;
    blk.particle = -scale * Complex(g / 2.0, root);
    blk.hole = doubling == 2 ? -scale * Complex(-g / 2.0, root) : Complex(0.0, 0.0);
    return blk;
}

// Frequency-dependent self-energy (test-only): particle kappa^2 g+(omega),
// hole -kappa^2 g-(-omega).
inline SelfEnergyBlock self_energy_at(double omega, const ReservoirSpec& res, int doubling) {
    res.validate();
    const double k2 = res.tunneling * res.tunneling;
    SelfEnergyBlock blk;
    blk.site = res.attach_site;
    blk.particle = k2 * edge_green(omega, res.hopping, res.chemical_potential,
                                   GreenBranch::Retarded);
    blk.hole = doubling == 2
                   ? -k2 * edge_green(-omega, res.hopping, res.chemical_potential,
                                      GreenBranch::Advanced)
                   : Complex(0.0, 0.0);
    return blk;
}

struct EffectiveHamiltonian {
    Matrix matrix;
    int doubling = 1;
    int n_sites = 0;
    std::pair<int, int> normal_bonds{1, 0};  // valid current bonds, 1-based
};

// H_eff = H_sys + sum_l Sigma_l(0).  Spectrum lies in the closed lower
// half-plane; the SNS case keeps the NH particle-hole symmetry
// H_eff = -tau_x H_eff^* tau_x.
inline EffectiveHamiltonian effective_hamiltonian(const ModelSpec& spec,
                                                  const std::vector<ReservoirSpec>& reservoirs) {
    spec.validate();
    EffectiveHamiltonian eff;
    eff.matrix = build_system(spec);
    eff.doubling = spec.doubling();
    eff.n_sites = spec.total_sites();
    eff.normal_bonds = normal_bond_range(spec);
    const int n = eff.n_sites;
    std::vector<bool> used(n + 1, false);
    for (const auto& res : reservoirs) {
        if (res.attach_site < 1 || res.attach_site > n)
            throw SpecError("reservoir attach site out of system range");
        if (used[res.attach_site]) throw SpecError("duplicate reservoir attach site");
        used[res.attach_site] = true;
        const SelfEnergyBlock blk = self_energy_wideband(res, eff.doubling);
        const int l = res.attach_site - 1;
        eff.matrix(l, l) += blk.particle;
        if (eff.doubling == 2) eff.matrix(n + l, n + l) += blk.hole;
    }
    return eff;
}

}  // namespace nhpc

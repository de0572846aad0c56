#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "nhpc/errors.hpp"
#include "nhpc/special_functions.hpp"

// Tight-binding builders for the two dissipative models: a phase-biased
// SNS junction (Bogoliubov-de Gennes, doubling 2) and a flux-threaded normal
// ring (doubling 1), plus the reservoir chain, the coupled Hermitian total
// system and site-resolved current operators.
//
// Conventions (wire-format contract for eigenvector indexing):
//  * sites and bonds are 1-based in this API; bond b connects sites (b, b+1),
//    the ring's closing bond N connects (N, 1),
//  * BdG basis ordering is (c_1..c_N, c'_1..c'_N) with H = C^dag Hmat C / 2,
//  * normal systems use H = C^dag Hmat C on the plain N-site basis,
//  * the phase phi enters the SNS through the right-segment pairing phases
//    and the ring through the single closing bond.

namespace nhpc {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

enum class ModelKind { Sns, Ring };

struct ModelSpec {
    ModelKind kind = ModelKind::Ring;

    // SNS segment sizes.
    int n_left = 0;
    int n_middle = 0;
    int n_right = 0;

    // Ring size.
    int n_sites = 0;

    double hopping = -1.0;             // t < 0
    double pairing = 0.0;              // Delta >= 0, SNS only
    double chemical_potential = 0.0;   // mu
    std::vector<double> ring_hoppings; // ring bond strengths t_1..t_N
    double phase = 0.0;                // phi (radians)

    int total_sites() const {
        return kind == ModelKind::Sns ? n_left + n_middle + n_right : n_sites;
    }
    int doubling() const { return kind == ModelKind::Sns ? 2 : 1; }
    int dimension() const { return doubling() * total_sites(); }

    void validate() const {
        if (kind == ModelKind::Sns) {
            if (n_left < 1 || n_middle < 1 || n_right < 1)
                throw SpecError("SNS segment sizes must all be >= 1");
            if (pairing < 0.0) throw SpecError("pairing amplitude must be >= 0");
        } else {
            if (n_sites < 2) throw SpecError("ring needs at least 2 sites");
            if (static_cast<int>(ring_hoppings.size()) != n_sites)
                throw SpecError("ring_hoppings length must equal the site count");
            for (double t : ring_hoppings)
                if (t == 0.0) throw SpecError("ring_hoppings must be nonzero");
        }
        if (hopping >= 0.0) throw SpecError("hopping t must be negative");
    }
};

struct ReservoirSpec {
    int n_sites = 101;                // N_E
    double hopping = -1.0;            // t < 0
    double chemical_potential = 0.0;  // g
    int attach_site = 1;              // system site l (1-based)
    double tunneling = 0.0;           // kappa <= 0

    void validate() const {
        if (n_sites < 1) throw SpecError("reservoir needs at least 1 site");
        if (hopping >= 0.0) throw SpecError("reservoir hopping t must be negative");
        if (tunneling > 0.0) throw SpecError("tunnel amplitude kappa must be <= 0");
        if (std::abs(chemical_potential / 2.0) >= std::abs(hopping))
            throw BandError("reservoir chemical potential outside band: |g/2| >= |t|");
    }
};

namespace detail {

// Normal-space (single-particle) part shared by the SNS builders: open chain
// with uniform hopping and on-site potential over all sites.
inline Matrix sns_normal_block(const ModelSpec& spec) {
    const int n = spec.total_sites();
    Matrix h = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) h(i, i) = spec.chemical_potential;
    for (int b = 0; b < n - 1; ++b) {
        h(b, b + 1) = spec.hopping;
        h(b + 1, b) = spec.hopping;
    }
    return h;
}

// Antisymmetric pairing matrix: entry (b, b+1) carries Delta_b e^{-i phi_b}
// on bonds interior to a superconducting segment; phase phi on the right.
inline Matrix sns_pairing_block(const ModelSpec& spec) {
    const int n = spec.total_sites();
    Matrix d = Matrix::Zero(n, n);
    for (int b = 1; b <= n - 1; ++b) {
        double delta = 0.0, phi_b = 0.0;
        if (b <= spec.n_left - 1) {
            delta = spec.pairing;
        } else if (b >= spec.n_left + spec.n_middle + 1) {
            delta = spec.pairing;
            phi_b = spec.phase;
        }
        if (delta == 0.0) continue;
        const Complex amp = delta * std::exp(Complex(0.0, -phi_b));
        d(b - 1, b) = amp;
        d(b, b - 1) = -amp;
    }
    return d;
}

inline Matrix bdg_double(const Matrix& h, const Matrix& d) {
    const int n = h.rows();
    Matrix m = Matrix::Zero(2 * n, 2 * n);
    m.topLeftCorner(n, n) = h;
    m.topRightCorner(n, n) = d;
    m.bottomLeftCorner(n, n) = d.adjoint();
    m.bottomRightCorner(n, n) = -h.transpose();
    return m;
}

}  // namespace detail

// 2N x 2N BdG matrix of the SNS junction.
inline Matrix build_sns(const ModelSpec& spec) {
    if (spec.kind != ModelKind::Sns) throw SpecError("build_sns expects an SNS spec");
    spec.validate();
    return detail::bdg_double(detail::sns_normal_block(spec),
                              detail::sns_pairing_block(spec));
}

// N x N ring matrix with the flux phase on the closing bond (N, 1).
inline Matrix build_ring(const ModelSpec& spec) {
    if (spec.kind != ModelKind::Ring) throw SpecError("build_ring expects a ring spec");
    spec.validate();
    const int n = spec.n_sites;
    Matrix h = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) h(i, i) = spec.chemical_potential;
    for (int b = 1; b <= n; ++b) {
        const int i = b - 1;
        const int j = b % n;
        const double phi_b = (b == n) ? spec.phase : 0.0;
        const Complex amp = spec.ring_hoppings[b - 1] * std::exp(Complex(0.0, -phi_b));
        h(i, j) += amp;
        h(j, i) += std::conj(amp);
    }
    return h;
}

inline Matrix build_system(const ModelSpec& spec) {
    return spec.kind == ModelKind::Sns ? build_sns(spec) : build_ring(spec);
}

// Open-chain reservoir, N_E x N_E.
inline Matrix build_reservoir(const ReservoirSpec& res) {
    res.validate();
    const int n = res.n_sites;
    Matrix h = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) h(i, i) = res.chemical_potential;
    for (int b = 0; b < n - 1; ++b) {
        h(b, b + 1) = res.hopping;
        h(b + 1, b) = res.hopping;
    }
    return h;
}

// Valid current-operator bonds: fully inside the normal segment (SNS) or any
// ring bond including the closing one.
inline std::pair<int, int> normal_bond_range(const ModelSpec& spec) {
    if (spec.kind == ModelKind::Sns)
        return {spec.n_left + 1, spec.n_left + spec.n_middle - 1};
    return {1, spec.n_sites};
}

// Default measurement bond: first bond of the normal segment / first ring bond.
inline int default_current_bond(const ModelSpec& spec) {
    return normal_bond_range(spec).first;
}

// Hopping strength on a given bond.
inline double bond_hopping(const ModelSpec& spec, int bond) {
    if (spec.kind == ModelKind::Sns) return spec.hopping;
    return spec.ring_hoppings.at(bond - 1);
}

namespace detail {

// First-quantized particle-space current matrix for bond b, with the phase
// factor on the ring's closing bond so the operator is gauge-consistent with
// the Hamiltonian.
inline Matrix current_block(const ModelSpec& spec, int bond, int n_space, int offset) {
    Matrix a = Matrix::Zero(n_space, n_space);
    const int n = spec.total_sites();
    int i = bond - 1;
    int j = bond % n;
    if (spec.kind == ModelKind::Sns) j = bond;  // never wraps inside the normal segment
    const double phi_b = (spec.kind == ModelKind::Ring && bond == spec.n_sites)
                             ? spec.phase
                             : 0.0;
    const Complex amp = bond_hopping(spec, bond) * std::exp(Complex(0.0, -phi_b));
    a(offset + i, offset + j) = Complex(0.0, -1.0) * amp;
    a(offset + j, offset + i) = Complex(0.0, 1.0) * std::conj(amp);
    return a;
}

inline void check_bond(const ModelSpec& spec, int bond) {
    auto [lo, hi] = normal_bond_range(spec);
    if (bond < lo || bond > hi)
        throw SpecError("current bond " + std::to_string(bond) +
                        " outside allowed range [" + std::to_string(lo) + ", " +
                        std::to_string(hi) + "]");
}

}  // namespace detail

// Site-resolved current operator J_b = -i t_b (c'_b c_{b+1} - c'_{b+1} c_b)
// as a first-quantized matrix with J = C^dag Jmat C / doubling.  Hermitian and
// traceless; for BdG the hole block is -A^T.
inline Matrix current_operator(const ModelSpec& spec, int bond) {
    spec.validate();
    detail::check_bond(spec, bond);
    const int n = spec.total_sites();
    Matrix a = detail::current_block(spec, bond, n, 0);
    if (spec.doubling() == 1) return a;
    return detail::bdg_double(a, Matrix::Zero(n, n));
}

// Layout of the coupled Hermitian system: device sites first, then each
// reservoir chain; BdG doubles the whole normal space.
struct TotalLayout {
    int n_device = 0;                  // N
    int n_normal = 0;                  // N + sum N_E
    int doubling = 1;
    std::vector<int> reservoir_offset; // 0-based offset of each reservoir edge site
    int dimension() const { return doubling * n_normal; }
};

inline TotalLayout total_layout(const ModelSpec& spec,
                                const std::vector<ReservoirSpec>& reservoirs) {
    TotalLayout lay;
    lay.n_device = spec.total_sites();
    lay.doubling = spec.doubling();
    int off = lay.n_device;
    for (const auto& r : reservoirs) {
        lay.reservoir_offset.push_back(off);
        off += r.n_sites;
    }
    lay.n_normal = off;
    return lay;
}

// Hermitian matrix of device + finite reservoirs + tunnel bonds.  Reservoir
// and tunnel blocks carry the tau_z BdG extension for the SNS (encoded by the
// -h^T hole block); plain blocks for the ring.
inline Matrix build_total(const ModelSpec& spec,
                          const std::vector<ReservoirSpec>& reservoirs,
                          TotalLayout* layout_out = nullptr) {
    spec.validate();
    const int n = spec.total_sites();
    std::vector<bool> used(n + 1, false);
    for (const auto& r : reservoirs) {
        r.validate();
        if (r.attach_site < 1 || r.attach_site > n)
            throw SpecError("reservoir attach site out of system range");
        if (used[r.attach_site]) throw SpecError("duplicate reservoir attach site");
        used[r.attach_site] = true;
    }
    const TotalLayout lay = total_layout(spec, reservoirs);
    if (layout_out) *layout_out = lay;

    const int m = lay.n_normal;
    Matrix h = Matrix::Zero(m, m);
    if (spec.kind == ModelKind::Ring) {
        h.topLeftCorner(n, n) = build_ring(spec);
    } else {
        h.topLeftCorner(n, n) = detail::sns_normal_block(spec);
    }
    for (std::size_t r = 0; r < reservoirs.size(); ++r) {
        const auto& res = reservoirs[r];
        const int off = lay.reservoir_offset[r];
        for (int i = 0; i < res.n_sites; ++i) h(off + i, off + i) = res.chemical_potential;
        for (int b = 0; b < res.n_sites - 1; ++b) {
            h(off + b, off + b + 1) = res.hopping;
            h(off + b + 1, off + b) = res.hopping;
        }
        // tunnel bond between the attach site and the reservoir edge
        const int l = res.attach_site - 1;
        h(l, off) += res.tunneling;
        h(off, l) += res.tunneling;
    }
    if (spec.kind == ModelKind::Ring) return h;

    Matrix d = Matrix::Zero(m, m);
    d.topLeftCorner(n, n) = detail::sns_pairing_block(spec);
    return detail::bdg_double(h, d);
}

// Device current operator embedded in the total-system basis.
inline Matrix current_operator_total(const ModelSpec& spec,
                                     const std::vector<ReservoirSpec>& reservoirs,
                                     int bond) {
    detail::check_bond(spec, bond);
    const TotalLayout lay = total_layout(spec, reservoirs);
    Matrix a = detail::current_block(spec, bond, lay.n_normal, 0);
    if (lay.doubling == 1) return a;
    return detail::bdg_double(a, Matrix::Zero(lay.n_normal, lay.n_normal));
}

// Current operator on the tunnel bond of one reservoir (leakage detector).
inline Matrix tunnel_current_operator(const ModelSpec& spec,
                                      const std::vector<ReservoirSpec>& reservoirs,
                                      std::size_t which) {
    const TotalLayout lay = total_layout(spec, reservoirs);
    const auto& res = reservoirs.at(which);
    const int l = res.attach_site - 1;
    const int e = lay.reservoir_offset[which];
    Matrix a = Matrix::Zero(lay.n_normal, lay.n_normal);
    a(l, e) = Complex(0.0, -1.0) * res.tunneling;
    a(e, l) = Complex(0.0, 1.0) * res.tunneling;
    if (lay.doubling == 1) return a;
    return detail::bdg_double(a, Matrix::Zero(lay.n_normal, lay.n_normal));
}

// Disordered ring hoppings t_j = t * Unif(0.7, 1.3), reproducible for a given
// seed (raw 53-bit draws, independent of library distribution internals).
inline std::vector<double> disordered_ring_hoppings(double t, int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        out[i] = t * (0.7 + 0.6 * u);
    }
    return out;
}

}  // namespace nhpc

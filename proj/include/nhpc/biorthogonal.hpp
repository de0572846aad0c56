#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "nhpc/errors.hpp"
#include "nhpc/self_energy.hpp"

// Biorthogonal eigenproblem machinery: matched and normalized left/right
// eigenvector sets, phase-rigidity diagnostics, exceptional-point scanning
// over a parameter sweep, and spectral branch tracking.

namespace nhpc {

struct BiorthogonalSpectrum {
    Vector eigenvalues;       // sorted by (Re, Im) ascending
    Matrix right;             // columns |psi_R_n|, <L_n|R_n> = 1
    Matrix left;              // columns |psi_L_n|
    RealVector phase_rigidity;  // |<L|R>| / (|L||R|) before normalization
    int doubling = 1;

    int size() const { return static_cast<int>(eigenvalues.size()); }
};

struct BiorthoOptions {
    // Below this pre-normalization overlap the matrix counts as numerically
    // defective (exceptional point) and the expansion is refused.
    double rigidity_floor = 1e-10;
};

// Right eigenvectors from H, left from H^dag, matched one-to-one by maximal
// overlap magnitude; each pair rescaled symmetrically so <L_n|R_n> = 1.
inline BiorthogonalSpectrum biorthogonal_eig(const Matrix& h, int doubling,
                                             const BiorthoOptions& opt = {}) {
    const int n = static_cast<int>(h.rows());
    if (h.cols() != n) throw SpecError("biorthogonal_eig expects a square matrix");
    if (!h.allFinite()) throw SpecError("biorthogonal_eig: nonfinite entries");

    Eigen::ComplexEigenSolver<Matrix> right_solver(h, true);
    Eigen::ComplexEigenSolver<Matrix> left_solver(h.adjoint(), true);
    if (right_solver.info() != Eigen::Success || left_solver.info() != Eigen::Success)
        throw Error("complex eigensolver failed to converge");

    const Matrix r = right_solver.eigenvectors();
    const Matrix l0 = left_solver.eigenvectors();
    const Vector vals = right_solver.eigenvalues();

    // overlap(m, k) = <L_m | R_k>; eigenvectors of distinct eigenvalues are
    // exactly biorthogonal, so |overlap| is a near-permutation away from EPs.
    const Matrix overlap = l0.adjoint() * r;

    struct Entry { double mag; int m, k; };
    std::vector<Entry> entries;
    entries.reserve(static_cast<std::size_t>(n) * n);
    for (int m = 0; m < n; ++m)
        for (int k = 0; k < n; ++k)
            entries.push_back({std::abs(overlap(m, k)), m, k});
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.mag > b.mag; });

    std::vector<int> left_of(n, -1);
    std::vector<char> left_used(n, 0), right_used(n, 0);
    int assigned = 0;
    for (const Entry& e : entries) {
        if (left_used[e.m] || right_used[e.k]) continue;
        left_used[e.m] = right_used[e.k] = 1;
        left_of[e.k] = e.m;
        if (++assigned == n) break;
    }

    BiorthogonalSpectrum spec;
    spec.doubling = doubling;
    spec.eigenvalues = vals;
    spec.right = Matrix(n, n);
    spec.left = Matrix(n, n);
    spec.phase_rigidity = RealVector(n);

    double min_overlap = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k) {
        const int m = left_of[k];
        const Complex s = overlap(m, k);
        min_overlap = std::min(min_overlap, std::abs(s));
        spec.phase_rigidity(k) = std::abs(s) / (l0.col(m).norm() * r.col(k).norm());
        if (std::abs(s) < opt.rigidity_floor) continue;  // reported below
        const Complex sq = std::sqrt(s);
        spec.right.col(k) = r.col(k) / sq;
        spec.left.col(k) = l0.col(m) / std::conj(sq);
    }
    if (min_overlap < opt.rigidity_floor)
        throw DefectiveError("matrix numerically defective: min <L|R> overlap " +
                                 std::to_string(min_overlap),
                             min_overlap);

    // stable public ordering: (Re, Im) ascending
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (vals(a).real() != vals(b).real()) return vals(a).real() < vals(b).real();
        return vals(a).imag() < vals(b).imag();
    });
    BiorthogonalSpectrum out;
    out.doubling = doubling;
    out.eigenvalues = Vector(n);
    out.right = Matrix(n, n);
    out.left = Matrix(n, n);
    out.phase_rigidity = RealVector(n);
    for (int k = 0; k < n; ++k) {
        out.eigenvalues(k) = spec.eigenvalues(order[k]);
        out.right.col(k) = spec.right.col(order[k]);
        out.left.col(k) = spec.left.col(order[k]);
        out.phase_rigidity(k) = spec.phase_rigidity(order[k]);
    }
    return out;
}

inline BiorthogonalSpectrum biorthogonal_eig(const EffectiveHamiltonian& eff,
                                             const BiorthoOptions& opt = {}) {
    return biorthogonal_eig(eff.matrix, eff.doubling, opt);
}

// Eigenvalues only, sorted (Re, Im); used by the trace-formula currents which
// stay finite through exceptional points.
inline Vector eigenvalues_sorted(const Matrix& h) {
    Eigen::ComplexEigenSolver<Matrix> solver(h, false);
    if (solver.info() != Eigen::Success) throw Error("eigensolver failed to converge");
    Vector vals = solver.eigenvalues();
    std::vector<int> order(vals.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (vals(a).real() != vals(b).real()) return vals(a).real() < vals(b).real();
        return vals(a).imag() < vals(b).imag();
    });
    Vector out(vals.size());
    for (int k = 0; k < vals.size(); ++k) out(k) = vals(order[k]);
    return out;
}

namespace detail {

inline double min_pairwise_gap(const Vector& vals, int* a_out = nullptr, int* b_out = nullptr) {
    double best = std::numeric_limits<double>::infinity();
    const int n = static_cast<int>(vals.size());
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            const double d = std::abs(vals(a) - vals(b));
            if (d < best) {
                best = d;
                if (a_out) *a_out = a;
                if (b_out) *b_out = b;
            }
        }
    return best;
}

}  // namespace detail

// A bracketed exceptional-point location.  phi_star/gap/rigidity refer to the
// refined minimum when refinement ran, otherwise to the best grid point.
struct EpInterval {
    double phi_lo = 0.0;
    double phi_hi = 0.0;
    double phi_star = 0.0;
    int mode_a = -1;
    int mode_b = -1;
    double gap = 0.0;
    double rigidity = 0.0;
};

struct EpScanOptions {
    double t_scale = 1.0;          // |t|, sets the gap tolerance unit
    double gap_tol_scale = 1e-3;   // EP when gap < gap_tol_scale * t_scale ...
    double rigidity_tol = 0.1;     // ... and min phase rigidity < this
    double refine_width = 1e-6;    // golden-section bracket width
    double candidate_rigidity = 0.5;  // loose pre-filter for grid candidates
};

// Scans a sorted phi-grid of spectra for exceptional points.  Gap minima with
// collapsing phase rigidity are bracketed by their neighboring grid points;
// when a matrix factory is supplied each bracket is refined by golden-section
// minimization of the spectral gap down to refine_width.  Without a factory,
// only grid points already below both thresholds are reported.
inline std::vector<EpInterval> ep_scan(
    const std::vector<double>& phi,
    const std::vector<BiorthogonalSpectrum>& spectra,
    const std::function<Matrix(double)>& h_at = nullptr,
    const EpScanOptions& opt = {}) {
    if (phi.size() != spectra.size()) throw SpecError("ep_scan: grid/spectra size mismatch");
    const int np = static_cast<int>(phi.size());
    const double gap_tol = opt.gap_tol_scale * opt.t_scale;

    std::vector<double> dmin(np), rmin(np);
    std::vector<std::pair<int, int>> pair_at(np);
    for (int i = 0; i < np; ++i) {
        int a = -1, b = -1;
        dmin[i] = detail::min_pairwise_gap(spectra[i].eigenvalues, &a, &b);
        pair_at[i] = {a, b};
        rmin[i] = spectra[i].phase_rigidity.minCoeff();
    }

    std::vector<EpInterval> found;
    if (!h_at) {
        // strict grid thresholding, contiguous runs merged into one interval
        int i = 0;
        while (i < np) {
            if (dmin[i] < gap_tol && rmin[i] < opt.rigidity_tol) {
                int j = i;
                int best = i;
                while (j + 1 < np && dmin[j + 1] < gap_tol && rmin[j + 1] < opt.rigidity_tol) {
                    ++j;
                    if (dmin[j] < dmin[best]) best = j;
                }
                EpInterval ep;
                ep.phi_lo = phi[std::max(0, i - 1)];
                ep.phi_hi = phi[std::min(np - 1, j + 1)];
                ep.phi_star = phi[best];
                ep.mode_a = pair_at[best].first;
                ep.mode_b = pair_at[best].second;
                ep.gap = dmin[best];
                ep.rigidity = rmin[best];
                found.push_back(ep);
                i = j + 1;
            } else {
                ++i;
            }
        }
        return found;
    }

    const auto gap_of = [&](double p) {
        int a, b;
        return detail::min_pairwise_gap(eigenvalues_sorted(h_at(p)), &a, &b);
    };

    for (int i = 1; i + 1 < np; ++i) {
        const bool local_min = dmin[i] < dmin[i - 1] && dmin[i] <= dmin[i + 1];
        if (!local_min || rmin[i] >= opt.candidate_rigidity) continue;

        // golden-section minimization of the gap inside the bracket
        const double gr = 0.6180339887498949;
        double lo = phi[i - 1], hi = phi[i + 1];
        double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
        double f1 = gap_of(x1), f2 = gap_of(x2);
        while (hi - lo > opt.refine_width && std::min(f1, f2) > 1e-14) {
            if (f1 < f2) {
                hi = x2; x2 = x1; f2 = f1;
                x1 = hi - gr * (hi - lo);
                f1 = gap_of(x1);
            } else {
                lo = x1; x1 = x2; f1 = f2;
                x2 = lo + gr * (hi - lo);
                f2 = gap_of(x2);
            }
        }
        const double star = f1 < f2 ? x1 : x2;

        EpInterval ep;
        ep.phi_lo = phi[i - 1];
        ep.phi_hi = phi[i + 1];
        ep.phi_star = star;
        try {
            const BiorthogonalSpectrum s = biorthogonal_eig(h_at(star), spectra[i].doubling);
            int a, b;
            ep.gap = detail::min_pairwise_gap(s.eigenvalues, &a, &b);
            ep.mode_a = a;
            ep.mode_b = b;
            ep.rigidity = std::min(s.phase_rigidity(a), s.phase_rigidity(b));
        } catch (const DefectiveError& e) {
            // landing exactly on the EP is the strongest confirmation
            ep.gap = 0.0;
            ep.rigidity = e.min_overlap;
            ep.mode_a = pair_at[i].first;
            ep.mode_b = pair_at[i].second;
        }
        if (ep.gap < gap_tol && ep.rigidity < opt.rigidity_tol) found.push_back(ep);
    }
    return found;
}

struct AmbiguityWarning {
    int grid_index;   // step into which the ambiguous assignment leads
    double cost_gap;  // difference between the two near-equal assignment costs
};

struct BranchTracks {
    Matrix values;  // (branch, phi index)
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> unresolved;
    Eigen::MatrixXi order;  // original mode index per (branch, phi index)
    std::vector<AmbiguityWarning> warnings;
};

// Connects eigenvalue sets across the sweep by greedy minimal-distance
// assignment against linearly extrapolated branch positions, which resolves
// plain level crossings.  Branch identity is not forced through flagged EP
// intervals; the affected rows are marked unresolved there instead.
inline BranchTracks track_branches(const std::vector<double>& phi,
                                   const std::vector<Vector>& sets,
                                   const std::vector<EpInterval>& eps = {}) {
    if (phi.size() != sets.size() || sets.empty())
        throw SpecError("track_branches: grid/sets size mismatch");
    const int np = static_cast<int>(phi.size());
    const int nb = static_cast<int>(sets[0].size());

    BranchTracks tr;
    tr.values = Matrix(nb, np);
    tr.order = Eigen::MatrixXi(nb, np);
    tr.unresolved = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(nb, np, false);

    for (int b = 0; b < nb; ++b) {
        tr.values(b, 0) = sets[0](b);
        tr.order(b, 0) = b;
    }

    struct Cand { double d; int b, m; };
    for (int i = 1; i < np; ++i) {
        if (sets[i].size() != nb) throw SpecError("track_branches: varying set size");
        std::vector<Cand> cands;
        cands.reserve(static_cast<std::size_t>(nb) * nb);
        for (int b = 0; b < nb; ++b) {
            const Complex target = i >= 2
                                       ? 2.0 * tr.values(b, i - 1) - tr.values(b, i - 2)
                                       : tr.values(b, i - 1);
            for (int m = 0; m < nb; ++m)
                cands.push_back({std::abs(target - sets[i](m)), b, m});
        }
        std::sort(cands.begin(), cands.end(),
                  [](const Cand& a, const Cand& b) { return a.d < b.d; });
        std::vector<char> b_used(nb, 0), m_used(nb, 0);
        int assigned = 0;
        for (std::size_t c = 0; c < cands.size() && assigned < nb; ++c) {
            const Cand& cd = cands[c];
            if (b_used[cd.b] || m_used[cd.m]) continue;
            // near-tie with the next available alternative for the same branch
            for (std::size_t c2 = c + 1; c2 < cands.size(); ++c2) {
                if (cands[c2].b != cd.b || m_used[cands[c2].m]) continue;
                if (cands[c2].d - cd.d < 1e-12)
                    tr.warnings.push_back({i, cands[c2].d - cd.d});
                break;
            }
            b_used[cd.b] = m_used[cd.m] = 1;
            tr.values(cd.b, i) = sets[i](cd.m);
            tr.order(cd.b, i) = cd.m;
            ++assigned;
        }
    }

    for (const EpInterval& ep : eps) {
        for (int i = 0; i < np; ++i) {
            if (phi[i] < ep.phi_lo || phi[i] > ep.phi_hi) continue;
            // mark the two branches closest to each other at this grid point
            int ba = 0, bb = 1;
            double best = std::numeric_limits<double>::infinity();
            for (int a = 0; a < nb; ++a)
                for (int b = a + 1; b < nb; ++b) {
                    const double d = std::abs(tr.values(a, i) - tr.values(b, i));
                    if (d < best) { best = d; ba = a; bb = b; }
                }
            tr.unresolved(ba, i) = true;
            tr.unresolved(bb, i) = true;
        }
    }
    return tr;
}

}  // namespace nhpc

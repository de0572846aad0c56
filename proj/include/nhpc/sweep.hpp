#pragma once

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "nhpc/biorthogonal.hpp"
#include "nhpc/config.hpp"
#include "nhpc/exact_diagonalization.hpp"
#include "nhpc/observables.hpp"
#include "nhpc/susceptibility.hpp"
#include "nhpc/version.hpp"

// Sweep orchestration: evaluates the requested methods on the phi grid,
// serializes currents/spectra/EP/susceptibility data as CSV with a JSON run
// manifest, and hosts the invariant verification suite.  Output is
// deterministic for a given config and seed; every EP nudge is recorded.

namespace nhpc {

namespace detail {

inline void parallel_for(int n, int workers, const std::function<void(int)>& body) {
    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    workers = std::min(workers, n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

// 17 significant digits: doubles round-trip exactly.
inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class CsvWriter {
  public:
    explicit CsvWriter(const std::filesystem::path& path)
        : out_(path, std::ios::binary) {
        if (!out_) throw Error("cannot open output file " + path.string());
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';  // LF only
    }
  private:
    std::ofstream out_;
};

}  // namespace detail

struct EpNudge {
    double phi;
    double nudge;
};

// Biorthogonal spectrum with the refuse-and-nudge policy: an exactly
// defective parameter point is retried once at phi + 1e-9.
inline BiorthogonalSpectrum spectrum_with_nudge(const ModelSpec& model,
                                                const std::vector<ReservoirSpec>& reservoirs,
                                                double phi,
                                                std::optional<EpNudge>* nudge_out = nullptr) {
    ModelSpec m = model;
    m.phase = phi;
    try {
        return biorthogonal_eig(effective_hamiltonian(m, reservoirs));
    } catch (const DefectiveError&) {
        const double nudge = 1e-9;
        m.phase = phi + nudge;
        BiorthogonalSpectrum s = biorthogonal_eig(effective_hamiltonian(m, reservoirs));
        if (nudge_out) *nudge_out = EpNudge{phi, nudge};
        return s;
    }
}

struct SweepResult {
    std::vector<std::string> files;
    std::vector<EpNudge> nudges;
    double wall_seconds = 0.0;
};

namespace detail {

struct PhiPoint {
    double nh_trace = 0.0, nh_operator = 0.0, rr = 0.0, iso = 0.0, exact = 0.0;
    Complex lr{0.0, 0.0};
    std::vector<double> rr_bonds;
    Vector eigenvalues;
    RealVector rigidity;
    std::vector<double> sus_nh, sus_exact;
    std::optional<EpNudge> nudge;
};

}  // namespace detail

inline SweepResult run_sweep(const RunConfig& config) {
    config.validate();
    const auto t_start = std::chrono::steady_clock::now();
    namespace fs = std::filesystem;
    const fs::path dir(config.output_dir);
    fs::create_directories(dir);

    SweepResult result;
    std::vector<fs::path> written;
    const auto track_file = [&](const fs::path& p) {
        written.push_back(p);
        result.files.push_back(p.filename().string());
    };

    try {
        const std::vector<double> phis = config.phi_grid.points();
        const int np = static_cast<int>(phis.size());
        const Temperature temp =
            config.beta ? Temperature::finite(*config.beta) : Temperature::zero_t();
        const OracleOptions oracle{config.dim_cap, config.delta_phi};
        const std::vector<double> omegas =
            config.omega_grid ? config.omega_grid->points() : std::vector<double>{};

        const bool need_spectrum = !config.methods.empty();
        const bool need_vectors = config.has(Method::NhOperator) || config.has(Method::Lr) ||
                                  config.has(Method::Rr) || config.has(Method::SusceptibilityNh) ||
                                  !config.rr_bonds.empty();

        std::vector<detail::PhiPoint> pts(np);
        detail::parallel_for(np, config.workers, [&](int i) {
            const double phi = phis[i];
            detail::PhiPoint& p = pts[i];
            ModelSpec m = config.model;
            m.phase = phi;

            if (need_spectrum || need_vectors) {
                // spectrum.csv carries phase rigidities, so the full
                // biorthogonal solve runs even for eigenvalue-only methods
                const BiorthogonalSpectrum spec =
                    spectrum_with_nudge(config.model, config.reservoirs, phi, &p.nudge);
                p.eigenvalues = spec.eigenvalues;
                p.rigidity = spec.phase_rigidity;
                if (need_vectors) {
                    const Matrix j_op = current_operator(m, default_current_bond(m));
                    if (config.has(Method::NhOperator))
                        p.nh_operator = expect_quadratic(spec, j_op, temp);
                    if (config.has(Method::Lr)) p.lr = current_lr(spec, j_op);
                    if (config.has(Method::Rr)) p.rr = current_rr(spec, j_op);
                    for (int b : config.rr_bonds)
                        p.rr_bonds.push_back(current_rr(spec, current_operator(m, b)));
                    if (config.has(Method::SusceptibilityNh)) {
                        p.sus_nh.resize(omegas.size());
                        for (std::size_t w = 0; w < omegas.size(); ++w)
                            p.sus_nh[w] = im_susceptibility_nh(spec, m, omegas[w]);
                    }
                }
            }
            if (config.has(Method::NhTrace))
                p.nh_trace = config.beta
                                 ? persistent_current_finite_t(config.model, config.reservoirs,
                                                               phi, *config.beta, config.delta_phi)
                                 : persistent_current_trace(config.model, config.reservoirs, phi,
                                                            config.delta_phi);
            if (config.has(Method::Iso)) p.iso = isolated_current(config.model, phi, temp);
            if (config.has(Method::Exact))
                p.exact = config.beta ? exact_free_energy_current(config.model, config.reservoirs,
                                                                  phi, *config.beta, oracle)
                                      : exact_current(config.model, config.reservoirs, phi, temp,
                                                      oracle);
            if (config.has(Method::SusceptibilityExact))
                p.sus_exact = susceptibility_exact_row(config.model, config.reservoirs, phi,
                                                       omegas, config.eta, oracle);
        });

        for (const auto& p : pts)
            if (p.nudge) result.nudges.push_back(*p.nudge);

        // currents.csv
        if (config.has(Method::NhTrace) || config.has(Method::NhOperator) ||
            config.has(Method::Lr) || config.has(Method::Rr) || config.has(Method::Iso) ||
            config.has(Method::Exact) || !config.rr_bonds.empty()) {
            const fs::path path = dir / "currents.csv";
            detail::CsvWriter csv(path);
            std::vector<std::string> header = {"phi"};
            if (config.has(Method::NhTrace)) header.push_back("nh_trace");
            if (config.has(Method::NhOperator)) header.push_back("nh_operator");
            if (config.has(Method::Lr)) {
                header.push_back("lr_re");
                header.push_back("lr_im");
            }
            if (config.has(Method::Rr)) header.push_back("rr");
            if (config.has(Method::Iso)) header.push_back("iso");
            if (config.has(Method::Exact)) header.push_back("exact");
            for (int b : config.rr_bonds) header.push_back("rr_bond" + std::to_string(b));
            csv.row(header);
            for (int i = 0; i < np; ++i) {
                std::vector<std::string> row = {detail::fmt(phis[i])};
                const auto& p = pts[i];
                if (config.has(Method::NhTrace)) row.push_back(detail::fmt(p.nh_trace));
                if (config.has(Method::NhOperator)) row.push_back(detail::fmt(p.nh_operator));
                if (config.has(Method::Lr)) {
                    row.push_back(detail::fmt(p.lr.real()));
                    row.push_back(detail::fmt(p.lr.imag()));
                }
                if (config.has(Method::Rr)) row.push_back(detail::fmt(p.rr));
                if (config.has(Method::Iso)) row.push_back(detail::fmt(p.iso));
                if (config.has(Method::Exact)) row.push_back(detail::fmt(p.exact));
                for (double v : p.rr_bonds) row.push_back(detail::fmt(v));
                csv.row(row);
            }
            track_file(path);
        }

        // spectrum.csv + eps.csv
        std::vector<EpInterval> eps_found;
        if (need_spectrum) {
            std::vector<BiorthogonalSpectrum> thin(np);
            std::vector<Vector> sets(np);
            for (int i = 0; i < np; ++i) {
                thin[i].eigenvalues = pts[i].eigenvalues;
                thin[i].phase_rigidity = pts[i].rigidity;
                thin[i].doubling = config.model.doubling();
                sets[i] = pts[i].eigenvalues;
            }
            EpScanOptions ep_opt;
            ep_opt.t_scale = std::abs(config.model.hopping);
            const auto h_at = [&](double phi) {
                ModelSpec m = config.model;
                m.phase = phi;
                return effective_hamiltonian(m, config.reservoirs).matrix;
            };
            eps_found = ep_scan(phis, thin, h_at, ep_opt);
            const BranchTracks tracks = track_branches(phis, sets, eps_found);

            const fs::path spath = dir / "spectrum.csv";
            detail::CsvWriter csv(spath);
            csv.row({"phi", "branch", "re", "im", "phase_rigidity", "unresolved"});
            const int nb = static_cast<int>(tracks.values.rows());
            for (int i = 0; i < np; ++i)
                for (int b = 0; b < nb; ++b)
                    csv.row({detail::fmt(phis[i]), std::to_string(b),
                             detail::fmt(tracks.values(b, i).real()),
                             detail::fmt(tracks.values(b, i).imag()),
                             detail::fmt(pts[i].rigidity.size()
                                             ? pts[i].rigidity(tracks.order(b, i))
                                             : 1.0),
                             tracks.unresolved(b, i) ? "1" : "0"});
            track_file(spath);

            const fs::path epath = dir / "eps.csv";
            detail::CsvWriter ecsv(epath);
            ecsv.row({"phi_lo", "phi_hi", "phi_star", "mode_a", "mode_b", "gap", "rigidity"});
            for (const EpInterval& ep : eps_found)
                ecsv.row({detail::fmt(ep.phi_lo), detail::fmt(ep.phi_hi), detail::fmt(ep.phi_star),
                          std::to_string(ep.mode_a), std::to_string(ep.mode_b),
                          detail::fmt(ep.gap), detail::fmt(ep.rigidity)});
            track_file(epath);
        }

        // susceptibility maps: dense CSV (phi rows, omega columns) + sidecar
        const auto write_map = [&](const std::string& method,
                                   const std::function<const std::vector<double>&(int)>& row_of) {
            const fs::path mpath = dir / ("susceptibility_" + method + ".csv");
            detail::CsvWriter csv(mpath);
            std::vector<std::string> header = {"phi"};
            for (double w : omegas) header.push_back("omega_" + detail::fmt(w));
            csv.row(header);
            double max_abs = 0.0;
            for (int i = 0; i < np; ++i) {
                std::vector<std::string> row = {detail::fmt(phis[i])};
                for (double v : row_of(i)) {
                    row.push_back(detail::fmt(v));
                    max_abs = std::max(max_abs, std::abs(v));
                }
                csv.row(row);
            }
            track_file(mpath);

            json meta;
            meta["method"] = method;
            meta["phi_grid"] = {{"start", config.phi_grid.start},
                                {"stop", config.phi_grid.stop},
                                {"count", config.phi_grid.count}};
            meta["omega_grid"] = {{"start", config.omega_grid->start},
                                  {"stop", config.omega_grid->stop},
                                  {"count", config.omega_grid->count}};
            if (method == "exact") meta["eta"] = config.eta;
            meta["normalization"] = max_abs;
            const fs::path jpath = dir / ("susceptibility_" + method + ".meta.json");
            std::ofstream js(jpath, std::ios::binary);
            js << meta.dump(2) << '\n';
            track_file(jpath);
        };
        if (config.has(Method::SusceptibilityNh))
            write_map("nh", [&](int i) -> const std::vector<double>& { return pts[i].sus_nh; });
        if (config.has(Method::SusceptibilityExact))
            write_map("exact",
                      [&](int i) -> const std::vector<double>& { return pts[i].sus_exact; });

        // amplitude-vs-coupling scan
        if (!config.kappa_scan.empty()) {
            const fs::path apath = dir / "amplitudes.csv";
            detail::CsvWriter csv(apath);
            csv.row({"kappa", "amp_nh_trace", "amp_exact"});
            for (double kappa : config.kappa_scan) {
                std::vector<ReservoirSpec> res = config.reservoirs;
                for (auto& r : res) r.tunneling = kappa;
                double amp_nh = 0.0, amp_ex = 0.0;
                for (double phi : phis) {
                    amp_nh = std::max(amp_nh, std::abs(persistent_current_trace(
                                                  config.model, res, phi, config.delta_phi)));
                    amp_ex = std::max(amp_ex, std::abs(exact_ground_energy_current(
                                                  config.model, res, phi, oracle)));
                }
                csv.row({detail::fmt(kappa), detail::fmt(amp_nh), detail::fmt(amp_ex)});
            }
            track_file(apath);
        }

        // manifest
        result.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        json manifest;
        manifest["version"] = version;
        manifest["config"] = config.to_json();
        manifest["ep_nudges"] = json::array();
        for (const EpNudge& n : result.nudges)
            manifest["ep_nudges"].push_back({{"phi", n.phi}, {"nudge", n.nudge}});
        manifest["outputs"] = result.files;
        manifest["wall_seconds"] = result.wall_seconds;
        const fs::path mpath = dir / "run_manifest.json";
        {
            std::ofstream ms(mpath, std::ios::binary);
            ms << manifest.dump(2) << '\n';
        }
        track_file(mpath);
    } catch (...) {
        for (const auto& p : written) {
            std::error_code ec;
            std::filesystem::remove(p, ec);
        }
        throw;
    }
    return result;
}

// ---------------------------------------------------------------------------
// Invariant verification suite
// ---------------------------------------------------------------------------

struct VerifyCheck {
    std::string name;
    double residual;
    double threshold;
    bool passed;
};

struct VerifyReport {
    std::vector<VerifyCheck> checks;
    bool all_passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }
};

namespace detail {

inline Matrix random_hermitian(int n, std::mt19937_64& rng, bool traceless) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng));
    Matrix h = (a + a.adjoint()) / 2.0;
    if (traceless) h -= (h.trace() / static_cast<double>(n)) * Matrix::Identity(n, n);
    return h;
}

inline Matrix random_passive(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix h = random_hermitian(n, rng, false);
    Matrix b(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) b(i, j) = Complex(g(rng), g(rng));
    // negative semidefinite anti-Hermitian part
    return h - Complex(0.0, 0.5) * (b * b.adjoint());
}

// <O> with independent complex shifts applied to f_eff and its conjugate.
inline double expect_shifted(const BiorthogonalSpectrum& spec, const Matrix& op, Complex c1,
                             Complex c2) {
    Complex acc(0.0, 0.0);
    for (int k = 0; k < spec.size(); ++k) {
        const Complex f = f_eff_zero(spec.eigenvalues(k));
        const Complex lr = spec.left.col(k).dot(op * spec.right.col(k));
        const Complex rl = spec.right.col(k).dot(op * spec.left.col(k));
        acc += lr * (f + c1) - rl * std::conj(f + c2);
    }
    return (acc / Complex(0.0, 2.0)).real() / spec.doubling;
}

}  // namespace detail

// Runs the invariant suite on the configured model: gauge invariance of the
// NH distribution, particle-hole pairing, Hermitian-limit recovery, local
// conservation, the Hellmann-Feynman identity and NH-vs-exact deviation.
inline VerifyReport verify(const RunConfig& config, double tol_scale = 1.0,
                           std::ostream& out = std::cout) {
    config.validate();
    VerifyReport report;
    const auto check = [&](const std::string& name, double residual, double threshold) {
        const bool ok = residual <= threshold * tol_scale;
        report.checks.push_back({name, residual, threshold * tol_scale, ok});
        out << (ok ? "[PASS] " : "[FAIL] ") << name << ": residual " << residual
            << " (threshold " << threshold * tol_scale << ")\n";
    };

    // 1. gauge invariance on random NH spectra
    {
        std::mt19937_64 rng(config.seed.value_or(20240901ull));
        double worst_real = 0.0, worst_traceless = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            const int n = 6;
            const BiorthogonalSpectrum spec =
                biorthogonal_eig(detail::random_passive(n, rng), 1);
            const Matrix o_traceless = detail::random_hermitian(n, rng, true);
            const Matrix o_full = detail::random_hermitian(n, rng, false);
            const double base_t = detail::expect_shifted(spec, o_traceless, 0.0, 0.0);
            const double base_f = detail::expect_shifted(spec, o_full, 0.0, 0.0);
            const double c = 0.37 + 0.05 * trial;
            worst_real = std::max(worst_real,
                                  std::abs(detail::expect_shifted(spec, o_full, c, c) - base_f));
            const Complex c1(0.2, -0.9), c2(-1.1, 0.4);
            worst_traceless = std::max(
                worst_traceless,
                std::abs(detail::expect_shifted(spec, o_traceless, c1, c2) - base_t));
        }
        check("gauge_invariance_real_shift", worst_real, 1e-10);
        check("gauge_invariance_traceless_complex", worst_traceless, 1e-10);
    }

    const std::vector<double> sample_phis = {0.7, 1.9, 3.0, 4.2, 5.6};

    // 2. particle-hole pairing (BdG only)
    if (config.model.doubling() == 2) {
        double worst = 0.0;
        for (double phi : sample_phis) {
            ModelSpec m = config.model;
            m.phase = phi;
            const Vector ev = eigenvalues_sorted(effective_hamiltonian(m, config.reservoirs).matrix);
            for (int k = 0; k < ev.size(); ++k) {
                const Complex target = -std::conj(ev(k));
                double best = 1e300;
                for (int q = 0; q < ev.size(); ++q)
                    best = std::min(best, std::abs(ev(q) - target));
                worst = std::max(worst, best);
            }
        }
        check("particle_hole_pairing", worst, 1e-9);
    }

    // 3. Hermitian-limit recovery at kappa = -1e-6
    {
        std::vector<ReservoirSpec> res = config.reservoirs;
        for (auto& r : res) r.tunneling = -1e-6;
        double worst = 0.0;
        for (double phi : sample_phis) {
            ModelSpec m = config.model;
            m.phase = phi;
            const double iso = isolated_current(config.model, phi);
            const double tr = persistent_current_trace(config.model, res, phi, config.delta_phi);
            const BiorthogonalSpectrum spec = spectrum_with_nudge(config.model, res, phi);
            const Matrix j_op = current_operator(m, default_current_bond(m));
            worst = std::max(worst, std::abs(tr - iso));
            worst = std::max(worst, std::abs(expect_quadratic(spec, j_op) - iso));
            worst = std::max(worst, std::abs(current_lr(spec, j_op).real() - iso));
            worst = std::max(worst, std::abs(current_rr(spec, j_op) - iso));
        }
        check("hermitian_limit_recovery", worst, 1e-5);
    }

    // 4. local conservation of the NH operator current
    {
        double worst = 0.0;
        const auto [blo, bhi] = normal_bond_range(config.model);
        for (double phi : {1.1, 2.8}) {
            ModelSpec m = config.model;
            m.phase = phi;
            const BiorthogonalSpectrum spec =
                spectrum_with_nudge(config.model, config.reservoirs, phi);
            double ref = 0.0;
            bool first = true;
            for (int b = blo; b <= bhi; ++b) {
                if (config.model.kind == ModelKind::Ring && b == config.model.n_sites) continue;
                const double v = expect_quadratic(spec, current_operator(m, b));
                if (first) {
                    ref = v;
                    first = false;
                } else {
                    worst = std::max(worst, std::abs(v - ref));
                }
            }
        }
        check("nh_current_conservation", worst, 1e-10);
    }

    // 5. Hellmann-Feynman identity for rigid modes
    {
        double worst = 0.0;
        const double dphi = 1e-5;
        for (double phi : {0.9, 2.2}) {
            ModelSpec m = config.model;
            m.phase = phi;
            const BiorthogonalSpectrum spec =
                spectrum_with_nudge(config.model, config.reservoirs, phi);
            const Matrix j_op = current_operator(m, default_current_bond(m));
            const Vector evp = detail::effective_eigenvalues(config.model, config.reservoirs, phi + dphi);
            const Vector evm = detail::effective_eigenvalues(config.model, config.reservoirs, phi - dphi);
            for (int k = 0; k < spec.size(); ++k) {
                if (spec.phase_rigidity(k) <= 0.5) continue;
                const Complex e = spec.eigenvalues(k);
                Complex ep = evp(0), em = evm(0);
                double bp = 1e300, bm = 1e300;
                for (int q = 0; q < evp.size(); ++q) {
                    if (std::abs(evp(q) - e) < bp) { bp = std::abs(evp(q) - e); ep = evp(q); }
                    if (std::abs(evm(q) - e) < bm) { bm = std::abs(evm(q) - e); em = evm(q); }
                }
                const Complex deriv = (ep - em) / (2.0 * dphi);
                const Complex lr = spec.left.col(k).dot(j_op * spec.right.col(k));
                worst = std::max(worst,
                                 std::abs(lr - static_cast<double>(spec.doubling) * deriv));
            }
        }
        check("hellmann_feynman", worst, 1e-5);
    }

    // 6. NH-vs-exact deviation on a coarse grid
    if (total_layout(config.model, config.reservoirs).dimension() <= config.dim_cap) {
        double worst = 0.0, max_i = 0.0;
        for (double phi : sample_phis) {
            const double nh =
                persistent_current_trace(config.model, config.reservoirs, phi, config.delta_phi);
            const double ex = exact_current(config.model, config.reservoirs, phi);
            worst = std::max(worst, std::abs(nh - ex));
            max_i = std::max(max_i, std::abs(ex));
        }
        check("nh_vs_exact_relative", max_i > 0 ? worst / max_i : 0.0, 2.5e-2);
    }

    return report;
}

}  // namespace nhpc

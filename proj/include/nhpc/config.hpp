#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nhpc/errors.hpp"
#include "nhpc/models.hpp"

// Run configuration: JSON schema, validation with field-level diagnostics,
// and the embedded figure presets.

namespace nhpc {

using nlohmann::json;

inline constexpr double two_pi = 2.0 * pi;

struct GridSpec {
    double start = 0.0;
    double stop = two_pi;
    int count = 201;

    std::vector<double> points() const {
        std::vector<double> out(count);
        for (int i = 0; i < count; ++i)
            out[i] = count == 1 ? start : start + (stop - start) * i / (count - 1);
        return out;
    }
    double spacing() const { return count > 1 ? (stop - start) / (count - 1) : 0.0; }
};

enum class Method {
    NhTrace,
    NhOperator,
    Lr,
    Rr,
    Iso,
    Exact,
    SusceptibilityNh,
    SusceptibilityExact,
};

inline const std::map<std::string, Method>& method_names() {
    static const std::map<std::string, Method> names = {
        {"nh_trace", Method::NhTrace},
        {"nh_operator", Method::NhOperator},
        {"lr", Method::Lr},
        {"rr", Method::Rr},
        {"iso", Method::Iso},
        {"exact", Method::Exact},
        {"susceptibility_nh", Method::SusceptibilityNh},
        {"susceptibility_exact", Method::SusceptibilityExact},
    };
    return names;
}

inline std::string method_name(Method m) {
    for (const auto& [name, v] : method_names())
        if (v == m) return name;
    return "?";
}

struct RunConfig {
    ModelSpec model;
    std::vector<ReservoirSpec> reservoirs;
    GridSpec phi_grid;
    std::optional<double> beta;
    std::vector<Method> methods;
    std::optional<GridSpec> omega_grid;
    double delta_phi = 1e-4;
    std::optional<std::uint64_t> seed;
    double eta = 0.03;
    std::vector<int> rr_bonds;            // extra site-resolved RR columns
    std::vector<double> kappa_scan;       // amplitude-vs-coupling scan
    std::string output_dir = ".";
    int workers = 0;                      // 0 = hardware concurrency
    int dim_cap = 2000;

    bool has(Method m) const {
        for (Method x : methods)
            if (x == m) return true;
        return false;
    }

    void validate() const;
    static RunConfig from_json(const json& j);
    json to_json() const;
};

inline void RunConfig::validate() const {
    if (phi_grid.count < 2) throw ConfigError("phi_grid.count", "must be >= 2");
    if (!(phi_grid.stop > phi_grid.start)) throw ConfigError("phi_grid.stop", "must exceed start");
    if (!(delta_phi > 0.0)) throw ConfigError("delta_phi", "must be positive");
    if (!(eta > 0.0)) throw ConfigError("eta", "must be positive");
    if (beta && !(*beta > 0.0)) throw ConfigError("beta", "must be positive");
    if (methods.empty() && kappa_scan.empty())
        throw ConfigError("methods", "at least one method (or a kappa_scan) required");

    try {
        model.validate();
    } catch (const SpecError& e) {
        throw ConfigError("model", e.what());
    }
    for (std::size_t r = 0; r < reservoirs.size(); ++r) {
        const std::string field = "reservoirs[" + std::to_string(r) + "]";
        const auto& res = reservoirs[r];
        if (res.tunneling > 0.0) throw ConfigError(field + ".tunneling", "must be <= 0");
        if (res.hopping >= 0.0) throw ConfigError(field + ".hopping", "must be negative");
        if (res.n_sites < 1) throw ConfigError(field + ".n_sites", "must be >= 1");
        if (res.attach_site < 1 || res.attach_site > model.total_sites())
            throw ConfigError(field + ".attach_site", "outside system range");
        if (std::abs(res.chemical_potential / 2.0) >= std::abs(res.hopping))
            throw ConfigError(field + ".chemical_potential", "band edge: |g/2| >= |t|");
    }
    if ((has(Method::SusceptibilityNh) || has(Method::SusceptibilityExact)) && !omega_grid)
        throw ConfigError("omega_grid", "required for susceptibility methods");
    if (omega_grid && omega_grid->count < 2)
        throw ConfigError("omega_grid.count", "must be >= 2");
    if (has(Method::Exact) || has(Method::SusceptibilityExact) || !kappa_scan.empty()) {
        TotalLayout lay = total_layout(model, reservoirs);
        if (lay.dimension() > dim_cap)
            throw ConfigError("reservoirs", "total dimension " + std::to_string(lay.dimension()) +
                                                " exceeds dim_cap " + std::to_string(dim_cap));
    }
    for (double k : kappa_scan)
        if (k > 0.0) throw ConfigError("kappa_scan", "entries must be <= 0");
    auto [blo, bhi] = normal_bond_range(model);
    for (int b : rr_bonds)
        if (b < blo || b > bhi) throw ConfigError("rr_bonds", "bond outside normal segment");
}

inline RunConfig RunConfig::from_json(const json& j) {
    RunConfig cfg;
    try {
        const json& jm = j.at("model");
        const std::string kind = jm.at("kind").get<std::string>();
        if (kind == "sns") {
            cfg.model.kind = ModelKind::Sns;
            cfg.model.n_left = jm.at("n_left").get<int>();
            cfg.model.n_middle = jm.at("n_middle").get<int>();
            cfg.model.n_right = jm.at("n_right").get<int>();
            cfg.model.pairing = jm.value("pairing", 0.0);
        } else if (kind == "ring") {
            cfg.model.kind = ModelKind::Ring;
            cfg.model.n_sites = jm.at("n_sites").get<int>();
            if (jm.contains("ring_hoppings"))
                cfg.model.ring_hoppings = jm.at("ring_hoppings").get<std::vector<double>>();
        } else {
            throw ConfigError("model.kind", "expected \"sns\" or \"ring\"");
        }
        cfg.model.hopping = jm.value("hopping", -1.0);
        cfg.model.chemical_potential = jm.value("chemical_potential", 0.0);

        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        if (cfg.model.kind == ModelKind::Ring && cfg.model.ring_hoppings.empty()) {
            if (!cfg.seed)
                throw ConfigError("model.ring_hoppings", "provide hoppings or a seed");
            cfg.model.ring_hoppings =
                disordered_ring_hoppings(cfg.model.hopping, cfg.model.n_sites, *cfg.seed);
        }

        for (const json& jr : j.value("reservoirs", json::array())) {
            ReservoirSpec res;
            res.n_sites = jr.at("n_sites").get<int>();
            res.hopping = jr.value("hopping", -1.0);
            res.chemical_potential = jr.value("chemical_potential", 0.0);
            res.attach_site = jr.at("attach_site").get<int>();
            res.tunneling = jr.at("tunneling").get<double>();
            cfg.reservoirs.push_back(res);
        }

        const json& jp = j.at("phi_grid");
        cfg.phi_grid = {jp.at("start").get<double>(), jp.at("stop").get<double>(),
                        jp.at("count").get<int>()};
        if (j.contains("beta") && !j.at("beta").is_null()) cfg.beta = j.at("beta").get<double>();
        for (const json& jmeth : j.value("methods", json::array())) {
            const std::string name = jmeth.get<std::string>();
            auto it = method_names().find(name);
            if (it == method_names().end())
                throw ConfigError("methods", "unknown method \"" + name + "\"");
            cfg.methods.push_back(it->second);
        }
        if (j.contains("omega_grid")) {
            const json& jw = j.at("omega_grid");
            cfg.omega_grid = GridSpec{jw.at("start").get<double>(), jw.at("stop").get<double>(),
                                      jw.at("count").get<int>()};
        }
        cfg.delta_phi = j.value("delta_phi", 1e-4);
        cfg.eta = j.value("eta", 0.03);
        cfg.rr_bonds = j.value("rr_bonds", std::vector<int>());
        cfg.kappa_scan = j.value("kappa_scan", std::vector<double>());
        cfg.output_dir = j.value("output_dir", std::string("."));
        cfg.workers = j.value("workers", 0);
        cfg.dim_cap = j.value("dim_cap", 2000);
    } catch (const json::exception& e) {
        throw ConfigError("<json>", e.what());
    }
    return cfg;
}

inline json RunConfig::to_json() const {
    json jm;
    if (model.kind == ModelKind::Sns) {
        jm["kind"] = "sns";
        jm["n_left"] = model.n_left;
        jm["n_middle"] = model.n_middle;
        jm["n_right"] = model.n_right;
        jm["pairing"] = model.pairing;
    } else {
        jm["kind"] = "ring";
        jm["n_sites"] = model.n_sites;
        jm["ring_hoppings"] = model.ring_hoppings;
    }
    jm["hopping"] = model.hopping;
    jm["chemical_potential"] = model.chemical_potential;

    json j;
    j["model"] = jm;
    j["reservoirs"] = json::array();
    for (const auto& r : reservoirs)
        j["reservoirs"].push_back({{"n_sites", r.n_sites},
                                   {"hopping", r.hopping},
                                   {"chemical_potential", r.chemical_potential},
                                   {"attach_site", r.attach_site},
                                   {"tunneling", r.tunneling}});
    j["phi_grid"] = {{"start", phi_grid.start}, {"stop", phi_grid.stop}, {"count", phi_grid.count}};
    if (beta) j["beta"] = *beta;
    j["methods"] = json::array();
    for (Method m : methods) j["methods"].push_back(method_name(m));
    if (omega_grid)
        j["omega_grid"] = {{"start", omega_grid->start},
                           {"stop", omega_grid->stop},
                           {"count", omega_grid->count}};
    j["delta_phi"] = delta_phi;
    if (seed) j["seed"] = *seed;
    j["eta"] = eta;
    if (!rr_bonds.empty()) j["rr_bonds"] = rr_bonds;
    if (!kappa_scan.empty()) j["kappa_scan"] = kappa_scan;
    j["output_dir"] = output_dir;
    j["workers"] = workers;
    j["dim_cap"] = dim_cap;
    return j;
}

namespace detail {

inline ModelSpec sns_device() {
    ModelSpec m;
    m.kind = ModelKind::Sns;
    m.n_left = m.n_middle = m.n_right = 4;
    m.hopping = -1.0;
    m.pairing = 1.0;
    m.chemical_potential = -1.1;
    return m;
}

inline ModelSpec ring_device() {
    ModelSpec m;
    m.kind = ModelKind::Ring;
    m.n_sites = 6;
    m.hopping = -1.0;
    m.chemical_potential = -1.0;
    m.ring_hoppings = {-0.859915, -0.884918, -0.918446, -0.846311, -1.19937, -0.984676};
    return m;
}

inline std::vector<ReservoirSpec> sns_reservoirs(double kappa = -0.4) {
    return {{101, -1.0, -1.1, 1, kappa}, {101, -1.0, -1.1, 12, kappa}};
}

inline std::vector<ReservoirSpec> ring_reservoirs(double kappa = -1.0) {
    return {{101, -1.0, 0.0, 6, kappa}};
}

}  // namespace detail

// Built-in parameter sets reproducing the reference figure data.
inline const std::map<std::string, RunConfig>& presets() {
    static const std::map<std::string, RunConfig> table = [] {
        std::map<std::string, RunConfig> t;

        auto sns_base = [] {
            RunConfig c;
            c.model = detail::sns_device();
            c.reservoirs = detail::sns_reservoirs();
            c.phi_grid = {0.0, two_pi, 201};
            return c;
        };
        auto ring_base = [] {
            RunConfig c;
            c.model = detail::ring_device();
            c.reservoirs = detail::ring_reservoirs();
            c.phi_grid = {0.0, two_pi, 201};
            return c;
        };

        {  // complex spectra + current through the EP window
            RunConfig c = sns_base();
            c.methods = {Method::NhTrace};
            t["fig1c"] = c;
            c = ring_base();
            c.methods = {Method::NhTrace};
            t["fig1d"] = c;
        }
        {  // method comparison panels
            RunConfig c = sns_base();
            c.methods = {Method::NhTrace, Method::NhOperator, Method::Lr, Method::Rr,
                         Method::Iso, Method::Exact};
            t["fig2a"] = c;
            c = ring_base();
            c.methods = {Method::NhTrace, Method::NhOperator, Method::Lr, Method::Rr,
                         Method::Iso, Method::Exact};
            t["fig2b"] = c;
        }
        {  // finite temperature
            RunConfig c = sns_base();
            c.phi_grid = {0.0, two_pi, 101};
            c.beta = 10.0;
            c.methods = {Method::NhTrace, Method::Iso, Method::Exact};
            t["fig3a"] = c;
            c = ring_base();
            c.phi_grid = {0.0, two_pi, 101};
            c.beta = 10.0;
            c.methods = {Method::NhTrace, Method::Iso, Method::Exact};
            t["fig3b"] = c;
        }
        {  // NH susceptibility maps over the low-energy transition window
            RunConfig c = sns_base();
            c.phi_grid = {0.0, two_pi, 61};
            c.omega_grid = GridSpec{-1.5, 1.5, 151};
            c.methods = {Method::SusceptibilityNh};
            t["fig4a"] = c;
            c = ring_base();
            c.phi_grid = {0.0, two_pi, 61};
            c.omega_grid = GridSpec{0.01, 1.51, 151};
            c.methods = {Method::SusceptibilityNh};
            t["fig4b"] = c;
        }
        {  // low-energy spectra with the isolated reference
            RunConfig c = sns_base();
            c.methods = {Method::NhTrace, Method::Iso};
            t["figs1a"] = c;
            c = ring_base();
            c.methods = {Method::NhTrace, Method::Iso};
            t["figs1b"] = c;
        }
        {  // site-resolved RR currents
            RunConfig c = sns_base();
            c.methods = {Method::NhOperator, Method::Lr, Method::Rr, Method::Iso};
            c.rr_bonds = {5, 6, 7};
            t["figs2a"] = c;
            c = ring_base();
            c.methods = {Method::NhOperator, Method::Lr, Method::Rr, Method::Iso};
            c.rr_bonds = {1, 2, 3, 4, 5};
            t["figs2b"] = c;
        }
        {  // current amplitude vs coupling strength
            RunConfig c = sns_base();
            c.phi_grid = {0.0, two_pi, 41};
            c.methods = {};
            c.kappa_scan = {-0.1, -0.2, -0.3, -0.4, -0.5, -0.6, -0.7, -0.8, -0.9, -1.0};
            t["figs3a"] = c;
            c = ring_base();
            c.phi_grid = {0.0, two_pi, 41};
            c.methods = {};
            c.kappa_scan = {-0.1, -0.2, -0.3, -0.4, -0.5, -0.6, -0.7, -0.8, -0.9, -1.0};
            t["figs3b"] = c;
        }
        {  // exact-diagonalization susceptibility maps
            RunConfig c = sns_base();
            c.phi_grid = {0.0, two_pi, 61};
            c.omega_grid = GridSpec{-1.5, 1.5, 151};
            c.methods = {Method::SusceptibilityExact};
            t["figs4a"] = c;
            c = ring_base();
            c.phi_grid = {0.0, two_pi, 61};
            c.omega_grid = GridSpec{0.01, 1.51, 151};
            c.methods = {Method::SusceptibilityExact};
            t["figs4b"] = c;
        }
        {  // fast smoke preset
            RunConfig c = ring_base();
            c.reservoirs[0].n_sites = 21;
            c.phi_grid = {0.0, two_pi, 5};
            c.methods = {Method::NhTrace, Method::Iso};
            t["quick"] = c;
        }
        return t;
    }();
    return table;
}

}  // namespace nhpc

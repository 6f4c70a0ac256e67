#include "run_config.hpp"

#include <blochlab/error.hpp>
#include <blochlab/io.hpp>

#include <json.hpp>

#include <cmath>
#include <set>

namespace blochlab::cli {

using nlohmann::json;

namespace {

void allow_only(const json& obj, const std::set<std::string>& keys, const std::string& where)
{
    if (!obj.is_object()) {
        throw ConfigError(where + " must be an object");
    }
    for (const auto& [k, v] : obj.items()) {
        if (keys.count(k) == 0) {
            throw ConfigError("unknown key '" + k + "' in " + where);
        }
    }
}

template <class T>
void read(const json& obj, const char* key, T& out)
{
    if (obj.contains(key)) {
        out = obj.at(key).get<T>();
    }
}

PotentialSpec parse_potential(const json& j, const std::string& where)
{
    allow_only(j, {"type", "period", "bandwidth", "amplitude", "coeffs"}, where);
    PotentialSpec p;
    const std::string type = j.value("type", std::string("analytic_cosine_band"));
    if (type == "analytic_cosine_band") {
        p.kind = PotentialSpec::Kind::analytic_cosine_band;
    } else if (type == "cosine") {
        p.kind = PotentialSpec::Kind::cosine;
    } else if (type == "fourier") {
        p.kind = PotentialSpec::Kind::fourier;
    } else {
        throw ConfigError(where + ".type must be analytic_cosine_band, cosine or fourier");
    }
    read(j, "period", p.period);
    read(j, "bandwidth", p.bandwidth);
    read(j, "amplitude", p.amplitude);
    if (j.contains("coeffs")) {
        for (const auto& c : j.at("coeffs")) {
            if (!c.is_array() || c.size() != 2) {
                throw ConfigError(where + ".coeffs entries must be [re, im] pairs");
            }
            p.coeffs.emplace_back(c[0].get<double>(), c[1].get<double>());
        }
    }
    if (!(p.period > 0.0)) {
        throw ConfigError(where + ".period must be positive");
    }
    if (p.kind == PotentialSpec::Kind::analytic_cosine_band && !(p.bandwidth > 0.0)) {
        throw ConfigError(where + ".bandwidth must be positive");
    }
    if (p.kind == PotentialSpec::Kind::fourier && p.coeffs.size() % 2 != 1) {
        throw ConfigError(where + ".coeffs must list V_{-M}..V_{M} (odd length)");
    }
    return p;
}

UnitSystem parse_units(const json& j, const std::string& where)
{
    allow_only(j, {"hbar", "kinetic_coeff"}, where);
    UnitSystem u;
    read(j, "hbar", u.hbar);
    read(j, "kinetic_coeff", u.kinetic_coeff);
    if (!(u.hbar > 0.0) || !(u.kinetic_coeff > 0.0)) {
        throw ConfigError(where + ": hbar and kinetic_coeff must be positive");
    }
    return u;
}

OracleConfig parse_oracle(const json& j, const OracleConfig& defaults)
{
    allow_only(j, {"half_length", "points", "dtau", "splitting_order", "absorber_fraction", "absorber_strength",
                   "absorbed_budget", "check_halving", "halving_tolerance"},
               "validate.sweep.oracle");
    json merged = json::parse(io::oracle_config_to_json(defaults));
    merged.update(j);
    try {
        return io::oracle_config_from_json(merged.dump());
    } catch (const Error& e) {
        throw ConfigError(std::string("validate.sweep.oracle: ") + e.what());
    }
}

void apply_override(json& root, const std::string& item)
{
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("override '" + item + "' is not of the form key=value");
    }
    const std::string path = item.substr(0, eq);
    const std::string text = item.substr(eq + 1);
    json* node = &root;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (key.empty()) {
            throw ConfigError("override '" + item + "' has an empty path segment");
        }
        if (node->is_null()) {
            *node = json::object();
        }
        if (!node->is_object()) {
            throw ConfigError("override '" + item + "' descends into a non-object");
        }
        node = &(*node)[key];
        if (dot == std::string::npos) {
            break;
        }
        start = dot + 1;
    }
    const json value = json::parse(text, nullptr, false);
    *node = value.is_discarded() ? json(text) : value;
}

} // namespace

CrystalPotential PotentialSpec::potential() const
{
    switch (kind) {
    case Kind::cosine:
        return CrystalPotential::cosine(amplitude, period);
    case Kind::fourier:
        return CrystalPotential(period, coeffs);
    case Kind::analytic_cosine_band:
        break;
    }
    throw ConfigError("the analytic cosine band has no crystal potential");
}

RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides)
{
    json root = json::parse(text, nullptr, false);
    if (root.is_discarded()) {
        throw ConfigError("config is not valid JSON");
    }
    for (const auto& o : overrides) {
        apply_override(root, o);
    }
    RunConfig cfg;
    try {
        allow_only(root, {"name", "potential", "units", "F", "initial_state", "grids", "reconstruct", "validate", "output"},
                   "config");
        read(root, "name", cfg.name);
        if (root.contains("potential")) cfg.potential = parse_potential(root["potential"], "potential");
        if (root.contains("units")) cfg.units = parse_units(root["units"], "units");
        read(root, "F", cfg.force);

        if (root.contains("initial_state")) {
            const json& s = root["initial_state"];
            allow_only(s, {"type", "rho", "k0", "width", "band"}, "initial_state");
            const std::string type = s.value("type", std::string("wannier"));
            if (type == "wannier") cfg.initial_state.kind = StateKind::wannier;
            else if (type == "gaussian") cfg.initial_state.kind = StateKind::gaussian;
            else if (type == "near_bloch") cfg.initial_state.kind = StateKind::near_bloch;
            else throw ConfigError("initial_state.type must be wannier, gaussian or near_bloch");
            read(s, "rho", cfg.initial_state.rho);
            read(s, "k0", cfg.initial_state.k0);
            read(s, "width", cfg.initial_state.width);
            read(s, "band", cfg.initial_state.band);
        }

        if (root.contains("grids")) {
            const json& g = root["grids"];
            allow_only(g, {"num_k", "cutoff", "num_bands", "check_cutoff", "cutoff_tolerance", "tau_min", "tau_max",
                           "tau_max_periods", "tau_step", "tau_stride", "x_min", "x_max", "x_spacing"},
                       "grids");
            auto& gs = cfg.grids;
            read(g, "num_k", gs.num_k);
            read(g, "cutoff", gs.cutoff);
            read(g, "num_bands", gs.num_bands);
            read(g, "check_cutoff", gs.check_cutoff);
            read(g, "cutoff_tolerance", gs.cutoff_tolerance);
            read(g, "tau_min", gs.tau_min);
            read(g, "tau_max", gs.tau_max);
            if (g.contains("tau_max_periods")) {
                gs.tau_max = g["tau_max_periods"].get<double>() * two_pi / cfg.potential.period;
            }
            read(g, "tau_step", gs.tau_step);
            read(g, "tau_stride", gs.tau_stride);
            if (g.contains("x_min")) gs.x_min = g["x_min"].get<double>();
            if (g.contains("x_max")) gs.x_max = g["x_max"].get<double>();
            if (g.contains("x_spacing")) gs.x_spacing = g["x_spacing"].get<double>();
        }

        if (root.contains("reconstruct")) {
            const json& r = root["reconstruct"];
            allow_only(r, {"snapshots", "margin"}, "reconstruct");
            read(r, "snapshots", cfg.reconstruct.snapshots);
            read(r, "margin", cfg.reconstruct.margin);
        }

        if (root.contains("validate")) {
            const json& v = root["validate"];
            allow_only(v, {"run_sweep", "sweep", "crosscheck", "acceleration_tolerance"}, "validate");
            read(v, "run_sweep", cfg.validate.run_sweep);
            read(v, "acceleration_tolerance", cfg.validate.acceleration_tolerance);
            if (v.contains("sweep")) {
                const json& s = v["sweep"];
                allow_only(s, {"potential", "units", "num_k", "cutoff", "num_bands", "rho", "forces", "dt", "oracle",
                               "fidelity_force", "min_fidelity", "max_residual"},
                           "validate.sweep");
                auto& sw = cfg.validate.sweep;
                if (s.contains("potential")) sw.potential = parse_potential(s["potential"], "validate.sweep.potential");
                if (s.contains("units")) sw.units = parse_units(s["units"], "validate.sweep.units");
                read(s, "num_k", sw.num_k);
                read(s, "cutoff", sw.cutoff);
                read(s, "num_bands", sw.num_bands);
                read(s, "rho", sw.rho);
                read(s, "forces", sw.forces);
                read(s, "dt", sw.dt);
                if (s.contains("oracle")) sw.oracle = parse_oracle(s["oracle"], sw.oracle);
                read(s, "fidelity_force", sw.fidelity_force);
                read(s, "min_fidelity", sw.min_fidelity);
                read(s, "max_residual", sw.max_residual);
            }
            if (v.contains("crosscheck")) {
                const json& c = v["crosscheck"];
                allow_only(c, {"potential", "units", "F", "num_k", "cutoff", "num_bands", "rho", "periods", "tolerance",
                               "control_factor", "margin", "mass_threshold"},
                           "validate.crosscheck");
                auto& cc = cfg.validate.crosscheck;
                if (c.contains("potential")) cc.potential = parse_potential(c["potential"], "validate.crosscheck.potential");
                if (c.contains("units")) cc.units = parse_units(c["units"], "validate.crosscheck.units");
                read(c, "F", cc.force);
                read(c, "num_k", cc.num_k);
                read(c, "cutoff", cc.cutoff);
                read(c, "num_bands", cc.num_bands);
                read(c, "rho", cc.rho);
                read(c, "periods", cc.periods);
                read(c, "tolerance", cc.tolerance);
                read(c, "control_factor", cc.control_factor);
                read(c, "margin", cc.margin);
                read(c, "mass_threshold", cc.mass_threshold);
            }
        }

        if (root.contains("output")) {
            const json& o = root["output"];
            allow_only(o, {"dir"}, "output");
            if (o.contains("dir")) cfg.output_dir = o["dir"].get<std::string>();
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    cfg.check();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides)
{
    std::string text;
    try {
        text = io::read_text(path);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    return parse_config(text, overrides);
}

void RunConfig::check() const
{
    if (!(force > 0.0) || !std::isfinite(force)) throw ConfigError("F must be positive");
    if (grids.num_k < 2 || grids.num_k % 2 != 0) throw ConfigError("grids.num_k must be even and >= 2");
    if (grids.cutoff < 2) throw ConfigError("grids.cutoff must be at least 2");
    if (grids.num_bands == 0 || grids.num_bands > static_cast<std::size_t>(2 * grids.cutoff - 2)) {
        throw ConfigError("grids.num_bands must lie in [1, 2*cutoff - 2]");
    }
    if (initial_state.band >= grids.num_bands && potential.kind != PotentialSpec::Kind::analytic_cosine_band) {
        throw ConfigError("initial_state.band exceeds grids.num_bands");
    }
    if (potential.kind == PotentialSpec::Kind::analytic_cosine_band && initial_state.band != 0) {
        throw ConfigError("the analytic cosine band only has band 0");
    }
    if (initial_state.kind == StateKind::gaussian && !(initial_state.rho > 0.0)) {
        throw ConfigError("initial_state.rho must be positive");
    }
    if (initial_state.kind == StateKind::near_bloch && !(initial_state.width > 0.0)) {
        throw ConfigError("initial_state.width must be positive");
    }
    if (grids.tau_step < 0.0 || grids.tau_stride < 0) throw ConfigError("tau spacing must be positive");
    if (grids.tau_step > 0.0 && grids.tau_stride > 0) throw ConfigError("give either grids.tau_step or grids.tau_stride");
    if (grids.tau_max < grids.tau_min) throw ConfigError("grids.tau_max is below grids.tau_min");
    if (grids.x_spacing && !(*grids.x_spacing > 0.0)) throw ConfigError("grids.x_spacing must be positive");
    if (grids.x_min && grids.x_max && !(*grids.x_max > *grids.x_min)) throw ConfigError("grids.x_max must exceed x_min");
    if (!(reconstruct.margin >= 0.0)) throw ConfigError("reconstruct.margin must be non-negative");
    const auto& sw = validate.sweep;
    if (sw.forces.empty()) throw ConfigError("validate.sweep.forces is empty");
    for (double f : sw.forces) {
        if (!(f > 0.0)) throw ConfigError("validate.sweep.forces must be positive");
    }
    if (!(sw.dt > 0.0)) throw ConfigError("validate.sweep.dt must be positive");
    if (sw.potential.kind == PotentialSpec::Kind::analytic_cosine_band ||
        validate.crosscheck.potential.kind == PotentialSpec::Kind::analytic_cosine_band) {
        throw ConfigError("validation needs crystal potentials, not the analytic band");
    }
    if (2.0 * sw.oracle.half_length > static_cast<double>(sw.num_k) * sw.potential.period * (1.0 + 1e-12)) {
        throw ConfigError("validate.sweep: oracle box longer than num_k * period");
    }
}

BandStructure build_bands(const PotentialSpec& pot, const UnitSystem& units, std::size_t num_k, int cutoff,
                          std::size_t num_bands, bool check_cutoff, double cutoff_tolerance)
{
    if (pot.kind == PotentialSpec::Kind::analytic_cosine_band) {
        return analytic_cosine_band(pot.bandwidth, pot.period, num_k);
    }
    SolveOptions o;
    o.num_k = num_k;
    o.cutoff = cutoff;
    o.num_bands = num_bands;
    o.check_cutoff = check_cutoff;
    o.cutoff_tolerance = cutoff_tolerance;
    return solve_bands(pot.potential(), units, o);
}

BandStructure build_bands(const RunConfig& cfg)
{
    return build_bands(cfg.potential, cfg.units, cfg.grids.num_k, cfg.grids.cutoff, cfg.grids.num_bands,
                       cfg.grids.check_cutoff, cfg.grids.cutoff_tolerance);
}

MomentumState build_state(const RunConfig& cfg)
{
    const auto& s = cfg.initial_state;
    const double d = cfg.potential.period;
    switch (s.kind) {
    case StateKind::gaussian:
        return gaussian_state(s.rho, s.k0, d, cfg.grids.num_k, s.band);
    case StateKind::near_bloch:
        return near_bloch_state(s.k0, s.width, d, cfg.grids.num_k, s.band);
    case StateKind::wannier:
    case StateKind::custom:
        break;
    }
    return wannier_state(d, cfg.grids.num_k, s.band);
}

std::vector<double> build_tau_grid(const RunConfig& cfg)
{
    const ZoneGrid grid(cfg.potential.period, cfg.grids.num_k);
    long stride = cfg.grids.tau_stride;
    if (stride == 0) {
        if (cfg.grids.tau_step > 0.0) {
            if (!grid.commensurate(cfg.grids.tau_step, stride) || stride <= 0) {
                throw ConfigError("grids.tau_step is not a positive multiple of the k spacing");
            }
        } else {
            stride = 1;
        }
    }
    long first = 0;
    if (!grid.commensurate(cfg.grids.tau_min, first)) {
        throw ConfigError("grids.tau_min is not a multiple of the k spacing");
    }
    const double span = (cfg.grids.tau_max - cfg.grids.tau_min) / (static_cast<double>(stride) * grid.spacing());
    const auto count = static_cast<long>(std::floor(span + 1e-9));
    std::vector<double> taus;
    for (long i = 0; i <= count; ++i) {
        taus.push_back(static_cast<double>(first + i * stride) * grid.spacing());
    }
    return taus;
}

} // namespace blochlab::cli

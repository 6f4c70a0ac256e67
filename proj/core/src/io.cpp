#include "blochlab/io.hpp"

#include "blochlab/error.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace blochlab::io {

using nlohmann::json;

namespace {

constexpr const char* bands_format = "blochlab.bands";
constexpr const char* state_format = "blochlab.state";

template <class T>
T get(const json& j, const char* key)
{
    if (!j.contains(key)) {
        throw FormatError(std::string("missing field '") + key + "'");
    }
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw FormatError(std::string("field '") + key + "': " + e.what());
    }
}

json parse(const std::string& text, const char* format)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw FormatError(std::string("invalid JSON: ") + e.what());
    }
    if (format != nullptr && get<std::string>(j, "format") != format) {
        throw FormatError(std::string("expected format '") + format + "'");
    }
    return j;
}

json flags_to_indices(const std::vector<std::uint8_t>& flags)
{
    json out = json::array();
    for (std::size_t j = 0; j < flags.size(); ++j) {
        if (flags[j] != 0) out.push_back(j);
    }
    return out;
}

std::vector<std::uint8_t> indices_to_flags(const json& idx, std::size_t n)
{
    std::vector<std::uint8_t> flags(n, 0);
    for (const auto& v : idx) {
        const auto j = v.get<std::size_t>();
        if (j >= n) throw FormatError("flag index out of range");
        flags[j] = 1;
    }
    return flags;
}

void check_k_grid(const json& j, const ZoneGrid& grid)
{
    const auto ks = get<RealVector>(j, "k_grid");
    if (ks.size() != grid.size()) {
        throw FormatError("k_grid length differs from num_k");
    }
    for (std::size_t i = 0; i < ks.size(); ++i) {
        if (std::abs(ks[i] - grid.k(i)) > 1e-12 * grid.width()) {
            throw FormatError("k_grid is not the canonical uniform zone grid");
        }
    }
}

std::string format_g17(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::string bands_to_json(const BandStructure& bands)
{
    const BandData& d = bands.data();
    json j;
    j["format"] = bands_format;
    j["version"] = 1;
    j["period"] = d.grid.period();
    j["hbar"] = d.units.hbar;
    j["kinetic_coeff"] = d.units.kinetic_coeff;
    j["cutoff"] = d.cutoff;
    j["num_k"] = d.grid.size();
    j["k_grid"] = d.grid.points();
    j["analytic"] = !bands.has_basis();
    j["bands"] = json::array();
    for (std::size_t n = 0; n < d.energies.size(); ++n) {
        json b;
        b["index"] = n;
        b["energy"] = d.energies[n];
        b["berry"] = n < d.berry.size() ? json(d.berry[n]) : json::array();
        b["berry_unreliable"] = n < d.berry_unreliable.size() ? flags_to_indices(d.berry_unreliable[n]) : json::array();
        b["near_crossing"] = n < d.near_crossing.size() ? flags_to_indices(d.near_crossing[n]) : json::array();
        if (n < d.coefficients.size()) {
            RealVector re, im;
            re.reserve(d.coefficients[n].size());
            im.reserve(d.coefficients[n].size());
            for (const auto& c : d.coefficients[n]) {
                re.push_back(c.real());
                im.push_back(c.imag());
            }
            b["coefficients"] = {{"re", re}, {"im", im}};
        }
        j["bands"].push_back(std::move(b));
    }
    j["diagnostics"] = {{"max_cutoff_shift", d.diagnostics.max_cutoff_shift},
                        {"max_berry_residue", d.diagnostics.max_berry_residue},
                        {"warnings", d.diagnostics.warnings}};
    return j.dump(1);
}

BandStructure bands_from_json(const std::string& text)
{
    const json j = parse(text, bands_format);
    BandData d;
    d.grid = ZoneGrid(get<double>(j, "period"), get<std::size_t>(j, "num_k"));
    check_k_grid(j, d.grid);
    d.units.hbar = get<double>(j, "hbar");
    d.units.kinetic_coeff = get<double>(j, "kinetic_coeff");
    d.units.validate();
    d.cutoff = get<int>(j, "cutoff");
    const bool analytic = get<bool>(j, "analytic");
    const std::size_t nk = d.grid.size();
    const std::size_t pw = static_cast<std::size_t>(2 * d.cutoff + 1);

    const auto& arr = j.at("bands");
    for (std::size_t n = 0; n < arr.size(); ++n) {
        const json& b = arr[n];
        if (get<std::size_t>(b, "index") != n) {
            throw FormatError("bands must be listed in index order");
        }
        auto e = get<RealVector>(b, "energy");
        if (e.size() != nk) throw FormatError("energy length differs from num_k");
        d.energies.push_back(std::move(e));
        auto x = get<RealVector>(b, "berry");
        if (!x.empty()) {
            if (x.size() != nk) throw FormatError("berry length differs from num_k");
            d.berry.push_back(std::move(x));
        }
        d.berry_unreliable.push_back(indices_to_flags(b.value("berry_unreliable", json::array()), nk));
        d.near_crossing.push_back(indices_to_flags(b.value("near_crossing", json::array()), nk));
        if (!analytic) {
            const json& c = b.at("coefficients");
            const auto re = get<RealVector>(c, "re");
            const auto im = get<RealVector>(c, "im");
            if (re.size() != nk * pw || im.size() != nk * pw) {
                throw FormatError("coefficient block has the wrong size");
            }
            ComplexVector v(nk * pw);
            for (std::size_t i = 0; i < v.size(); ++i) v[i] = cplx(re[i], im[i]);
            d.coefficients.push_back(std::move(v));
        }
    }
    if (!d.berry.empty() && d.berry.size() != d.energies.size()) {
        throw FormatError("berry data present for only some bands");
    }
    if (j.contains("diagnostics")) {
        const json& g = j["diagnostics"];
        d.diagnostics.max_cutoff_shift = g.value("max_cutoff_shift", -1.0);
        d.diagnostics.max_berry_residue = g.value("max_berry_residue", 0.0);
        d.diagnostics.warnings = g.value("warnings", std::vector<std::string>{});
    }
    return BandStructure(std::move(d));
}

std::string state_to_json(const MomentumState& state)
{
    json j;
    j["format"] = state_format;
    j["version"] = 1;
    j["period"] = state.period();
    j["num_k"] = state.grid().size();
    j["k_grid"] = state.grid().points();
    const auto& t = state.tag();
    j["tag"] = {{"kind", to_string(t.kind)}, {"width", t.width}, {"center", t.center}, {"raw_norm", t.raw_norm}};
    j["bands"] = json::array();
    for (std::size_t n = 0; n < state.num_bands(); ++n) {
        RealVector re, im;
        for (const auto& a : state.band(n)) {
            re.push_back(a.real());
            im.push_back(a.imag());
        }
        j["bands"].push_back({{"index", n}, {"re", re}, {"im", im}});
    }
    return j.dump(1);
}

MomentumState state_from_json(const std::string& text)
{
    const json j = parse(text, state_format);
    const ZoneGrid grid(get<double>(j, "period"), get<std::size_t>(j, "num_k"));
    check_k_grid(j, grid);
    StateTag tag;
    if (j.contains("tag")) {
        const json& t = j["tag"];
        tag.kind = state_kind_from_string(t.value("kind", std::string("custom")));
        tag.width = t.value("width", 0.0);
        tag.center = t.value("center", 0.0);
        tag.raw_norm = t.value("raw_norm", 1.0);
    }
    std::vector<ComplexVector> amps;
    const auto& arr = j.at("bands");
    for (std::size_t n = 0; n < arr.size(); ++n) {
        if (get<std::size_t>(arr[n], "index") != n) {
            throw FormatError("bands must be listed in index order");
        }
        const auto re = get<RealVector>(arr[n], "re");
        const auto im = get<RealVector>(arr[n], "im");
        if (re.size() != grid.size() || im.size() != grid.size()) {
            throw FormatError("amplitude length differs from num_k");
        }
        ComplexVector v(grid.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = cplx(re[i], im[i]);
        amps.push_back(std::move(v));
    }
    return MomentumState(grid, std::move(amps), tag);
}

std::string oracle_config_to_json(const OracleConfig& cfg)
{
    json j = {{"half_length", cfg.half_length},
              {"points", cfg.points},
              {"dtau", cfg.dtau},
              {"splitting_order", cfg.splitting_order},
              {"absorber_fraction", cfg.absorber_fraction},
              {"absorber_strength", cfg.absorber_strength},
              {"absorbed_budget", cfg.absorbed_budget},
              {"check_halving", cfg.check_halving},
              {"halving_tolerance", cfg.halving_tolerance}};
    return j.dump(2);
}

OracleConfig oracle_config_from_json(const std::string& text)
{
    const json j = parse(text, nullptr);
    OracleConfig c;
    try {
        c.half_length = j.value("half_length", c.half_length);
        c.points = j.value("points", c.points);
        c.dtau = j.value("dtau", c.dtau);
        c.splitting_order = j.value("splitting_order", c.splitting_order);
        c.absorber_fraction = j.value("absorber_fraction", c.absorber_fraction);
        c.absorber_strength = j.value("absorber_strength", c.absorber_strength);
        c.absorbed_budget = j.value("absorbed_budget", c.absorbed_budget);
        c.check_halving = j.value("check_halving", c.check_halving);
        c.halving_tolerance = j.value("halving_tolerance", c.halving_tolerance);
    } catch (const json::exception& e) {
        throw FormatError(std::string("oracle config: ") + e.what());
    }
    c.validate();
    return c;
}

std::string trace_to_csv(const ObservableTrace& t)
{
    std::ostringstream out;
    out << "tau,mean_k,dx,dS,sigma,chi\n";
    for (std::size_t r = 0; r < t.size(); ++r) {
        out << format_g17(t.tau[r]) << ',' << format_g17(t.mean_k[r]) << ',' << format_g17(t.centroid_shift[r]) << ','
            << format_g17(t.variance_shift[r]) << ',' << format_g17(t.sigma[r]) << ',' << format_g17(t.chi[r]) << '\n';
    }
    return out.str();
}

std::string packet_to_csv(const PositionWavepacket& p)
{
    std::ostringstream out;
    out << "x,re,im,density\n";
    for (std::size_t l = 0; l < p.values.size(); ++l) {
        const cplx v = p.values[l];
        out << format_g17(p.grid.x(l)) << ',' << format_g17(v.real()) << ',' << format_g17(v.imag()) << ','
            << format_g17(std::norm(v)) << '\n';
    }
    return out.str();
}

std::string read_text(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out << text;
    if (!out) {
        throw Error("write failed for " + path.string());
    }
}

void write_bands(const std::filesystem::path& path, const BandStructure& bands) { write_text(path, bands_to_json(bands)); }
BandStructure read_bands(const std::filesystem::path& path) { return bands_from_json(read_text(path)); }
void write_state(const std::filesystem::path& path, const MomentumState& state) { write_text(path, state_to_json(state)); }
MomentumState read_state(const std::filesystem::path& path) { return state_from_json(read_text(path)); }
void write_trace_csv(const std::filesystem::path& path, const ObservableTrace& t) { write_text(path, trace_to_csv(t)); }
void write_packet_csv(const std::filesystem::path& path, const PositionWavepacket& p) { write_text(path, packet_to_csv(p)); }

} // namespace blochlab::io

#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "apf/params.hpp"
#include "apf/spectral.hpp"

namespace apf {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Run configuration (everything except the model coefficients).
struct RunConfig {
    Grid grid;
    double dt = 0.0;  // 0 = derive from the step-size estimate
    double dt_max = 1e-2;
    double cfl_advect = 0.3;
    double cfl_cubic = 0.3;
    double t_end = 1.0;
    int sample_every = 1;
    std::uint64_t seed = 1;
    SpectrumDesc spectrum;
    std::string out_dir = "out";
    bool energy_csv = true;
    bool snapshots = false;
    int snapshot_every = 1;
    bool diag_energy = true;
    bool diag_apriori = true;
    bool diag_velocity = true;
    double gronwall_c = 1.0;
    double gronwall_delta = 0.1;
};

struct ParsedConfig {
    RunConfig run;
    ModelParams params;
};

namespace cfg_detail {

struct RawEntry {
    std::string value;
    int line = 0;
};

using Sections = std::map<std::string, std::map<std::string, RawEntry>>;

inline const std::map<std::string, std::vector<std::string>>& schema() {
    static const std::map<std::string, std::vector<std::string>> s = {
        {"model", {"alpha", "beta", "epsilon", "gamma2", "kappa", "lambda2", "mu2",
                   "strict_analysis"}},
        {"coupling", {"epsilon", "gamma1_tilde", "lambda1_tilde", "mu1_tilde"}},
        {"grid", {"box", "box_x", "box_y", "box_z", "dim", "n", "nx", "ny", "nz"}},
        {"time", {"cfl_advect", "cfl_cubic", "dt", "dt_max", "sample_every", "t_end"}},
        {"init", {"amplitude", "decay", "kmax", "seed"}},
        {"output", {"energy_csv", "out_dir", "snapshot_every", "snapshots"}},
        {"diagnostics", {"apriori", "energy", "gronwall_c", "gronwall_delta", "velocity"}},
    };
    return s;
}

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline Sections tokenize(const std::string& text) {
    Sections out;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!schema().count(section))
                throw ConfigError("line " + std::to_string(lineno) + ": unknown section [" +
                                  section + "]");
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        if (section.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": key outside any section");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto& keys = schema().at(section);
        if (std::find(keys.begin(), keys.end(), key) == keys.end())
            throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key +
                              "' in section [" + section + "]");
        auto [it, inserted] = out[section].emplace(key, RawEntry{value, lineno});
        if (!inserted)
            throw ConfigError("duplicate key '" + key + "' in section [" + section +
                              "] (lines " + std::to_string(it->second.line) + " and " +
                              std::to_string(lineno) + ")");
    }
    return out;
}

struct Reader {
    const Sections& raw;

    const RawEntry* find(const std::string& sec, const std::string& key) const {
        auto s = raw.find(sec);
        if (s == raw.end()) return nullptr;
        auto k = s->second.find(key);
        return k == s->second.end() ? nullptr : &k->second;
    }

    double number(const std::string& sec, const std::string& key, double dflt) const {
        const RawEntry* e = find(sec, key);
        if (!e) return dflt;
        const std::string& v = e->value;
        double out = 0.0;
        auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (ec != std::errc() || ptr != v.data() + v.size())
            throw ConfigError("line " + std::to_string(e->line) + ": '" + v +
                              "' is not a number");
        return out;
    }

    long integer(const std::string& sec, const std::string& key, long dflt) const {
        const double v = number(sec, key, static_cast<double>(dflt));
        const long i = static_cast<long>(v);
        if (static_cast<double>(i) != v) {
            const RawEntry* e = find(sec, key);
            throw ConfigError("line " + std::to_string(e ? e->line : 0) + ": '" + key +
                              "' must be an integer");
        }
        return i;
    }

    std::uint64_t uinteger(const std::string& sec, const std::string& key,
                           std::uint64_t dflt) const {
        const RawEntry* e = find(sec, key);
        if (!e) return dflt;
        const std::string& v = e->value;
        std::uint64_t out = 0;
        auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (ec != std::errc() || ptr != v.data() + v.size())
            throw ConfigError("line " + std::to_string(e->line) + ": '" + key +
                              "' must be a nonnegative integer");
        return out;
    }

    bool boolean(const std::string& sec, const std::string& key, bool dflt) const {
        const RawEntry* e = find(sec, key);
        if (!e) return dflt;
        if (e->value == "true") return true;
        if (e->value == "false") return false;
        throw ConfigError("line " + std::to_string(e->line) + ": '" + key +
                          "' must be true or false");
    }

    std::string text(const std::string& sec, const std::string& key,
                     const std::string& dflt) const {
        const RawEntry* e = find(sec, key);
        return e ? e->value : dflt;
    }
};

}  // namespace cfg_detail

/// Parse the sectioned key=value document. Defaults are applied for every
/// absent optional key; [grid] n is the only required key. Deterministic:
/// equal documents produce equal configs.
inline ParsedConfig parse_config(const std::string& text) {
    using namespace cfg_detail;
    const Sections raw = tokenize(text);
    const Reader r{raw};

    ParsedConfig pc;

    // epsilon may live in [model] (shorthand) or [coupling] (canonical)
    const RawEntry* eps_m = r.find("model", "epsilon");
    const RawEntry* eps_c = r.find("coupling", "epsilon");
    if (eps_m && eps_c)
        throw ConfigError("duplicate key 'epsilon' in sections [model] and [coupling] (lines " +
                          std::to_string(eps_m->line) + " and " + std::to_string(eps_c->line) + ")");
    const double epsilon = eps_m ? r.number("model", "epsilon", 0.0)
                                 : r.number("coupling", "epsilon", 0.0);

    BaseCoefficients base;
    base.mu2 = r.number("model", "mu2", 1.0);
    base.gamma2 = r.number("model", "gamma2", 1.0);
    base.lambda2 = r.number("model", "lambda2", 1.0);
    base.alpha = r.number("model", "alpha", 1.0);
    base.beta = r.number("model", "beta", 0.0);
    base.kappa = r.number("model", "kappa", 0.0);
    base.mu1_tilde = r.number("coupling", "mu1_tilde", 1.0);
    base.gamma1_tilde = r.number("coupling", "gamma1_tilde", 1.0);
    base.lambda1_tilde = r.number("coupling", "lambda1_tilde", 1.0);
    const bool strict = r.boolean("model", "strict_analysis", false);

    try {
        pc.params = apply_coupling(base, epsilon, strict);
        validate(pc.params);
    } catch (const ValidationError& e) {
        throw ConfigError(std::string("invalid model coefficients: ") + e.what());
    }

    RunConfig& rc = pc.run;
    rc.grid.dim = static_cast<int>(r.integer("grid", "dim", 3));
    if (!r.find("grid", "n") && !(r.find("grid", "nx") && r.find("grid", "ny")))
        throw ConfigError("missing required key 'n' in section [grid]");
    const long n_all = r.integer("grid", "n", 0);
    const double box_all = r.number("grid", "box", kTwoPi);
    rc.grid.n[0] = static_cast<int>(r.integer("grid", "nx", n_all));
    rc.grid.n[1] = static_cast<int>(r.integer("grid", "ny", n_all));
    rc.grid.n[2] = static_cast<int>(r.integer("grid", "nz", n_all));
    rc.grid.box[0] = r.number("grid", "box_x", box_all);
    rc.grid.box[1] = r.number("grid", "box_y", box_all);
    rc.grid.box[2] = r.number("grid", "box_z", box_all);
    if (rc.grid.dim == 2) {
        rc.grid.n[2] = 0;
        rc.grid.box[2] = 0.0;
    }
    try {
        rc.grid.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("invalid [grid]: ") + e.what());
    }

    rc.dt = r.number("time", "dt", 0.0);
    rc.dt_max = r.number("time", "dt_max", 1e-2);
    rc.cfl_advect = r.number("time", "cfl_advect", 0.3);
    rc.cfl_cubic = r.number("time", "cfl_cubic", 0.3);
    rc.t_end = r.number("time", "t_end", 1.0);
    rc.sample_every = static_cast<int>(r.integer("time", "sample_every", 1));
    rc.seed = r.uinteger("init", "seed", 1);
    rc.spectrum.amplitude = r.number("init", "amplitude", 0.1);
    rc.spectrum.decay = r.number("init", "decay", 5.0);
    rc.spectrum.m_cut = r.number("init", "kmax", 0.0);
    if (rc.spectrum.m_cut <= 0.0) {
        int nmin = rc.grid.n[0];
        for (int a = 1; a < rc.grid.dim; ++a) nmin = std::min(nmin, rc.grid.n[a]);
        rc.spectrum.m_cut = static_cast<double>(nmin) / 3.0;
    }
    rc.out_dir = r.text("output", "out_dir", "out");
    rc.energy_csv = r.boolean("output", "energy_csv", true);
    rc.snapshots = r.boolean("output", "snapshots", false);
    rc.snapshot_every = static_cast<int>(r.integer("output", "snapshot_every", 1));
    rc.diag_energy = r.boolean("diagnostics", "energy", true);
    rc.diag_apriori = r.boolean("diagnostics", "apriori", true);
    rc.diag_velocity = r.boolean("diagnostics", "velocity", true);
    rc.gronwall_c = r.number("diagnostics", "gronwall_c", 1.0);
    rc.gronwall_delta = r.number("diagnostics", "gronwall_delta", 0.1);

    if (rc.dt < 0.0) throw ConfigError("[time] dt must be positive (or omitted)");
    if (rc.dt > 0.0 && rc.t_end < rc.dt) throw ConfigError("[time] t_end must be >= dt");
    if (!(rc.t_end > 0.0)) throw ConfigError("[time] t_end must be positive");
    if (rc.sample_every < 1) throw ConfigError("[time] sample_every must be >= 1");
    if (rc.snapshot_every < 1) throw ConfigError("[output] snapshot_every must be >= 1");
    if (!(rc.gronwall_delta > 0.0 && rc.gronwall_delta <= 1.0))
        throw ConfigError("[diagnostics] gronwall_delta must lie in (0, 1]");
    if (!(rc.gronwall_c > 0.0)) throw ConfigError("[diagnostics] gronwall_c must be positive");
    if (!(rc.dt_max > 0.0)) throw ConfigError("[time] dt_max must be positive");

    return pc;
}

inline std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

/// Canonical serialization: every key materialized (defaults included),
/// sections and keys in sorted order. parse(dump(x)) == x.
inline std::string dump_config(const ParsedConfig& pc) {
    const RunConfig& rc = pc.run;
    const ModelParams& mp = pc.params;
    std::map<std::string, std::map<std::string, std::string>> out;

    out["model"] = {
        {"alpha", format_number(mp.base.alpha)},
        {"beta", format_number(mp.base.beta)},
        {"gamma2", format_number(mp.base.gamma2)},
        {"kappa", format_number(mp.base.kappa)},
        {"lambda2", format_number(mp.base.lambda2)},
        {"mu2", format_number(mp.base.mu2)},
        {"strict_analysis", mp.strict_analysis_mode ? "true" : "false"},
    };
    out["coupling"] = {
        {"epsilon", format_number(mp.epsilon)},
        {"gamma1_tilde", format_number(mp.base.gamma1_tilde)},
        {"lambda1_tilde", format_number(mp.base.lambda1_tilde)},
        {"mu1_tilde", format_number(mp.base.mu1_tilde)},
    };
    out["grid"] = {
        {"dim", format_number(rc.grid.dim)},
        {"nx", format_number(rc.grid.n[0])},
        {"ny", format_number(rc.grid.n[1])},
    };
    out["grid"]["box_x"] = format_number(rc.grid.box[0]);
    out["grid"]["box_y"] = format_number(rc.grid.box[1]);
    if (rc.grid.dim == 3) {
        out["grid"]["nz"] = format_number(rc.grid.n[2]);
        out["grid"]["box_z"] = format_number(rc.grid.box[2]);
    }
    out["time"] = {
        {"cfl_advect", format_number(rc.cfl_advect)},
        {"cfl_cubic", format_number(rc.cfl_cubic)},
        {"dt", format_number(rc.dt)},
        {"dt_max", format_number(rc.dt_max)},
        {"sample_every", format_number(rc.sample_every)},
        {"t_end", format_number(rc.t_end)},
    };
    out["init"] = {
        {"amplitude", format_number(rc.spectrum.amplitude)},
        {"decay", format_number(rc.spectrum.decay)},
        {"kmax", format_number(rc.spectrum.m_cut)},
        {"seed", std::to_string(rc.seed)},
    };
    out["output"] = {
        {"energy_csv", rc.energy_csv ? "true" : "false"},
        {"out_dir", rc.out_dir},
        {"snapshot_every", format_number(rc.snapshot_every)},
        {"snapshots", rc.snapshots ? "true" : "false"},
    };
    out["diagnostics"] = {
        {"apriori", rc.diag_apriori ? "true" : "false"},
        {"energy", rc.diag_energy ? "true" : "false"},
        {"gronwall_c", format_number(rc.gronwall_c)},
        {"gronwall_delta", format_number(rc.gronwall_delta)},
        {"velocity", rc.diag_velocity ? "true" : "false"},
    };

    std::string s;
    for (const auto& [sec, keys] : out) {
        s += "[" + sec + "]\n";
        for (const auto& [k, v] : keys) s += k + " = " + v + "\n";
        s += "\n";
    }
    return s;
}

}  // namespace apf

#include "wicklab/cli/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "wicklab/cli/output.hpp"
#include "wicklab/error.hpp"

namespace wicklab::cli {

namespace {

ParamSpec out_param() { return {"out", ParamKind::text, "", "CSV output path (standard output when empty)"}; }

std::vector<CommandSpec> build_specs() {
    using K = ParamKind;
    std::vector<CommandSpec> s;
    s.push_back({"hermite-check",
                 "Residuals of the Hermite identities on a (k, x, C) grid",
                 {{"kmax", K::integer, "10", "highest degree checked"},
                  {"xmax", K::real, "3", "x ranges over [-xmax, xmax]"},
                  {"cmax", K::real, "4", "C ranges over [0, cmax]"},
                  {"tol", K::real, "1e-10", "relative residual bound"},
                  out_param()}});
    s.push_back({"simulate",
                 "Stationary OU ensemble: spectral coefficients of the Wick powers over time",
                 {{"n", K::integer, "4", "truncation radius"},
                  {"kmax", K::integer, "3", "highest Wick order"},
                  {"replicas", K::integer, "8", "independent replicas"},
                  {"seed", K::integer, "1", "master seed"},
                  {"dt", K::real, "0.01", "time step"},
                  {"steps", K::integer, "10", "number of steps"},
                  {"pmax", K::integer, "1", "track modes with |p| <= pmax"},
                  out_param()}});
    s.push_back({"wick-cov",
                 "Spectral covariance k! K_n(dt)^{*k}(p) of the Wick powers, optionally against Monte Carlo",
                 {{"n", K::integer, "4", "truncation radius"},
                  {"kmax", K::integer, "3", "highest Wick order"},
                  {"dt", K::real, "0", "time lag"},
                  {"pmax", K::integer, "2", "report modes with |p| <= pmax"},
                  {"replicas", K::integer, "0", "Monte Carlo replicas (0 skips the estimate)"},
                  {"seed", K::integer, "1", "master seed"},
                  out_param()}});
    s.push_back({"besov",
                 "Littlewood-Paley blocks and the Besov norm of a field",
                 {{"input", K::text, "", "spectral field JSON; a seeded random field when empty"},
                  {"n", K::integer, "8", "radius of the random field"},
                  {"seed", K::integer, "1", "seed of the random field"},
                  {"s", K::real, "-0.5", "regularity index"},
                  {"p", K::text, "inf", "integrability: 1, 2 or inf"},
                  {"q", K::text, "inf", "summability: 1, 2 or inf"},
                  out_param()}});
    s.push_back({"kernel-decay",
                 "Block-weighted mixed Wick gap along increasing truncations",
                 {{"n-list", K::int_list, "2,4,8,16,32", "truncations n"},
                  {"M-ratio", K::integer, "2", "M = ratio * n"},
                  {"k", K::integer, "1", "order on the n side"},
                  {"l", K::integer, "1", "order on the M side"},
                  {"alpha", K::real, "0.3", "block weight exponent"},
                  {"dt", K::real, "0", "time lag"},
                  out_param()}});
    s.push_back({"match-moments",
                 "Moment-matched smooth profile and its Hermite residuals",
                 {{"N", K::integer, "2", "match moments 1..2N"},
                  {"a0", K::real, "0.05", "smoothing parameter"},
                  {"tol", K::real, "1e-8", "residual bound"},
                  {"profile", K::text, "moment_profile.json", "path of the profile JSON"},
                  out_param()}});
    s.push_back({"support-demo",
                 "Mean shifted-driver distance over seeds for increasing n",
                 {{"n-list", K::int_list, "4,8,16", "truncations n (each >= 3)"},
                  {"M-ratio", K::integer, "4", "M = ratio * n"},
                  {"R", K::real, "0.3", "target variance"},
                  {"kmax", K::integer, "3", "highest order"},
                  {"alpha", K::real, "0.4", "negative regularity of the norm"},
                  {"seeds", K::integer, "32", "realizations per n"},
                  {"seed", K::integer, "1", "master seed"},
                  out_param()}});
    s.push_back({"gmc-demo",
                 "Wick exponential: analytic vs Monte Carlo second moment, gap to one, positivity",
                 {{"n", K::integer, "4", "truncation radius"},
                  {"gamma", K::real, "1", "intermittency, gamma^2 < 8 pi"},
                  {"beta", K::real, "0.5", "Sobolev index, gamma^2 / 8 pi < beta < 1"},
                  {"replicas", K::integer, "1000", "Monte Carlo replicas"},
                  {"seed", K::integer, "1", "master seed"},
                  out_param()}});
    return s;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

const ParamSpec& param(const CommandSpec& cmd, const std::string& key) {
    for (const auto& p : cmd.params)
        if (p.key == key) return p;
    throw Error(ErrorCode::config, "unknown key '" + key + "' for command " + cmd.name);
}

void check_kind(const ParamSpec& p, const std::string& value) {
    RunConfig probe;
    probe.values[p.key] = value;
    switch (p.kind) {
    case ParamKind::integer: (void)probe.integer(p.key); break;
    case ParamKind::real: (void)probe.real(p.key); break;
    case ParamKind::int_list: (void)probe.int_list(p.key); break;
    case ParamKind::text: break;
    }
}

} // namespace

const std::vector<CommandSpec>& command_specs() {
    static const std::vector<CommandSpec> specs = build_specs();
    return specs;
}

const CommandSpec& command_spec(const std::string& name) {
    for (const auto& c : command_specs())
        if (c.name == name) return c;
    throw Error(ErrorCode::config, "unknown command '" + name + "'");
}

long long RunConfig::integer(const std::string& key) const {
    const std::string v = text(key);
    long long out = 0;
    const auto* end = v.data() + v.size();
    const auto res = std::from_chars(v.data(), end, out);
    if (v.empty() || res.ec != std::errc() || res.ptr != end)
        throw Error(ErrorCode::config, "key " + key + ": expected an integer, got '" + v + "'");
    return out;
}

double RunConfig::real(const std::string& key) const {
    const std::string v = text(key);
    double out = 0.0;
    const auto* end = v.data() + v.size();
    const auto res = std::from_chars(v.data(), end, out);
    if (v.empty() || res.ec != std::errc() || res.ptr != end || !std::isfinite(out))
        throw Error(ErrorCode::config, "key " + key + ": expected a finite number, got '" + v + "'");
    return out;
}

std::string RunConfig::text(const std::string& key) const {
    const auto it = values.find(key);
    if (it == values.end()) throw Error(ErrorCode::config, "missing key " + key);
    return it->second;
}

std::vector<int> RunConfig::int_list(const std::string& key) const {
    const std::string v = text(key);
    std::vector<int> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        int x = 0;
        const auto* end = item.data() + item.size();
        const auto res = std::from_chars(item.data(), end, x);
        if (item.empty() || res.ec != std::errc() || res.ptr != end)
            throw Error(ErrorCode::config, "key " + key + ": expected a comma-separated integer list, got '" + v + "'");
        out.push_back(x);
    }
    if (out.empty()) throw Error(ErrorCode::config, "key " + key + ": empty list");
    return out;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::config, "cannot read config file " + path);
    std::map<std::string, std::string> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::config, path + ":" + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw Error(ErrorCode::config, path + ":" + std::to_string(lineno) + ": empty key");
        if (out.count(key)) throw Error(ErrorCode::config, path + ":" + std::to_string(lineno) + ": duplicate key " + key);
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

RunConfig parse_config(const std::vector<std::string>& args) {
    CLI::App app{"wicklab: Wick powers, Besov norms, lattice kernels and chaos on the 2-torus", "wicklab"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    struct Bound {
        CLI::App* sub;
        std::string config_path;
        std::map<std::string, std::string> flags;
        std::map<std::string, CLI::Option*> options;
    };
    std::vector<std::unique_ptr<Bound>> bound;
    for (const auto& cmd : command_specs()) {
        auto b = std::make_unique<Bound>();
        b->sub = app.add_subcommand(cmd.name, cmd.help);
        b->sub->add_option("--config", b->config_path, "flat key=value file");
        for (const auto& p : cmd.params) {
            std::string desc = p.help + " (default: " + (p.default_value.empty() ? "none" : p.default_value) + ")";
            b->options[p.key] = b->sub->add_option("--" + p.key, b->flags[p.key], desc);
        }
        bound.push_back(std::move(b));
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    RunConfig cfg;
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        std::ostringstream os;
        const CLI::App* target = &app;
        for (const auto& b : bound)
            if (b->sub->parsed()) target = b->sub;
        os << target->help();
        cfg.help_text = os.str();
        return cfg;
    } catch (const CLI::CallForVersion&) {
        cfg.help_text = std::string(kVersion) + "\n";
        return cfg;
    } catch (const CLI::ParseError& e) {
        throw Error(ErrorCode::config, e.what());
    }

    for (const auto& b : bound) {
        if (!b->sub->parsed()) continue;
        const auto& cmd = command_spec(b->sub->get_name());
        cfg.command = cmd.name;
        for (const auto& p : cmd.params) {
            cfg.values[p.key] = p.default_value;
            cfg.sources[p.key] = "default";
        }
        if (!b->config_path.empty()) {
            for (const auto& [key, value] : read_config_file(b->config_path)) {
                const auto& p = param(cmd, key);
                check_kind(p, value);
                cfg.values[key] = value;
                cfg.sources[key] = "file";
            }
        }
        for (const auto& p : cmd.params) {
            if (b->options[p.key]->count() == 0) continue;
            check_kind(p, b->flags[p.key]);
            cfg.values[p.key] = b->flags[p.key];
            cfg.sources[p.key] = "flag";
        }
        for (const auto& p : cmd.params) check_kind(p, cfg.values[p.key]);
    }
    return cfg;
}

} // namespace wicklab::cli

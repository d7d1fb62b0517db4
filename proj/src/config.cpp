#include "srf/config.hpp"

#include <fstream>
#include <sstream>

#include "srf/errors.hpp"

namespace srf {

namespace {

double to_double(const std::string& key, const std::string& v) {
    size_t pos = 0;
    double out;
    try {
        out = std::stod(v, &pos);
    } catch (...) {
        throw ConfigError(key + ": not a number: '" + v + "'");
    }
    if (pos != v.size()) throw ConfigError(key + ": trailing characters in '" + v + "'");
    return out;
}

long to_long(const std::string& key, const std::string& v) {
    size_t pos = 0;
    long out;
    try {
        out = std::stol(v, &pos);
    } catch (...) {
        throw ConfigError(key + ": not an integer: '" + v + "'");
    }
    if (pos != v.size()) throw ConfigError(key + ": trailing characters in '" + v + "'");
    return out;
}

} // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
    if (key == "model.family") {
        if (value != "Round" && value != "Weighted")
            throw ConfigError("model.family must be Round or Weighted, got '" + value + "'");
        model_family = value;
    } else if (key == "model.a") {
        model_a = to_double(key, value);
    } else if (key == "model.b") {
        model_b = to_double(key, value);
    } else if (key == "grid.n") {
        grid_n = static_cast<int>(to_long(key, value));
    } else if (key == "flow.t_end") {
        flow_t_end = to_double(key, value);
    } else if (key == "flow.dt_safety") {
        flow_dt_safety = to_double(key, value);
    } else if (key == "conjugate.variant") {
        if (value != "F" && value != "W")
            throw ConfigError("conjugate.variant must be F or W, got '" + value + "'");
        conjugate_variant = value;
    } else if (key == "conjugate.tau_T") {
        conjugate_tau_T = to_double(key, value);
    } else if (key == "mu.restarts") {
        mu_restarts = static_cast<int>(to_long(key, value));
    } else if (key == "mu.tol") {
        mu_tol = to_double(key, value);
    } else if (key == "tubes.radii") {
        tubes_radii.clear();
        std::stringstream ss(value);
        std::string item;
        while (std::getline(ss, item, ','))
            tubes_radii.push_back(to_double(key, item));
    } else if (key == "tubes.mc_samples") {
        tubes_mc_samples = to_long(key, value);
    } else if (key == "seed") {
        try {
            seed = std::stoull(value);
        } catch (...) {
            throw ConfigError("seed: not an unsigned integer: '" + value + "'");
        }
    } else if (key == "output.dir") {
        if (value.empty()) throw ConfigError("output.dir must not be empty");
        output_dir = value;
    } else {
        throw ConfigError("unknown configuration key '" + key + "'");
    }
}

void RunConfig::validate() const {
    if (!(model_a > 0.0) || !(model_b > 0.0))
        throw ConfigError("model.a/model.b: weights must be positive");
    if (model_family == "Round" && model_a != model_b)
        throw ConfigError("model.family=Round requires model.a == model.b");
    if (grid_n < 16 || grid_n > 8192) throw ConfigError("grid.n: must lie in [16, 8192]");
    if (!(flow_t_end > 0.0) || flow_t_end > 100.0)
        throw ConfigError("flow.t_end: must lie in (0, 100]");
    if (!(flow_dt_safety > 0.0) || flow_dt_safety > 0.5)
        throw ConfigError("flow.dt_safety: must lie in (0, 0.5]");
    if (!(conjugate_tau_T > 0.0) || conjugate_tau_T > 100.0)
        throw ConfigError("conjugate.tau_T: must lie in (0, 100]");
    if (mu_restarts < 1 || mu_restarts > 64)
        throw ConfigError("mu.restarts: must lie in [1, 64]");
    if (!(mu_tol > 0.0) || mu_tol > 1e-2) throw ConfigError("mu.tol: must lie in (0, 1e-2]");
    if (tubes_radii.empty()) throw ConfigError("tubes.radii: need at least one radius");
    for (double r : tubes_radii)
        if (!(r > 0.0) || r > 10.0) throw ConfigError("tubes.radii: each radius in (0, 10]");
    if (tubes_mc_samples < 1000 || tubes_mc_samples > 100000000)
        throw ConfigError("tubes.mc_samples: must lie in [1e3, 1e8]");
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        // trim
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const auto e = line.find_last_not_of(" \t\r");
        line = line.substr(b, e - b + 1);
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        auto trim = [](std::string& s) {
            const auto b2 = s.find_first_not_of(" \t");
            const auto e2 = s.find_last_not_of(" \t");
            s = (b2 == std::string::npos) ? "" : s.substr(b2, e2 - b2 + 1);
        };
        trim(key);
        trim(value);
        cfg.set(key, value);
    }
    return cfg;
}

std::string RunConfig::canonical() const {
    std::ostringstream out;
    out.precision(17);
    out << "model.family=" << model_family << "\n";
    out << "model.a=" << model_a << "\n";
    out << "model.b=" << model_b << "\n";
    out << "grid.n=" << grid_n << "\n";
    out << "flow.t_end=" << flow_t_end << "\n";
    out << "flow.dt_safety=" << flow_dt_safety << "\n";
    out << "conjugate.variant=" << conjugate_variant << "\n";
    out << "conjugate.tau_T=" << conjugate_tau_T << "\n";
    out << "mu.restarts=" << mu_restarts << "\n";
    out << "mu.tol=" << mu_tol << "\n";
    out << "tubes.radii=";
    for (size_t i = 0; i < tubes_radii.size(); ++i)
        out << (i ? "," : "") << tubes_radii[i];
    out << "\n";
    out << "tubes.mc_samples=" << tubes_mc_samples << "\n";
    out << "seed=" << seed << "\n";
    out << "output.dir=" << output_dir << "\n";
    return out.str();
}

} // namespace srf

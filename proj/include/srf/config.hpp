#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace srf {

/// Flat key=value run configuration with strict keys and explicit ranges.
struct RunConfig {
    std::string model_family = "Round"; // Round | Weighted
    double model_a = 1.0;
    double model_b = 1.0;
    int grid_n = 256;
    double flow_t_end = 5.0;
    double flow_dt_safety = 0.1;
    std::string conjugate_variant = "F"; // F | W
    double conjugate_tau_T = 0.5;
    int mu_restarts = 8;
    double mu_tol = 1e-8;
    std::vector<double> tubes_radii = {0.02, 0.04, 0.06, 0.08, 0.1};
    long tubes_mc_samples = 1000000;
    uint64_t seed = 1;
    std::string output_dir = "out";

    static RunConfig from_file(const std::string& path);
    /// Apply one dotted-key assignment (used by both file parsing and CLI
    /// flag overrides); throws ConfigError for unknown keys or bad values.
    void set(const std::string& key, const std::string& value);
    void validate() const;

    std::string canonical() const; // deterministic key=value dump
};

} // namespace srf

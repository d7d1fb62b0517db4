#pragma once

#include <string>
#include <vector>

#include "srf/config.hpp"

namespace srf {

struct ProbeResult {
    std::string name;
    bool pass = false;
    bool skipped = false;
    double value = 0.0;
    std::string detail;
};

struct ScenarioResult {
    std::vector<ProbeResult> probes;
    std::string csv_path, json_path, svg_path;
    bool all_pass() const {
        for (const auto& p : probes)
            if (!p.pass && !p.skipped) return false;
        return true;
    }
};

/// Run the flagship scenario: normalized flow, coupled energy/entropy
/// series, mu/a series, curvature/potential/diameter bounds.  Writes
/// timeseries.csv, summary.json and plots.svg under cfg.output_dir;
/// byte-identical outputs for identical (config, seed).
ScenarioResult run_scenario(const RunConfig& cfg);

/// Reduced-resolution invariant suite (grid.n as configured, default 128);
/// convergence-order probes are marked skipped below n=128.
std::vector<ProbeResult> selftest(int grid_n, uint64_t seed);

/// Seeded initial potential used by the harness: zero when seed == 0
/// (Einstein scenario), otherwise a fixed-amplitude smooth perturbation.
std::vector<double> seeded_potential(int n, uint64_t seed);

} // namespace srf

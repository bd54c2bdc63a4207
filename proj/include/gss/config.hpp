#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "gss/fiberlink.hpp"
#include "gss/optimizer.hpp"

namespace gss {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Line-oriented `key = value` run configuration. Unknown keys are rejected.
struct RunConfig {
    // constellation source
    std::string constellation = "pm16qam"; // pm16qam | ps-pm16qam | gss-midpoint | file
    std::string constellation_file;
    double p_low = 0.5;
    int m = 8;
    int t = 4;

    // sweep axes
    std::vector<double> distances_km = {160.0};
    std::vector<double> launch_powers_dbm;

    std::size_t D = 1 << 16;
    std::uint64_t seed = 1;
    Metric metric = Metric::kRbmd;
    int workers = 1;

    FiberConfig fiber;
    ImpairmentConfig imp;
    bool enforce_min_launch_power = true;

    // fec
    int chase_q = 4;

    // optimizer
    SearchOptions search;
    std::size_t opt_D = 1 << 14;

    // verbatim config text, echoed into output headers
    std::string source_text;

    Constellation make_constellation() const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

std::string metric_name(Metric m);

// one evaluated grid point; FEC columns are NaN unless the fec-ber command
// filled them
struct SweepRow {
    double distance_km = 0.0;
    double launch_power_dbm = 0.0;
    double mi = 0.0;
    double rbmd = 0.0;
    std::vector<double> bitwise_mi;
    double papr = 0.0;
    double sigma2 = 0.0;
    double pre_fec_ber = 0.0;
    double post_fec_ber_hd = 0.0;
    double post_fec_ber_sd = 0.0;
    bool pushed_above_optimal = false;
};

struct CommandOutput {
    std::vector<SweepRow> rows;
};

int cmd_evaluate(const RunConfig& cfg, const std::string& out_path);
int cmd_fec_ber(const RunConfig& cfg, const std::string& out_path);
int cmd_optimize(const RunConfig& cfg, const std::string& out_path);
int cmd_export(const RunConfig& cfg, const std::string& out_path);

// shared by cmd_evaluate / cmd_fec_ber; with_fec switches the FEC columns on
std::vector<SweepRow> run_sweep(const RunConfig& cfg, const Constellation& c,
                                bool with_fec);

void write_sweep_csv(const std::string& path, const RunConfig& cfg,
                     const std::vector<SweepRow>& rows);

} // namespace gss

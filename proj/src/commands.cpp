#include <cmath>
#include <fstream>
#include <future>
#include <limits>

#include <json.hpp>

#include "gss/config.hpp"
#include "gss/fec.hpp"

namespace gss {

namespace {

constexpr const char* kToolVersion = "0.1.0";
const double kNaN = std::numeric_limits<double>::quiet_NaN();

struct GridPoint {
    double distance_km;
    double power_dbm;
};

SweepRow evaluate_point(const RunConfig& cfg, const Constellation& c,
                        const GridPoint& gp, bool with_fec) {
    FiberConfig fiber = cfg.fiber;
    fiber.span_length_km = gp.distance_km;
    ImpairmentConfig imp = cfg.imp;
    imp.launch_power_dbm = gp.power_dbm;

    const LinkResult res = run_link(c, fiber, imp, cfg.D, cfg.seed);

    SweepRow row;
    row.distance_km = gp.distance_km;
    row.launch_power_dbm = gp.power_dbm;
    row.mi = res.air.mi;
    row.rbmd = res.air.rbmd;
    row.bitwise_mi = res.air.bitwise_mi;
    row.papr = papr(c);
    row.sigma2 = res.air.sigma2;

    const LlrFrame frame =
        compute_llrs(res.record, c, std::max(res.air.sigma2, 1e-30));
    std::size_t errors = 0;
    for (std::size_t i = 0; i < frame.llrs.size(); ++i)
        if ((frame.llrs[i] > 0.0) != (frame.tx_bits[i] != 0)) ++errors;
    row.pre_fec_ber = static_cast<double>(errors) / static_cast<double>(frame.llrs.size());

    if (with_fec) {
        const HammingCode code;
        row.post_fec_ber_hd =
            postfec_ber(frame, code, FecMode::kHard, 0, cfg.seed).post_fec_ber;
        row.post_fec_ber_sd =
            postfec_ber(frame, code, FecMode::kSoft, cfg.chase_q, cfg.seed).post_fec_ber;
    } else {
        row.post_fec_ber_hd = kNaN;
        row.post_fec_ber_sd = kNaN;
    }
    return row;
}

// marks, per distance, the first feasible row when the grid optimum sits
// below the minimum launch power
void flag_pushed_rows(const RunConfig& cfg, std::vector<SweepRow>& rows) {
    for (double dist : cfg.distances_km) {
        const double pmin = min_launch_power_dbm(dist, cfg.imp.rx_min_input_dbm,
                                                 cfg.fiber.alpha_db_per_km);
        const SweepRow* best = nullptr;
        for (const auto& r : rows)
            if (r.distance_km == dist && (!best || r.mi > best->mi)) best = &r;
        if (!best || best->launch_power_dbm >= pmin) continue;
        SweepRow* first_feasible = nullptr;
        for (auto& r : rows)
            if (r.distance_km == dist && r.launch_power_dbm >= pmin &&
                (!first_feasible || r.launch_power_dbm < first_feasible->launch_power_dbm))
                first_feasible = &r;
        if (first_feasible) first_feasible->pushed_above_optimal = true;
    }
}

nlohmann::json config_json(const RunConfig& cfg) {
    return {{"tool", "gsstool"},
            {"version", kToolVersion},
            {"seed", cfg.seed},
            {"metric", metric_name(cfg.metric)},
            {"config", cfg.source_text}};
}

void write_csv_value(std::ofstream& out, double v) {
    if (std::isnan(v)) {
        out << "nan";
    } else {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.10g", v);
        out << buf;
    }
}

} // namespace

std::vector<SweepRow> run_sweep(const RunConfig& cfg, const Constellation& c,
                                bool with_fec) {
    std::vector<double> powers = cfg.launch_powers_dbm;
    if (powers.empty()) throw ConfigError("launch_powers_dbm: required for sweeps");

    std::vector<GridPoint> grid;
    for (double d : cfg.distances_km) {
        const double pmin = min_launch_power_dbm(d, cfg.imp.rx_min_input_dbm,
                                                 cfg.fiber.alpha_db_per_km);
        for (double p : powers) {
            if (cfg.enforce_min_launch_power && p < pmin) continue;
            grid.push_back({d, p});
        }
        if (cfg.enforce_min_launch_power) {
            // always include the boundary point so the pushed row exists
            bool have_min = false;
            for (const auto& gp : grid)
                if (gp.distance_km == d && gp.power_dbm == pmin) have_min = true;
            bool any = false;
            for (const auto& gp : grid)
                if (gp.distance_km == d) any = true;
            if (!have_min && (!any || powers.front() < pmin)) grid.push_back({d, pmin});
        }
    }

    std::vector<SweepRow> rows(grid.size());
    const int workers = std::max(1, cfg.workers);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= grid.size()) return;
            rows[i] = evaluate_point(cfg, c, grid[i], with_fec);
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::future<void>> futs;
        for (int w = 0; w < workers; ++w)
            futs.push_back(std::async(std::launch::async, worker));
        for (auto& f : futs) f.get();
    }

    flag_pushed_rows(cfg, rows);
    return rows;
}

void write_sweep_csv(const std::string& path, const RunConfig& cfg,
                     const std::vector<SweepRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << "# " << config_json(cfg).dump() << "\n";
    out << "distance_km,launch_power_dbm,mi,rbmd";
    const int m = rows.empty() ? 8 : static_cast<int>(rows.front().bitwise_mi.size());
    for (int k = 1; k <= m; ++k) out << ",bitwise_mi_b" << k;
    out << ",papr,sigma2,pre_fec_ber,post_fec_ber_hd,post_fec_ber_sd,"
           "pushed_above_optimal\n";
    for (const auto& r : rows) {
        write_csv_value(out, r.distance_km);
        out << ",";
        write_csv_value(out, r.launch_power_dbm);
        out << ",";
        write_csv_value(out, r.mi);
        out << ",";
        write_csv_value(out, r.rbmd);
        for (double b : r.bitwise_mi) {
            out << ",";
            write_csv_value(out, b);
        }
        out << ",";
        write_csv_value(out, r.papr);
        out << ",";
        write_csv_value(out, r.sigma2);
        out << ",";
        write_csv_value(out, r.pre_fec_ber);
        out << ",";
        write_csv_value(out, r.post_fec_ber_hd);
        out << ",";
        write_csv_value(out, r.post_fec_ber_sd);
        out << "," << (r.pushed_above_optimal ? 1 : 0) << "\n";
    }
}

int cmd_evaluate(const RunConfig& cfg, const std::string& out_path) {
    const Constellation c = cfg.make_constellation();
    const auto rows = run_sweep(cfg, c, /*with_fec=*/false);
    write_sweep_csv(out_path, cfg, rows);
    return 0;
}

int cmd_fec_ber(const RunConfig& cfg, const std::string& out_path) {
    const Constellation c = cfg.make_constellation();
    const auto rows = run_sweep(cfg, c, /*with_fec=*/true);
    write_sweep_csv(out_path, cfg, rows);
    return 0;
}

int cmd_optimize(const RunConfig& cfg, const std::string& out_path) {
    if (cfg.distances_km.size() != 1 || cfg.launch_powers_dbm.size() != 1)
        throw ConfigError("optimize expects exactly one distance and launch power");

    FiberConfig fiber = cfg.fiber;
    fiber.span_length_km = cfg.distances_km.front();
    ImpairmentConfig imp = cfg.imp;
    imp.launch_power_dbm = cfg.launch_powers_dbm.front();

    std::vector<double> lower, upper;
    gss_bounds(cfg.m, cfg.t, lower, upper);
    const std::vector<double> init = midpoint_init(cfg.m, cfg.t).flatten();

    const Objective obj = [&](const std::vector<double>& x) {
        return objective_for(cfg.m, cfg.t, x, fiber, imp, cfg.opt_D, cfg.seed,
                             cfg.metric);
    };
    const SearchResult res = pattern_search(obj, lower, upper, init, cfg.search);

    const Constellation best =
        build_gss(GssParameters::unflatten(cfg.m, cfg.t, res.best));
    std::ofstream cf(out_path);
    if (!cf) throw std::runtime_error("cannot open output file: " + out_path);
    cf << serialize(best);

    std::ofstream tf(out_path + ".trace.csv");
    if (!tf) throw std::runtime_error("cannot open trace file");
    tf << "# " << config_json(cfg).dump() << "\n";
    tf << "iteration,objective,mesh,accepted";
    for (std::size_t i = 0; i < res.best.size(); ++i) tf << ",p" << i;
    tf << "\n";
    for (const auto& e : res.trace) {
        tf << e.iteration << ",";
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.10g", e.objective);
        tf << buf << ",";
        std::snprintf(buf, sizeof(buf), "%.10g", e.mesh);
        tf << buf << "," << (e.accepted ? 1 : 0);
        for (double v : e.params) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            tf << "," << buf;
        }
        tf << "\n";
    }
    return 0;
}

int cmd_export(const RunConfig& cfg, const std::string& out_path) {
    const Constellation c = cfg.make_constellation();
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot open output file: " + out_path);
    out << serialize(c);

    double px = 0.0, py = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) {
        px += c.pmf[j] * (c.points[j][0] * c.points[j][0] + c.points[j][1] * c.points[j][1]);
        py += c.pmf[j] * (c.points[j][2] * c.points[j][2] + c.points[j][3] * c.points[j][3]);
    }
    nlohmann::json summary = {{"name", c.name},
                              {"m", c.m},
                              {"M", c.size()},
                              {"papr", papr(c)},
                              {"power_x_pol", px},
                              {"power_y_pol", py}};
    if (c.t > 0) summary["dof"] = dof_count(c.m, c.t);
    std::ofstream sf(out_path + ".summary.json");
    sf << summary.dump(2) << "\n";
    printf("%s\n", summary.dump().c_str());
    return 0;
}

} // namespace gss

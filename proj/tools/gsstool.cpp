#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "gss/config.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_path = "out.csv";
    long long seed = -1;
    int workers = 0;
    std::string metric;
};

void add_common(CLI::App* sub, CommonArgs& args) {
    sub->add_option("--config", args.config_path, "run configuration file")->required();
    sub->add_option("--out", args.out_path, "output path");
    sub->add_option("--seed", args.seed, "override config seed");
    sub->add_option("--workers", args.workers, "concurrent sweep evaluations");
    sub->add_option("--metric", args.metric, "objective metric")
        ->check(CLI::IsMember({"mi", "rbmd"}));
}

gss::RunConfig load(const CommonArgs& args) {
    gss::RunConfig cfg = gss::parse_config_file(args.config_path);
    if (args.seed >= 0) cfg.seed = static_cast<std::uint64_t>(args.seed);
    if (args.workers > 0) cfg.workers = args.workers;
    if (args.metric == "mi") cfg.metric = gss::Metric::kMi;
    if (args.metric == "rbmd") cfg.metric = gss::Metric::kRbmd;
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"4D shell-shaped constellation design and link evaluation"};
    app.require_subcommand(1);

    CommonArgs eval_args, opt_args, fec_args, export_args;
    CLI::App* eval = app.add_subcommand("evaluate", "AIR sweep over (distance, power)");
    add_common(eval, eval_args);
    CLI::App* opt = app.add_subcommand("optimize", "pattern-search constellation design");
    add_common(opt, opt_args);
    CLI::App* fec = app.add_subcommand("fec-ber", "pre/post-FEC BER sweep");
    add_common(fec, fec_args);
    CLI::App* exp = app.add_subcommand("export", "write constellation file + summary");
    add_common(exp, export_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (eval->parsed()) return gss::cmd_evaluate(load(eval_args), eval_args.out_path);
        if (opt->parsed()) return gss::cmd_optimize(load(opt_args), opt_args.out_path);
        if (fec->parsed()) return gss::cmd_fec_ber(load(fec_args), fec_args.out_path);
        if (exp->parsed()) return gss::cmd_export(load(export_args), export_args.out_path);
    } catch (const gss::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const gss::ParseError& e) {
        std::fprintf(stderr, "parse error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    }
    return 2;
}

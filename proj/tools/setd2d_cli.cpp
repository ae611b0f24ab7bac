// setd2d: run, sweep, plot-data and validate scenario files.
//
// Exit codes: 0 success, 1 configuration error, 2 runtime error.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "setd2d/setd2d.hpp"

namespace fs = std::filesystem;
using namespace setd2d;

namespace {

fs::path default_out_dir() {
    if (const char* env = std::getenv("SETD2D_OUT_DIR"); env && *env) return env;
    return "out";
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + p.string());
    return os;
}

config::ptree load(const std::string& path, std::optional<std::uint64_t> seed) {
    auto tree = config::read_ini_file(path);
    if (seed) config::set(tree, "seeds.seed", std::to_string(*seed));
    return tree;
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed, const fs::path& out_dir) {
    auto sc = config::from_ptree(load(config_path, seed));
    fs::create_directories(out_dir);
    if (sc.experiment != Experiment::network) {
        auto tr = sim::run_trace_experiment(sc);
        auto os = open_out(out_dir / ("trace_" + std::string(to_string(sc.experiment)) + ".jsonl"));
        out::write_trace_jsonl(os, tr);
        std::cout << to_string(sc.experiment) << ": " << tr.points.size() << " trace points -> " << out_dir.string() << '\n';
        return 0;
    }
    auto r = sim::run_scenario(sc);
    {
        auto os = open_out(out_dir / "metrics.csv");
        out::write_metrics_csv(os, r.frames);
    }
    {
        auto os = open_out(out_dir / "summary.csv");
        out::write_summary_csv(os, r.summary);
    }
    {
        auto os = open_out(out_dir / "configurations.jsonl");
        out::write_configurations_jsonl(os, r.frames);
    }
    {
        auto os = open_out(out_dir / "st_trace.jsonl");
        out::write_st_trace_jsonl(os, r.frames);
    }
    {
        auto os = open_out(out_dir / "trust.csv");
        out::write_final_trust_csv(os, r);
    }
    {
        auto os = open_out(out_dir / "layout.csv");
        radio::write_layout_csv(os, r.layout);
    }
    {
        auto edges = open_out(out_dir / "social_edges.txt");
        social::write_edge_list(edges, r.social);
        auto nodes = open_out(out_dir / "social_nodes.txt");
        social::write_node_table(nodes, r.social);
    }
    if (sc.transcript) {
        auto os = open_out(out_dir / "transcript.jsonl");
        r.transcript.write_jsonl(os);
    }
    const auto& s = r.summary;
    std::cout << to_string(sc.variant) << ", " << s.frames << " frames: mean non-corrupted " << s.mean_non_corrupted_kbits
              << " kbits, wasted " << s.wasted_pct << "%, malicious selection " << s.malicious_selection_pct << "% -> "
              << out_dir.string() << '\n';
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::vector<std::string>& params,
              const std::vector<std::string>& values, std::vector<std::uint64_t> seeds, const fs::path& out_dir) {
    if (params.size() != values.size())
        throw config_error("sweep", "every --param needs a matching --values");
    std::vector<experiments::SweepParam> sp;
    for (std::size_t i = 0; i < params.size(); ++i) {
        experiments::SweepParam p{params[i], {}};
        std::string item;
        std::istringstream is(values[i]);
        while (std::getline(is, item, ',')) p.values.push_back(item);
        sp.push_back(std::move(p));
    }
    auto base = load(config_path, std::nullopt);
    if (seeds.empty()) seeds.push_back(config::from_ptree(base).seeds.master);
    auto res = experiments::run_sweep(base, sp, seeds, [](std::size_t done, std::size_t total) {
        std::cerr << "\r" << done << "/" << total << std::flush;
        if (done == total) std::cerr << '\n';
    });
    fs::create_directories(out_dir);
    auto os = open_out(out_dir / "sweep.csv");
    experiments::write_sweep_csv(os, res);
    std::cout << res.rows.size() << " runs -> " << (out_dir / "sweep.csv").string() << '\n';
    return 0;
}

int cmd_plot(const fs::path& results, const std::string& figure, const std::optional<fs::path>& out) {
    auto files = experiments::plot_data(results, figure);
    fs::path dir = out.value_or(results / "plots");
    experiments::write_series(dir, files);
    for (const auto& f : files) std::cout << (dir / f.name).string() << '\n';
    return 0;
}

int cmd_validate(const std::string& config_path) {
    auto sc = config::from_ptree(load(config_path, std::nullopt));
    std::cout << config_path << ": ok (" << to_string(sc.experiment) << ", " << to_string(sc.variant) << ", "
              << sc.n_nodes << " nodes, " << sc.frames << " frames)\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Trust-aware secure D2D relay simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;

    auto* run = app.add_subcommand("run", "Run one scenario");
    run->add_option("--config", config_path, "Scenario INI file")->required()->check(CLI::ExistingFile);
    run->add_option("--seed", seed, "Master seed (overrides [seeds] seed)");
    run->add_option("--out", out_dir, "Output directory (default: $SETD2D_OUT_DIR or ./out)");

    std::vector<std::string> params, values;
    std::vector<std::uint64_t> seeds;
    auto* sweep = app.add_subcommand("sweep", "Sweep parameters over a Cartesian grid");
    sweep->add_option("--config", config_path, "Scenario INI file")->required()->check(CLI::ExistingFile);
    sweep->add_option("--param", params, "Parameter as section.key (repeatable)")->required();
    sweep->add_option("--values", values, "Comma-separated values, one list per --param")->required();
    sweep->add_option("--seeds", seeds, "Seeds to run every point with")->delimiter(',');
    sweep->add_option("--out", out_dir, "Output directory");

    std::string results, figure;
    std::optional<std::string> plot_out;
    auto* plot = app.add_subcommand("plot-data", "Extract per-curve series for a figure");
    plot->add_option("--results", results, "Directory with sweep.csv / trace_*.jsonl")->required();
    plot->add_option("--figure", figure, "fig3 fig4 fig5a fig5b fig6 fig7 fig8 fig9 fig10 figCI")->required();
    plot->add_option("--out", plot_out, "Series output directory (default: <results>/plots)");

    auto* validate = app.add_subcommand("validate", "Check a scenario file");
    validate->add_option("--config", config_path, "Scenario INI file")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    fs::path out = out_dir.empty() ? default_out_dir() : fs::path(out_dir);
    try {
        if (*run) return cmd_run(config_path, seed, out);
        if (*sweep) return cmd_sweep(config_path, params, values, seeds, out);
        if (*plot) return cmd_plot(results, figure, plot_out ? std::optional<fs::path>(*plot_out) : std::nullopt);
        if (*validate) return cmd_validate(config_path);
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const experiments::missing_sweep& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

#pragma once

// Parameter sweeps over scenario files and the per-figure series extraction
// that turns sweep / trace outputs into one CSV per plotted curve.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "outputs.hpp"
#include "scenario.hpp"
#include "simulation.hpp"

namespace setd2d::experiments {

struct SweepParam {
    std::string name;  // section.key
    std::vector<std::string> values;
};

struct SweepRow {
    std::vector<std::string> values;  // one per swept parameter
    std::uint64_t seed = 0;
    sim::RunSummary summary;
};

struct SweepResult {
    std::vector<std::string> params;
    std::vector<SweepRow> rows;
};

/// Cartesian product of the parameter values, each point run once per seed.
inline SweepResult run_sweep(const config::ptree& base, const std::vector<SweepParam>& params,
                             const std::vector<std::uint64_t>& seeds,
                             const std::function<void(std::size_t, std::size_t)>& progress = {}) {
    if (seeds.empty()) throw config_error("seeds", "sweep needs at least one seed");
    SweepResult res;
    std::size_t points = 1;
    for (const auto& p : params) {
        if (p.values.empty()) throw config_error(p.name, "sweep parameter without values");
        res.params.push_back(p.name);
        points *= p.values.size();
    }
    const std::size_t total = points * seeds.size();
    std::size_t done = 0;
    for (std::size_t idx = 0; idx < points; ++idx) {
        std::vector<std::string> values(params.size());
        std::size_t rest = idx;
        for (std::size_t k = params.size(); k-- > 0;) {
            values[k] = params[k].values[rest % params[k].values.size()];
            rest /= params[k].values.size();
        }
        for (auto seed : seeds) {
            auto tree = base;
            for (std::size_t k = 0; k < params.size(); ++k) config::set(tree, params[k].name, values[k]);
            config::set(tree, "seeds.seed", std::to_string(seed));
            auto sc = config::from_ptree(tree);
            if (sc.experiment != Experiment::network)
                throw config_error("scenario.experiment", "sweeps run network scenarios only");
            res.rows.push_back({values, seed, sim::run_scenario(sc).summary});
            if (progress) progress(++done, total);
        }
    }
    return res;
}

inline void write_sweep_csv(std::ostream& os, const SweepResult& r) {
    for (const auto& p : r.params) os << p << ',';
    os << "seed," << out::summary_header << '\n';
    for (const auto& row : r.rows) {
        for (const auto& v : row.values) os << v << ',';
        os << row.seed << ',' << out::summary_fields(row.summary) << '\n';
    }
}

namespace detail {

inline std::vector<std::string> split(const std::string& line, char sep = ',') {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(line);
    while (std::getline(is, item, sep)) out.push_back(item);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

inline std::optional<double> as_number(const std::string& s) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos == s.size()) return v;
    } catch (const std::exception&) {
    }
    return std::nullopt;
}

inline bool value_less(const std::string& a, const std::string& b) {
    auto x = as_number(a), y = as_number(b);
    if (x && y) return *x < *y;
    return a < b;
}

inline std::string sanitize(std::string s) {
    for (auto& c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' && c != '-' && c != '_') c = '_';
    return s;
}

} // namespace detail

/// Plain table with a header row.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::optional<std::size_t> column(std::string_view name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return i;
        return std::nullopt;
    }
};

inline Table read_csv(std::istream& is) {
    Table t;
    std::string line;
    if (!std::getline(is, line)) return t;
    t.columns = detail::split(line);
    while (std::getline(is, line))
        if (!line.empty()) t.rows.push_back(detail::split(line));
    return t;
}

struct SeriesFile {
    std::string name;  // file name
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

inline constexpr std::string_view figure_ids[] = {"fig3", "fig4", "fig5a", "fig5b", "fig6",
                                                  "fig7", "fig8", "fig9",  "fig10", "figCI"};

class missing_sweep : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

// Mean of the summary metrics over seeds, one series per value of `series_param`.
inline std::vector<SeriesFile> sweep_series(const Table& t, std::string_view figure, const std::string& x_param,
                                            const std::string& series_param) {
    auto xi = t.column(x_param);
    auto si = t.column(series_param);
    if (!xi || !si)
        throw missing_sweep(std::string(figure) + " needs a sweep over " + x_param + " and " + series_param +
                            " (sweep.csv in the results directory)");
    static const std::vector<std::string> metrics{"mean_non_corrupted_kbits", "wasted_pct", "malicious_selection_pct",
                                                  "non_corrupted_kbits_per_frame"};
    std::vector<std::size_t> mi;
    for (const auto& m : metrics) {
        auto c = t.column(m);
        if (!c) throw missing_sweep("sweep.csv lacks column " + m);
        mi.push_back(*c);
    }
    // series -> x -> (sums, count)
    std::map<std::string, std::map<std::string, std::pair<std::vector<double>, std::size_t>, decltype(&value_less)>,
             decltype(&value_less)>
        acc(&value_less);
    for (const auto& row : t.rows) {
        auto& bucket = acc.try_emplace(row.at(*si), &value_less).first->second;
        auto& cell = bucket.try_emplace(row.at(*xi), std::vector<double>(metrics.size(), 0.0), 0).first->second;
        for (std::size_t k = 0; k < metrics.size(); ++k) cell.first[k] += std::stod(row.at(mi[k]));
        ++cell.second;
    }
    std::vector<SeriesFile> out;
    auto short_name = [](const std::string& p) { return p.substr(p.find('.') + 1); };
    for (const auto& [s, xs] : acc) {
        SeriesFile f;
        f.name = std::string(figure) + "_" + short_name(series_param) + "_" + sanitize(s) + ".csv";
        f.columns = {short_name(x_param)};
        for (const auto& m : metrics) f.columns.push_back(m);
        f.columns.push_back("runs");
        for (const auto& [x, cell] : xs) {
            std::vector<std::string> row{x};
            for (double v : cell.first) row.push_back(out::num(v / static_cast<double>(cell.second)));
            row.push_back(std::to_string(cell.second));
            f.rows.push_back(std::move(row));
        }
        out.push_back(std::move(f));
    }
    return out;
}

inline std::vector<SeriesFile> trace_series(const std::filesystem::path& results, std::string_view figure) {
    auto path = results / ("trace_" + std::string(figure) + ".jsonl");
    std::ifstream in(path);
    if (!in)
        throw missing_sweep(std::string(figure) + " needs " + path.filename().string() + " (run a scenario with experiment = " +
                            std::string(figure) + ")");
    std::map<std::string, SeriesFile> files;
    std::vector<std::string> order;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto j = nlohmann::json::parse(line);
        std::string key = j["series"].get<std::string>();
        if (figure == "fig8") key += "_rx" + std::to_string(j["receiver"].get<std::uint32_t>());
        auto [it, inserted] = files.try_emplace(key);
        auto& f = it->second;
        if (inserted) {
            order.push_back(key);
            f.name = std::string(figure) + "_" + sanitize(key) + ".csv";
            f.columns = {"round", "receiver", "decision", "gtf", "sh", "scb", "sib", "sr", "st"};
        }
        auto n = [&](const char* k) { return out::num(j[k].get<double>()); };
        f.rows.push_back({std::to_string(j["round"].get<std::uint32_t>()), std::to_string(j["receiver"].get<std::uint32_t>()),
                          j["decision"].get<std::string>(), j["gtf"].is_null() ? "" : std::to_string(j["gtf"].get<int>()),
                          std::to_string(j["sh"].get<std::size_t>()), n("scb"), n("sib"), n("sr"), n("st")});
    }
    std::vector<SeriesFile> out;
    for (const auto& k : order) out.push_back(std::move(files[k]));
    return out;
}

} // namespace detail

/// Series files for one figure from a results directory.
inline std::vector<SeriesFile> plot_data(const std::filesystem::path& results, std::string_view figure) {
    if (std::find(std::begin(figure_ids), std::end(figure_ids), figure) == std::end(figure_ids))
        throw config_error("figure", "unknown figure id '" + std::string(figure) + "'");
    if (figure == "fig3" || figure == "fig4" || figure == "fig10") {
        std::ifstream in(results / "sweep.csv");
        if (!in) throw missing_sweep(std::string(figure) + " needs sweep.csv in " + results.string());
        auto t = read_csv(in);
        if (figure == "fig3") return detail::sweep_series(t, figure, "weights.threshold", "scenario.malicious_fraction");
        if (figure == "fig4") return detail::sweep_series(t, figure, "scenario.malicious_fraction", "scenario.variant");
        return detail::sweep_series(t, figure, "scenario.file_kbits", "scenario.variant");
    }
    return detail::trace_series(results, figure);
}

inline void write_series(const std::filesystem::path& dir, const std::vector<SeriesFile>& files) {
    std::filesystem::create_directories(dir);
    for (const auto& f : files) {
        std::ofstream os(dir / f.name);
        for (std::size_t i = 0; i < f.columns.size(); ++i) os << (i ? "," : "") << f.columns[i];
        os << '\n';
        for (const auto& r : f.rows) {
            for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
            os << '\n';
        }
    }
}

} // namespace setd2d::experiments

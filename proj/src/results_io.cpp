#include "sidebandit/results_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "sidebandit/instance_io.hpp"

namespace sidebandit {

namespace fs = std::filesystem;

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_for_write(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    return out;
}

nlohmann::json number_or_null(double x) {
    if (std::isnan(x)) return nullptr;
    return x;
}

}  // namespace

nlohmann::json run_config_to_json(const RunConfig& config) {
    return {
        {"instance", instance_to_json(config.instance)},
        {"policy", std::string(to_string(config.policy))},
        {"alpha", config.params.alpha},
        {"gamma", config.params.gamma},
        {"gap_floor", config.params.gap_floor},
        {"horizon", config.horizon},
        {"replications", config.replications},
        {"base_seed", config.base_seed},
        {"checkpoints", config.checkpoints.empty() ? default_checkpoints(config.horizon) : config.checkpoints},
    };
}

void write_csv(const std::vector<AggregateRow>& rows, const fs::path& path) {
    if (rows.empty()) throw std::invalid_argument("no results to write to " + path.string());
    auto out = open_for_write(path);
    out << "t,mean_regret,stderr,regret_over_logt\n";
    for (const auto& r : rows) {
        out << r.t << ',' << format_double(r.mean_regret) << ',' << format_double(r.stderr_regret) << ','
            << format_double(r.regret_over_logt) << '\n';
    }
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

void write_json(const ResultsTable& results, const fs::path& path) {
    if (results.rows.empty()) throw std::invalid_argument("no results to write to " + path.string());
    nlohmann::json table = nlohmann::json::array();
    for (const auto& r : results.rows) {
        table.push_back({{"t", r.t},
                         {"mean_regret", r.mean_regret},
                         {"stderr", r.stderr_regret},
                         {"regret_over_logt", number_or_null(r.regret_over_logt)}});
    }
    const nlohmann::json doc = {{"config", results.config}, {"seeds", results.seeds}, {"table", table}};
    auto out = open_for_write(path);
    out << doc.dump(2) << '\n';
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

ResultsTable read_results_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    const auto doc = nlohmann::json::parse(in);
    ResultsTable res;
    res.config = doc.at("config");
    res.seeds = doc.at("seeds").get<std::vector<std::uint64_t>>();
    for (const auto& jr : doc.at("table")) {
        AggregateRow r;
        r.t = jr.at("t").get<std::uint64_t>();
        r.mean_regret = jr.at("mean_regret").get<double>();
        r.stderr_regret = jr.at("stderr").get<double>();
        const auto& ratio = jr.at("regret_over_logt");
        r.regret_over_logt = ratio.is_null() ? std::nan("") : ratio.get<double>();
        res.rows.push_back(r);
    }
    return res;
}

nlohmann::json trace_to_json(const RegretTrace& trace) {
    nlohmann::json labels = nlohmann::json::array();
    for (const auto& run : trace.labels) labels.push_back({std::string(to_string(run.label)), run.length});
    return {
        {"rep_index", trace.rep_index},
        {"seed", trace.seed},
        {"checkpoints", trace.checkpoints},
        {"regret", trace.regret},
        {"label_counts",
         {{"init", trace.count(CaseLabel::Init)},
          {"A", trace.count(CaseLabel::GreedyA)},
          {"B", trace.count(CaseLabel::UniformB)},
          {"C", trace.count(CaseLabel::LpC)}}},
        {"labels_rle", labels},
        {"final_pull_counts", trace.final_pull_counts},
        {"final_n_e", trace.final_n_e},
    };
}

void write_results_dir(const RunConfig& config, const std::vector<RegretTrace>& traces,
                       const std::vector<AggregateRow>& rows, const fs::path& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir / "traces", ec);
    if (ec) throw std::runtime_error("cannot create " + (out_dir / "traces").string() + ": " + ec.message());

    ResultsTable table;
    table.config = run_config_to_json(config);
    for (const auto& tr : traces) table.seeds.push_back(tr.seed);
    table.rows = rows;

    {
        auto out = open_for_write(out_dir / "config.json");
        out << table.config.dump(2) << '\n';
    }
    write_csv(rows, out_dir / "results.csv");
    write_json(table, out_dir / "results.json");
    for (const auto& tr : traces) {
        char name[32];
        std::snprintf(name, sizeof name, "rep_%04llu.json", static_cast<unsigned long long>(tr.rep_index));
        auto out = open_for_write(out_dir / "traces" / name);
        out << trace_to_json(tr).dump() << '\n';
    }
}

}  // namespace sidebandit

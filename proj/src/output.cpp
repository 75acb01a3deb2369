#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "htlms/harness.hpp"

namespace htlms {

using nlohmann::json;

namespace {

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// JSON has no infinities; nlohmann would write them as null anyway, this
// just makes the intent explicit.
json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

json scenario_json(const IdentScenario& sc) {
    return {{"n_taps", sc.n_taps},         {"n_nonzero", sc.n_nonzero},
            {"tap_value", sc.tap_value},   {"random_signs", sc.random_signs},
            {"signal_len", sc.signal_len}, {"snr_db", finite_or_null(sc.snr_db)},
            {"noise", std::isfinite(sc.snr_db)}};
}

json scenario_json(const SpectrumScenario& sc) {
    return {{"n_bins", sc.n_bins},
            {"n_tones", sc.n_tones},
            {"n_samples", sc.n_samples},
            {"snr_db", finite_or_null(sc.snr_db)},
            {"noise", std::isfinite(sc.snr_db)},
            {"shuffle_each_pass", sc.shuffle_each_pass}};
}

json filter_json(const FilterConfig& fc) {
    return {{"algorithm", std::string(algorithm_label(fc.algorithm))},
            {"n_taps", fc.n_taps},
            {"mu", fc.mu},
            {"rho", fc.rho},
            {"epsilon", fc.epsilon},
            {"sparsity", fc.sparsity},
            {"relaxed_sparsity", fc.relaxed_sparsity},
            {"warmup_steps", fc.warmup_steps}};
}

json diagnostic_json(const SnapshotDiagnostic& d) {
    json j = {{"iteration", d.iteration},
              {"esr", d.esr},
              {"esr_db", finite_or_null(to_db(d.esr))},
              {"theorem1", d.theorem1},
              {"hit_rate", d.hit_rate}};
    j["ser"] = d.ser ? finite_or_null(*d.ser) : json(nullptr);
    j["ser_db"] = d.ser ? finite_or_null(to_db(*d.ser)) : json(nullptr);
    j["theorem2"] = d.theorem2 ? json(*d.theorem2) : json(nullptr);
    return j;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

template <typename T>
T take(const json& j, const char* key) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config key '") + key + "': " + e.what());
    }
}

double take_snr(const json& j, const char* key) {
    const json& v = j.at(key);
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "inf" || s == "off" || s == "none") return std::numeric_limits<double>::infinity();
        throw std::invalid_argument(std::string("config key '") + key + "': expected a number or \"inf\"");
    }
    return take<double>(j, key);
}

json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config file " + path.string() + ": " + e.what());
    }
}

void apply_options(ExperimentOptions& opt, const std::string& key, const json& j) {
    if (key == "runs") opt.n_runs = take<std::size_t>(j, "runs");
    else if (key == "seed") opt.base_seed = take<std::uint64_t>(j, "seed");
    else if (key == "snapshot_every") opt.snapshot_every = take<std::size_t>(j, "snapshot_every");
    else if (key == "threads") opt.threads = take<int>(j, "threads");
    else if (key == "serial") opt.execution = take<bool>(j, "serial") ? Execution::Serial : Execution::Parallel;
    else if (key == "out") opt.output_dir = take<std::string>(j, "out");
    else throw std::invalid_argument("config file: unknown key '" + key + "'");
}

}  // namespace

void emit_outputs(const IdentExperiment& cfg, const IdentResult& result, const std::filesystem::path& output_dir) {
    ensure_dir(output_dir);

    std::string csv = "iteration";
    for (const auto& c : result.curves) csv += "," + c.label;
    csv += "\n";
    const std::size_t len = result.curves.empty() ? 0 : result.curves.front().mean_esr_db.size();
    for (std::size_t n = 0; n < len; ++n) {
        csv += std::to_string(n + 1);
        for (const auto& c : result.curves) csv += "," + fmt_double(c.mean_esr_db[n]);
        csv += "\n";
    }
    write_file(output_dir / "curves.csv", csv);

    json summary;
    summary["schema_version"] = kSummarySchemaVersion;
    summary["experiment"] = "ident";
    summary["scenario"] = scenario_json(cfg.scenario);
    summary["n_runs"] = cfg.options.n_runs;
    summary["base_seed"] = cfg.options.base_seed;
    summary["seeds"] = result.seeds;
    summary["snapshot_every"] = cfg.options.snapshot_every;
    summary["algorithms"] = json::array();
    for (const auto& fc : cfg.algorithms) summary["algorithms"].push_back(filter_json(fc));
    summary["final_esr"] = json::object();
    for (const auto& c : result.curves) {
        const double last = c.mean_esr.empty() ? std::nan("") : c.mean_esr.back();
        summary["final_esr"][c.label] = {{"linear", finite_or_null(last)},
                                         {"db", finite_or_null(to_db(last))},
                                         {"tail500_db", finite_or_null(c.tail_mean_db(500))}};
    }
    summary["diagnostics"] = json::object();
    for (const auto& d : result.diagnostics) {
        json arr = json::array();
        for (const auto& snap : d.snapshots) arr.push_back(diagnostic_json(snap));
        summary["diagnostics"][d.label] = std::move(arr);
    }
    write_file(output_dir / "summary.json", dump(summary));
}

void emit_outputs(const SpectrumExperiment& cfg, const SpectrumResult& result,
                  const std::filesystem::path& output_dir) {
    ensure_dir(output_dir);

    std::string csv = "bin,true_mag";
    for (const auto& l : result.labels) csv += "," + l;
    csv += "\n";
    if (!result.runs.empty()) {
        const auto& rep = result.runs.front();
        for (std::size_t k = 0; k < rep.true_magnitudes.size(); ++k) {
            csv += std::to_string(k) + "," + fmt_double(rep.true_magnitudes[k]);
            for (const auto& est : rep.estimated_magnitudes) csv += "," + fmt_double(est[k]);
            csv += "\n";
        }
    }
    write_file(output_dir / "spectrum.csv", csv);

    json summary;
    summary["schema_version"] = kSummarySchemaVersion;
    summary["experiment"] = "spectrum";
    summary["scenario"] = scenario_json(cfg.scenario);
    summary["passes"] = cfg.passes;
    summary["sparsity"] = cfg.sparsity;
    summary["unthresholded_passes"] = cfg.unthresholded_passes;
    summary["n_runs"] = cfg.options.n_runs;
    summary["base_seed"] = cfg.options.base_seed;
    summary["labels"] = result.labels;
    summary["full_recovery_rate"] = result.full_recovery_rate;
    summary["mean_true_bin_magnitude"] = result.mean_true_bin_magnitude;
    summary["runs"] = json::array();
    for (const auto& rep : result.runs) {
        json r = {{"seed", rep.seed}, {"mu", rep.mu}, {"true_support", rep.true_support.indices}};
        for (std::size_t a = 0; a < rep.labels.size(); ++a) {
            r["algorithms"][rep.labels[a]] = {{"top_s", rep.top_s[a].indices},
                                              {"hit_rate", rep.hit_rate[a]},
                                              {"mean_true_bin_magnitude", rep.mean_true_bin_magnitude[a]},
                                              {"esr", finite_or_null(rep.esr[a])},
                                              {"esr_db", finite_or_null(to_db(rep.esr[a]))}};
        }
        summary["runs"].push_back(std::move(r));
    }
    write_file(output_dir / "summary.json", dump(summary));
}

CurveTable read_curves_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    CurveTable table;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": missing header");
    {
        std::stringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');
        if (cell != "iteration") throw std::runtime_error(path.string() + ": first column must be 'iteration'");
        while (std::getline(ss, cell, ',')) table.labels.push_back(cell);
    }
    table.columns.resize(table.labels.size());
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');
        table.iterations.push_back(std::stoull(cell));
        for (auto& col : table.columns) {
            if (!std::getline(ss, cell, ',')) throw std::runtime_error(path.string() + ": short row");
            col.push_back(std::strtod(cell.c_str(), nullptr));
        }
    }
    return table;
}

void apply_config_file(IdentExperiment& cfg, const std::filesystem::path& path) {
    const json j = load_json(path);
    if (!j.is_object()) throw std::invalid_argument("config file " + path.string() + ": expected an object");
    FilterConfig proto = cfg.algorithms.empty() ? FilterConfig{} : cfg.algorithms.front();
    std::optional<std::vector<std::string>> labels;
    for (const auto& [key, value] : j.items()) {
        if (key == "taps") cfg.scenario.n_taps = take<std::size_t>(j, "taps");
        else if (key == "nonzero") cfg.scenario.n_nonzero = take<std::size_t>(j, "nonzero");
        else if (key == "tap_value") cfg.scenario.tap_value = take<double>(j, "tap_value");
        else if (key == "random_signs") cfg.scenario.random_signs = take<bool>(j, "random_signs");
        else if (key == "len") cfg.scenario.signal_len = take<std::size_t>(j, "len");
        else if (key == "snr") cfg.scenario.snr_db = take_snr(j, "snr");
        else if (key == "mu") proto.mu = take<double>(j, "mu");
        else if (key == "rho") proto.rho = take<double>(j, "rho");
        else if (key == "epsilon") proto.epsilon = take<double>(j, "epsilon");
        else if (key == "sparsity") proto.sparsity = take<std::size_t>(j, "sparsity");
        else if (key == "relaxed") proto.relaxed_sparsity = take<std::size_t>(j, "relaxed");
        else if (key == "warmup") proto.warmup_steps = take<std::size_t>(j, "warmup");
        else if (key == "algorithms") labels = take<std::vector<std::string>>(j, "algorithms");
        else apply_options(cfg.options, key, j);
    }
    std::vector<Algorithm> algs;
    if (labels) {
        for (const auto& l : *labels) {
            const auto a = parse_algorithm(l);
            if (!a) throw std::invalid_argument("config key 'algorithms': unknown algorithm '" + l + "'");
            algs.push_back(*a);
        }
    } else {
        for (const auto& fc : cfg.algorithms) algs.push_back(fc.algorithm);
    }
    cfg.algorithms.clear();
    proto.n_taps = cfg.scenario.n_taps;
    for (Algorithm a : algs) {
        FilterConfig fc = proto;
        fc.algorithm = a;
        cfg.algorithms.push_back(fc);
    }
}

void apply_config_file(SpectrumExperiment& cfg, const std::filesystem::path& path) {
    const json j = load_json(path);
    if (!j.is_object()) throw std::invalid_argument("config file " + path.string() + ": expected an object");
    for (const auto& [key, value] : j.items()) {
        if (key == "bins") cfg.scenario.n_bins = take<std::size_t>(j, "bins");
        else if (key == "tones") cfg.scenario.n_tones = take<std::size_t>(j, "tones");
        else if (key == "samples") cfg.scenario.n_samples = take<std::size_t>(j, "samples");
        else if (key == "snr") cfg.scenario.snr_db = take_snr(j, "snr");
        else if (key == "shuffle_passes") cfg.scenario.shuffle_each_pass = take<bool>(j, "shuffle_passes");
        else if (key == "passes") cfg.passes = take<std::size_t>(j, "passes");
        else if (key == "sparsity") cfg.sparsity = take<std::size_t>(j, "sparsity");
        else if (key == "unthresholded_passes") cfg.unthresholded_passes = take<std::size_t>(j, "unthresholded_passes");
        else apply_options(cfg.options, key, j);
    }
}

}  // namespace htlms

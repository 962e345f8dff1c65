#include "sketchsel/serde.hpp"

#include <json.hpp>

#include <filesystem>

#include "sketchsel/errors.hpp"
#include "sketchsel/io.hpp"
#include "sketchsel/rng.hpp"
#include "sketchsel/version.hpp"

namespace sketchsel {

using nlohmann::json;

namespace {

json provenance_json(const Provenance& p) {
    return json{{"tool", std::string(kToolName) + " " + kToolVersion},
                {"seed", p.seed},
                {"config_hash", p.config_hash}};
}

// Uniform error wrapper so malformed files surface as ModelError (exit 1).
template <class F>
auto guarded(const std::string& what, F&& f) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw ModelError(what + ": " + e.what());
    }
}

}  // namespace

std::vector<std::string> provenance_comments(const Provenance& p) {
    return {std::string(kToolName) + " " + kToolVersion, "seed: " + std::to_string(p.seed),
            "config_hash: " + p.config_hash};
}

std::string hash_hex(const std::string& content) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(content)));
    return buf;
}

std::string outcome_to_json(const DesignOutcome& outcome, Direction direction, bool constrained,
                            const Provenance& prov, const std::string& hs_csv_path) {
    json j;
    j["_provenance"] = provenance_json(prov);
    j["method"] = outcome.method;
    j["n"] = outcome.selection.n;
    j["p"] = outcome.selection.indices.size();
    j["direction"] = to_string(direction);
    j["constrained"] = constrained;
    j["indices"] = outcome.selection.indices;
    j["objective"] = outcome.objective;
    j["wall_time_s"] = outcome.wall_time_s;
    if (hs_csv_path.empty()) {
        json rows = json::array();
        for (int i = 0; i < outcome.h_s.rows; ++i) {
            json row = json::array();
            for (int c = 0; c < outcome.h_s.cols; ++c) row.push_back(outcome.h_s(i, c));
            rows.push_back(std::move(row));
        }
        j["H_s"] = json{{"inline", std::move(rows)}};
    } else {
        j["H_s"] = json{{"csv_path", hs_csv_path}};
    }
    return j.dump(2) + "\n";
}

LoadedOutcome outcome_from_json(const std::string& text, const std::string& base_dir) {
    return guarded("outcome JSON", [&] {
        const json j = json::parse(text);
        LoadedOutcome loaded;
        loaded.direction = direction_from_string(j.at("direction").get<std::string>());
        loaded.constrained = j.value("constrained", false);

        DesignOutcome& out = loaded.outcome;
        out.method = j.at("method").get<std::string>();
        out.objective = j.at("objective").get<double>();
        out.wall_time_s = j.value("wall_time_s", 0.0);
        const int n = j.at("n").get<int>();
        out.selection = Selection::make(n, j.at("indices").get<std::vector<int>>());

        const json& hs = j.at("H_s");
        if (hs.contains("inline")) {
            const auto rows = hs.at("inline");
            const int r = static_cast<int>(rows.size());
            const int c = r > 0 ? static_cast<int>(rows[0].size()) : 0;
            DenseMatrix m(r, c);
            for (int i = 0; i < r; ++i) {
                if (static_cast<int>(rows[i].size()) != c)
                    throw ModelError("outcome JSON: ragged H_s rows");
                for (int k = 0; k < c; ++k) m(i, k) = rows[i][k].get<double>();
            }
            out.h_s = std::move(m);
        } else if (hs.contains("csv_path")) {
            std::filesystem::path p = hs.at("csv_path").get<std::string>();
            if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
            out.h_s = read_matrix_csv(p.string());
        } else {
            throw ModelError("outcome JSON: H_s needs 'inline' or 'csv_path'");
        }
        if (out.h_s.cols != static_cast<int>(out.selection.indices.size()))
            throw ModelError("outcome JSON: H_s column count differs from the selection size");
        return loaded;
    });
}

ExperimentConfig config_from_json(const std::string& text) {
    return guarded("config JSON", [&] {
        const json j = json::parse(text);
        ExperimentConfig cfg;
        cfg.schema_version = j.at("schema_version").get<int>();

        const json& jg = j.at("graph");
        cfg.graph.model = jg.at("model").get<std::string>();
        cfg.graph.n = jg.value("n", 0);
        cfg.graph.communities = jg.value("communities", std::vector<int>{});
        cfg.graph.p_in = jg.value("p_in", 0.0);
        cfg.graph.p_out = jg.value("p_out", 0.0);
        cfg.graph.p_edge = jg.value("p_edge", 0.0);
        cfg.graph.p_e = jg.value("p_e", 0.0);
        cfg.graph.p_r = jg.value("p_r", 0.0);
        cfg.graph.knn = jg.value("knn", 0);
        cfg.graph.path = jg.value("path", std::string());

        cfg.k = j.at("k").get<int>();
        cfg.direction = direction_from_string(j.at("direction").get<std::string>());
        cfg.constrained = j.value("constrained", false);

        if (j.contains("operator")) {
            const json& jo = j.at("operator");
            cfg.op.source = jo.at("source").get<std::string>();
            cfg.op.m = jo.value("m", 0);
            cfg.op.path = jo.value("path", std::string());
        }

        cfg.template_kind = j.value("template", std::string("white"));
        cfg.template_path = j.value("template_path", std::string());
        if (j.contains("rx")) {
            const json& jr = j.at("rx");
            cfg.rx_source = jr.at("source").get<std::string>();
            cfg.rx_samples = jr.value("count", 500);
        }

        cfg.p_values = j.at("p_values").get<std::vector<int>>();
        cfg.sigma_coeffs = j.at("sigma_coeffs").get<std::vector<double>>();
        cfg.methods = j.at("methods").get<std::vector<std::string>>();

        if (j.contains("trials")) {
            const json& jt = j.at("trials");
            cfg.trials.n_graphs = jt.value("n_graphs", cfg.trials.n_graphs);
            cfg.trials.n_signal_batches = jt.value("n_signal_batches", cfg.trials.n_signal_batches);
            cfg.trials.signals_per_batch =
                jt.value("signals_per_batch", cfg.trials.signals_per_batch);
            cfg.trials.n_selection_draws =
                jt.value("n_selection_draws", cfg.trials.n_selection_draws);
        }

        cfg.seed = j.value("seed", 1ull);
        cfg.shift = shift_kind_from_string(j.value("shift", std::string("adjacency")));
        cfg.order = eig_order_from_string(j.value("order", std::string("desc")));
        if (j.contains("solver")) {
            const json& js = j.at("solver");
            cfg.solver.max_iters = js.value("max_iters", cfg.solver.max_iters);
            cfg.solver.step_init = js.value("step_init", cfg.solver.step_init);
            cfg.solver.tol = js.value("tol", cfg.solver.tol);
        }
        cfg.ridge = j.value("ridge", 0.0);
        return cfg;
    });
}

std::string config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["schema_version"] = cfg.schema_version;
    json jg{{"model", cfg.graph.model}};
    if (cfg.graph.model == "file") {
        jg["path"] = cfg.graph.path;
    } else {
        jg["n"] = cfg.graph.n;
    }
    if (cfg.graph.model == "sbm") {
        jg["communities"] = cfg.graph.communities;
        jg["p_in"] = cfg.graph.p_in;
        jg["p_out"] = cfg.graph.p_out;
    } else if (cfg.graph.model == "er") {
        jg["p_edge"] = cfg.graph.p_edge;
    } else if (cfg.graph.model == "sw") {
        jg["p_e"] = cfg.graph.p_e;
        jg["p_r"] = cfg.graph.p_r;
    } else if (cfg.graph.model == "sensor") {
        jg["knn"] = cfg.graph.knn;
    }
    j["graph"] = std::move(jg);
    j["k"] = cfg.k;
    j["direction"] = to_string(cfg.direction);
    j["constrained"] = cfg.constrained;
    json jo{{"source", cfg.op.source}};
    if (cfg.op.source == "sensor") jo["m"] = cfg.op.m;
    if (cfg.op.source == "file") jo["path"] = cfg.op.path;
    j["operator"] = std::move(jo);
    j["template"] = cfg.template_kind;
    if (cfg.template_kind == "file") j["template_path"] = cfg.template_path;
    j["rx"] = json{{"source", cfg.rx_source}, {"count", cfg.rx_samples}};
    j["p_values"] = cfg.p_values;
    j["sigma_coeffs"] = cfg.sigma_coeffs;
    j["methods"] = cfg.methods;
    j["trials"] = json{{"n_graphs", cfg.trials.n_graphs},
                       {"n_signal_batches", cfg.trials.n_signal_batches},
                       {"signals_per_batch", cfg.trials.signals_per_batch},
                       {"n_selection_draws", cfg.trials.n_selection_draws}};
    j["seed"] = cfg.seed;
    j["shift"] = to_string(cfg.shift);
    j["order"] = to_string(cfg.order);
    j["solver"] = json{{"max_iters", cfg.solver.max_iters},
                       {"step_init", cfg.solver.step_init},
                       {"tol", cfg.solver.tol}};
    j["ridge"] = cfg.ridge;
    return j.dump(2) + "\n";
}

std::string table_to_csv(const ResultTable& table, const Provenance& prov) {
    std::string out;
    for (const auto& c : provenance_comments(prov)) out += "# " + c + "\n";
    out += "method,p,sigma_coeff,rel_mse_mean,rel_mse_stderr,error\n";
    for (const ResultRow& r : table.rows) {
        out += r.method + "," + std::to_string(r.p) + "," + format_double(r.sigma_coeff) + "," +
               format_double(r.rel_mse_mean) + "," + format_double(r.rel_mse_stderr) + "," +
               r.error + "\n";
    }
    return out;
}

std::string table_to_json(const ResultTable& table, const Provenance& prov) {
    json rows = json::array();
    for (const ResultRow& r : table.rows) {
        rows.push_back(json{{"method", r.method},
                            {"p", r.p},
                            {"sigma_coeff", r.sigma_coeff},
                            {"rel_mse_mean", r.rel_mse_mean},
                            {"rel_mse_stderr", r.rel_mse_stderr},
                            {"design_time_s", r.design_time_s},
                            {"apply_time_per_signal_s", r.apply_time_per_signal_s},
                            {"speedup_vs_full", r.speedup_vs_full},
                            {"error", r.error}});
    }
    json j;
    j["_provenance"] = provenance_json(prov);
    j["rows"] = std::move(rows);
    return j.dump(2) + "\n";
}

}  // namespace sketchsel

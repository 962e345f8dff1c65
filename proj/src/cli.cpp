#include "sketchsel/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "sketchsel/errors.hpp"
#include "sketchsel/harness.hpp"
#include "sketchsel/io.hpp"
#include "sketchsel/linalg.hpp"
#include "sketchsel/lmi.hpp"
#include "sketchsel/rng.hpp"
#include "sketchsel/samplers.hpp"
#include "sketchsel/serde.hpp"
#include "sketchsel/version.hpp"

namespace sketchsel {

namespace {

// ---- gen-graph ----------------------------------------------------------------

struct GenGraphArgs {
    std::string model;
    int n = 0;
    std::vector<int> communities;
    double p_in = 0.8, p_out = 0.2;
    double p_edge = 0.1;
    double p_e = 0.2, p_r = 0.7;
    int knn = 4;
    std::uint64_t seed = 1;
    std::string out;
};

int run_gen_graph(const GenGraphArgs& a) {
    GraphSpec spec;
    spec.model = a.model;
    spec.n = a.n;
    spec.communities = a.communities;
    spec.p_in = a.p_in;
    spec.p_out = a.p_out;
    spec.p_edge = a.p_edge;
    spec.p_e = a.p_e;
    spec.p_r = a.p_r;
    spec.knn = a.knn;

    Graph g;
    if (a.model == "sbm") {
        std::vector<int> sizes = a.communities;
        if (sizes.empty() && a.n > 0) sizes = {a.n};  // single community
        g = gen_sbm(a.n, sizes, a.p_in, a.p_out, a.seed);
    } else if (a.model == "er") {
        g = gen_er(a.n, a.p_edge, a.seed);
    } else if (a.model == "sw") {
        g = gen_smallworld(a.n, a.p_e, a.p_r, a.seed);
    } else if (a.model == "sensor") {
        g = gen_sensor_knn(a.n, a.knn, a.seed);
    } else {
        throw ModelError("unknown graph model '" + a.model + "'");
    }

    std::ostringstream desc;
    desc << "gen-graph model=" << a.model << " n=" << a.n << " seed=" << a.seed;
    const Provenance prov{a.seed, hash_hex(desc.str())};
    write_matrix_csv(a.out, g.weights, provenance_comments(prov));
    std::cout << "wrote " << a.out << " (" << g.n << " nodes)\n";
    return 0;
}

// ---- gen-signals ---------------------------------------------------------------

struct GenSignalsArgs {
    std::string graph_path;
    int k = 10;
    std::string template_kind = "white";
    std::string template_file;
    int count = 100;
    std::uint64_t seed = 1;
    std::string shift = "adjacency";
    std::string order = "desc";
    std::string out;
    // optional companion outputs so a design problem can be set up without
    // external tooling
    std::string gft_out;   // V_k^T, the bandlimited analysis operator
    std::string rx_out;    // model covariance V_k T V_k^T
    std::string rw_out;    // isotropic noise covariance calibrated on the batch
    double sigma_coeff = 0.0;
};

BandlimitedModel model_from_files(const std::string& graph_path, int k, const std::string& shift,
                                  const std::string& order, const std::string& template_kind,
                                  const std::string& template_file) {
    const Graph g = load_graph(graph_path);
    SpectralBasis basis = spectral_basis(shift_operator(g, shift_kind_from_string(shift)), k,
                                         eig_order_from_string(order));
    if (template_kind == "white") return BandlimitedModel::white(std::move(basis));
    if (template_kind == "file") {
        if (template_file.empty()) throw ModelError("--template file needs --template-file");
        return BandlimitedModel::with_template(std::move(basis), read_matrix_csv(template_file));
    }
    throw ModelError("unknown template '" + template_kind + "' (expected white or file)");
}

int run_gen_signals(const GenSignalsArgs& a) {
    if (!a.rw_out.empty() && !(a.sigma_coeff > 0.0))
        throw ModelError("--rw-out needs a positive --sigma-coeff");
    const BandlimitedModel model =
        model_from_files(a.graph_path, a.k, a.shift, a.order, a.template_kind, a.template_file);
    const SignalBatch batch = sample_signals(model, a.count, a.seed);
    std::ostringstream desc;
    desc << "gen-signals graph=" << a.graph_path << " k=" << a.k << " template="
         << a.template_kind << " count=" << a.count << " shift=" << a.shift
         << " order=" << a.order << " seed=" << a.seed;
    const Provenance prov{a.seed, hash_hex(desc.str())};
    write_matrix_csv(a.out, batch.data, provenance_comments(prov));
    std::cout << "wrote " << a.out << " (" << batch.n << "x" << batch.count << ")\n";
    if (!a.gft_out.empty()) {
        write_matrix_csv(a.gft_out, transpose(model.basis.v_k), provenance_comments(prov));
        std::cout << "wrote " << a.gft_out << "\n";
    }
    if (!a.rx_out.empty()) {
        write_matrix_csv(a.rx_out, covariance_from_model(model), provenance_comments(prov));
        std::cout << "wrote " << a.rx_out << "\n";
    }
    if (!a.rw_out.empty()) {
        const double sigma2 = noise_power(a.sigma_coeff, batch);
        write_matrix_csv(a.rw_out, diag_matrix(std::vector<double>(batch.n, sigma2)),
                         provenance_comments(prov));
        std::cout << "wrote " << a.rw_out << " (sigma2 " << format_double(sigma2) << ")\n";
    }
    return 0;
}

// ---- design / export-sdp -------------------------------------------------------

struct ProblemArgs {
    std::string h_path, rx_path, rw_path;
    std::string direction = "direct";
    bool constrained = false;
    int p = 0;
    double ridge = 0.0;
};

SketchProblem load_problem(const ProblemArgs& a) {
    SketchProblem prob;
    prob.h = read_matrix_csv(a.h_path);
    prob.r_x = read_matrix_csv(a.rx_path);
    prob.r_w = read_matrix_csv(a.rw_path);
    prob.direction = direction_from_string(a.direction);
    prob.constrained = a.constrained;
    prob.p = a.p;
    if (prob.r_x.rows != prob.r_x.cols || prob.r_w.rows != prob.r_w.cols ||
        prob.r_x.rows != prob.h.cols || prob.r_w.rows != prob.h.cols)
        throw ModelError("H, Rx and Rw dimensions are inconsistent");
    if (a.ridge > 0.0)
        for (int i = 0; i < prob.r_w.rows; ++i) prob.r_w(i, i) += a.ridge;
    return prob;
}

struct DesignArgs {
    ProblemArgs prob;
    std::string method = "greedy";
    std::optional<std::uint64_t> seed;
    std::string graph_path;  // for EDS methods
    int k = 0;
    std::string shift = "adjacency";
    std::string order = "desc";
    SolverParams solver;
    std::string hs_out;
    std::string out;
};

int run_design(const DesignArgs& a) {
    const SketchProblem problem = load_problem(a.prob);
    SamplerSpec spec;
    spec.method = sampler_method_from_string(a.method);
    spec.seed = a.seed;
    spec.solver = a.solver;

    std::optional<SpectralBasis> basis;
    if (sampler_needs_basis(spec.method)) {
        if (a.graph_path.empty() || a.k < 1)
            throw ModelError("method '" + a.method + "' needs --graph and --k for the basis");
        const Graph g = load_graph(a.graph_path);
        basis = spectral_basis(shift_operator(g, shift_kind_from_string(a.shift)), a.k,
                               eig_order_from_string(a.order));
    }

    const DesignOutcome outcome =
        run_sampler(problem, a.prob.p, spec, basis ? &*basis : nullptr);

    std::ostringstream desc;
    desc << "design method=" << a.method << " p=" << a.prob.p << " direction="
         << a.prob.direction << " constrained=" << a.prob.constrained << " H=" << a.prob.h_path
         << " Rx=" << a.prob.rx_path << " Rw=" << a.prob.rw_path << " ridge=" << a.prob.ridge;
    const Provenance prov{a.seed.value_or(0), hash_hex(desc.str())};

    if (!a.hs_out.empty())
        write_matrix_csv(a.hs_out, outcome.h_s, provenance_comments(prov));
    write_text_atomic(a.out, outcome_to_json(outcome, problem.direction, problem.constrained,
                                             prov, a.hs_out));
    std::cout << "wrote " << a.out << " (method " << outcome.method << ", objective "
              << format_double(outcome.objective) << ")\n";
    return 0;
}

struct ExportArgs {
    ProblemArgs prob;
    std::string variant = "direct";
    double alpha = 0.0;  // 0: auto
    std::string out;
};

int run_export_sdp(const ExportArgs& a) {
    SketchProblem problem = load_problem(a.prob);
    const LmiVariant variant = lmi_variant_from_string(a.variant);
    problem.constrained =
        variant == LmiVariant::ColDirect || variant == LmiVariant::ColInverse;
    double alpha = a.alpha;
    if (alpha == 0.0 && !problem.constrained) alpha = default_alpha(problem);
    const LmiProblem lmi = build_lmi(problem, variant, alpha);

    std::ostringstream desc;
    desc << "export-sdp variant=" << a.variant << " p=" << a.prob.p << " alpha=" << alpha;
    const Provenance prov{0, hash_hex(desc.str())};
    std::string text;
    for (const auto& c : provenance_comments(prov)) text += "\"" + c + "\n";
    text += to_sdpa(lmi);
    write_text_atomic(a.out, text);
    std::cout << "wrote " << a.out << " (" << lmi.n_vars() << " variables)\n";
    return 0;
}

// ---- evaluate -------------------------------------------------------------------

struct EvaluateArgs {
    std::string outcome_path;
    std::string h_path;
    std::string signals_path;
    std::string noisy_path;
    double sigma2 = 0.0;
    std::uint64_t seed = 1;
    std::string out;
};

int run_evaluate(const EvaluateArgs& a) {
    const LoadedOutcome loaded = outcome_from_json(
        read_text_file(a.outcome_path),
        std::filesystem::path(a.outcome_path).parent_path().string());
    const DenseMatrix h = read_matrix_csv(a.h_path);
    const SignalBatch clean = SignalBatch::from_matrix(read_matrix_csv(a.signals_path));

    SignalBatch noisy = clean;
    if (!a.noisy_path.empty()) {
        noisy = SignalBatch::from_matrix(read_matrix_csv(a.noisy_path));
    } else if (a.sigma2 > 0.0) {
        noisy = add_noise(clean, NoiseModel::iso(clean.n, a.sigma2), a.seed);
    }

    const DenseMatrix reference_op =
        loaded.direction == Direction::Direct ? h : ls_operator(h);
    const StreamResult res = run_stream(loaded.outcome, reference_op, clean, noisy);

    std::ostringstream json;
    json << "{\n"
         << "  \"rel_mse\": " << format_double(res.rel_mse) << ",\n"
         << "  \"err_energy\": " << format_double(res.err_energy) << ",\n"
         << "  \"ref_energy\": " << format_double(res.ref_energy) << ",\n"
         << "  \"signals\": " << clean.count << ",\n"
         << "  \"sketch_time_s\": " << format_double(res.sketch_time_s) << ",\n"
         << "  \"full_time_s\": " << format_double(res.full_time_s) << "\n"
         << "}\n";
    if (a.out.empty())
        std::cout << json.str();
    else {
        write_text_atomic(a.out, json.str());
        std::cout << "wrote " << a.out << " (rel_mse " << format_double(res.rel_mse) << ")\n";
    }
    return 0;
}

// ---- sweep ----------------------------------------------------------------------

struct SweepArgs {
    std::string config_path;
    std::string out;
    bool large = false;
};

int run_sweep(const SweepArgs& a) {
    const std::string config_text = read_text_file(a.config_path);
    const ExperimentConfig cfg = config_from_json(config_text);
    // The dense eigendecomposition dominates past a couple thousand nodes;
    // demand an explicit opt-in for the large regime.
    if (cfg.graph.model != "file" && cfg.graph.n > 2048 && !a.large)
        throw ModelError("graphs beyond n=2048 take minutes to eigendecompose; pass --large "
                         "to confirm");
    const Provenance prov{cfg.seed, hash_hex(config_text)};

    const ResultTable table = run_experiment(cfg);

    std::filesystem::path json_path(a.out);
    json_path.replace_extension(".json");
    write_text_atomic(a.out, table_to_csv(table, prov));
    write_text_atomic(json_path.string(), table_to_json(table, prov));
    std::cout << "wrote " << a.out << " and " << json_path.string() << " (" << table.rows.size()
              << " rows)\n";
    return 0;
}

// ---- selftest --------------------------------------------------------------------

int run_selftest() {
    // exact reproduction of H x by the noiseless direct sketch (SBM GFT instance)
    const int n = 32, k = 5, p = 5;
    const Graph g = gen_sbm(n, {16, 16}, 0.8, 0.2, 1);
    const SpectralBasis basis = spectral_basis(g.weights, k);
    const DenseMatrix h = transpose(basis.v_k);
    const BandlimitedModel model = BandlimitedModel::white(basis);

    Selection sel = Selection::make(n, {0});
    bool found = false;
    for (std::uint64_t s = 0; s < 20 && !found; ++s) {
        const Selection cand = uniform_random_select(n, p, s);
        try {
            sketch_direct_noiseless(h, basis.v_k, cand);
            sel = cand;
            found = true;
        } catch (const NumericError&) {
        }
    }
    if (!found) throw NumericError("selftest: no full-rank selection found");

    const SignalBatch batch = sample_signals(model, 100, 3);
    const DenseMatrix hs1 = sketch_direct_noiseless(h, basis.v_k, sel);
    double direct_resid = 0.0;
    for (int c = 0; c < batch.count; ++c) {
        const auto x = batch.column(c);
        const auto want = matvec(h, x);
        const auto got = apply_sketch(hs1, sel, x);
        double err = 0.0, ref = 0.0;
        for (std::size_t i = 0; i < want.size(); ++i) {
            err += (want[i] - got[i]) * (want[i] - got[i]);
            ref += want[i] * want[i];
        }
        direct_resid = std::max(direct_resid, std::sqrt(err / ref));
    }

    // exact reproduction of the LS estimate by the noiseless inverse sketch
    const int m = 6;
    Rng rng = Rng::stream(7, "selftest-h");
    DenseMatrix hw(m, n);
    for (double& v : hw.data) v = rng.gaussian();
    const DenseMatrix als = ls_operator(hw);
    const DenseMatrix hs5 = sketch_inverse_noiseless(hw, basis.v_k, sel);
    double inverse_resid = 0.0;
    for (int c = 0; c < batch.count; ++c) {
        const auto x = batch.column(c);
        const auto want = matvec(als, x);
        const auto got = apply_sketch(hs5, sel, x);
        double err = 0.0, ref = 0.0;
        for (std::size_t i = 0; i < want.size(); ++i) {
            err += (want[i] - got[i]) * (want[i] - got[i]);
            ref += want[i] * want[i];
        }
        inverse_resid = std::max(inverse_resid, std::sqrt(err / ref));
    }

    // Woodbury equivalence of the relaxed objective at a binary point
    SketchProblem prob;
    prob.direction = Direction::Direct;
    prob.h = h;
    prob.r_x = covariance_from_model(model);
    prob.r_w = diag_matrix(std::vector<double>(n, 0.01));
    prob.p = p;
    const double exact = exact_objective(prob, sel);
    const double relaxed = relaxed_objective(prob, sel.indicator(), default_alpha(prob));
    const double woodbury = std::fabs(relaxed - exact) / std::max(exact, 1e-12);

    std::cout << "direct_noiseless_exactness_residual " << format_double(direct_resid)
              << "\n";
    std::cout << "inverse_noiseless_exactness_residual " << format_double(inverse_resid)
              << "\n";
    std::cout << "woodbury_identity_residual " << format_double(woodbury) << "\n";
    if (direct_resid > 1e-8 || inverse_resid > 1e-8 || woodbury > 1e-8)
        throw NumericError("selftest: residual above 1e-8");
    std::cout << "selftest ok\n";
    return 0;
}

}  // namespace

int dispatch(int argc, const char* const* argv) {
    CLI::App app{std::string(kToolName) + " " + kToolVersion +
                 " - joint sample selection and operator sketching"};
    app.require_subcommand(1);

    GenGraphArgs gg;
    CLI::App* cmd_gg = app.add_subcommand("gen-graph", "generate a graph weight-matrix CSV");
    cmd_gg->add_option("--model", gg.model, "sbm|er|sw|sensor")->required();
    cmd_gg->add_option("--n", gg.n, "node count")->required();
    cmd_gg->add_option("--communities", gg.communities, "sbm community sizes")->delimiter(',');
    cmd_gg->add_option("--p-in", gg.p_in, "sbm intra-community edge probability");
    cmd_gg->add_option("--p-out", gg.p_out, "sbm inter-community edge probability");
    cmd_gg->add_option("--p-edge", gg.p_edge, "er edge probability");
    cmd_gg->add_option("--p-e", gg.p_e, "sw edge density");
    cmd_gg->add_option("--p-r", gg.p_r, "sw rewiring probability");
    cmd_gg->add_option("--knn", gg.knn, "sensor nearest neighbors");
    cmd_gg->add_option("--seed", gg.seed, "rng seed");
    cmd_gg->add_option("--out", gg.out, "output CSV path")->required();

    GenSignalsArgs gs;
    CLI::App* cmd_gs = app.add_subcommand("gen-signals", "sample bandlimited signals");
    cmd_gs->add_option("--graph", gs.graph_path, "graph CSV or edge list")->required();
    cmd_gs->add_option("--k", gs.k, "bandwidth")->required();
    cmd_gs->add_option("--template", gs.template_kind, "white|file");
    cmd_gs->add_option("--template-file", gs.template_file, "k x k template CSV");
    cmd_gs->add_option("--count", gs.count, "number of signals")->required();
    cmd_gs->add_option("--seed", gs.seed, "rng seed");
    cmd_gs->add_option("--shift", gs.shift, "shift operator: adjacency|laplacian");
    cmd_gs->add_option("--order", gs.order, "eigenvalue order: desc|asc|abs-desc");
    cmd_gs->add_option("--out", gs.out, "output CSV path")->required();
    cmd_gs->add_option("--gft-out", gs.gft_out, "also write V_k^T (the GFT operator) here");
    cmd_gs->add_option("--rx-out", gs.rx_out, "also write the model covariance here");
    cmd_gs->add_option("--rw-out", gs.rw_out, "also write an isotropic noise covariance here");
    cmd_gs->add_option("--sigma-coeff", gs.sigma_coeff,
                       "noise power as a fraction of the batch signal energy (for --rw-out)");

    DesignArgs de;
    CLI::App* cmd_de = app.add_subcommand("design", "select samples and build the sketch");
    cmd_de->add_option("--method", de.method,
                       "exhaustive|greedy|nbh|nah|relax-threshold|relax-random|eds-1|eds-2|"
                       "eds-inf|uniform")
        ->required();
    cmd_de->add_option("--p", de.prob.p, "sampling budget")->required();
    cmd_de->add_option("--direction", de.prob.direction, "direct|inverse");
    cmd_de->add_flag("--constrained", de.prob.constrained, "restrict the sketch to columns of H");
    cmd_de->add_option("--H", de.prob.h_path, "operator CSV")->required();
    cmd_de->add_option("--Rx", de.prob.rx_path, "signal covariance CSV")->required();
    cmd_de->add_option("--Rw", de.prob.rw_path, "noise covariance CSV")->required();
    cmd_de->add_option("--ridge", de.prob.ridge, "add ridge*I to Rw");
    std::uint64_t design_seed = 0;
    CLI::Option* seed_opt = cmd_de->add_option("--seed", design_seed, "rng seed");
    cmd_de->add_option("--graph", de.graph_path, "graph CSV (EDS basis)");
    cmd_de->add_option("--k", de.k, "bandwidth (EDS basis)");
    cmd_de->add_option("--shift", de.shift, "shift operator (EDS basis)");
    cmd_de->add_option("--order", de.order, "eigenvalue order (EDS basis)");
    cmd_de->add_option("--solver-max-iters", de.solver.max_iters, "relaxation iterations");
    cmd_de->add_option("--solver-step", de.solver.step_init, "relaxation initial step");
    cmd_de->add_option("--solver-tol", de.solver.tol, "relaxation stop tolerance");
    cmd_de->add_option("--hs-out", de.hs_out, "write H_s to this CSV instead of inline");
    cmd_de->add_option("--out", de.out, "output outcome JSON")->required();

    ExportArgs ex;
    CLI::App* cmd_ex = app.add_subcommand("export-sdp", "write the selection LMI in SDPA format");
    cmd_ex->add_option("--variant", ex.variant, "direct|inverse|col-direct|col-inverse")
        ->required();
    cmd_ex->add_option("--p", ex.prob.p, "sampling budget")->required();
    cmd_ex->add_option("--H", ex.prob.h_path, "operator CSV")->required();
    cmd_ex->add_option("--Rx", ex.prob.rx_path, "signal covariance CSV")->required();
    cmd_ex->add_option("--Rw", ex.prob.rw_path, "noise covariance CSV")->required();
    cmd_ex->add_option("--ridge", ex.prob.ridge, "add ridge*I to Rw");
    cmd_ex->add_option("--alpha", ex.alpha, "Woodbury shift (default 0.5*lambda_min)");
    cmd_ex->add_option("--out", ex.out, "output .dat-s path")->required();

    EvaluateArgs ev;
    CLI::App* cmd_ev = app.add_subcommand("evaluate", "stream a signal file through an outcome");
    cmd_ev->add_option("--outcome", ev.outcome_path, "outcome JSON from design")->required();
    cmd_ev->add_option("--H", ev.h_path, "operator CSV")->required();
    cmd_ev->add_option("--signals", ev.signals_path, "clean signal batch CSV")->required();
    cmd_ev->add_option("--noisy", ev.noisy_path, "observed (noisy) signal batch CSV");
    cmd_ev->add_option("--sigma2", ev.sigma2, "synthesize iso noise with this variance");
    cmd_ev->add_option("--seed", ev.seed, "noise seed");
    cmd_ev->add_option("--out", ev.out, "write the report JSON here (default stdout)");

    SweepArgs sw;
    CLI::App* cmd_sw = app.add_subcommand("sweep", "run a full experiment sweep");
    cmd_sw->add_option("--config", sw.config_path, "experiment config JSON")->required();
    cmd_sw->add_option("--out", sw.out, "output results CSV (the JSON lands next to it)")
        ->required();
    cmd_sw->add_flag("--large", sw.large, "allow graphs beyond n=2048");

    CLI::App* cmd_st = app.add_subcommand("selftest", "run the built-in exactness checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (cmd_gg->parsed()) return run_gen_graph(gg);
        if (cmd_gs->parsed()) return run_gen_signals(gs);
        if (cmd_de->parsed()) {
            if (seed_opt->count() > 0) de.seed = design_seed;
            return run_design(de);
        }
        if (cmd_ex->parsed()) return run_export_sdp(ex);
        if (cmd_ev->parsed()) return run_evaluate(ev);
        if (cmd_sw->parsed()) return run_sweep(sw);
        if (cmd_st->parsed()) return run_selftest();
        std::cerr << "no subcommand given\n";
        return 1;
    } catch (const ModelError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace sketchsel

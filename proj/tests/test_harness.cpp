#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sketchsel/errors.hpp"
#include "sketchsel/harness.hpp"
#include "sketchsel/linalg.hpp"
#include "sketchsel/serde.hpp"
#include "test_util.hpp"

using namespace sketchsel;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.graph.model = "sbm";
    cfg.graph.n = 24;
    cfg.graph.communities = {12, 12};
    cfg.graph.p_in = 0.8;
    cfg.graph.p_out = 0.2;
    cfg.k = 4;
    cfg.direction = Direction::Inverse;
    cfg.op.source = "gft";
    cfg.p_values = {4};
    cfg.sigma_coeffs = {1e-3};
    cfg.methods = {"greedy"};
    cfg.trials.n_graphs = 1;
    cfg.trials.n_signal_batches = 2;
    cfg.trials.signals_per_batch = 10;
    cfg.trials.n_selection_draws = 1;
    cfg.seed = 11;
    return cfg;
}

const ResultRow& row_of(const ResultTable& t, const std::string& method, int p, double sigma) {
    for (const ResultRow& r : t.rows)
        if (r.method == method && r.p == p && r.sigma_coeff == sigma) {
            if (!r.error.empty()) FAIL("row has error: ", r.error);
            return r;
        }
    FAIL("row not found: ", method);
    static ResultRow dummy;
    return dummy;
}

}  // namespace

TEST_CASE("run_stream is exact for the noiseless sketch on clean signals") {
    const Graph g = gen_sbm(16, {8, 8}, 0.8, 0.2, 5);
    const SpectralBasis b = spectral_basis(g.weights, 3);
    auto rng = Rng::stream(1, "streamh");
    const DenseMatrix h = testutil::random_matrix(4, 16, rng);
    const Selection sel = Selection::make(16, {0, 5, 11});

    DesignOutcome outcome;
    outcome.selection = sel;
    outcome.h_s = sketch_direct_noiseless(h, b.v_k, sel);
    outcome.method = "noiseless";

    const SignalBatch clean = sample_signals(BandlimitedModel::white(b), 50, 7);
    const StreamResult res = run_stream(outcome, h, clean, clean);
    CHECK(res.rel_mse <= 1e-12);
}

TEST_CASE("run_stream of the zero sketch reports rel_mse = 1") {
    const Graph g = gen_sbm(12, {6, 6}, 0.7, 0.2, 9);
    const SpectralBasis b = spectral_basis(g.weights, 3);
    DesignOutcome outcome;
    outcome.selection = Selection::make(12, {0, 1});
    outcome.h_s = DenseMatrix(3, 2);  // zero sketch
    auto rng = Rng::stream(2, "zstream");
    const DenseMatrix h = testutil::random_matrix(3, 12, rng);
    const SignalBatch clean = sample_signals(BandlimitedModel::white(b), 30, 3);
    const StreamResult res = run_stream(outcome, h, clean, clean);
    CHECK(res.rel_mse == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("run_stream rejects a zero-energy reference") {
    DesignOutcome outcome;
    outcome.selection = Selection::make(4, {0});
    outcome.h_s = DenseMatrix(2, 1);
    const SignalBatch zeros = SignalBatch::from_matrix(DenseMatrix(4, 5));
    CHECK_THROWS_AS(run_stream(outcome, DenseMatrix(2, 4), zeros, zeros), NumericError);
}

TEST_CASE("empirical stream MSE matches the analytic objective within 3 stderr") {
    const int n = 96, k = 10, p = 10;
    const Graph g = gen_sbm(n, {24, 24, 24, 24}, 0.8, 0.2, 1);
    const SpectralBasis basis = spectral_basis(g.weights, k);
    const BandlimitedModel model = BandlimitedModel::white(basis);
    const DenseMatrix h = transpose(basis.v_k);
    const DenseMatrix rx = covariance_from_model(model);
    const double sigma2 = 1e-4 * trace(rx);

    SketchProblem prob;
    prob.direction = Direction::Direct;
    prob.h = h;
    prob.r_x = rx;
    prob.r_w = diag_matrix(std::vector<double>(n, sigma2));
    prob.p = p;
    const DesignOutcome outcome = greedy_select(prob, p);

    const double ref_energy_per_signal = trace(matmul(matmul(h, rx), transpose(h)));
    const double analytic = outcome.objective / ref_energy_per_signal;

    const NoiseModel noise = NoiseModel::iso(n, sigma2);
    std::vector<double> batch_ratios;
    double err = 0.0, ref = 0.0;
    const int batches = 60;
    for (int b = 0; b < batches; ++b) {
        const SignalBatch clean = sample_signals(model, 100, 1000 + b);
        const SignalBatch noisy = add_noise(clean, noise, 2000 + b);
        const StreamResult sr = run_stream(outcome, h, clean, noisy);
        batch_ratios.push_back(sr.rel_mse);
        err += sr.err_energy;
        ref += sr.ref_energy;
    }
    const auto stats = testutil::mean_stderr(batch_ratios);
    CHECK(std::fabs(err / ref - analytic) <= 3.0 * stats.stderr_);
}

TEST_CASE("single-cell experiment emits exactly one row") {
    const ResultTable t = run_experiment(small_config());
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0].method == "greedy");
    CHECK(t.rows[0].error.empty());
    CHECK(t.rows[0].rel_mse_mean >= 0.0);
    CHECK(t.rows[0].rel_mse_stderr >= 0.0);
    CHECK(t.rows[0].speedup_vs_full > 0.0);
}

TEST_CASE("sensor operator experiment runs") {
    ExperimentConfig cfg = small_config();
    cfg.graph.model = "sensor";
    cfg.graph.n = 24;
    cfg.graph.knn = 4;
    cfg.op.source = "sensor";
    cfg.op.m = 6;
    const ResultTable t = run_experiment(cfg);
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0].error.empty());
}

TEST_CASE("greedy beats nbh on the desk-scale inverse GFT sweep") {
    ExperimentConfig cfg = small_config();
    cfg.graph.n = 48;
    cfg.graph.communities = {24, 24};
    cfg.k = 5;
    cfg.p_values = {5};
    cfg.sigma_coeffs = {1e-2};
    cfg.methods = {"greedy", "nbh"};
    cfg.trials.n_graphs = 3;
    cfg.trials.n_signal_batches = 10;
    cfg.trials.signals_per_batch = 30;
    const ResultTable t = run_experiment(cfg);
    const double greedy = row_of(t, "greedy", 5, 1e-2).rel_mse_mean;
    const double nbh = row_of(t, "nbh", 5, 1e-2).rel_mse_mean;
    CHECK(greedy <= nbh + 1e-12);
}

TEST_CASE("rel_mse trends: non-increasing in p, non-decreasing in sigma") {
    ExperimentConfig cfg = small_config();
    cfg.graph.n = 32;
    cfg.graph.communities = {16, 16};
    cfg.k = 4;
    cfg.p_values = {4, 8};
    cfg.sigma_coeffs = {1e-4, 1e-1};
    cfg.methods = {"greedy", "nbh", "eds-2"};
    cfg.trials.n_graphs = 5;
    cfg.trials.n_signal_batches = 6;
    cfg.trials.signals_per_batch = 25;
    cfg.trials.n_selection_draws = 3;
    const ResultTable t = run_experiment(cfg);

    for (double sigma : cfg.sigma_coeffs) {
        const double at4 = row_of(t, "greedy", 4, sigma).rel_mse_mean;
        const double at8 = row_of(t, "greedy", 8, sigma).rel_mse_mean;
        CHECK(at8 <= at4 + 1e-12);
    }
    for (const std::string& m : cfg.methods)
        for (int p : cfg.p_values) {
            const double lo = row_of(t, m, p, 1e-4).rel_mse_mean;
            const double hi = row_of(t, m, p, 1e-1).rel_mse_mean;
            CHECK(hi >= lo);
        }
}

TEST_CASE("experiments with the same master seed match byte for byte") {
    ExperimentConfig cfg = small_config();
    cfg.methods = {"greedy", "eds-2"};
    cfg.trials.n_graphs = 2;
    cfg.trials.n_selection_draws = 2;
    const Provenance prov{cfg.seed, "test"};
    const std::string csv1 = table_to_csv(run_experiment(cfg), prov);
    const std::string csv2 = table_to_csv(run_experiment(cfg), prov);
    CHECK(csv1 == csv2);
}

TEST_CASE("failed cells are recorded per row and the sweep continues") {
    ExperimentConfig cfg = small_config();
    cfg.methods = {"exhaustive", "greedy"};  // C(24,12) blows the guard
    cfg.p_values = {12};
    const ResultTable t = run_experiment(cfg);
    REQUIRE(t.rows.size() == 2);
    bool saw_error = false, saw_ok = false;
    for (const ResultRow& r : t.rows) {
        if (r.method == "exhaustive") {
            CHECK(!r.error.empty());
            saw_error = true;
        }
        if (r.method == "greedy") {
            CHECK(r.error.empty());
            saw_ok = true;
        }
    }
    CHECK(saw_error);
    CHECK(saw_ok);
}

TEST_CASE("config JSON round trip preserves the experiment") {
    ExperimentConfig cfg = small_config();
    cfg.methods = {"greedy", "relax-threshold"};
    cfg.sigma_coeffs = {1e-4, 1e-2};
    const ExperimentConfig back = config_from_json(config_to_json(cfg));
    CHECK(back.graph.model == cfg.graph.model);
    CHECK(back.graph.communities == cfg.graph.communities);
    CHECK(back.k == cfg.k);
    CHECK(back.direction == cfg.direction);
    CHECK(back.p_values == cfg.p_values);
    CHECK(back.sigma_coeffs == cfg.sigma_coeffs);
    CHECK(back.methods == cfg.methods);
    CHECK(back.seed == cfg.seed);
    CHECK(back.trials.n_signal_batches == cfg.trials.n_signal_batches);
}

TEST_CASE("outcome JSON round trip preserves the design bit for bit") {
    const Graph g = gen_sbm(12, {6, 6}, 0.7, 0.2, 3);
    const SpectralBasis b = spectral_basis(g.weights, 3);
    SketchProblem prob;
    prob.direction = Direction::Direct;
    prob.h = transpose(b.v_k);
    prob.r_x = covariance_from_model(BandlimitedModel::white(b));
    prob.r_w = diag_matrix(std::vector<double>(12, 0.01));
    prob.p = 4;
    const DesignOutcome out = greedy_select(prob, 4);

    const std::string text = outcome_to_json(out, prob.direction, false, Provenance{3, "x"});
    const LoadedOutcome back = outcome_from_json(text);
    CHECK(back.direction == Direction::Direct);
    CHECK(back.outcome.method == out.method);
    CHECK(back.outcome.selection.indices == out.selection.indices);
    CHECK(back.outcome.objective == out.objective);
    CHECK(back.outcome.h_s.data == out.h_s.data);
}

TEST_CASE("measure_speedup is near 1 for p = n") {
    const double ratio = measure_speedup(256, 256, 8, 2000);
    CHECK(ratio > 0.5);
    CHECK(ratio < 2.0);
}

TEST_CASE("measure_speedup grows as p shrinks") {
    const double wide = measure_speedup(1024, 16, 8, 2000);
    const double narrow = measure_speedup(1024, 256, 8, 2000);
    CHECK(wide > narrow);
    CHECK(wide > 4.0);  // loose: the cost model predicts ~64
}

TEST_CASE("constrained column-sampling sweep runs end to end") {
    ExperimentConfig cfg = small_config();
    cfg.constrained = true;
    cfg.direction = Direction::Direct;
    cfg.methods = {"greedy", "nbh"};
    const ResultTable t = run_experiment(cfg);
    REQUIRE(t.rows.size() == 2);
    for (const ResultRow& r : t.rows) {
        CHECK(r.error.empty());
        CHECK(r.rel_mse_mean >= 0.0);
    }
}

TEST_CASE("laplacian shift config is honored") {
    ExperimentConfig cfg = small_config();
    cfg.shift = ShiftKind::Laplacian;
    cfg.order = EigOrder::Ascending;
    const ResultTable t = run_experiment(cfg);
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0].error.empty());
}

#include "sketchsel/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "sketchsel/errors.hpp"
#include "sketchsel/io.hpp"
#include "sketchsel/linalg.hpp"
#include "sketchsel/rng.hpp"

namespace sketchsel {

namespace {

using clock_t_ = std::chrono::steady_clock;

double seconds_since(clock_t_::time_point t0) {
    return std::chrono::duration<double>(clock_t_::now() - t0).count();
}

}  // namespace

StreamResult run_stream(const DesignOutcome& outcome, const DenseMatrix& reference_op,
                        const SignalBatch& clean, const SignalBatch& noisy) {
    if (clean.n != noisy.n || clean.count != noisy.count)
        throw ModelError("run_stream: clean and noisy batches disagree in shape");
    if (reference_op.cols != clean.n)
        throw ModelError("run_stream: reference operator expects " +
                         std::to_string(reference_op.cols) + "-dimensional signals");

    const int count = clean.count;
    const int m = reference_op.rows;
    std::vector<std::vector<double>> refs(count);

    const auto t_full = clock_t_::now();
    for (int t = 0; t < count; ++t) refs[t] = matvec(reference_op, clean.column(t));
    const double full_time = seconds_since(t_full);

    std::vector<std::vector<double>> hats(count);
    std::vector<double> obs(clean.n);
    const auto t_sketch = clock_t_::now();
    for (int t = 0; t < count; ++t) {
        for (int i = 0; i < clean.n; ++i) obs[i] = noisy.data(i, t);
        hats[t] = apply_sketch(outcome.h_s, outcome.selection, obs);
    }
    const double sketch_time = seconds_since(t_sketch);

    StreamResult res;
    for (int t = 0; t < count; ++t) {
        for (int i = 0; i < m; ++i) {
            const double d = hats[t][i] - refs[t][i];
            res.err_energy += d * d;
            res.ref_energy += refs[t][i] * refs[t][i];
        }
    }
    if (res.ref_energy <= 0.0)
        throw NumericError("run_stream: reference output has zero energy, relative MSE undefined");
    res.rel_mse = res.err_energy / res.ref_energy;
    res.sketch_time_s = sketch_time;
    res.full_time_s = full_time;
    return res;
}

namespace {

Graph realize_graph(const GraphSpec& spec, std::uint64_t seed) {
    if (spec.model == "sbm") return gen_sbm(spec.n, spec.communities, spec.p_in, spec.p_out, seed);
    if (spec.model == "er") return gen_er(spec.n, spec.p_edge, seed);
    if (spec.model == "sw") return gen_smallworld(spec.n, spec.p_e, spec.p_r, seed);
    if (spec.model == "sensor") return gen_sensor_knn(spec.n, spec.knn, seed);
    if (spec.model == "file") return load_graph(spec.path);
    throw ModelError("unknown graph model '" + spec.model + "'");
}

struct GraphContext {
    SpectralBasis basis;
    BandlimitedModel model;
    DenseMatrix h;
    DenseMatrix r_x;
    DenseMatrix reference_op;  // H (direct) or A_LS (inverse)
    double energy = 0.0;       // E ||x||^2
};

GraphContext build_graph_context(const ExperimentConfig& cfg, int graph_idx) {
    GraphContext ctx;
    const Graph graph =
        realize_graph(cfg.graph, hash_combine64(fnv1a64("graph"),
                                                hash_combine64(cfg.seed, graph_idx)));
    ctx.basis = spectral_basis(shift_operator(graph, cfg.shift), cfg.k, cfg.order);

    if (cfg.template_kind == "white") {
        ctx.model = BandlimitedModel::white(ctx.basis);
    } else if (cfg.template_kind == "file") {
        ctx.model = BandlimitedModel::with_template(ctx.basis, read_matrix_csv(cfg.template_path));
    } else {
        throw ModelError("unknown template kind '" + cfg.template_kind + "'");
    }

    if (cfg.op.source == "gft") {
        ctx.h = transpose(ctx.basis.v_k);
    } else if (cfg.op.source == "sensor") {
        if (cfg.op.m < 1) throw ModelError("operator 'sensor' needs m >= 1");
        Rng rng = Rng::stream(cfg.seed, "operator", static_cast<std::uint64_t>(graph_idx));
        ctx.h = DenseMatrix(cfg.op.m, graph.n);
        const double sd = std::pow(static_cast<double>(graph.n), -0.25);  // variance 1/sqrt(n)
        for (double& v : ctx.h.data) v = sd * rng.gaussian();
    } else if (cfg.op.source == "file") {
        ctx.h = read_matrix_csv(cfg.op.path);
        if (ctx.h.cols != graph.n)
            throw ModelError("operator file has " + std::to_string(ctx.h.cols) +
                             " columns, graph has " + std::to_string(graph.n) + " nodes");
    } else {
        throw ModelError("unknown operator source '" + cfg.op.source + "'");
    }

    if (cfg.rx_source == "model") {
        ctx.r_x = covariance_from_model(ctx.model);
        ctx.energy = trace(ctx.r_x);
    } else if (cfg.rx_source == "empirical") {
        const SignalBatch train = sample_signals(
            ctx.model, cfg.rx_samples,
            hash_combine64(fnv1a64("train"), hash_combine64(cfg.seed, graph_idx)));
        ctx.r_x = empirical_covariance(train);
        ctx.energy = noise_power(1.0, train);
    } else {
        throw ModelError("unknown rx source '" + cfg.rx_source + "'");
    }

    ctx.reference_op = cfg.direction == Direction::Direct ? ctx.h : ls_operator(ctx.h);
    return ctx;
}

struct Cell {
    int method_idx, p_idx, sigma_idx, graph_idx, draw_idx;
    int row_idx;
};

struct CellResult {
    bool ok = false;
    std::string error;
    std::vector<std::pair<double, double>> batch_energies;  // (err, ref) per batch
    double design_time_s = 0.0;
    double sketch_time_s = 0.0;
    double full_time_s = 0.0;
    long signals = 0;
};

int pool_size(std::size_t n_cells) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("SKETCHSEL_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1 && cap < static_cast<long>(hw)) hw = static_cast<unsigned>(cap);
    }
    return static_cast<int>(std::min<std::size_t>(hw, std::max<std::size_t>(n_cells, 1)));
}

void validate_config(const ExperimentConfig& cfg) {
    if (cfg.schema_version != 1)
        throw ModelError("unsupported schema_version " + std::to_string(cfg.schema_version));
    if (cfg.p_values.empty() || cfg.sigma_coeffs.empty() || cfg.methods.empty())
        throw ModelError("config needs non-empty p_values, sigma_coeffs and methods");
    if (cfg.trials.n_graphs < 1 || cfg.trials.n_signal_batches < 1 ||
        cfg.trials.signals_per_batch < 1 || cfg.trials.n_selection_draws < 1)
        throw ModelError("config trial counts must all be >= 1");
    if (cfg.k < 1) throw ModelError("config needs k >= 1");
    for (const std::string& m : cfg.methods) sampler_method_from_string(m);
}

}  // namespace

ResultTable run_experiment(const ExperimentConfig& cfg) {
    validate_config(cfg);

    // Graph contexts are shared across cells and built once, sequentially.
    std::vector<GraphContext> contexts;
    contexts.reserve(cfg.trials.n_graphs);
    for (int g = 0; g < cfg.trials.n_graphs; ++g) contexts.push_back(build_graph_context(cfg, g));

    std::vector<ResultRow> rows;
    std::vector<Cell> cells;
    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
        const SamplerMethod method = sampler_method_from_string(cfg.methods[mi]);
        const int draws = sampler_is_random(method) ? cfg.trials.n_selection_draws : 1;
        for (std::size_t pi = 0; pi < cfg.p_values.size(); ++pi)
            for (std::size_t si = 0; si < cfg.sigma_coeffs.size(); ++si) {
                ResultRow row;
                row.method = cfg.methods[mi];
                row.p = cfg.p_values[pi];
                row.sigma_coeff = cfg.sigma_coeffs[si];
                const int row_idx = static_cast<int>(rows.size());
                rows.push_back(row);
                for (int g = 0; g < cfg.trials.n_graphs; ++g)
                    for (int d = 0; d < draws; ++d)
                        cells.push_back({static_cast<int>(mi), static_cast<int>(pi),
                                         static_cast<int>(si), g, d, row_idx});
            }
    }

    std::vector<CellResult> results(cells.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&]() {
        while (true) {
            const std::size_t ci = next.fetch_add(1);
            if (ci >= cells.size()) break;
            const Cell& cell = cells[ci];
            CellResult& out = results[ci];
            try {
                const GraphContext& ctx = contexts[cell.graph_idx];
                const double sigma2 =
                    cfg.sigma_coeffs[cell.sigma_idx] * ctx.energy + cfg.ridge;
                if (!(sigma2 > 0.0))
                    throw ModelError("sigma_coeff " +
                                     std::to_string(cfg.sigma_coeffs[cell.sigma_idx]) +
                                     " yields a non-PD noise covariance; use --ridge");

                SketchProblem problem;
                problem.direction = cfg.direction;
                problem.constrained = cfg.constrained;
                problem.h = ctx.h;
                problem.r_x = ctx.r_x;
                problem.r_w = diag_matrix(std::vector<double>(ctx.h.cols, sigma2));
                problem.p = cfg.p_values[cell.p_idx];

                SamplerSpec spec;
                spec.method = sampler_method_from_string(cfg.methods[cell.method_idx]);
                spec.solver = cfg.solver;
                std::uint64_t sel_seed = fnv1a64("select");
                for (std::uint64_t part :
                     {static_cast<std::uint64_t>(cell.method_idx),
                      static_cast<std::uint64_t>(cell.p_idx),
                      static_cast<std::uint64_t>(cell.sigma_idx),
                      static_cast<std::uint64_t>(cell.graph_idx),
                      static_cast<std::uint64_t>(cell.draw_idx)})
                    sel_seed = hash_combine64(sel_seed, part);
                spec.seed = hash_combine64(sel_seed, cfg.seed);

                const auto t0 = clock_t_::now();
                const DesignOutcome outcome =
                    run_sampler(problem, problem.p, spec, &ctx.basis);
                out.design_time_s = seconds_since(t0);

                const NoiseModel noise = NoiseModel::iso(ctx.h.cols, sigma2);
                for (int b = 0; b < cfg.trials.n_signal_batches; ++b) {
                    const std::uint64_t sig_seed = hash_combine64(
                        fnv1a64("signals"),
                        hash_combine64(hash_combine64(cfg.seed, cell.graph_idx), b));
                    const std::uint64_t noise_seed = hash_combine64(
                        fnv1a64("noise"),
                        hash_combine64(hash_combine64(cfg.seed, cell.graph_idx), b));
                    const SignalBatch clean =
                        sample_signals(ctx.model, cfg.trials.signals_per_batch, sig_seed);
                    const SignalBatch noisy = add_noise(clean, noise, noise_seed);
                    const StreamResult sr = run_stream(outcome, ctx.reference_op, clean, noisy);
                    out.batch_energies.emplace_back(sr.err_energy, sr.ref_energy);
                    out.sketch_time_s += sr.sketch_time_s;
                    out.full_time_s += sr.full_time_s;
                    out.signals += clean.count;
                }
                out.ok = true;
            } catch (const std::exception& e) {
                out.ok = false;
                out.error = e.what();
            }
        }
    };

    const int threads = pool_size(cells.size());
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    // Aggregate cells into rows in deterministic (cell index) order.
    struct RowAccum {
        std::vector<std::pair<double, double>> batches;
        double design_time = 0.0, sketch_time = 0.0, full_time = 0.0;
        long signals = 0;
        int cells_ok = 0, cells_total = 0;
        std::string first_error;
    };
    std::vector<RowAccum> accums(rows.size());
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
        RowAccum& acc = accums[cells[ci].row_idx];
        ++acc.cells_total;
        const CellResult& r = results[ci];
        if (!r.ok) {
            if (acc.first_error.empty()) acc.first_error = r.error;
            continue;
        }
        ++acc.cells_ok;
        acc.batches.insert(acc.batches.end(), r.batch_energies.begin(), r.batch_energies.end());
        acc.design_time += r.design_time_s;
        acc.sketch_time += r.sketch_time_s;
        acc.full_time += r.full_time_s;
        acc.signals += r.signals;
    }

    for (std::size_t ri = 0; ri < rows.size(); ++ri) {
        ResultRow& row = rows[ri];
        const RowAccum& acc = accums[ri];
        if (acc.cells_ok == 0) {
            row.error = acc.first_error.empty() ? "no cells" : acc.first_error;
            continue;
        }
        if (!acc.first_error.empty()) row.error = "partial: " + acc.first_error;

        double err = 0.0, ref = 0.0;
        for (const auto& [e, r] : acc.batches) {
            err += e;
            ref += r;
        }
        row.rel_mse_mean = err / ref;

        // leave-one-batch-out jackknife
        const std::size_t u = acc.batches.size();
        if (u > 1) {
            std::vector<double> loo(u);
            double mean_loo = 0.0;
            for (std::size_t i = 0; i < u; ++i) {
                loo[i] = (err - acc.batches[i].first) / (ref - acc.batches[i].second);
                mean_loo += loo[i];
            }
            mean_loo /= static_cast<double>(u);
            double ss = 0.0;
            for (double v : loo) ss += (v - mean_loo) * (v - mean_loo);
            row.rel_mse_stderr = std::sqrt((static_cast<double>(u) - 1.0) /
                                           static_cast<double>(u) * ss);
        }

        row.design_time_s = acc.design_time / acc.cells_ok;
        row.apply_time_per_signal_s = acc.signals > 0 ? acc.sketch_time / acc.signals : 0.0;
        row.speedup_vs_full = acc.sketch_time > 0.0 ? acc.full_time / acc.sketch_time : 0.0;
    }

    std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
        if (a.method != b.method) return a.method < b.method;
        if (a.p != b.p) return a.p < b.p;
        return a.sigma_coeff < b.sigma_coeff;
    });
    ResultTable table;
    table.rows = std::move(rows);
    return table;
}

double measure_speedup(int n, int p, int m, int batch_size) {
    if (p >= n + 1 || p < 1) throw ModelError("measure_speedup: need 1 <= p <= n");
    Rng rng = Rng::stream(1, "speedup");
    DenseMatrix h(m, n);
    for (double& v : h.data) v = rng.gaussian();
    DenseMatrix h_s(m, p);
    for (double& v : h_s.data) v = rng.gaussian();
    const Selection sel = uniform_random_select(n, p, 2);

    // one contiguous signal per row; bounded memory, repeated rounds
    const int max_cols = std::max(1, static_cast<int>(64ll * 1024 * 1024 / (8ll * n)));
    const int cols = std::min(batch_size, max_cols);
    DenseMatrix signals(cols, n);
    for (double& v : signals.data) v = rng.gaussian();

    std::vector<double> y(m);
    double sink = 0.0;
    for (int attempt = 0; attempt < 8; ++attempt) {
        const long target = static_cast<long>(batch_size) << attempt;
        const int rounds = static_cast<int>((target + cols - 1) / cols);

        const auto t_full = clock_t_::now();
        for (int r = 0; r < rounds; ++r)
            for (int c = 0; c < cols; ++c) {
                const double* x = &signals.data[static_cast<std::size_t>(c) * n];
                for (int i = 0; i < m; ++i) {
                    const double* hi = &h.data[static_cast<std::size_t>(i) * n];
                    double s = 0.0;
                    for (int j = 0; j < n; ++j) s += hi[j] * x[j];
                    y[i] = s;
                }
                sink += y[0];
            }
        const double full_time = seconds_since(t_full);

        const auto t_sketch = clock_t_::now();
        for (int r = 0; r < rounds; ++r)
            for (int c = 0; c < cols; ++c) {
                const double* x = &signals.data[static_cast<std::size_t>(c) * n];
                for (int i = 0; i < m; ++i) y[i] = 0.0;
                for (int j = 0; j < p; ++j) {
                    const double xv = x[sel.indices[j]];
                    for (int i = 0; i < m; ++i) y[i] += h_s(i, j) * xv;
                }
                sink += y[0];
            }
        const double sketch_time = seconds_since(t_sketch);

        volatile double keep = sink;  // the timed loops must not be elided
        (void)keep;

        // both paths must be comfortably above clock resolution
        if (sketch_time > 2e-3 && full_time > 2e-3) return full_time / sketch_time;
    }
    throw NumericError("measure_speedup: timings below clock resolution even after enlarging");
}

}  // namespace sketchsel

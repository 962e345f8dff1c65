#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sketchsel/graph.hpp"
#include "sketchsel/samplers.hpp"
#include "sketchsel/signal_model.hpp"
#include "sketchsel/sketch.hpp"

namespace sketchsel {

// Streaming evaluation of one designed sketch over a batch: relative MSE of
// the sketched path against the reference operator applied to clean signals,
// plus wall times of both paths.
struct StreamResult {
    double rel_mse = 0.0;
    double err_energy = 0.0;  // sum ||y_hat - y||^2 over the batch
    double ref_energy = 0.0;  // sum ||y||^2
    double sketch_time_s = 0.0;
    double full_time_s = 0.0;
};

StreamResult run_stream(const DesignOutcome& outcome, const DenseMatrix& reference_op,
                        const SignalBatch& clean, const SignalBatch& noisy);

struct GraphSpec {
    std::string model;  // sbm | er | sw | sensor | file
    int n = 0;
    std::vector<int> communities;
    double p_in = 0.0, p_out = 0.0;
    double p_edge = 0.0;
    double p_e = 0.0, p_r = 0.0;
    int knn = 0;
    std::string path;  // model == file
};

struct OperatorSpec {
    std::string source = "gft";  // gft | sensor | file
    int m = 0;                   // sensor: number of unknown parameters
    std::string path;            // file
};

struct TrialCounts {
    int n_graphs = 5;
    int n_signal_batches = 100;
    int signals_per_batch = 100;
    int n_selection_draws = 10;  // randomized methods only
};

struct ExperimentConfig {
    int schema_version = 1;
    GraphSpec graph;
    ShiftKind shift = ShiftKind::Adjacency;
    int k = 10;
    Direction direction = Direction::Inverse;
    bool constrained = false;
    OperatorSpec op;
    std::string template_kind = "white";  // white | file
    std::string template_path;
    std::string rx_source = "model";  // model | empirical
    int rx_samples = 500;
    std::vector<int> p_values;
    std::vector<double> sigma_coeffs;
    std::vector<std::string> methods;
    TrialCounts trials;
    std::uint64_t seed = 1;
    EigOrder order = EigOrder::Descending;
    SolverParams solver;
    double ridge = 0.0;  // optional epsilon*I added to R_w
};

struct ResultRow {
    std::string method;
    int p = 0;
    double sigma_coeff = 0.0;
    double rel_mse_mean = 0.0;
    double rel_mse_stderr = 0.0;
    double design_time_s = 0.0;
    double apply_time_per_signal_s = 0.0;
    double speedup_vs_full = 0.0;
    std::string error;  // nonempty if every cell of the row failed
};

struct ResultTable {
    std::vector<ResultRow> rows;  // sorted by (method, p, sigma_coeff)
};

// Full factorial sweep (method x p x sigma), averaged over graph realizations,
// signal batches and selection draws, all seeded from config.seed. Cells run
// in a work pool capped by SKETCHSEL_THREADS; cell failures are recorded in
// the affected row and the sweep continues.
ResultTable run_experiment(const ExperimentConfig& config);

// Wall-time ratio of applying the full m x n operator versus the m x p sketch
// over a batch of signals; enlarges the run until it is measurable.
double measure_speedup(int n, int p, int m, int batch_size);

}  // namespace sketchsel

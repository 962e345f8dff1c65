#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "sketchsel/graph.hpp"
#include "sketchsel/sketch.hpp"

namespace sketchsel {

enum class SamplerMethod {
    Exhaustive,
    Greedy,
    Nbh,             // noise-blind row-norm heuristic
    Nah,             // noise-aware (whitened) row-norm heuristic
    RelaxThreshold,  // projected-gradient relaxation, top-p rounding
    RelaxRandom,     // projected-gradient relaxation, sampled rounding
    Eds1,            // experimental-design sampling, l1 row norms of V_k
    Eds2,            //   "  , l2
    EdsInf,          //   "  , l-infinity
    UniformRandom,
};

SamplerMethod sampler_method_from_string(const std::string& s);
std::string to_string(SamplerMethod m);
bool sampler_is_random(SamplerMethod m);
// EDS variants need a spectral basis next to the problem.
bool sampler_needs_basis(SamplerMethod m);

// Projected-gradient parameters for the relaxation methods.
struct SolverParams {
    int max_iters = 500;
    double step_init = 1.0;
    double tol = 1e-6;  // stop when ||c_t - c_{t-1}||_inf <= tol
};

struct SamplerSpec {
    SamplerMethod method = SamplerMethod::Greedy;
    std::optional<std::uint64_t> seed;  // required for randomized methods
    SolverParams solver;
};

// All ties everywhere break toward the lowest node index.

// Global minimum over all p-subsets; guarded to C(n,p) <= 1e6 evaluations.
DesignOutcome exhaustive_select(const SketchProblem& problem, int p);

// Adds the node with the best exact objective one at a time; the outcome's
// indices are in insertion order, so prefixes are the nested selections.
DesignOutcome greedy_select(const SketchProblem& problem, int p);

// Largest l2 row norms of R_x H^T (direct) or R_x G^T (inverse).
DesignOutcome nbh_select(const SketchProblem& problem, int p);

// Same scores whitened by (R_x + R_w)^{-1/2}.
DesignOutcome nah_select(const SketchProblem& problem, int p);

enum class Rounding { Threshold, Random };

// Minimizes the smooth relaxed objective over the capped simplex
// {c in [0,1]^n : sum c = p} by projected gradient with Armijo backtracking,
// then rounds. Threshold keeps the p largest entries; Random draws p distinct
// nodes sequentially from c/||c||_1 (seed required). The reported objective is
// recomputed exactly on the rounded selection.
DesignOutcome relax_select(const SketchProblem& problem, int p, const SolverParams& params,
                           Rounding rounding, std::optional<std::uint64_t> seed = std::nullopt,
                           std::vector<double>* converged_c = nullptr);

enum class EdsNorm { L1, L2, LInf };

// Experimental-design sampling baseline: row norms of V_k as sampling weights,
// p distinct nodes drawn sequentially without replacement.
Selection eds_select(const SpectralBasis& basis, int p, EdsNorm norm, std::uint64_t seed);

Selection uniform_random_select(int n, int p, std::uint64_t seed);

// Euclidean projection onto {c in [0,1]^n : sum c = p} by bisection on the
// shift of clamp(v - tau).
std::vector<double> project_capped_simplex(const std::vector<double>& v, double p);

// Uniform front door: runs the requested method on the problem (basis needed for
// EDS variants) and fills in the exact objective and sketch.
DesignOutcome run_sampler(const SketchProblem& problem, int p, const SamplerSpec& spec,
                          const SpectralBasis* basis = nullptr);

}  // namespace sketchsel

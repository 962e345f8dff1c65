#include "sketchsel/samplers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <numeric>

#include "sketchsel/errors.hpp"
#include "sketchsel/linalg.hpp"
#include "sketchsel/rng.hpp"

namespace sketchsel {

SamplerMethod sampler_method_from_string(const std::string& s) {
    if (s == "exhaustive") return SamplerMethod::Exhaustive;
    if (s == "greedy") return SamplerMethod::Greedy;
    if (s == "nbh") return SamplerMethod::Nbh;
    if (s == "nah") return SamplerMethod::Nah;
    if (s == "relax-threshold") return SamplerMethod::RelaxThreshold;
    if (s == "relax-random") return SamplerMethod::RelaxRandom;
    if (s == "eds-1") return SamplerMethod::Eds1;
    if (s == "eds-2") return SamplerMethod::Eds2;
    if (s == "eds-inf") return SamplerMethod::EdsInf;
    if (s == "uniform") return SamplerMethod::UniformRandom;
    throw ModelError("unknown method '" + s + "'");
}

std::string to_string(SamplerMethod m) {
    switch (m) {
        case SamplerMethod::Exhaustive: return "exhaustive";
        case SamplerMethod::Greedy: return "greedy";
        case SamplerMethod::Nbh: return "nbh";
        case SamplerMethod::Nah: return "nah";
        case SamplerMethod::RelaxThreshold: return "relax-threshold";
        case SamplerMethod::RelaxRandom: return "relax-random";
        case SamplerMethod::Eds1: return "eds-1";
        case SamplerMethod::Eds2: return "eds-2";
        case SamplerMethod::EdsInf: return "eds-inf";
        case SamplerMethod::UniformRandom: return "uniform";
    }
    return "?";
}

bool sampler_is_random(SamplerMethod m) {
    switch (m) {
        case SamplerMethod::RelaxRandom:
        case SamplerMethod::Eds1:
        case SamplerMethod::Eds2:
        case SamplerMethod::EdsInf:
        case SamplerMethod::UniformRandom: return true;
        default: return false;
    }
}

bool sampler_needs_basis(SamplerMethod m) {
    return m == SamplerMethod::Eds1 || m == SamplerMethod::Eds2 || m == SamplerMethod::EdsInf;
}

namespace {

void require_budget(const SketchProblem& problem, int p) {
    if (p < 1 || p > problem.n())
        throw ModelError("budget p=" + std::to_string(p) + " out of range [1," +
                         std::to_string(problem.n()) + "]");
}

// p largest scores, ties toward the lowest index, returned ascending.
std::vector<int> top_p_indices(const std::vector<double>& scores, int p) {
    std::vector<int> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return scores[a] > scores[b]; });
    std::vector<int> take(order.begin(), order.begin() + p);
    std::sort(take.begin(), take.end());
    return take;
}

std::vector<double> row_l2_norms(const DenseMatrix& m) {
    std::vector<double> norms(m.rows, 0.0);
    for (int i = 0; i < m.rows; ++i) {
        double s = 0.0;
        for (int j = 0; j < m.cols; ++j) s += m(i, j) * m(i, j);
        norms[i] = std::sqrt(s);
    }
    return norms;
}

// R_x H^T for the direct problem, R_x G^T for the inverse one.
DenseMatrix heuristic_scores(const SketchProblem& problem) {
    if (problem.direction == Direction::Direct)
        return matmul(problem.r_x, transpose(problem.h));
    const DenseMatrix g = matmul(transpose(problem.h), ls_operator(problem.h));
    return matmul(problem.r_x, transpose(g));
}

// Draws `p` distinct indices sequentially without replacement, renormalizing
// after each draw. Once every positive weight is used up the remaining picks
// are uniform over the unselected nodes.
std::vector<int> draw_without_replacement(std::vector<double> w, int p, Rng& rng) {
    const int n = static_cast<int>(w.size());
    std::vector<char> taken(n, 0);
    std::vector<int> out;
    out.reserve(p);
    for (int t = 0; t < p; ++t) {
        double total = 0.0;
        for (int i = 0; i < n; ++i)
            if (!taken[i]) total += w[i];
        int pick = -1;
        if (total > 0.0) {
            const double u = rng.uniform() * total;
            double acc = 0.0;
            for (int i = 0; i < n; ++i) {
                if (taken[i]) continue;
                acc += w[i];
                if (u < acc) {
                    pick = i;
                    break;
                }
                pick = i;  // guards against round-off at u ~ total
            }
        } else {
            std::uint64_t r = rng.below(static_cast<std::uint64_t>(n - t));
            for (int i = 0; i < n; ++i) {
                if (taken[i]) continue;
                if (r == 0) {
                    pick = i;
                    break;
                }
                --r;
            }
        }
        taken[pick] = 1;
        out.push_back(pick);
    }
    return out;
}

DesignOutcome finish_outcome(const SketchProblem& problem, std::vector<int> indices,
                             SamplerMethod method,
                             std::chrono::steady_clock::time_point start) {
    DesignOutcome out;
    out.selection = Selection::make(problem.n(), std::move(indices));
    out.h_s = sketch_for_selection(problem, out.selection);
    out.objective = exact_objective(problem, out.selection);
    out.method = to_string(method);
    out.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

bool verbose_logging() { return std::getenv("SKETCHSEL_VERBOSE") != nullptr; }

}  // namespace

DesignOutcome exhaustive_select(const SketchProblem& problem, int p) {
    const auto start = std::chrono::steady_clock::now();
    require_budget(problem, p);
    const int n = problem.n();

    double combos = 1.0;
    for (int i = 0; i < p; ++i) combos = combos * (n - i) / (i + 1);
    if (combos > 1e6)
        throw ModelError("exhaustive_select: C(" + std::to_string(n) + "," + std::to_string(p) +
                         ") exceeds the 1e6 evaluation guard");

    const ObjectiveEvaluator eval(problem);
    std::vector<int> current(p);
    std::iota(current.begin(), current.end(), 0);
    std::vector<int> best;
    double best_obj = 0.0;

    while (true) {
        const double obj = eval.value(current);
        if (best.empty() || obj < best_obj) {  // strict: lexicographic tie-break
            best = current;
            best_obj = obj;
        }
        // next combination in lexicographic order
        int i = p - 1;
        while (i >= 0 && current[i] == n - p + i) --i;
        if (i < 0) break;
        ++current[i];
        for (int j = i + 1; j < p; ++j) current[j] = current[j - 1] + 1;
    }
    return finish_outcome(problem, std::move(best), SamplerMethod::Exhaustive, start);
}

DesignOutcome greedy_select(const SketchProblem& problem, int p) {
    const auto start = std::chrono::steady_clock::now();
    require_budget(problem, p);
    const int n = problem.n();
    const ObjectiveEvaluator eval(problem);

    std::vector<int> chosen;
    std::vector<char> used(n, 0);
    std::vector<int> candidate;
    for (int t = 0; t < p; ++t) {
        int best_node = -1;
        double best_obj = 0.0;
        candidate = chosen;
        candidate.push_back(-1);
        for (int v = 0; v < n; ++v) {
            if (used[v]) continue;
            candidate.back() = v;
            const double obj = eval.value(candidate);
            if (best_node < 0 || obj < best_obj) {  // strict: lowest index on ties
                best_node = v;
                best_obj = obj;
            }
        }
        chosen.push_back(best_node);
        used[best_node] = 1;
    }
    return finish_outcome(problem, std::move(chosen), SamplerMethod::Greedy, start);
}

DesignOutcome nbh_select(const SketchProblem& problem, int p) {
    const auto start = std::chrono::steady_clock::now();
    require_budget(problem, p);
    const auto norms = row_l2_norms(heuristic_scores(problem));
    return finish_outcome(problem, top_p_indices(norms, p), SamplerMethod::Nbh, start);
}

DesignOutcome nah_select(const SketchProblem& problem, int p) {
    const auto start = std::chrono::steady_clock::now();
    require_budget(problem, p);
    const DenseMatrix white = inv_sqrt_spd(problem.r_x + problem.r_w);
    const auto norms = row_l2_norms(matmul(white, heuristic_scores(problem)));
    return finish_outcome(problem, top_p_indices(norms, p), SamplerMethod::Nah, start);
}

std::vector<double> project_capped_simplex(const std::vector<double>& v, double p) {
    const int n = static_cast<int>(v.size());
    if (p < 0.0 || p > n)
        throw ModelError("project_capped_simplex: p=" + std::to_string(p) + " outside [0," +
                         std::to_string(n) + "]");

    auto mass = [&](double tau) {
        double s = 0.0;
        for (double x : v) s += std::clamp(x - tau, 0.0, 1.0);
        return s;
    };

    bool feasible = std::fabs(mass(0.0) - p) <= 1e-12;
    for (double x : v) feasible = feasible && x >= 0.0 && x <= 1.0;
    if (feasible) return v;

    double lo = *std::min_element(v.begin(), v.end()) - 1.0;
    double hi = *std::max_element(v.begin(), v.end());
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mass(mid) > p)
            lo = mid;
        else
            hi = mid;
        if (std::fabs(mass(mid) - p) <= 1e-13) break;
    }
    const double tau = 0.5 * (lo + hi);
    std::vector<double> c(n);
    for (int i = 0; i < n; ++i) c[i] = std::clamp(v[i] - tau, 0.0, 1.0);
    return c;
}

DesignOutcome relax_select(const SketchProblem& problem, int p, const SolverParams& params,
                           Rounding rounding, std::optional<std::uint64_t> seed,
                           std::vector<double>* converged_c) {
    const auto start = std::chrono::steady_clock::now();
    require_budget(problem, p);
    const int n = problem.n();
    if (rounding == Rounding::Random && !seed)
        throw ModelError("relax_select: random rounding requires a seed");

    double alpha = 0.0;
    if (!problem.constrained) {
        const EigResult spec = sym_eig(problem.r_x + problem.r_w);
        const double lmin = spec.values.back();
        const double lmax = spec.values.front();
        if (!(lmin > 0.0))
            throw NumericError("relax_select: R_x + R_w is not positive definite");
        alpha = 0.5 * lmin;
        if (verbose_logging())
            std::cerr << "relax_select: alpha=" << alpha << " cond(R_alpha)="
                      << (lmax - alpha) / (lmin - alpha) << "\n";
    }
    const RelaxedEvaluator eval(problem, alpha);

    std::vector<double> c(n, static_cast<double>(p) / n);
    double f = eval.value(c);
    std::vector<double> best_c = c;
    double best_f = f;

    double step = params.step_init;
    int stall_count = 0;
    for (int iter = 0; iter < params.max_iters; ++iter) {
        const auto grad = eval.gradient(c);

        // backtracking projected step: halve until the Armijo bound holds
        std::vector<double> next;
        double f_next = 0.0;
        bool accepted = false;
        double s = step;
        for (int bt = 0; bt < 60; ++bt) {
            std::vector<double> cand(n);
            for (int i = 0; i < n; ++i) cand[i] = c[i] - s * grad[i];
            cand = project_capped_simplex(cand, p);
            const double f_cand = eval.value(cand);
            double slope = 0.0;
            for (int i = 0; i < n; ++i) slope += grad[i] * (cand[i] - c[i]);
            if (f_cand <= f + 1e-4 * slope) {
                next = std::move(cand);
                f_next = f_cand;
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        if (!accepted || f_next >= f) {
            if (++stall_count >= 10) {
                if (verbose_logging())
                    std::cerr << "relax_select: objective stalled for 10 steps, returning best "
                                 "iterate\n";
                break;
            }
            if (!accepted) {
                step *= 0.5;
                continue;
            }
        } else {
            stall_count = 0;
        }

        double move = 0.0;
        for (int i = 0; i < n; ++i) move = std::max(move, std::fabs(next[i] - c[i]));
        c = std::move(next);
        f = f_next;
        if (f < best_f) {
            best_f = f;
            best_c = c;
        }
        step = 2.0 * s;  // warm-started step for the next iteration
        if (move <= params.tol) break;
    }

    if (converged_c) *converged_c = best_c;
    std::vector<int> indices;
    if (rounding == Rounding::Threshold) {
        indices = top_p_indices(best_c, p);
    } else {
        Rng rng = Rng::stream(*seed, "relax-random");
        indices = draw_without_replacement(best_c, p, rng);
    }
    DesignOutcome out = finish_outcome(
        problem, std::move(indices),
        rounding == Rounding::Threshold ? SamplerMethod::RelaxThreshold : SamplerMethod::RelaxRandom,
        start);
    return out;
}

Selection eds_select(const SpectralBasis& basis, int p, EdsNorm norm, std::uint64_t seed) {
    const int n = basis.v_k.rows;
    if (p < 1 || p > n) throw ModelError("eds_select: budget out of range");
    std::vector<double> kappa(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double l1 = 0.0, l2 = 0.0, linf = 0.0;
        for (int j = 0; j < basis.v_k.cols; ++j) {
            const double a = std::fabs(basis.v_k(i, j));
            l1 += a;
            l2 += a * a;
            linf = std::max(linf, a);
        }
        kappa[i] = norm == EdsNorm::L1 ? l1 : (norm == EdsNorm::L2 ? std::sqrt(l2) : linf);
    }
    Rng rng = Rng::stream(seed, "eds");
    return Selection::make(n, draw_without_replacement(kappa, p, rng));
}

Selection uniform_random_select(int n, int p, std::uint64_t seed) {
    if (p < 1 || p > n) throw ModelError("uniform_random_select: budget out of range");
    Rng rng = Rng::stream(seed, "uniform");
    std::vector<int> idx = draw_without_replacement(std::vector<double>(n, 1.0), p, rng);
    std::sort(idx.begin(), idx.end());
    return Selection::make(n, idx);
}

DesignOutcome run_sampler(const SketchProblem& problem, int p, const SamplerSpec& spec,
                          const SpectralBasis* basis) {
    if (sampler_is_random(spec.method) && !spec.seed)
        throw ModelError("method '" + to_string(spec.method) + "' requires a seed");
    switch (spec.method) {
        case SamplerMethod::Exhaustive: return exhaustive_select(problem, p);
        case SamplerMethod::Greedy: return greedy_select(problem, p);
        case SamplerMethod::Nbh: return nbh_select(problem, p);
        case SamplerMethod::Nah: return nah_select(problem, p);
        case SamplerMethod::RelaxThreshold:
            return relax_select(problem, p, spec.solver, Rounding::Threshold, spec.seed);
        case SamplerMethod::RelaxRandom:
            return relax_select(problem, p, spec.solver, Rounding::Random, spec.seed);
        case SamplerMethod::Eds1:
        case SamplerMethod::Eds2:
        case SamplerMethod::EdsInf: {
            if (!basis) throw ModelError("EDS methods need a spectral basis");
            const EdsNorm norm = spec.method == SamplerMethod::Eds1
                                     ? EdsNorm::L1
                                     : (spec.method == SamplerMethod::Eds2 ? EdsNorm::L2
                                                                           : EdsNorm::LInf);
            const auto start = std::chrono::steady_clock::now();
            Selection sel = eds_select(*basis, p, norm, *spec.seed);
            DesignOutcome out;
            out.selection = std::move(sel);
            out.h_s = sketch_for_selection(problem, out.selection);
            out.objective = exact_objective(problem, out.selection);
            out.method = to_string(spec.method);
            out.wall_time_s =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            return out;
        }
        case SamplerMethod::UniformRandom: {
            const auto start = std::chrono::steady_clock::now();
            Selection sel = uniform_random_select(problem.n(), p, *spec.seed);
            DesignOutcome out;
            out.selection = std::move(sel);
            out.h_s = sketch_for_selection(problem, out.selection);
            out.objective = exact_objective(problem, out.selection);
            out.method = to_string(spec.method);
            out.wall_time_s =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            return out;
        }
    }
    throw ModelError("run_sampler: unhandled method");
}

}  // namespace sketchsel

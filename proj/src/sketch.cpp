#include "sketchsel/sketch.hpp"

#include <cmath>
#include <set>
#include <string>

#include "sketchsel/errors.hpp"
#include "sketchsel/linalg.hpp"

namespace sketchsel {

Selection Selection::make(int n, std::vector<int> indices) {
    if (indices.empty()) throw ModelError("Selection: at least one index required");
    if (static_cast<int>(indices.size()) > n)
        throw ModelError("Selection: more indices than nodes");
    std::set<int> seen;
    for (int i : indices) {
        if (i < 0 || i >= n)
            throw ModelError("Selection: index " + std::to_string(i) + " out of range [0," +
                             std::to_string(n) + ")");
        if (!seen.insert(i).second)
            throw ModelError("Selection: duplicate index " + std::to_string(i));
    }
    Selection s;
    s.n = n;
    s.indices = std::move(indices);
    return s;
}

std::vector<double> Selection::indicator() const {
    std::vector<double> c(n, 0.0);
    for (int i : indices) c[i] = 1.0;
    return c;
}

DenseMatrix selection_matrix(const Selection& sel) {
    Selection::make(sel.n, sel.indices);  // revalidate
    DenseMatrix c(static_cast<int>(sel.indices.size()), sel.n);
    for (std::size_t r = 0; r < sel.indices.size(); ++r) c(static_cast<int>(r), sel.indices[r]) = 1.0;
    return c;
}

Direction direction_from_string(const std::string& s) {
    if (s == "direct") return Direction::Direct;
    if (s == "inverse") return Direction::Inverse;
    throw ModelError("unknown direction '" + s + "' (expected direct or inverse)");
}

std::string to_string(Direction d) {
    return d == Direction::Direct ? "direct" : "inverse";
}

namespace {

double clamp_objective(double v, const char* who) {
    if (v < -1e-9)
        throw NumericError(std::string(who) + ": objective " + std::to_string(v) +
                           " below the numeric floor -1e-9");
    return v < 0.0 ? 0.0 : v;
}

// Rank of a p x k matrix through the eigenvalues of its k x k Gram matrix,
// using the same noise floor as pinv.
int numeric_rank(const DenseMatrix& a) {
    const DenseMatrix gram = matmul(transpose(a), a);
    const EigResult e = sym_eig(gram);
    const double lmax = e.values.empty() ? 0.0 : std::max(e.values.front(), 0.0);
    if (lmax == 0.0) return 0;
    const double cut = std::max(1e-24 * lmax, 1e-12 * fro_norm(gram));
    int r = 0;
    for (double v : e.values)
        if (v > cut) ++r;
    return r;
}

DenseMatrix noiseless_sketch(const DenseMatrix& front, const DenseMatrix& v_k,
                             const Selection& sel, const char* who) {
    if (front.cols != v_k.rows)
        throw ModelError(std::string(who) + ": operator has " + std::to_string(front.cols) +
                         " columns, basis has " + std::to_string(v_k.rows) + " rows");
    const DenseMatrix cvk = gather_rows(v_k, sel.indices);
    const int r = numeric_rank(cvk);
    if (r < v_k.cols)
        throw NumericError(std::string(who) + ": rank(C V_k) = " + std::to_string(r) +
                           " < k = " + std::to_string(v_k.cols) +
                           "; the selection cannot resolve the bandlimited subspace");
    return matmul(matmul(front, v_k), pinv(cvk));
}

}  // namespace

DenseMatrix sketch_direct_noiseless(const DenseMatrix& h, const DenseMatrix& v_k,
                                    const Selection& sel) {
    return noiseless_sketch(h, v_k, sel, "sketch_direct_noiseless");
}

DenseMatrix sketch_inverse_noiseless(const DenseMatrix& h, const DenseMatrix& v_k,
                                     const Selection& sel) {
    return noiseless_sketch(ls_operator(h), v_k, sel, "sketch_inverse_noiseless");
}

namespace {

// C (R_x + R_w) C^T for the selection: a p x p gather of the sum.
DenseMatrix gathered_sum(const DenseMatrix& r_x, const DenseMatrix& r_w, const Selection& sel) {
    const int p = static_cast<int>(sel.indices.size());
    DenseMatrix a(p, p);
    for (int r = 0; r < p; ++r)
        for (int c = 0; c < p; ++c) {
            const int i = sel.indices[r];
            const int j = sel.indices[c];
            a(r, c) = r_x(i, j) + r_w(i, j);
        }
    return a;
}

}  // namespace

DenseMatrix sketch_direct(const DenseMatrix& h, const DenseMatrix& r_x, const DenseMatrix& r_w,
                          const Selection& sel) {
    if (h.cols != r_x.rows || r_x.rows != r_w.rows)
        throw ModelError("sketch_direct: dimension mismatch");
    const DenseMatrix w = matmul(h, r_x);                      // m x n
    const DenseMatrix b = gather_cols(w, sel.indices);          // H R_x C^T, m x p
    const DenseMatrix a = gathered_sum(r_x, r_w, sel);          // p x p
    return transpose(solve_spd(a, transpose(b)));
}

double objective_direct(const DenseMatrix& h, const DenseMatrix& r_x, const DenseMatrix& r_w,
                        const Selection& sel) {
    const DenseMatrix w = matmul(h, r_x);  // m x n
    double tr_ry = 0.0;                     // tr[H R_x H^T]
    for (int i = 0; i < h.rows; ++i)
        for (int j = 0; j < h.cols; ++j) tr_ry += w(i, j) * h(i, j);

    const DenseMatrix b = transpose(gather_cols(w, sel.indices));  // C R_x H^T, p x m
    const DenseMatrix a = gathered_sum(r_x, r_w, sel);
    const DenseMatrix x = solve_spd(a, b);
    double term = 0.0;
    for (std::size_t i = 0; i < b.data.size(); ++i) term += b.data[i] * x.data[i];
    return clamp_objective(tr_ry - term, "objective_direct");
}

DenseMatrix ls_operator(const DenseMatrix& h) {
    const DenseMatrix gram = matmul(h, transpose(h));  // m x m
    try {
        return solve_spd(gram, h);
    } catch (const NumericError& e) {
        throw NumericError(std::string("ls_operator: H is rank deficient (") + e.what() + ")");
    }
}

DenseMatrix sketch_inverse(const DenseMatrix& h, const DenseMatrix& r_x, const DenseMatrix& r_w,
                           const Selection& sel) {
    return sketch_direct(ls_operator(h), r_x, r_w, sel);
}

double objective_inverse(const DenseMatrix& h, const DenseMatrix& r_x, const DenseMatrix& r_w,
                         const Selection& sel) {
    const DenseMatrix g = matmul(transpose(h), ls_operator(h));  // n x n projector
    const DenseMatrix w = matmul(g, r_x);                         // G R_x
    const DenseMatrix b = transpose(gather_cols(w, sel.indices)); // C R_x G^T, p x n
    const DenseMatrix a = gathered_sum(r_x, r_w, sel);
    const DenseMatrix x = solve_spd(a, b);
    double term = 0.0;
    for (std::size_t i = 0; i < b.data.size(); ++i) term += b.data[i] * x.data[i];
    return clamp_objective(trace(r_x) - term, "objective_inverse");
}

namespace {

void require_binary(const std::vector<double>& c, const char* who) {
    for (double v : c)
        if (v != 0.0 && v != 1.0)
            throw ModelError(std::string(who) + ": selection vector must be binary");
}

// tr[T0] - 2 sum_i c_i lin_i + c^T K c, the shared shape of both column
// objectives; fractional c evaluates the smooth extension.
double column_quadratic(double tr0, const std::vector<double>& lin, const DenseMatrix& k,
                        const std::vector<double>& c) {
    const int n = k.rows;
    double v = tr0;
    for (int i = 0; i < n; ++i) v -= 2.0 * c[i] * lin[i];
    for (int i = 0; i < n; ++i) {
        if (c[i] == 0.0) continue;
        double row = 0.0;
        for (int j = 0; j < n; ++j) row += k(i, j) * c[j];
        v += c[i] * row;
    }
    return v;
}

struct ColumnTerms {
    double tr0 = 0.0;
    std::vector<double> lin;  // lin_i, linear coefficient of c_i
    DenseMatrix k;            // quadratic kernel, Hadamard product
};

ColumnTerms column_terms_direct(const DenseMatrix& h, const DenseMatrix& r_x,
                                const DenseMatrix& r_w) {
    ColumnTerms t;
    const DenseMatrix q = matmul(transpose(h), h);   // H^T H
    const DenseMatrix rxq = matmul(r_x, q);
    const DenseMatrix hrx = matmul(h, r_x);
    t.tr0 = 0.0;
    for (int i = 0; i < h.rows; ++i)
        for (int j = 0; j < h.cols; ++j) t.tr0 += hrx(i, j) * h(i, j);
    t.lin = diagonal(rxq);
    const int n = h.cols;
    t.k = DenseMatrix(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) t.k(i, j) = q(i, j) * (r_x(i, j) + r_w(i, j));
    return t;
}

ColumnTerms column_terms_inverse(const DenseMatrix& h, const DenseMatrix& r_x,
                                 const DenseMatrix& r_w) {
    ColumnTerms t;
    const DenseMatrix hb = matmul(transpose(h), h);  // Gram matrix H^T H
    const DenseMatrix hb2 = matmul(hb, hb);
    t.tr0 = trace(r_x);
    t.lin = diagonal(matmul(r_x, hb));
    const int n = h.cols;
    t.k = DenseMatrix(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) t.k(i, j) = hb2(i, j) * (r_x(i, j) + r_w(i, j));
    return t;
}

}  // namespace

double objective_column_direct(const DenseMatrix& h, const DenseMatrix& r_x,
                               const DenseMatrix& r_w, const std::vector<double>& c) {
    if (c.size() != static_cast<std::size_t>(h.cols))
        throw ModelError("objective_column_direct: c has wrong length");
    require_binary(c, "objective_column_direct");
    const ColumnTerms t = column_terms_direct(h, r_x, r_w);
    return clamp_objective(column_quadratic(t.tr0, t.lin, t.k, c), "objective_column_direct");
}

double objective_column_inverse(const DenseMatrix& h, const DenseMatrix& r_x,
                                const DenseMatrix& r_w, const std::vector<double>& c) {
    if (c.size() != static_cast<std::size_t>(h.cols))
        throw ModelError("objective_column_inverse: c has wrong length");
    require_binary(c, "objective_column_inverse");
    const ColumnTerms t = column_terms_inverse(h, r_x, r_w);
    return clamp_objective(column_quadratic(t.tr0, t.lin, t.k, c), "objective_column_inverse");
}

double exact_objective(const SketchProblem& problem, const Selection& sel) {
    if (problem.constrained) {
        const std::vector<double> c = sel.indicator();
        return problem.direction == Direction::Direct
                   ? objective_column_direct(problem.h, problem.r_x, problem.r_w, c)
                   : objective_column_inverse(problem.h, problem.r_x, problem.r_w, c);
    }
    return problem.direction == Direction::Direct
               ? objective_direct(problem.h, problem.r_x, problem.r_w, sel)
               : objective_inverse(problem.h, problem.r_x, problem.r_w, sel);
}

DenseMatrix sketch_for_selection(const SketchProblem& problem, const Selection& sel) {
    if (problem.constrained) return gather_cols(problem.h, sel.indices);
    return problem.direction == Direction::Direct
               ? sketch_direct(problem.h, problem.r_x, problem.r_w, sel)
               : sketch_inverse(problem.h, problem.r_x, problem.r_w, sel);
}

ObjectiveEvaluator::ObjectiveEvaluator(const SketchProblem& problem)
    : n_(problem.n()), constrained_(problem.constrained) {
    if (constrained_) {
        const ColumnTerms t = problem.direction == Direction::Direct
                                  ? column_terms_direct(problem.h, problem.r_x, problem.r_w)
                                  : column_terms_inverse(problem.h, problem.r_x, problem.r_w);
        tr0_ = t.tr0;
        lin_ = t.lin;
        kernel_ = t.k;
        return;
    }
    const DenseMatrix& h = problem.h;
    DenseMatrix front;  // H or G
    if (problem.direction == Direction::Direct) {
        front = h;
        const DenseMatrix w = matmul(h, problem.r_x);
        tr0_ = 0.0;
        for (int i = 0; i < h.rows; ++i)
            for (int j = 0; j < h.cols; ++j) tr0_ += w(i, j) * h(i, j);
        scores_ = transpose(w);  // R_x H^T
    } else {
        const DenseMatrix g = matmul(transpose(h), ls_operator(h));
        tr0_ = trace(problem.r_x);
        scores_ = transpose(matmul(g, problem.r_x));  // R_x G^T
    }
    sum_ = problem.r_x + problem.r_w;
}

double ObjectiveEvaluator::value(const std::vector<int>& indices) const {
    const int p = static_cast<int>(indices.size());
    if (constrained_) {
        double v = tr0_;
        for (int a = 0; a < p; ++a) {
            v -= 2.0 * lin_[indices[a]];
            for (int b = 0; b < p; ++b) v += kernel_(indices[a], indices[b]);
        }
        return clamp_objective(v, "objective");
    }
    DenseMatrix a(p, p);
    for (int r = 0; r < p; ++r)
        for (int c = 0; c < p; ++c) a(r, c) = sum_(indices[r], indices[c]);
    const DenseMatrix b = gather_rows(scores_, indices);  // p x m (or p x n)
    const DenseMatrix x = solve_spd(a, b);
    double term = 0.0;
    for (std::size_t i = 0; i < b.data.size(); ++i) term += b.data[i] * x.data[i];
    return clamp_objective(tr0_ - term, "objective");
}

double default_alpha(const SketchProblem& problem) {
    const double lmin = min_eigenvalue(problem.r_x + problem.r_w);
    if (!(lmin > 0.0))
        throw NumericError("default_alpha: R_x + R_w is not positive definite (lambda_min = " +
                           std::to_string(lmin) + ")");
    return 0.5 * lmin;
}

RelaxedEvaluator::RelaxedEvaluator(const SketchProblem& problem, double alpha)
    : alpha_(alpha), constrained_(problem.constrained) {
    const int n = problem.n();
    if (constrained_) {
        const ColumnTerms t = problem.direction == Direction::Direct
                                  ? column_terms_direct(problem.h, problem.r_x, problem.r_w)
                                  : column_terms_inverse(problem.h, problem.r_x, problem.r_w);
        tr0_ = t.tr0;
        lin_ = t.lin;
        kernel_ = t.k;
        return;
    }

    if (!(alpha > 0.0))
        throw ModelError("relaxed objective: alpha must be positive, got " +
                         std::to_string(alpha));
    DenseMatrix r_alpha = problem.r_x + problem.r_w;
    for (int i = 0; i < n; ++i) r_alpha(i, i) -= alpha;
    try {
        ra_inv_ = solve_spd(r_alpha, identity(n));
    } catch (const NumericError&) {
        const double lmin = min_eigenvalue(problem.r_x + problem.r_w);
        throw ModelError("relaxed objective: alpha = " + std::to_string(alpha) +
                         " is not admissible; need 0 < alpha < lambda_min(R_x + R_w) = " +
                         std::to_string(lmin) + " with margin");
    }
    ra_inv_ = symmetrize(ra_inv_);

    DenseMatrix m;  // H R_x or G R_x
    if (problem.direction == Direction::Direct) {
        m = matmul(problem.h, problem.r_x);
        tr0_ = 0.0;
        for (int i = 0; i < problem.h.rows; ++i)
            for (int j = 0; j < problem.h.cols; ++j) tr0_ += m(i, j) * problem.h(i, j);
    } else {
        const DenseMatrix g = matmul(transpose(problem.h), ls_operator(problem.h));
        m = matmul(g, problem.r_x);
        tr0_ = trace(problem.r_x);
    }
    p_gram_ = symmetrize(matmul(transpose(m), m));  // M^T M
}

double RelaxedEvaluator::value(const std::vector<double>& c) const {
    const int n = constrained_ ? kernel_.rows : p_gram_.rows;
    if (c.size() != static_cast<std::size_t>(n))
        throw ModelError("relaxed objective: c has wrong length");
    for (double v : c)
        if (v < -1e-12 || v > 1.0 + 1e-12)
            throw ModelError("relaxed objective: c entries must lie in [0,1]");

    if (constrained_) return column_quadratic(tr0_, lin_, kernel_, c);

    // tr0 - sum_i d_i P_ii + tr[(Ra^{-1} + D)^{-1} D P D], d = c/alpha
    std::vector<double> d(n);
    for (int i = 0; i < n; ++i) d[i] = c[i] / alpha_;
    double v = tr0_;
    for (int i = 0; i < n; ++i) v -= d[i] * p_gram_(i, i);

    DenseMatrix lhs = ra_inv_;
    for (int i = 0; i < n; ++i) lhs(i, i) += d[i];
    DenseMatrix q(n, n);  // D P D
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) q(i, j) = d[i] * p_gram_(i, j) * d[j];
    const DenseMatrix x = solve_spd(lhs, q);
    return v + trace(x);
}

std::vector<double> RelaxedEvaluator::gradient(const std::vector<double>& c) const {
    const int n = constrained_ ? kernel_.rows : p_gram_.rows;
    if (c.size() != static_cast<std::size_t>(n))
        throw ModelError("relaxed gradient: c has wrong length");

    std::vector<double> g(n, 0.0);
    if (constrained_) {
        for (int i = 0; i < n; ++i) {
            double row = 0.0;
            for (int j = 0; j < n; ++j) row += kernel_(i, j) * c[j];
            g[i] = -2.0 * lin_[i] + 2.0 * row;
        }
        return g;
    }

    std::vector<double> d(n);
    for (int i = 0; i < n; ++i) d[i] = c[i] / alpha_;
    DenseMatrix lhs = ra_inv_;
    for (int i = 0; i < n; ++i) lhs(i, i) += d[i];
    const DenseMatrix binv = solve_spd(lhs, identity(n));  // B = (Ra^{-1}+D)^{-1}

    // grad_i = (1/alpha) * (-P_ii + 2 (B D P)_ii - (B D P D B)_ii)
    DenseMatrix dp(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) dp(i, j) = d[i] * p_gram_(i, j);
    const DenseMatrix bdp = matmul(binv, dp);
    for (int i = 0; i < n; ++i) {
        double bdpdb = 0.0;
        for (int j = 0; j < n; ++j) bdpdb += bdp(i, j) * d[j] * binv(j, i);
        g[i] = (-p_gram_(i, i) + 2.0 * bdp(i, i) - bdpdb) / alpha_;
    }
    return g;
}

double relaxed_objective(const SketchProblem& problem, const std::vector<double>& c_frac,
                         double alpha) {
    return RelaxedEvaluator(problem, alpha).value(c_frac);
}

std::vector<double> relaxed_gradient(const SketchProblem& problem,
                                     const std::vector<double>& c_frac, double alpha) {
    return RelaxedEvaluator(problem, alpha).gradient(c_frac);
}

std::vector<double> apply_sketch(const DenseMatrix& h_s, const Selection& sel,
                                 const std::vector<double>& x_observed) {
    const int p = h_s.cols;
    if (static_cast<int>(sel.indices.size()) != p)
        throw ModelError("apply_sketch: sketch has " + std::to_string(p) +
                         " columns, selection has " + std::to_string(sel.indices.size()));
    if (static_cast<int>(x_observed.size()) != sel.n)
        throw ModelError("apply_sketch: signal dimension mismatch");
    std::vector<double> y(h_s.rows, 0.0);
    for (int c = 0; c < p; ++c) {
        const double xv = x_observed[sel.indices[c]];
        for (int r = 0; r < h_s.rows; ++r) y[r] += h_s(r, c) * xv;
    }
    return y;
}

}  // namespace sketchsel

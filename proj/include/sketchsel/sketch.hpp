#pragma once

#include <string>
#include <vector>

#include "sketchsel/matrix.hpp"

namespace sketchsel {

// A choice of p distinct node indices out of n. The row order of the derived
// p x n selection matrix C follows the index order, C C^T = I_p and
// C^T C = diag(c) with c the 0/1 indicator vector.
struct Selection {
    int n = 0;
    std::vector<int> indices;

    static Selection make(int n, std::vector<int> indices);  // validates
    std::vector<double> indicator() const;                    // c in {0,1}^n
};

DenseMatrix selection_matrix(const Selection& sel);

enum class Direction { Direct, Inverse };

Direction direction_from_string(const std::string& s);
std::string to_string(Direction d);

// One sketching design instance: approximate y = H x from samples of x
// (direct), or the least-squares input estimate A_LS x from samples of the
// observed output (inverse). `constrained` restricts the sketch to columns of
// H (H_s = H C^T) instead of the free optimal sketch.
struct SketchProblem {
    Direction direction = Direction::Direct;
    bool constrained = false;
    DenseMatrix h;    // m x n
    DenseMatrix r_x;  // n x n PSD
    DenseMatrix r_w;  // n x n PD
    int p = 0;        // sampling budget

    int n() const { return h.cols; }
    int m() const { return h.rows; }
};

// Result of a sample-selection design: the chosen nodes, the sketch to apply
// to them, and the predicted (exact) MSE of the pair.
struct DesignOutcome {
    Selection selection;
    DenseMatrix h_s;     // m x p
    double objective = 0.0;
    std::string method;
    double wall_time_s = 0.0;
};

// ---- noiseless designs -----------------------------------------------------

// H_s = H V_k (C V_k)^+ ; reproduces y = H x exactly on span(V_k) whenever
// rank(C V_k) = k (p = k uses the plain inverse, p > k the pseudoinverse).
DenseMatrix sketch_direct_noiseless(const DenseMatrix& h, const DenseMatrix& v_k,
                                    const Selection& sel);

// H_s = A_LS V_k (C V_k)^+ ; reproduces the LS estimate on span(V_k).
DenseMatrix sketch_inverse_noiseless(const DenseMatrix& h, const DenseMatrix& v_k,
                                     const Selection& sel);

// ---- noisy designs ----------------------------------------------------------

// H_s(C) = H R_x C^T (C (R_x + R_w) C^T)^{-1}
DenseMatrix sketch_direct(const DenseMatrix& h, const DenseMatrix& r_x, const DenseMatrix& r_w,
                          const Selection& sel);

// tr[R_y - H R_x C^T (C (R_x+R_w) C^T)^{-1} C R_x H^T], R_y = H R_x H^T
double objective_direct(const DenseMatrix& h, const DenseMatrix& r_x, const DenseMatrix& r_w,
                        const Selection& sel);

// A_LS = (H H^T)^{-1} H for full row rank H.
DenseMatrix ls_operator(const DenseMatrix& h);

// H_s(C) = A_LS R_x C^T (C (R_x + R_w) C^T)^{-1}
DenseMatrix sketch_inverse(const DenseMatrix& h, const DenseMatrix& r_x, const DenseMatrix& r_w,
                           const Selection& sel);

// tr[R_x - G R_x C^T (C (R_x+R_w) C^T)^{-1} C R_x G^T], G = H^T A_LS
double objective_inverse(const DenseMatrix& h, const DenseMatrix& r_x, const DenseMatrix& r_w,
                         const Selection& sel);

// ---- column-sampling (constrained sketch H_s = H C^T) ----------------------

// MSE of y_hat = H C^T C (x + w): tr[H R_x H^T - 2 H Cb R_x H^T
// + H Cb (R_x+R_w) Cb H^T], Cb = diag(c). Accepts fractional c as the smooth
// relaxation of the same expression.
double objective_column_direct(const DenseMatrix& h, const DenseMatrix& r_x,
                               const DenseMatrix& r_w, const std::vector<double>& c);

// MSE of x_hat = H^T H C^T C (x + w) against x, with Hb = H^T H:
// tr[R_x - 2 Hb Cb R_x + Hb Cb (R_x+R_w) Cb Hb].
double objective_column_inverse(const DenseMatrix& h, const DenseMatrix& r_x,
                                const DenseMatrix& r_w, const std::vector<double>& c);

// Exact objective of the problem at a binary selection, dispatching on
// direction and constrained flag.
double exact_objective(const SketchProblem& problem, const Selection& sel);

// Precomputes the selection-independent factors of the exact objective so that
// subset searches (greedy, exhaustive) pay only O(p^3 + p^2 m) per candidate.
class ObjectiveEvaluator {
 public:
    explicit ObjectiveEvaluator(const SketchProblem& problem);
    double value(const std::vector<int>& indices) const;
    int n() const { return n_; }

 private:
    int n_ = 0;
    bool constrained_ = false;
    double tr0_ = 0.0;
    DenseMatrix scores_;       // R_x H^T or R_x G^T (unconstrained)
    DenseMatrix sum_;          // R_x + R_w (unconstrained)
    std::vector<double> lin_;  // linear coefficients (constrained)
    DenseMatrix kernel_;       // quadratic kernel (constrained)
};

// Optimal (or constrained) sketch for an already chosen selection.
DenseMatrix sketch_for_selection(const SketchProblem& problem, const Selection& sel);

// ---- smooth relaxation ------------------------------------------------------

// Largest admissible alpha is lambda_min(R_x + R_w); default picks half of it.
double default_alpha(const SketchProblem& problem);

// Woodbury form of the objective, defined for fractional c in [0,1]^n:
//   tr[T0] - tr[M Ca M^T] + tr[M Ca (Ra^{-1} + Ca)^{-1} Ca M^T]
// with Ca = diag(c)/alpha, Ra = R_x + R_w - alpha I, M = H R_x (direct) or
// G R_x (inverse), T0 = R_y or R_x. Coincides with the exact objective at
// binary c for every valid alpha. Constrained problems use the column
// objective, which is already smooth in c (alpha is ignored).
double relaxed_objective(const SketchProblem& problem, const std::vector<double>& c_frac,
                         double alpha);

// Gradient of relaxed_objective with respect to c.
std::vector<double> relaxed_gradient(const SketchProblem& problem,
                                     const std::vector<double>& c_frac, double alpha);

// Caches the c-independent factors of the relaxed objective for repeated
// evaluation inside the projected-gradient solver.
class RelaxedEvaluator {
 public:
    RelaxedEvaluator(const SketchProblem& problem, double alpha);
    double value(const std::vector<double>& c) const;
    std::vector<double> gradient(const std::vector<double>& c) const;
    double alpha() const { return alpha_; }

 private:
    double alpha_ = 0.0;
    bool constrained_ = false;
    double tr0_ = 0.0;
    DenseMatrix ra_inv_;       // (R_x + R_w - alpha I)^{-1}
    DenseMatrix p_gram_;       // M^T M
    std::vector<double> lin_;  // constrained path
    DenseMatrix kernel_;       // constrained path
};

// ---- online application ------------------------------------------------------

// Gathers the selected samples of x and applies the m x p sketch; does no
// n-dependent work.
std::vector<double> apply_sketch(const DenseMatrix& h_s, const Selection& sel,
                                 const std::vector<double>& x_observed);

}  // namespace sketchsel

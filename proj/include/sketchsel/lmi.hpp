#pragma once

#include <string>
#include <vector>

#include "sketchsel/sketch.hpp"

namespace sketchsel {

enum class LmiVariant { Direct, Inverse, ColDirect, ColInverse };

LmiVariant lmi_variant_from_string(const std::string& s);
std::string to_string(LmiVariant v);

// One coefficient of an affine matrix constraint. var 0 addresses the constant
// term F_0, var v >= 1 the v-th optimization variable. Upper triangle only
// (i <= j), 0-indexed here; the SDPA writer emits 1-indexed entries.
struct LmiEntry {
    int var = 0;
    int block = 0;
    int i = 0;
    int j = 0;
    double value = 0.0;

    friend bool operator==(const LmiEntry&, const LmiEntry&) = default;
};

// Exact SDP data of the selection problem: minimize sum of the objective
// coefficients times the variables subject to
//   F_0 + sum_v x_v F_v  >=  0   (per block),
//   sum_i c_i = p,  0 <= c <= 1.
// Variables are x = (c_1..c_n, vec(Y)) with Y vectorized over its upper
// triangle, off-diagonal entries scaled by sqrt(2) to preserve inner products.
struct LmiProblem {
    LmiVariant variant = LmiVariant::Direct;
    int n_c = 0;    // selection variables
    int y_dim = 0;  // Y is y_dim x y_dim symmetric
    int p = 0;      // sampling budget (equality constraint)
    double alpha = 0.0;  // 0 for the column variants, which need none
    std::vector<int> block_dims;
    std::vector<double> objective;  // length n_vars()
    std::vector<LmiEntry> entries;  // canonical order: (var, block, i, j)

    int n_vars() const { return n_c + y_dim * (y_dim + 1) / 2; }

    friend bool operator==(const LmiProblem&, const LmiProblem&) = default;
};

// Builds the affine decomposition of the printed block constraint for the
// requested variant. `alpha` is required (0 < alpha < lambda_min(R_x+R_w))
// for the unconstrained variants and ignored for the column ones.
LmiProblem build_lmi(const SketchProblem& problem, LmiVariant variant, double alpha);

// Variable vector for a concrete (c, Y) pair, honoring the sqrt(2) scaling.
std::vector<double> pack_variables(const LmiProblem& lmi, const std::vector<double>& c,
                                   const DenseMatrix& y);

// Assembles F_0 + sum_v x_v F_v for each block.
std::vector<DenseMatrix> eval_blocks(const LmiProblem& lmi, const std::vector<double>& x);

// Sparse SDPA text (".dat-s"): bounds and the budget equality are appended as
// paired diagonal blocks; a machine-readable comment header carries the
// metadata needed to reconstruct the LmiProblem.
std::string to_sdpa(const LmiProblem& lmi);
void write_sdpa(const LmiProblem& lmi, const std::string& path);

LmiProblem read_sdpa_text(const std::string& text, const std::string& origin = "<string>");
LmiProblem read_sdpa(const std::string& path);

}  // namespace sketchsel

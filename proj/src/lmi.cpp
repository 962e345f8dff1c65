#include "sketchsel/lmi.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "sketchsel/errors.hpp"
#include "sketchsel/io.hpp"
#include "sketchsel/linalg.hpp"

namespace sketchsel {

LmiVariant lmi_variant_from_string(const std::string& s) {
    if (s == "direct") return LmiVariant::Direct;
    if (s == "inverse") return LmiVariant::Inverse;
    if (s == "col-direct") return LmiVariant::ColDirect;
    if (s == "col-inverse") return LmiVariant::ColInverse;
    throw ModelError("unknown LMI variant '" + s + "'");
}

std::string to_string(LmiVariant v) {
    switch (v) {
        case LmiVariant::Direct: return "direct";
        case LmiVariant::Inverse: return "inverse";
        case LmiVariant::ColDirect: return "col-direct";
        case LmiVariant::ColInverse: return "col-inverse";
    }
    return "?";
}

namespace {

// Accumulates upper-triangle coefficients, dropping exact zeros on emit.
class EntrySink {
 public:
    void add(int var, int block, int i, int j, double value) {
        if (value == 0.0) return;
        if (i > j) std::swap(i, j);
        key_t key{var, block, i, j};
        acc_[key] += value;
    }

    std::vector<LmiEntry> take() const {
        std::vector<LmiEntry> out;
        out.reserve(acc_.size());
        for (const auto& [k, v] : acc_) {
            if (v == 0.0) continue;
            out.push_back({std::get<0>(k), std::get<1>(k), std::get<2>(k), std::get<3>(k), v});
        }
        return out;
    }

 private:
    using key_t = std::tuple<int, int, int, int>;
    std::map<key_t, double> acc_;
};

void add_symmetric_block(EntrySink& sink, int var, int block, const DenseMatrix& m, int row0,
                         int col0) {
    for (int i = 0; i < m.rows; ++i)
        for (int j = (row0 == col0 ? i : 0); j < m.cols; ++j)
            sink.add(var, block, row0 + i, col0 + j, m(i, j));
}

int y_var_index(int n_c, int y_dim, int j, int l) {
    // upper-triangle lexicographic offset of (j, l), j <= l, 1-based variable
    const int offset = j * y_dim - j * (j - 1) / 2 + (l - j);
    return n_c + offset + 1;
}

}  // namespace

LmiProblem build_lmi(const SketchProblem& problem, LmiVariant variant, double alpha) {
    const int n = problem.n();
    const int m = problem.m();
    const bool column = variant == LmiVariant::ColDirect || variant == LmiVariant::ColInverse;
    const bool direct = variant == LmiVariant::Direct || variant == LmiVariant::ColDirect;

    LmiProblem lmi;
    lmi.variant = variant;
    lmi.n_c = n;
    lmi.y_dim = direct ? m : n;
    lmi.p = problem.p;
    lmi.alpha = column ? 0.0 : alpha;
    const int dim = lmi.y_dim + n;
    lmi.block_dims = {dim};

    // front operator of the error covariance: H (direct) or G = H^T A_LS
    DenseMatrix front = problem.h;
    DenseMatrix t0;  // R_y or R_x
    if (direct) {
        t0 = symmetrize(matmul(matmul(problem.h, problem.r_x), transpose(problem.h)));
    } else {
        front = matmul(transpose(problem.h), ls_operator(problem.h));
        t0 = problem.r_x;
    }
    if (variant == LmiVariant::ColInverse) front = matmul(transpose(problem.h), problem.h);

    EntrySink sink;
    const int yd = lmi.y_dim;

    // constant term: top-left -T0, bottom-right Ra^{-1} (or (R_x+R_w)^{-1})
    add_symmetric_block(sink, 0, 0, -1.0 * t0, 0, 0);
    DenseMatrix bottom = problem.r_x + problem.r_w;
    if (!column) {
        if (!(alpha > 0.0))
            throw ModelError("build_lmi: variant '" + to_string(variant) +
                             "' needs alpha > 0, got " + std::to_string(alpha));
        for (int i = 0; i < n; ++i) bottom(i, i) -= alpha;
    }
    DenseMatrix bottom_inv;
    try {
        bottom_inv = symmetrize(solve_spd(bottom, identity(n)));
    } catch (const NumericError&) {
        throw ModelError("build_lmi: alpha = " + std::to_string(alpha) +
                         " is not admissible; need 0 < alpha < lambda_min(R_x + R_w) = " +
                         std::to_string(min_eigenvalue(problem.r_x + problem.r_w)));
    }
    add_symmetric_block(sink, 0, 0, bottom_inv, yd, yd);

    // selection-variable coefficients
    const DenseMatrix fr = matmul(front, problem.r_x);  // H R_x or G R_x
    for (int i = 0; i < n; ++i) {
        const int var = i + 1;
        if (!column) {
            // (1/alpha) * [u u^T, u e_i^T; e_i u^T, E_ii], u = (front R_x)_{:,i}
            const double inv_a = 1.0 / alpha;
            for (int r = 0; r < yd; ++r) {
                for (int c = r; c < yd; ++c)
                    sink.add(var, 0, r, c, inv_a * fr(r, i) * fr(c, i));
                sink.add(var, 0, r, yd + i, inv_a * fr(r, i));
            }
            sink.add(var, 0, yd + i, yd + i, inv_a);
        } else {
            // symmetrized cross term of the column estimator: f_i o_i^T + o_i f_i^T
            // with f_i a column of H (col-direct: cross H Cb R_x H^T) or of the
            // Gram matrix (col-inverse: cross Hb Cb R_x), o_i the matching column
            // of H R_x resp. R_x.
            const DenseMatrix& other = variant == LmiVariant::ColDirect ? fr : problem.r_x;
            for (int r = 0; r < yd; ++r) {
                for (int c = r; c < yd; ++c)
                    sink.add(var, 0, r, c,
                             front(r, i) * other(c, i) + other(r, i) * front(c, i));
                sink.add(var, 0, r, yd + i, front(r, i));
            }
        }
    }

    // Y coefficients in the top-left corner; off-diagonal scaled by sqrt(2)
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int j = 0; j < yd; ++j)
        for (int l = j; l < yd; ++l)
            sink.add(y_var_index(n, yd, j, l), 0, j, l, j == l ? 1.0 : inv_sqrt2);

    lmi.entries = sink.take();
    lmi.objective.assign(lmi.n_vars(), 0.0);
    for (int j = 0; j < yd; ++j) lmi.objective[y_var_index(n, yd, j, j) - 1] = 1.0;
    return lmi;
}

std::vector<double> pack_variables(const LmiProblem& lmi, const std::vector<double>& c,
                                   const DenseMatrix& y) {
    if (static_cast<int>(c.size()) != lmi.n_c || y.rows != lmi.y_dim || y.cols != lmi.y_dim)
        throw ModelError("pack_variables: dimension mismatch");
    std::vector<double> x(lmi.n_vars(), 0.0);
    for (int i = 0; i < lmi.n_c; ++i) x[i] = c[i];
    const double sqrt2 = std::sqrt(2.0);
    for (int j = 0; j < lmi.y_dim; ++j)
        for (int l = j; l < lmi.y_dim; ++l)
            x[y_var_index(lmi.n_c, lmi.y_dim, j, l) - 1] = j == l ? y(j, l) : sqrt2 * y(j, l);
    return x;
}

std::vector<DenseMatrix> eval_blocks(const LmiProblem& lmi, const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != lmi.n_vars())
        throw ModelError("eval_blocks: wrong variable count");
    std::vector<DenseMatrix> blocks;
    for (int d : lmi.block_dims) blocks.emplace_back(d, d);
    for (const LmiEntry& e : lmi.entries) {
        const double w = e.var == 0 ? 1.0 : x[e.var - 1];
        blocks[e.block](e.i, e.j) += w * e.value;
        if (e.i != e.j) blocks[e.block](e.j, e.i) += w * e.value;
    }
    return blocks;
}

std::string to_sdpa(const LmiProblem& lmi) {
    std::ostringstream out;
    out << "\"sketchsel-lmi v1 variant=" << to_string(lmi.variant) << " n_c=" << lmi.n_c
        << " y_dim=" << lmi.y_dim << " p=" << lmi.p << " alpha=" << format_double(lmi.alpha)
        << "\n";
    out << "\"variables: c_1..c_" << lmi.n_c << ", then vec(Y) by upper-triangle rows with "
        << "sqrt(2)-scaled off-diagonals\n";
    out << "\"trailing diagonal blocks encode 0 <= c <= 1 and sum(c) = p as paired "
        << "inequalities\n";

    const int n_vars = lmi.n_vars();
    const bool aux = lmi.n_c > 0;
    const int n_blocks = static_cast<int>(lmi.block_dims.size()) + (aux ? 2 : 0);
    out << n_vars << "\n";
    out << n_blocks << "\n";
    for (std::size_t b = 0; b < lmi.block_dims.size(); ++b) {
        if (b) out << " ";
        out << lmi.block_dims[b];
    }
    if (aux) {
        if (!lmi.block_dims.empty()) out << " ";
        out << -(2 * lmi.n_c) << " " << -2;
    }
    out << "\n";
    for (int v = 0; v < n_vars; ++v) {
        if (v) out << " ";
        out << format_double(v < static_cast<int>(lmi.objective.size()) ? lmi.objective[v] : 0.0);
    }
    out << "\n";

    auto emit = [&](int var, int block, int i, int j, double value) {
        out << var << " " << block << " " << i + 1 << " " << j + 1 << " " << format_double(value)
            << "\n";
    };
    for (const LmiEntry& e : lmi.entries) emit(e.var, e.block + 1, e.i, e.j, e.value);

    if (aux) {
        const int box = static_cast<int>(lmi.block_dims.size()) + 1;
        const int eq = box + 1;
        for (int i = 0; i < lmi.n_c; ++i) {
            emit(i + 1, box, i, i, 1.0);                        // c_i >= 0
            emit(0, box, lmi.n_c + i, lmi.n_c + i, -1.0);       // 1 - c_i >= 0
            emit(i + 1, box, lmi.n_c + i, lmi.n_c + i, -1.0);
            emit(i + 1, eq, 0, 0, 1.0);                          // sum c - p >= 0
            emit(i + 1, eq, 1, 1, -1.0);                         // p - sum c >= 0
        }
        emit(0, eq, 0, 0, static_cast<double>(lmi.p));
        emit(0, eq, 1, 1, -static_cast<double>(lmi.p));
    }
    return out.str();
}

void write_sdpa(const LmiProblem& lmi, const std::string& path) {
    write_text_atomic(path, to_sdpa(lmi));
}

LmiProblem read_sdpa_text(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    LmiProblem lmi;
    bool have_meta = false;

    auto next_data_line = [&](std::string& out) -> bool {
        while (std::getline(in, out)) {
            if (!out.empty() && out.back() == '\r') out.pop_back();
            if (out.empty()) continue;
            if (out[0] == '"' || out[0] == '*') {
                if (out.rfind("\"sketchsel-lmi v1 ", 0) == 0) {
                    std::istringstream meta(out.substr(1));
                    std::string tok;
                    meta >> tok;  // sketchsel-lmi
                    meta >> tok;  // v1
                    while (meta >> tok) {
                        const auto eqp = tok.find('=');
                        if (eqp == std::string::npos) continue;
                        const std::string key = tok.substr(0, eqp);
                        const std::string val = tok.substr(eqp + 1);
                        if (key == "variant") lmi.variant = lmi_variant_from_string(val);
                        else if (key == "n_c") lmi.n_c = std::stoi(val);
                        else if (key == "y_dim") lmi.y_dim = std::stoi(val);
                        else if (key == "p") lmi.p = std::stoi(val);
                        else if (key == "alpha") lmi.alpha = parse_double(val);
                    }
                    have_meta = true;
                }
                continue;
            }
            return true;
        }
        return false;
    };

    if (!have_meta && !in.good()) throw ModelError(origin + ": empty SDPA file");
    if (!next_data_line(line)) throw ModelError(origin + ": missing variable count");
    if (!have_meta) throw ModelError(origin + ": missing sketchsel-lmi metadata header");
    const int n_vars = std::stoi(line);
    if (n_vars != lmi.n_vars())
        throw ModelError(origin + ": variable count disagrees with the metadata header");

    if (!next_data_line(line)) throw ModelError(origin + ": missing block count");
    const int n_blocks = std::stoi(line);

    if (n_blocks > 0) {
        if (!next_data_line(line)) throw ModelError(origin + ": missing block sizes");
        std::istringstream sizes(line);
        int d;
        std::vector<int> dims;
        while (sizes >> d) dims.push_back(d);
        if (static_cast<int>(dims.size()) != n_blocks)
            throw ModelError(origin + ": expected " + std::to_string(n_blocks) + " block sizes");
        const int aux = lmi.n_c > 0 ? 2 : 0;
        lmi.block_dims.assign(dims.begin(), dims.end() - aux);
    }

    lmi.objective.assign(n_vars, 0.0);
    if (n_vars > 0) {
        if (!next_data_line(line)) throw ModelError(origin + ": missing objective row");
        std::istringstream obj(line);
        std::string field;
        for (int v = 0; v < n_vars; ++v) {
            if (!(obj >> field)) throw ModelError(origin + ": short objective row");
            lmi.objective[v] = parse_double(field);
        }
    }

    const int n_main = static_cast<int>(lmi.block_dims.size());
    while (next_data_line(line)) {
        std::istringstream es(line);
        int var, block, i, j;
        std::string value;
        if (!(es >> var >> block >> i >> j >> value))
            throw ModelError(origin + ": bad entry line '" + line + "'");
        if (block > n_main) continue;  // bounds/equality blocks are re-derivable
        LmiEntry e;
        e.var = var;
        e.block = block - 1;
        e.i = i - 1;
        e.j = j - 1;
        e.value = parse_double(value);
        lmi.entries.push_back(e);
    }
    std::sort(lmi.entries.begin(), lmi.entries.end(), [](const LmiEntry& a, const LmiEntry& b) {
        return std::tie(a.var, a.block, a.i, a.j) < std::tie(b.var, b.block, b.i, b.j);
    });
    return lmi;
}

LmiProblem read_sdpa(const std::string& path) {
    return read_sdpa_text(read_text_file(path), path);
}

}  // namespace sketchsel

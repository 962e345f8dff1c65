#include "sketchsel/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sketchsel/errors.hpp"
#include "sketchsel/io.hpp"
#include "sketchsel/rng.hpp"

namespace sketchsel {

Graph Graph::from_weights(DenseMatrix w) {
    if (w.rows != w.cols) throw ModelError("Graph: weight matrix must be square");
    const double scale = std::max(max_abs(w), 1.0);
    for (int i = 0; i < w.rows; ++i) {
        if (w(i, i) != 0.0) throw ModelError("Graph: nonzero diagonal at node " + std::to_string(i));
        for (int j = 0; j < w.cols; ++j) {
            if (w(i, j) < 0.0) throw ModelError("Graph: negative weight at (" + std::to_string(i) +
                                                "," + std::to_string(j) + ")");
            if (std::fabs(w(i, j) - w(j, i)) > 1e-12 * scale)
                throw ModelError("Graph: weight matrix not symmetric at (" + std::to_string(i) +
                                 "," + std::to_string(j) + ")");
        }
    }
    Graph g;
    g.n = w.rows;
    g.weights = std::move(w);
    return g;
}

EigOrder eig_order_from_string(const std::string& s) {
    if (s == "desc") return EigOrder::Descending;
    if (s == "asc") return EigOrder::Ascending;
    if (s == "abs-desc") return EigOrder::AbsDescending;
    throw ModelError("unknown eigenvalue order '" + s + "' (expected desc, asc or abs-desc)");
}

std::string to_string(EigOrder order) {
    switch (order) {
        case EigOrder::Descending: return "desc";
        case EigOrder::Ascending: return "asc";
        case EigOrder::AbsDescending: return "abs-desc";
    }
    return "desc";
}

namespace {

void add_edge(DenseMatrix& w, int i, int j, double weight = 1.0) {
    w(i, j) = weight;
    w(j, i) = weight;
}

bool connected(const DenseMatrix& w) {
    const int n = w.rows;
    if (n == 0) return true;
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (int v = 0; v < n; ++v) {
            if (!seen[v] && w(u, v) > 0.0) {
                seen[v] = 1;
                ++count;
                stack.push_back(v);
            }
        }
    }
    return count == n;
}

}  // namespace

Graph gen_sbm(int n, const std::vector<int>& community_sizes, double p_in, double p_out,
              std::uint64_t seed) {
    if (n <= 0) throw ModelError("gen_sbm: n must be positive");
    if (p_in < 0.0 || p_in > 1.0 || p_out < 0.0 || p_out > 1.0)
        throw ModelError("gen_sbm: probabilities must be in [0,1]");
    int total = 0;
    for (int s : community_sizes) {
        if (s <= 0) throw ModelError("gen_sbm: community sizes must be positive");
        total += s;
    }
    if (total != n)
        throw ModelError("gen_sbm: community sizes sum to " + std::to_string(total) +
                         ", expected " + std::to_string(n));

    std::vector<int> community(n);
    int node = 0;
    for (std::size_t b = 0; b < community_sizes.size(); ++b)
        for (int s = 0; s < community_sizes[b]; ++s) community[node++] = static_cast<int>(b);

    Rng rng = Rng::stream(seed, "sbm");
    DenseMatrix w(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double p = community[i] == community[j] ? p_in : p_out;
            if (rng.uniform() < p) add_edge(w, i, j);
        }
    Graph g;
    g.n = n;
    g.weights = std::move(w);
    return g;
}

Graph gen_er(int n, double p_edge, std::uint64_t seed) {
    if (n <= 0) throw ModelError("gen_er: n must be positive");
    if (p_edge < 0.0 || p_edge > 1.0) throw ModelError("gen_er: p_edge must be in [0,1]");
    Rng rng = Rng::stream(seed, "er");
    DenseMatrix w(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng.uniform() < p_edge) add_edge(w, i, j);
    Graph g;
    g.n = n;
    g.weights = std::move(w);
    return g;
}

Graph gen_smallworld(int n, double p_e, double p_r, std::uint64_t seed) {
    if (n < 3) throw ModelError("gen_smallworld: need at least 3 nodes");
    if (p_e < 0.0 || p_e > 1.0 || p_r < 0.0 || p_r > 1.0)
        throw ModelError("gen_smallworld: probabilities must be in [0,1]");

    // Target edge density p_e mapped to an even ring degree.
    int k_ring = static_cast<int>(2 * std::llround(p_e * (n - 1) / 2.0));
    k_ring = std::max(2, k_ring);
    if (k_ring >= n) k_ring = (n - 1) - (n - 1) % 2;

    for (int attempt = 0; attempt < 10; ++attempt) {
        Rng rng = Rng::stream(seed, "sw", static_cast<std::uint64_t>(attempt));
        DenseMatrix w(n, n);
        for (int i = 0; i < n; ++i)
            for (int d = 1; d <= k_ring / 2; ++d) add_edge(w, i, (i + d) % n);

        // Watts-Strogatz rewiring of each clockwise lattice edge.
        for (int d = 1; d <= k_ring / 2; ++d)
            for (int i = 0; i < n; ++i) {
                const int j = (i + d) % n;
                if (w(i, j) == 0.0) continue;  // already rewired away
                if (rng.uniform() >= p_r) continue;
                std::vector<int> candidates;
                for (int v = 0; v < n; ++v)
                    if (v != i && w(i, v) == 0.0) candidates.push_back(v);
                if (candidates.empty()) continue;
                const int target = candidates[rng.below(candidates.size())];
                w(i, j) = 0.0;
                w(j, i) = 0.0;
                add_edge(w, i, target);
            }

        if (connected(w)) {
            Graph g;
            g.n = n;
            g.weights = std::move(w);
            return g;
        }
    }
    throw NumericError("gen_smallworld: no connected realization in 10 attempts");
}

namespace {

// Squared pairwise distances of the first non-degenerate deployment of n
// uniform points on the unit square, plus the calibrated kernel constants.
struct SensorDeployment {
    DenseMatrix d2;
    double alpha = 0.0;
    double beta = 0.0;
};

SensorDeployment sensor_deployment(int n, std::uint64_t seed) {
    if (n <= 1) throw ModelError("gen_sensor_knn: need at least 2 nodes");
    for (int attempt = 0; attempt < 20; ++attempt) {
        Rng rng = Rng::stream(seed, "sensor", static_cast<std::uint64_t>(attempt));
        std::vector<double> px(n), py(n);
        for (int i = 0; i < n; ++i) {
            px[i] = rng.uniform();
            py[i] = rng.uniform();
        }

        SensorDeployment dep;
        dep.d2 = DenseMatrix(n, n);
        double d2min = 0.0, d2max = 0.0;
        bool first = true;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const double dx = px[i] - px[j];
                const double dy = py[i] - py[j];
                const double d = dx * dx + dy * dy;
                dep.d2(i, j) = d;
                dep.d2(j, i) = d;
                if (first) {
                    d2min = d2max = d;
                    first = false;
                } else {
                    d2min = std::min(d2min, d);
                    d2max = std::max(d2max, d);
                }
            }
        // Coincident points or a degenerate spread cannot satisfy the weight
        // range; draw a fresh deployment.
        if (d2min < 1e-12 || d2max - d2min < 1e-9) continue;

        // alpha*exp(-beta*d2min) = 1 and alpha*exp(-beta*d2max) = 0.01
        dep.beta = std::log(100.0) / (d2max - d2min);
        dep.alpha = std::exp(dep.beta * d2min);
        return dep;
    }
    throw NumericError("gen_sensor_knn: degenerate deployments in 20 attempts");
}

}  // namespace

DenseMatrix gen_sensor_kernel(int n, std::uint64_t seed) {
    const SensorDeployment dep = sensor_deployment(n, seed);
    DenseMatrix w(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) w(i, j) = dep.alpha * std::exp(-dep.beta * dep.d2(i, j));
    return w;
}

Graph gen_sensor_knn(int n, int knn, std::uint64_t seed) {
    if (knn <= 0 || knn >= n) throw ModelError("gen_sensor_knn: need 0 < knn < n");
    const SensorDeployment dep = sensor_deployment(n, seed);

    // Union of k-nearest-neighbor edges, kernel weights retained.
    DenseMatrix w(n, n);
    for (int i = 0; i < n; ++i) {
        std::vector<int> others;
        others.reserve(n - 1);
        for (int v = 0; v < n; ++v)
            if (v != i) others.push_back(v);
        std::stable_sort(others.begin(), others.end(),
                         [&](int a, int b) { return dep.d2(i, a) < dep.d2(i, b); });
        for (int r = 0; r < knn; ++r) {
            const int j = others[r];
            add_edge(w, i, j, dep.alpha * std::exp(-dep.beta * dep.d2(i, j)));
        }
    }
    Graph g;
    g.n = n;
    g.weights = std::move(w);
    return g;
}

SpectralBasis spectral_basis(const DenseMatrix& shift, int k, EigOrder order) {
    if (shift.rows != shift.cols) throw ModelError("spectral_basis: shift must be square");
    if (k < 1 || k > shift.rows)
        throw ModelError("spectral_basis: k=" + std::to_string(k) + " out of range [1," +
                         std::to_string(shift.rows) + "]");
    EigResult e = sym_eig(shift);  // descending
    const int n = shift.rows;

    std::vector<int> order_idx(n);
    std::iota(order_idx.begin(), order_idx.end(), 0);
    if (order == EigOrder::Ascending) {
        std::reverse(order_idx.begin(), order_idx.end());
    } else if (order == EigOrder::AbsDescending) {
        std::stable_sort(order_idx.begin(), order_idx.end(), [&](int a, int b) {
            return std::fabs(e.values[a]) > std::fabs(e.values[b]);
        });
    }

    SpectralBasis basis;
    basis.k = k;
    basis.lambda.resize(n);
    basis.v = DenseMatrix(n, n);
    for (int j = 0; j < n; ++j) {
        basis.lambda[j] = e.values[order_idx[j]];
        for (int i = 0; i < n; ++i) basis.v(i, j) = e.vectors(i, order_idx[j]);
    }
    basis.v_k = DenseMatrix(n, k);
    for (int j = 0; j < k; ++j)
        for (int i = 0; i < n; ++i) basis.v_k(i, j) = basis.v(i, j);
    return basis;
}

DenseMatrix laplacian(const Graph& g) {
    DenseMatrix l = -1.0 * g.weights;
    for (int i = 0; i < g.n; ++i) {
        double deg = 0.0;
        for (int j = 0; j < g.n; ++j) deg += g.weights(i, j);
        l(i, i) = deg;
    }
    return l;
}

ShiftKind shift_kind_from_string(const std::string& s) {
    if (s == "adjacency") return ShiftKind::Adjacency;
    if (s == "laplacian") return ShiftKind::Laplacian;
    throw ModelError("unknown shift '" + s + "' (expected adjacency or laplacian)");
}

std::string to_string(ShiftKind kind) {
    return kind == ShiftKind::Adjacency ? "adjacency" : "laplacian";
}

DenseMatrix shift_operator(const Graph& g, ShiftKind kind) {
    return kind == ShiftKind::Adjacency ? g.weights : laplacian(g);
}

Graph load_graph(const std::string& path) {
    const std::string text = read_text_file(path);

    // Peek at the first non-comment line: two fields means a matrix CSV header,
    // three means an edge list.
    std::size_t pos = 0;
    std::string firstline;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        std::string line = text.substr(pos, eol - pos);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        pos = eol + 1;
        if (line.empty() || line[0] == '#') continue;
        firstline = line;
        break;
    }
    const auto commas = std::count(firstline.begin(), firstline.end(), ',');

    if (commas == 1) return Graph::from_weights(matrix_from_csv_text(text, path));

    if (commas != 2) throw ModelError(path + ": not a matrix CSV or an 'i,j,w' edge list");

    // Edge list: first pass finds the node count, second fills the matrix.
    struct Edge {
        int i, j;
        double w;
    };
    std::vector<Edge> edges;
    int n = 0;
    std::size_t p = 0;
    int lineno = 0;
    while (p < text.size()) {
        std::size_t eol = text.find('\n', p);
        if (eol == std::string::npos) eol = text.size();
        std::string line = text.substr(p, eol - p);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        p = eol + 1;
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        const std::size_t c1 = line.find(',');
        const std::size_t c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw ModelError(path + ":" + std::to_string(lineno) + ": expected 'i,j,w'");
        Edge e;
        try {
            e.i = std::stoi(line.substr(0, c1));
            e.j = std::stoi(line.substr(c1 + 1, c2 - c1 - 1));
        } catch (const std::exception&) {
            throw ModelError(path + ":" + std::to_string(lineno) + ": bad node index");
        }
        e.w = parse_double(line.substr(c2 + 1));
        if (e.i < 0 || e.j < 0)
            throw ModelError(path + ":" + std::to_string(lineno) + ": negative node index");
        if (e.i == e.j)
            throw ModelError(path + ":" + std::to_string(lineno) + ": self-loop not allowed");
        if (e.w < 0.0)
            throw ModelError(path + ":" + std::to_string(lineno) + ": negative weight");
        n = std::max(n, std::max(e.i, e.j) + 1);
        edges.push_back(e);
    }
    DenseMatrix w(n, n);
    for (const Edge& e : edges) add_edge(w, e.i, e.j, e.w);
    Graph g;
    g.n = n;
    g.weights = std::move(w);
    return g;
}

}  // namespace sketchsel

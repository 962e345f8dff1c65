#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "sketchsel/errors.hpp"
#include "sketchsel/graph.hpp"
#include "sketchsel/io.hpp"
#include "test_util.hpp"

using namespace sketchsel;

namespace {

int edge_count(const Graph& g) {
    int e = 0;
    for (int i = 0; i < g.n; ++i)
        for (int j = i + 1; j < g.n; ++j)
            if (g.weights(i, j) > 0.0) ++e;
    return e;
}

void check_graph_invariants(const Graph& g) {
    REQUIRE(g.weights.rows == g.n);
    REQUIRE(g.weights.cols == g.n);
    for (int i = 0; i < g.n; ++i) {
        CHECK(g.weights(i, i) == 0.0);
        for (int j = 0; j < g.n; ++j) {
            CHECK(g.weights(i, j) >= 0.0);
            CHECK(g.weights(i, j) == g.weights(j, i));
        }
    }
}

}  // namespace

TEST_CASE("sbm with p_in=1 p_out=0 gives disjoint cliques") {
    const Graph g = gen_sbm(9, {3, 3, 3}, 1.0, 0.0, 5);
    check_graph_invariants(g);
    for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 9; ++j) {
            if (i == j) continue;
            const bool same = (i / 3) == (j / 3);
            CHECK(g.weights(i, j) == (same ? 1.0 : 0.0));
        }
}

TEST_CASE("sbm intra-community density within 3 sigma") {
    const Graph g = gen_sbm(48, {24, 24}, 0.8, 0.2, 17);
    int intra = 0;
    const int pairs = 2 * (24 * 23 / 2);
    for (int i = 0; i < 48; ++i)
        for (int j = i + 1; j < 48; ++j)
            if ((i / 24) == (j / 24) && g.weights(i, j) > 0.0) ++intra;
    const double mean = pairs * 0.8;
    const double sd = std::sqrt(pairs * 0.8 * 0.2);
    CHECK(std::fabs(intra - mean) <= 3.0 * sd);
}

TEST_CASE("sbm benchmark instance n=96") {
    const Graph g = gen_sbm(96, {24, 24, 24, 24}, 0.8, 0.2, 1);
    check_graph_invariants(g);
    CHECK(g.n == 96);
}

TEST_CASE("sbm size mismatch is a model error") {
    CHECK_THROWS_AS(gen_sbm(10, {4, 4}, 0.5, 0.5, 1), ModelError);
}

TEST_CASE("er edge probability extremes") {
    const Graph empty = gen_er(12, 0.0, 3);
    CHECK(edge_count(empty) == 0);
    const Graph complete = gen_er(12, 1.0, 3);
    CHECK(edge_count(complete) == 12 * 11 / 2);
}

TEST_CASE("er edge count within 3 sigma") {
    const int n = 1000;
    const Graph g = gen_er(n, 0.1, 8);
    const double pairs = n * (n - 1) / 2.0;
    const double mean = pairs * 0.1;
    const double sd = std::sqrt(pairs * 0.1 * 0.9);
    CHECK(std::fabs(edge_count(g) - mean) <= 3.0 * sd);
}

TEST_CASE("smallworld with p_r=0 is a pure ring lattice") {
    const int n = 20;
    const Graph g = gen_smallworld(n, 0.2, 0.0, 4);
    check_graph_invariants(g);
    const int k_ring = std::max(2, (int)(2 * std::llround(0.2 * (n - 1) / 2.0)));
    for (int i = 0; i < n; ++i) {
        int deg = 0;
        for (int j = 0; j < n; ++j)
            if (g.weights(i, j) > 0.0) ++deg;
        CHECK(deg == k_ring);
    }
}

TEST_CASE("smallworld rewiring conserves the edge count") {
    const int n = 24;
    const Graph ring = gen_smallworld(n, 0.3, 0.0, 9);
    const Graph rewired = gen_smallworld(n, 0.3, 0.7, 9);
    CHECK(edge_count(ring) == edge_count(rewired));
}

TEST_CASE("smallworld benchmark instance n=96") {
    const Graph g = gen_smallworld(96, 0.2, 0.7, 2);
    check_graph_invariants(g);
    CHECK(g.n == 96);
}

TEST_CASE("sensor kernel weight range spans [0.01, 1]") {
    const DenseMatrix kernel = gen_sensor_kernel(32, 6);
    double wmin = 1e300, wmax = 0.0;
    for (int i = 0; i < 32; ++i)
        for (int j = 0; j < 32; ++j) {
            if (i == j) continue;
            wmin = std::min(wmin, kernel(i, j));
            wmax = std::max(wmax, kernel(i, j));
        }
    CHECK(wmin == doctest::Approx(0.01).epsilon(1e-9));
    CHECK(wmax == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("sensor knn saturates to a complete graph when knn = n-1") {
    const Graph g = gen_sensor_knn(5, 4, 11);
    check_graph_invariants(g);
    CHECK(edge_count(g) == 10);
}

TEST_CASE("sensor benchmark instance n=96 knn=4") {
    const Graph g = gen_sensor_knn(96, 4, 3);
    check_graph_invariants(g);
    CHECK(g.n == 96);
    // every node keeps at least its own 4 nearest neighbors
    for (int i = 0; i < 96; ++i) {
        int deg = 0;
        for (int j = 0; j < 96; ++j)
            if (g.weights(i, j) > 0.0) ++deg;
        CHECK(deg >= 4);
    }
}

TEST_CASE("spectral_basis 2-node path") {
    const Graph g = Graph::from_weights(DenseMatrix::from_data(2, 2, {0, 1, 1, 0}));
    const SpectralBasis b = spectral_basis(g.weights, 1);
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(b.v_k(0, 0) == doctest::Approx(r));
    CHECK(b.v_k(1, 0) == doctest::Approx(r));
    CHECK(b.lambda[0] == doctest::Approx(1.0));
}

TEST_CASE("spectral_basis of identity shift is identity") {
    const SpectralBasis b = spectral_basis(identity(6), 6);
    CHECK(max_abs_diff(b.v, identity(6)) < 1e-14);
}

TEST_CASE("spectral_basis invariants on an SBM instance") {
    const Graph g = gen_sbm(32, {16, 16}, 0.7, 0.1, 23);
    const SpectralBasis b = spectral_basis(g.weights, 5);
    CHECK(max_abs_diff(matmul(transpose(b.v), b.v), identity(32)) <= 1e-10 * 32);
    for (std::size_t i = 1; i < b.lambda.size(); ++i) CHECK(b.lambda[i - 1] >= b.lambda[i]);
    for (int j = 0; j < 5; ++j)
        for (int i = 0; i < 32; ++i) CHECK(b.v_k(i, j) == b.v(i, j));
}

TEST_CASE("spectral_basis eigenvalue orderings") {
    const DenseMatrix shift = diag_matrix({-3.0, 2.0, 1.0});
    const SpectralBasis desc = spectral_basis(shift, 1, EigOrder::Descending);
    CHECK(desc.lambda[0] == doctest::Approx(2.0));
    const SpectralBasis asc = spectral_basis(shift, 1, EigOrder::Ascending);
    CHECK(asc.lambda[0] == doctest::Approx(-3.0));
    const SpectralBasis absd = spectral_basis(shift, 1, EigOrder::AbsDescending);
    CHECK(absd.lambda[0] == doctest::Approx(-3.0));
    CHECK(eig_order_from_string("abs-desc") == EigOrder::AbsDescending);
    CHECK_THROWS_AS(eig_order_from_string("sideways"), ModelError);
}

TEST_CASE("spectral_basis is permutation-equivariant up to sign") {
    // weighted sensor graph: generically distinct eigenvalues
    const int n = 12, k = 4;
    const Graph g = gen_sensor_knn(n, 3, 19);
    const SpectralBasis b = spectral_basis(g.weights, k);
    REQUIRE(b.lambda[k - 1] - b.lambda[k] > 1e-6);  // gapped instance

    // permutation: rotate indices by 5
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = (i + 5) % n;
    DenseMatrix pw(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) pw(perm[i], perm[j]) = g.weights(i, j);
    const SpectralBasis pb = spectral_basis(pw, k);

    const DenseMatrix proj = matmul(b.v_k, transpose(b.v_k));
    DenseMatrix pproj(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) pproj(perm[i], perm[j]) = proj(i, j);
    CHECK(max_abs_diff(pproj, matmul(pb.v_k, transpose(pb.v_k))) <= 1e-8);
}

TEST_CASE("generators produce valid graphs over a 100-seed sweep") {
    for (std::uint64_t s = 0; s < 100; ++s) {
        check_graph_invariants(gen_sbm(12, {6, 6}, 0.6, 0.2, s));
        check_graph_invariants(gen_er(10, 0.4, s));
        check_graph_invariants(gen_smallworld(14, 0.25, 0.4, s));
        check_graph_invariants(gen_sensor_knn(10, 3, s));
    }
}

TEST_CASE("same seed reproduces the graph bit for bit") {
    const Graph a = gen_sbm(24, {12, 12}, 0.5, 0.1, 42);
    const Graph b = gen_sbm(24, {12, 12}, 0.5, 0.1, 42);
    CHECK(a.weights.data == b.weights.data);
    const Graph c = gen_smallworld(24, 0.2, 0.5, 42);
    const Graph d = gen_smallworld(24, 0.2, 0.5, 42);
    CHECK(c.weights.data == d.weights.data);
}

TEST_CASE("graph CSV round trip and edge-list import") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "sketchsel_graph_test";
    fs::create_directories(dir);

    const Graph g = gen_sensor_knn(8, 3, 7);
    const std::string mpath = (dir / "w.csv").string();
    write_matrix_csv(mpath, g.weights, {"weight matrix"});
    const Graph loaded = load_graph(mpath);
    CHECK(loaded.weights.data == g.weights.data);

    const std::string epath = (dir / "edges.csv").string();
    write_text_atomic(epath, "# edge list\n0,1,0.5\n2,0,1.25\n");
    const Graph el = load_graph(epath);
    CHECK(el.n == 3);
    CHECK(el.weights(0, 1) == 0.5);
    CHECK(el.weights(1, 0) == 0.5);
    CHECK(el.weights(0, 2) == 1.25);
    CHECK(el.weights(2, 2) == 0.0);

    const std::string bad = (dir / "bad.csv").string();
    write_text_atomic(bad, "0,0,1.0\n");
    CHECK_THROWS_AS(load_graph(bad), ModelError);
    fs::remove_all(dir);
}

TEST_CASE("laplacian shift option") {
    const Graph g = gen_sensor_knn(10, 3, 29);
    const DenseMatrix l = laplacian(g);
    // rows sum to zero and the matrix is PSD with a constant-vector kernel
    for (int i = 0; i < 10; ++i) {
        double row = 0.0;
        for (int j = 0; j < 10; ++j) row += l(i, j);
        CHECK(std::fabs(row) <= 1e-12);
    }
    const SpectralBasis b = spectral_basis(l, 1, EigOrder::Ascending);
    CHECK(std::fabs(b.lambda[0]) <= 1e-10);
    CHECK(shift_operator(g, ShiftKind::Adjacency).data == g.weights.data);
    CHECK(shift_operator(g, ShiftKind::Laplacian).data == l.data);
    CHECK_THROWS_AS(shift_kind_from_string("identity"), ModelError);
}

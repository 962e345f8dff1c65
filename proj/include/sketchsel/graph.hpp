#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sketchsel/linalg.hpp"
#include "sketchsel/matrix.hpp"

namespace sketchsel {

// Undirected weighted graph stored as its symmetric, zero-diagonal,
// nonnegative weight matrix. The weight matrix doubles as the graph shift
// operator throughout the library.
struct Graph {
    int n = 0;
    DenseMatrix weights;  // n x n

    // Validates symmetry, zero diagonal and nonnegativity.
    static Graph from_weights(DenseMatrix w);
};

enum class EigOrder { Descending, Ascending, AbsDescending };

EigOrder eig_order_from_string(const std::string& s);
std::string to_string(EigOrder order);

// Eigenvector basis of a shift operator together with the bandlimiting cut.
// With the default descending order, "low frequencies" of an adjacency shift
// are the columns associated with the largest eigenvalues.
struct SpectralBasis {
    DenseMatrix v;               // n x n, orthonormal columns
    std::vector<double> lambda;  // sorted per `order`
    int k = 0;
    DenseMatrix v_k;             // first k columns of v
};

// Stochastic block model: intra-community edge probability p_in, inter p_out.
Graph gen_sbm(int n, const std::vector<int>& community_sizes, double p_in, double p_out,
              std::uint64_t seed);

// Erdos-Renyi with independent edge probability p_edge.
Graph gen_er(int n, double p_edge, std::uint64_t seed);

// Small-world network: ring lattice with k_ring = max(2, p_e*(n-1) rounded to
// even) neighbors, each lattice edge rewired with probability p_r. Retries up
// to 10 times for connectivity.
Graph gen_smallworld(int n, double p_e, double p_r, std::uint64_t seed);

// Random sensor deployment on [0,1]^2 with Gaussian kernel weights
// w_ij = alpha*exp(-beta*d^2), alpha and beta set so the candidate weights
// span exactly [0.01, 1], sparsified to the union of knn nearest neighbors.
Graph gen_sensor_knn(int n, int knn, std::uint64_t seed);

// The dense normalized kernel of the same deployment, before sparsification.
DenseMatrix gen_sensor_kernel(int n, std::uint64_t seed);

SpectralBasis spectral_basis(const DenseMatrix& shift, int k,
                             EigOrder order = EigOrder::Descending);

// Combinatorial Laplacian D - W, the derived shift-operator option. Its low
// frequencies are the small eigenvalues, so pair it with ascending order.
DenseMatrix laplacian(const Graph& g);

enum class ShiftKind { Adjacency, Laplacian };

ShiftKind shift_kind_from_string(const std::string& s);
std::string to_string(ShiftKind kind);

DenseMatrix shift_operator(const Graph& g, ShiftKind kind);

// Loads either a weight-matrix CSV ('rows,cols' header) or an edge list of
// 'i,j,w' lines (0-indexed, symmetrized).
Graph load_graph(const std::string& path);

}  // namespace sketchsel

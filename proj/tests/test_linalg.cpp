#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "sketchsel/errors.hpp"
#include "sketchsel/linalg.hpp"
#include "sketchsel/matrix.hpp"
#include "test_util.hpp"

using namespace sketchsel;
using testutil::random_matrix;
using testutil::random_spd;
using testutil::random_symmetric;

namespace {

DenseMatrix reconstruct(const EigResult& e) {
    DenseMatrix scaled = e.vectors;
    for (int j = 0; j < scaled.cols; ++j)
        for (int i = 0; i < scaled.rows; ++i) scaled(i, j) *= e.values[j];
    return matmul(scaled, transpose(e.vectors));
}

double orthonormality_defect(const DenseMatrix& v) {
    return max_abs_diff(matmul(transpose(v), v), identity(v.cols));
}

}  // namespace

TEST_CASE("sym_eig diagonal matrix") {
    DenseMatrix a = diag_matrix({2.0, 3.0});
    const EigResult e = sym_eig(a);
    CHECK(e.values[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(e.values[1] == doctest::Approx(2.0).epsilon(1e-12));
    // columns are e2, e1
    CHECK(e.vectors(1, 0) == doctest::Approx(1.0));
    CHECK(e.vectors(0, 1) == doctest::Approx(1.0));
    CHECK(std::fabs(e.vectors(0, 0)) < 1e-12);
}

TEST_CASE("sym_eig 2-node path adjacency") {
    DenseMatrix a = DenseMatrix::from_data(2, 2, {0, 1, 1, 0});
    const EigResult e = sym_eig(a);
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(e.values[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(e.values[1] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(e.vectors(0, 0) == doctest::Approx(r));
    CHECK(e.vectors(1, 0) == doctest::Approx(r));
    CHECK(e.vectors(0, 1) == doctest::Approx(r));
    CHECK(e.vectors(1, 1) == doctest::Approx(-r));
}

TEST_CASE("sym_eig random 8x8 reconstruction") {
    auto rng = Rng::stream(7, "eig8");
    const DenseMatrix a = random_symmetric(8, rng);
    const EigResult e = sym_eig(a);
    CHECK(max_abs_diff(reconstruct(e), a) <= 1e-9);
    CHECK(orthonormality_defect(e.vectors) <= 1e-10 * 8);
}

TEST_CASE("sym_eig reconstruction and orthonormality across sizes") {
    for (int n : {2, 3, 5, 16, 33, 128, 512}) {
        auto rng = Rng::stream(100 + n, "eigsweep");
        const DenseMatrix a = random_symmetric(n, rng);
        const EigResult e = sym_eig(a);
        CHECK(max_abs_diff(reconstruct(e), a) <= 1e-8 * std::max(max_abs(a), 1.0));
        CHECK(orthonormality_defect(e.vectors) <= 1e-10 * n);
        for (std::size_t i = 1; i < e.values.size(); ++i)
            CHECK(e.values[i - 1] >= e.values[i]);
    }
}

TEST_CASE("sym_eig sign convention") {
    auto rng = Rng::stream(5, "eigsign");
    const DenseMatrix a = random_symmetric(12, rng);
    const EigResult e = sym_eig(a);
    for (int j = 0; j < 12; ++j) {
        int imax = 0;
        double vmax = 0.0;
        for (int i = 0; i < 12; ++i)
            if (std::fabs(e.vectors(i, j)) > vmax) {
                vmax = std::fabs(e.vectors(i, j));
                imax = i;
            }
        CHECK(e.vectors(imax, j) > 0.0);
    }
}

TEST_CASE("sym_eig rejects bad inputs") {
    CHECK_THROWS_AS(sym_eig(DenseMatrix(2, 3)), ModelError);
    DenseMatrix asym = DenseMatrix::from_data(2, 2, {1.0, 2.0, 0.5, 1.0});
    CHECK_THROWS_AS(sym_eig(asym), ModelError);
}

TEST_CASE("sym_eig is deterministic bit for bit") {
    auto rng1 = Rng::stream(9, "det");
    auto rng2 = Rng::stream(9, "det");
    const DenseMatrix a = random_symmetric(20, rng1);
    const DenseMatrix b = random_symmetric(20, rng2);
    const EigResult ea = sym_eig(a);
    const EigResult eb = sym_eig(b);
    CHECK(ea.vectors.data == eb.vectors.data);
    CHECK(ea.values == eb.values);
}

TEST_CASE("solve_spd scaled identity") {
    const DenseMatrix a = 2.0 * identity(2);
    const DenseMatrix x = solve_spd(a, identity(2));
    CHECK(max_abs_diff(x, 0.5 * identity(2)) < 1e-14);
}

TEST_CASE("solve_spd identity returns rhs") {
    auto rng = Rng::stream(4, "rhs");
    const DenseMatrix b = random_matrix(5, 3, rng);
    const DenseMatrix x = solve_spd(identity(5), b);
    CHECK(max_abs_diff(x, b) < 1e-14);
}

TEST_CASE("solve_spd random SPD residual") {
    auto rng = Rng::stream(3, "spd6");
    const DenseMatrix a = random_spd(6, rng);
    const DenseMatrix b = random_matrix(6, 4, rng);
    const DenseMatrix x = solve_spd(a, b);
    CHECK(max_abs_diff(matmul(a, x), b) <= 1e-10 * std::max(max_abs(b), 1.0));
}

TEST_CASE("solve_spd reports non-positive pivot index") {
    DenseMatrix a = DenseMatrix::from_data(2, 2, {1.0, 0.0, 0.0, -1.0});
    CHECK_THROWS_WITH_AS(solve_spd(a, identity(2)),
                         doctest::Contains("pivot at index 1"), NumericError);
}

TEST_CASE("solve_spd agrees with pinv for SPD input") {
    auto rng = Rng::stream(21, "spdpinv");
    const DenseMatrix a = random_spd(7, rng);
    const DenseMatrix b = random_matrix(7, 2, rng);
    const DenseMatrix x1 = solve_spd(a, b);
    const DenseMatrix x2 = matmul(pinv(a), b);
    CHECK(max_abs_diff(x1, x2) <= 1e-8);
}

TEST_CASE("inv_sqrt_spd closed forms") {
    CHECK(max_abs_diff(inv_sqrt_spd(4.0 * identity(2)), 0.5 * identity(2)) < 1e-12);
    const DenseMatrix m = inv_sqrt_spd(diag_matrix({1.0, 9.0}));
    CHECK(max_abs_diff(m, diag_matrix({1.0, 1.0 / 3.0})) < 1e-12);
}

TEST_CASE("inv_sqrt_spd defining identity") {
    auto rng = Rng::stream(15, "isqrt");
    const DenseMatrix a = random_spd(5, rng);
    const DenseMatrix m = inv_sqrt_spd(a);
    CHECK(max_abs_diff(matmul(m, matmul(a, m)), identity(5)) <= 1e-8);
    CHECK(max_abs_diff(m, transpose(m)) == 0.0);
}

TEST_CASE("inv_sqrt_spd squares back to the inverse") {
    auto rng = Rng::stream(16, "isqrt2");
    const DenseMatrix a = random_spd(6, rng);
    const DenseMatrix m = inv_sqrt_spd(a);
    // (M M)^{-1} = A  <=>  M M A = I
    const DenseMatrix mma = matmul(matmul(m, m), a);
    CHECK(max_abs_diff(mma, identity(6)) <= 1e-7 * std::max(1.0, max_abs(a)));
}

TEST_CASE("inv_sqrt_spd rejects indefinite input") {
    CHECK_THROWS_AS(inv_sqrt_spd(diag_matrix({1.0, 0.0})), NumericError);
    CHECK_THROWS_AS(inv_sqrt_spd(diag_matrix({1.0, -2.0})), NumericError);
}

TEST_CASE("psd_sqrt of rank-deficient covariance") {
    auto rng = Rng::stream(31, "psdsqrt");
    const DenseMatrix a = testutil::random_psd_rank(6, 2, rng);
    const DenseMatrix r = psd_sqrt(a);
    CHECK(max_abs_diff(matmul(r, r), a) <= 1e-9 * std::max(1.0, max_abs(a)));
}

TEST_CASE("pinv closed forms") {
    CHECK(max_abs_diff(pinv(diag_matrix({2.0, 0.0})), diag_matrix({0.5, 0.0})) < 1e-12);
    const DenseMatrix col = DenseMatrix::from_data(2, 1, {1.0, 1.0});
    const DenseMatrix row = pinv(col);
    REQUIRE(row.rows == 1);
    REQUIRE(row.cols == 2);
    CHECK(row(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(row(0, 1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("pinv satisfies the four Penrose identities on a rank-3 4x6") {
    auto rng = Rng::stream(12, "penrose");
    const DenseMatrix left = random_matrix(4, 3, rng);
    const DenseMatrix right = random_matrix(3, 6, rng);
    const DenseMatrix a = matmul(left, right);  // rank 3
    const DenseMatrix ap = pinv(a);
    CHECK(max_abs_diff(matmul(a, matmul(ap, a)), a) <= 1e-8);
    CHECK(max_abs_diff(matmul(ap, matmul(a, ap)), ap) <= 1e-8);
    const DenseMatrix aap = matmul(a, ap);
    const DenseMatrix apa = matmul(ap, a);
    CHECK(max_abs_diff(aap, transpose(aap)) <= 1e-8);
    CHECK(max_abs_diff(apa, transpose(apa)) <= 1e-8);
}

TEST_CASE("pinv of zero matrix is zero transpose shape") {
    const DenseMatrix z(3, 5);
    const DenseMatrix zp = pinv(z);
    CHECK(zp.rows == 5);
    CHECK(zp.cols == 3);
    CHECK(max_abs(zp) == 0.0);
}

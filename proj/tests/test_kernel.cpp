#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <numeric>
#include <random>

#include "align/kernel.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace align;

namespace {

// Four points on the axes: columns are already zero-mean, so the Gram matrix
// can be written down by hand.
EmbeddingMatrix four_point_x() {
    return testutil::matrix_from({{1, 0}, {-1, 0}, {0, 1}, {0, -1}});
}

EmbeddingMatrix four_point_y() {
    return testutil::matrix_from({{1}, {-1}, {0}, {0}});
}

EmbeddingMatrix apply_transform(const EmbeddingMatrix& x, const Eigen::MatrixXd& q, double c,
                                const Eigen::VectorXd& offset) {
    std::vector<double> values(x.n_samples() * x.n_dims());
    for (std::size_t i = 0; i < x.n_samples(); ++i) {
        Eigen::VectorXd row(x.n_dims());
        for (std::size_t j = 0; j < x.n_dims(); ++j) row(static_cast<Eigen::Index>(j)) = x.at(i, j);
        const Eigen::VectorXd mapped = c * (q.transpose() * row) + offset;
        for (std::size_t j = 0; j < x.n_dims(); ++j) {
            values[i * x.n_dims() + j] = mapped(static_cast<Eigen::Index>(j));
        }
    }
    return EmbeddingMatrix(x.n_samples(), x.n_dims(), std::move(values));
}

Eigen::MatrixXd random_orthogonal(std::mt19937& rng, int d) {
    std::normal_distribution<double> dist(0.0, 1.0);
    Eigen::MatrixXd g(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) g(i, j) = dist(rng);
    }
    return Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
}

}  // namespace

TEST_CASE("gram of identical rows is the zero matrix") {
    const EmbeddingMatrix x = testutil::matrix_from({{2, 3}, {2, 3}, {2, 3}});
    const KernelMatrix k = gram(x);
    CHECK(k.centered);
    for (double v : k.values) CHECK(v == 0.0);
}

TEST_CASE("gram of the four-point fixture") {
    const KernelMatrix k = gram(four_point_x());
    const double expected[4][4] = {
        {1, -1, 0, 0}, {-1, 1, 0, 0}, {0, 0, 1, -1}, {0, 0, -1, 1}};
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            CHECK(k.at(i, j) == doctest::Approx(expected[i][j]).epsilon(1e-12));
        }
    }
}

TEST_CASE("gram is exactly symmetric and doubly centered for random input") {
    std::mt19937 rng(21);
    const EmbeddingMatrix x = testutil::random_matrix(rng, 12, 5);
    const KernelMatrix k = gram(x);
    double max_abs = 0.0;
    for (double v : k.values) max_abs = std::max(max_abs, std::abs(v));
    for (std::size_t i = 0; i < k.n; ++i) {
        double row_sum = 0.0;
        for (std::size_t j = 0; j < k.n; ++j) {
            CHECK(k.at(i, j) == k.at(j, i));
            row_sum += k.at(i, j);
        }
        CHECK(std::abs(row_sum) <= 1e-9 * static_cast<double>(k.n) * max_abs);
    }
}

TEST_CASE("hsic") {
    const KernelMatrix kx = gram(four_point_x());
    const KernelMatrix ky = gram(four_point_y());

    SUBCASE("zero kernel gives zero") {
        KernelMatrix zero;
        zero.n = 4;
        zero.centered = true;
        zero.values.assign(16, 0.0);
        CHECK(hsic(kx, zero) == 0.0);
    }
    SUBCASE("hand trace: tr(KL) = 4, hsic = 4/9") {
        CHECK(hsic(kx, ky) == doctest::Approx(4.0 / 9.0).epsilon(1e-12));
    }
    SUBCASE("self-HSIC is non-negative") {
        std::mt19937 rng(2);
        for (int t = 0; t < 10; ++t) {
            const KernelMatrix k = gram(testutil::random_matrix(rng, 6, 3));
            CHECK(hsic(k, k) >= 0.0);
        }
    }
    SUBCASE("size mismatch") {
        std::mt19937 rng(2);
        const KernelMatrix k6 = gram(testutil::random_matrix(rng, 6, 3));
        CHECK_THROWS_AS(hsic(kx, k6), ValidationError);
    }
}

TEST_CASE("cka") {
    SUBCASE("self-alignment is 1") {
        std::mt19937 rng(31);
        const EmbeddingMatrix x = testutil::random_matrix(rng, 10, 4);
        CHECK(std::abs(cka(x, x).value - 1.0) <= 1e-9);
    }
    SUBCASE("four-point fixture equals 1/sqrt(2)") {
        const double value = cka(four_point_x(), four_point_y()).value;
        CHECK(value == doctest::Approx(0.7071067811865476).epsilon(1e-9));
    }
    SUBCASE("invariant to orthogonal transform, scaling, and offset") {
        std::mt19937 rng(41);
        for (double c : {0.1, 3.0, -2.0}) {
            const EmbeddingMatrix x = testutil::random_matrix(rng, 12, 6);
            const Eigen::MatrixXd q = random_orthogonal(rng, 6);
            Eigen::VectorXd offset(6);
            for (int j = 0; j < 6; ++j) {
                offset(j) = std::uniform_real_distribution<double>(-5, 5)(rng);
            }
            const EmbeddingMatrix y = apply_transform(x, q, c, offset);
            CHECK(std::abs(cka(x, y).value - 1.0) <= 1e-6);
        }
    }
    SUBCASE("constant embeddings are degenerate") {
        const EmbeddingMatrix x = testutil::matrix_from({{1, 1}, {1, 1}, {1, 1}});
        CHECK_THROWS_AS(cka(x, x), DegenerateInput);
    }
    SUBCASE("symmetric in its arguments") {
        std::mt19937 rng(43);
        const EmbeddingMatrix x = testutil::random_matrix(rng, 9, 3);
        const EmbeddingMatrix y = testutil::random_matrix(rng, 9, 5);
        CHECK(std::abs(cka(x, y).value - cka(y, x).value) <= 1e-12);
    }
    SUBCASE("bounded in [0,1]") {
        std::mt19937 rng(47);
        for (int t = 0; t < 20; ++t) {
            const EmbeddingMatrix x = testutil::random_matrix(rng, 8, 3);
            const EmbeddingMatrix y = testutil::random_matrix(rng, 8, 4);
            const double v = cka(x, y).value;
            CHECK(v >= -1e-9);
            CHECK(v <= 1.0 + 1e-9);
        }
    }
}

TEST_CASE("cka_feature_form agrees with the Gram-space route") {
    SUBCASE("four-point fixture") {
        const double value = cka_feature_form(four_point_x(), four_point_y()).value;
        CHECK(value == doctest::Approx(0.7071067811865476).epsilon(1e-9));
    }
    SUBCASE("self-score is 1") {
        std::mt19937 rng(53);
        const EmbeddingMatrix x = testutil::random_matrix(rng, 7, 4);
        CHECK(std::abs(cka_feature_form(x, x).value - 1.0) <= 1e-9);
    }
    SUBCASE("two formulations agree within 1e-8") {
        std::mt19937 rng(59);
        for (int t = 0; t < 30; ++t) {
            const std::size_t n = 4 + rng() % 20;
            const EmbeddingMatrix x = testutil::random_matrix(rng, n, 1 + rng() % 8);
            const EmbeddingMatrix y = testutil::random_matrix(rng, n, 1 + rng() % 8);
            CHECK(std::abs(cka(x, y).value - cka_feature_form(x, y).value) <= 1e-8);
        }
    }
}

TEST_CASE("cknna") {
    SUBCASE("self-alignment is 1") {
        std::mt19937 rng(61);
        const EmbeddingMatrix x = testutil::random_matrix(rng, 12, 4);
        for (int k : {1, 3, 11}) {
            const AlignmentScore s = cknna(x, x, k);
            CHECK(!s.degenerate);
            CHECK(std::abs(s.value - 1.0) <= 1e-9);
        }
    }
    SUBCASE("disjoint neighborhood structure is degenerate") {
        // Kernel top-1 neighborhoods: X pairs {0,1} and {2,3}; Y pairs
        // {0,2} and {1,3}. The mutual mask is empty.
        const EmbeddingMatrix x =
            testutil::matrix_from({{1, 0}, {1, 0.01}, {-1, 0}, {-1, 0.01}});
        const EmbeddingMatrix y =
            testutil::matrix_from({{1, 0}, {-1, 0.01}, {1, 0.01}, {-1, 0}});
        const AlignmentScore s = cknna(x, y, 1);
        CHECK(s.degenerate);
        CHECK(s.value == 0.0);
    }
    SUBCASE("k = n-1 equals the exhaustive off-diagonal formula") {
        std::mt19937 rng(67);
        for (int t = 0; t < 10; ++t) {
            const std::size_t n = 5 + rng() % 12;
            const EmbeddingMatrix x = testutil::random_matrix(rng, n, 3);
            const EmbeddingMatrix y = testutil::random_matrix(rng, n, 4);
            const double direct = cknna(x, y, static_cast<int>(n - 1)).value;
            const double brute = oracle::offdiag_kernel_cosine(gram(x), gram(y));
            CHECK(std::abs(direct - brute) <= 1e-10);
        }
    }
    SUBCASE("k out of range") {
        std::mt19937 rng(71);
        const EmbeddingMatrix x = testutil::random_matrix(rng, 6, 3);
        CHECK_THROWS_AS(cknna(x, x, 0), ValidationError);
        CHECK_THROWS_AS(cknna(x, x, 6), ValidationError);
    }
}

TEST_CASE("scores invariant under identical sample permutation") {
    std::mt19937 rng(73);
    const std::size_t n = 14;
    const EmbeddingMatrix x = testutil::random_matrix(rng, n, 5);
    const EmbeddingMatrix y = testutil::random_matrix(rng, n, 3);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const EmbeddingMatrix px = testutil::permute_rows(x, perm);
    const EmbeddingMatrix py = testutil::permute_rows(y, perm);

    CHECK(std::abs(cka(x, y).value - cka(px, py).value) <= 1e-12);
    CHECK(std::abs(cknna(x, y, 4).value - cknna(px, py, 4).value) <= 1e-12);
}

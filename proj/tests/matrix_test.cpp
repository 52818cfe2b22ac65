#include "robustnet/matrix.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "robustnet/rng.hpp"

using robustnet::Matrix;
using robustnet::Rng;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            m(i, j) = rng.gaussian();
        }
    }
    return m;
}

// independent reference: plain ijk triple loop
Matrix matmul_reference(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows(), b.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double sum = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) {
                sum += a(i, k) * b(k, j);
            }
            out(i, j) = sum;
        }
    }
    return out;
}

void expect_elementwise_near(const Matrix& a, const Matrix& b, double tol) {
    ASSERT_EQ(a.rows(), b.rows());
    ASSERT_EQ(a.cols(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            EXPECT_NEAR(a(i, j), b(i, j), tol) << "at (" << i << "," << j << ")";
        }
    }
}

}  // namespace

TEST(Matrix, RejectsEmptyDimensions) {
    EXPECT_THROW(Matrix(0, 3), std::invalid_argument);
    EXPECT_THROW(Matrix(3, 0), std::invalid_argument);
}

TEST(Matmul, IdentityCase) {
    Matrix eye = Matrix::from_rows({{1, 0}, {0, 1}});
    Matrix a = Matrix::from_rows({{1, 2}, {3, 4}});
    EXPECT_EQ(matmul(eye, a), a);
}

TEST(Matmul, DotProduct) {
    Matrix a = Matrix::from_rows({{1, 2}});
    Matrix b = Matrix::from_rows({{3}, {4}});
    Matrix c = matmul(a, b);
    ASSERT_EQ(c.rows(), 1u);
    ASSERT_EQ(c.cols(), 1u);
    EXPECT_DOUBLE_EQ(c(0, 0), 11.0);
}

TEST(Matmul, MatchesTripleLoopOracle) {
    Rng rng(11);
    Matrix a = random_matrix(5, 4, rng);
    Matrix b = random_matrix(4, 3, rng);
    expect_elementwise_near(matmul(a, b), matmul_reference(a, b), 1e-12);
}

TEST(Matmul, RejectsDimensionMismatchNamingShapes) {
    Matrix a(2, 3);
    Matrix b(4, 2);
    try {
        matmul(a, b);
        FAIL() << "expected invalid_argument";
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("2x3"), std::string::npos);
        EXPECT_NE(msg.find("4x2"), std::string::npos);
    }
}

TEST(Matmul, AssociativityOnRandomTriples) {
    Rng rng(22);
    for (int rep = 0; rep < 10; ++rep) {
        Matrix a = random_matrix(3, 5, rng);
        Matrix b = random_matrix(5, 4, rng);
        Matrix c = random_matrix(4, 2, rng);
        Matrix left = matmul(matmul(a, b), c);
        Matrix right = matmul(a, matmul(b, c));
        for (std::size_t i = 0; i < left.rows(); ++i) {
            for (std::size_t j = 0; j < left.cols(); ++j) {
                const double scale = std::max({1.0, std::fabs(left(i, j)), std::fabs(right(i, j))});
                EXPECT_LE(std::fabs(left(i, j) - right(i, j)) / scale, 1e-9);
            }
        }
    }
}

TEST(Matmul, TransposeProductIdentity) {
    Rng rng(33);
    for (int rep = 0; rep < 10; ++rep) {
        Matrix a = random_matrix(4, 6, rng);
        Matrix b = random_matrix(6, 5, rng);
        expect_elementwise_near(transpose(matmul(a, b)),
                                matmul(transpose(b), transpose(a)), 1e-12);
    }
}

TEST(AddRowBroadcast, AddsBiasToEveryRow) {
    Matrix a(2, 2, 0.0);
    Matrix bias = Matrix::from_rows({{1, 2}});
    Matrix out = add_row_broadcast(a, bias);
    EXPECT_EQ(out, Matrix::from_rows({{1, 2}, {1, 2}}));
}

TEST(AddRowBroadcast, ZeroRowIsIdentity) {
    Rng rng(44);
    Matrix a = random_matrix(3, 4, rng);
    Matrix zero(1, 4, 0.0);
    EXPECT_EQ(add_row_broadcast(a, zero), a);
}

TEST(AddRowBroadcast, MatchesLoopOracle) {
    Rng rng(55);
    Matrix a = random_matrix(3, 4, rng);
    Matrix bias = random_matrix(1, 4, rng);
    Matrix out = add_row_broadcast(a, bias);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            EXPECT_DOUBLE_EQ(out(i, j), a(i, j) + bias(0, j));
        }
    }
}

TEST(AddRowBroadcast, RejectsShapeMismatch) {
    Matrix a(2, 3);
    EXPECT_THROW(add_row_broadcast(a, Matrix(1, 2)), std::invalid_argument);
    EXPECT_THROW(add_row_broadcast(a, Matrix(2, 3)), std::invalid_argument);
}

TEST(Transpose, IsInvolution) {
    Rng rng(66);
    Matrix a = random_matrix(4, 7, rng);
    EXPECT_EQ(transpose(transpose(a)), a);
}

TEST(Transpose, SmallCase) {
    Matrix a = Matrix::from_rows({{1, 2}, {3, 4}});
    EXPECT_EQ(transpose(a), Matrix::from_rows({{1, 3}, {2, 4}}));
}

TEST(Transpose, RowVectorBecomesColumn) {
    Matrix a = Matrix::from_rows({{1, 2, 3, 4, 5}});
    Matrix t = transpose(a);
    ASSERT_EQ(t.rows(), 5u);
    ASSERT_EQ(t.cols(), 1u);
    for (std::size_t i = 0; i < 5; ++i) {
        EXPECT_DOUBLE_EQ(t(i, 0), static_cast<double>(i + 1));
    }
}

TEST(ArgmaxRows, PicksMaximum) {
    Matrix a = Matrix::from_rows({{0.1, 0.9, 0.0}});
    EXPECT_EQ(argmax_rows(a), (std::vector<std::size_t>{1}));
}

TEST(ArgmaxRows, TieGoesToLowestIndex) {
    Matrix a = Matrix::from_rows({{0.5, 0.5}});
    EXPECT_EQ(argmax_rows(a), (std::vector<std::size_t>{0}));
}

TEST(ArgmaxRows, MatchesLinearScanOracle) {
    Rng rng(77);
    Matrix a = random_matrix(100, 9, rng);
    std::vector<std::size_t> got = argmax_rows(a);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        std::size_t best = 0;
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (a(i, j) > a(i, best)) best = j;
        }
        EXPECT_EQ(got[i], best) << "row " << i;
    }
}

TEST(ArgmaxRows, InvariantUnderRowShift) {
    Rng rng(88);
    Matrix a = random_matrix(20, 6, rng);
    Matrix shifted = a;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double c = rng.gaussian() * 10.0;
        for (std::size_t j = 0; j < a.cols(); ++j) {
            shifted(i, j) += c;
        }
    }
    EXPECT_EQ(argmax_rows(a), argmax_rows(shifted));
}

TEST(Rng, SampleIndicesAreDistinctAndInRange) {
    Rng rng(99);
    for (int rep = 0; rep < 50; ++rep) {
        auto idx = rng.sample_indices(149, 20);
        ASSERT_EQ(idx.size(), 20u);
        std::vector<bool> seen(149, false);
        for (auto i : idx) {
            ASSERT_LT(i, 149u);
            EXPECT_FALSE(seen[i]);
            seen[i] = true;
        }
    }
}

TEST(Rng, DeterministicForSeed) {
    Rng a(123), b(123);
    for (int i = 0; i < 1000; ++i) {
        ASSERT_EQ(a.next_u64(), b.next_u64());
    }
    Rng c(123), d(124);
    EXPECT_NE(c.next_u64(), d.next_u64());
}

TEST(Rng, GaussianMomentsRoughlyStandard) {
    Rng rng(7);
    const int n = 100000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double g = rng.gaussian();
        sum += g;
        sumsq += g * g;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    EXPECT_NEAR(mean, 0.0, 0.02);
    EXPECT_NEAR(var, 1.0, 0.02);
}

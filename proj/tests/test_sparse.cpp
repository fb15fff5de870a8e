#include <gtest/gtest.h>

#include <sstream>
#include <unsupported/Eigen/KroneckerProduct>

#include "psdg/matrix_market.hpp"
#include "psdg/sparse.hpp"
#include "support.hpp"

using namespace psdg;
using namespace psdg::testing;

namespace {

SparseMatrix random_sparse(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<std::size_t> r(0, rows - 1), c(0, cols - 1);
  std::uniform_real_distribution<double> v(-1.0, 1.0);
  std::vector<Triplet> t;
  for (std::size_t k = 0; k < 3 * rows; ++k) t.push_back({r(gen), c(gen), v(gen)});
  return SparseMatrix::from_triplets(rows, cols, t);
}

}  // namespace

TEST(Sparse, FromTripletsSumsAndSorts) {
  auto m = SparseMatrix::from_triplets(
      3, 3, {{2, 1, 1.0}, {0, 2, 2.0}, {0, 0, 1.0}, {2, 1, 0.5}, {1, 1, 0.0}, {0, 2, -2.0}});
  EXPECT_EQ(m.nnz(), 2u);
  EXPECT_EQ(m.coeff(0, 0), 1.0);
  EXPECT_EQ(m.coeff(2, 1), 1.5);
  EXPECT_EQ(m.coeff(0, 2), 0.0);
  EXPECT_EQ(m.find(1, 1), nullptr);
  const std::vector<std::size_t> offsets{0, 1, 1, 2};
  EXPECT_TRUE(std::equal(offsets.begin(), offsets.end(), m.row_offsets().begin()));
}

TEST(Sparse, RelativeDropTolerance) {
  const auto m =
      SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {0, 1, 1e-15}, {1, 1, 1e-15}}, 1e-14);
  EXPECT_EQ(m.nnz(), 2u);
  EXPECT_EQ(m.coeff(1, 1), 1e-15);
}

TEST(Sparse, OperationsMatchDense) {
  const auto a = random_sparse(7, 5, 1);
  const auto b = random_sparse(7, 5, 2);
  const Eigen::MatrixXd da = a.to_dense(), db = b.to_dense();
  const auto x = random_vector(5, 3);
  const Eigen::VectorXd y = da * to_eigen(x);
  EXPECT_LE((to_eigen(a * x) - y).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LE((add(a, 2.0, b, -0.5).to_dense() - (2.0 * da - 0.5 * db)).cwiseAbs().maxCoeff(),
            1e-14);
  EXPECT_EQ((a.transpose().to_dense() - da.transpose()).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ((Eigen::MatrixXd(a.to_eigen()) - da).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_NEAR(max_abs_difference(a, b), (da - db).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(a.max_abs(), da.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Sparse, KroneckerMatchesEigen) {
  Eigen::MatrixXd f(2, 3);
  f << 0.5, 0.0, -1.0, 2.0, 1.0, 0.0;
  const auto blk = random_sparse(4, 4, 9);
  const Eigen::MatrixXd want = Eigen::kroneckerProduct(f, blk.to_dense());
  EXPECT_EQ((kronecker(f, blk).to_dense() - want).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Sparse, BlockMatrixAndSymmetry) {
  const auto a = random_sparse(3, 3, 4);
  const auto at = a.transpose();
  const auto m = block_matrix({{&a, nullptr}, {nullptr, &at}});
  EXPECT_EQ(m.rows(), 6u);
  EXPECT_EQ(m.coeff(4, 3), at.coeff(1, 0));
  const auto s = add(a, 1.0, at, 1.0);
  EXPECT_EQ(symmetry_defect(s), 0.0);
  EXPECT_GT(symmetry_defect(a), 0.0);
}

TEST(Sparse, IdentityAndVectorHelpers) {
  const auto id = SparseMatrix::identity(4);
  const std::vector<double> x{1, 2, 3, 4};
  EXPECT_EQ(id * x, x);
  EXPECT_EQ(dot(x, x), 30.0);
  EXPECT_DOUBLE_EQ(norm2(x), std::sqrt(30.0));
}

TEST(MatrixMarket, RoundTripIsExact) {
  const auto a = random_sparse(6, 4, 11);
  std::stringstream buf;
  write_matrix_market(buf, a, "test matrix");
  const auto back = read_matrix_market(buf);
  EXPECT_EQ(back.rows(), 6u);
  EXPECT_EQ(back.cols(), 4u);
  EXPECT_EQ(max_abs_difference(a, back), 0.0);
}

TEST(MatrixMarket, SymmetricAndPattern) {
  std::istringstream sym(
      "%%MatrixMarket matrix coordinate real symmetric\n% c\n3 3 3\n1 1 2.0\n2 1 -1.0\n3 3 4\n");
  const auto s = read_matrix_market(sym);
  EXPECT_EQ(s.coeff(0, 1), -1.0);
  EXPECT_EQ(s.coeff(1, 0), -1.0);
  EXPECT_EQ(s.nnz(), 4u);
  std::istringstream pat("%%MatrixMarket matrix coordinate pattern general\n2 2 2\n1 2\n2 1\n");
  const auto p = read_matrix_market(pat);
  EXPECT_EQ(p.coeff(0, 1), 1.0);
}

TEST(MatrixMarket, RejectsMalformed) {
  std::istringstream dense("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n");
  EXPECT_THROW(read_matrix_market(dense), std::invalid_argument);
  std::istringstream range("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n");
  EXPECT_THROW(read_matrix_market(range), std::invalid_argument);
  std::istringstream shortfile("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n");
  EXPECT_THROW(read_matrix_market(shortfile), std::invalid_argument);
}

#include <gtest/gtest.h>

#include <cmath>

#include "psdg/lanczos.hpp"
#include "support.hpp"

using namespace psdg;
using namespace psdg::testing;

namespace {

SparseMatrix diagonal(std::size_t n) {
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < n; ++i) t.push_back({i, i, static_cast<double>(i + 1)});
  return SparseMatrix::from_triplets(n, n, t);
}

}  // namespace

TEST(Lanczos, DiagonalOperator) {
  const auto d = diagonal(10);
  const auto est = estimate_condition_number(as_operator(d), {}, 10);
  EXPECT_TRUE(est.converged);
  EXPECT_NEAR(est.condition, 10.0, 0.1);
  const auto via_matrix = estimate_condition_number(d, nullptr, {}, ConditionMethod::Lanczos);
  EXPECT_NEAR(via_matrix.condition, 10.0, 0.1);
  EXPECT_NEAR(dense_condition_number(d).condition, 10.0, 1e-12);
}

TEST(Lanczos, GeneralisedPencil) {
  // K = diag(1..6), M = diag(2): eigenvalues (i+1)/2.
  const auto k = diagonal(6);
  const auto inv = [](std::span<const double> r, std::span<double> z) {
    for (std::size_t i = 0; i < r.size(); ++i) z[i] = r[i] / 2.0;
  };
  const auto ritz = lanczos_extremes(as_operator(k), inv, 6, LanczosTarget::Both);
  EXPECT_NEAR(ritz.largest, 3.0, 1e-10);
  EXPECT_NEAR(ritz.smallest, 0.5, 1e-10);
}

TEST(Lanczos, AgreesWithDenseOnSystem) {
  const DGSpace s(unit_square(4), 1);
  const auto sys = assemble_system(s);
  const DofLayout layout{s.num_elements(), s.local_dim()};
  LanczosOptions opt;
  opt.tol = 1e-8;
  for (double dt : {1e-2, 1e-6}) {
    const auto star = build_system(sys.M, sys.A, dt);
    const auto exact = dense_condition_number(star);
    const auto est = estimate_condition_number(star, nullptr, opt, ConditionMethod::Lanczos);
    EXPECT_TRUE(est.converged);
    EXPECT_NEAR(est.condition / exact.condition, 1.0, 1e-4) << dt;
    const BlockJacobi cbj(star, layout, BlockLayout::Collective);
    const auto pexact = dense_condition_number(star, &cbj);
    const auto pest = estimate_condition_number(star, &cbj, opt, ConditionMethod::Lanczos);
    EXPECT_NEAR(pest.condition / pexact.condition, 1.0, 1e-4) << dt;
    const auto fwd = estimate_condition_number(
        as_operator(star),
        [&cbj](std::span<const double> r, std::span<double> z) { cbj.apply(r, z); },
        star.rows(), opt);
    EXPECT_NEAR(fwd.lambda_max / pexact.lambda_max, 1.0, 1e-4);
  }
}

TEST(Lanczos, SingleElementCollectiveIsPerfect) {
  const DGSpace s(unit_square(1), 3);
  const auto sys = assemble_system(s);
  const auto star = build_system(sys.M, sys.A, 1e-6);
  const BlockJacobi cbj(star, {1, s.local_dim()}, BlockLayout::Collective);
  EXPECT_NEAR(estimate_condition_number(star, &cbj).condition, 1.0, 1e-6);
  EXPECT_NEAR(estimate_condition_number(star, &cbj, {}, ConditionMethod::Lanczos).condition, 1.0,
              1e-6);
}

TEST(Lanczos, ConditionScalesInverselyWithDt) {
  const DGSpace s(unit_square(4), 2);
  const auto sys = assemble_system(s);
  const DofLayout layout{s.num_elements(), s.local_dim()};
  std::vector<double> raw, pre;
  for (double dt : {1e-9, 1e-10}) {
    const auto star = build_system(sys.M, sys.A, dt);
    const BlockJacobi cbj(star, layout, BlockLayout::Collective);
    raw.push_back(estimate_condition_number(star, nullptr, {}, ConditionMethod::Lanczos).condition);
    pre.push_back(estimate_condition_number(star, &cbj, {}, ConditionMethod::Lanczos).condition);
  }
  EXPECT_GE(raw[1] / raw[0], 8.0);
  EXPECT_LE(raw[1] / raw[0], 12.0);
  EXPECT_NEAR(pre[1] / pre[0], 1.0, 0.05);
}

TEST(Lanczos, IterationCapFlagsEstimate) {
  const DGSpace s(unit_square(4), 2);
  const auto sys = assemble_system(s);
  const auto star = build_system(sys.M, sys.A, 1e-3);
  LanczosOptions opt;
  opt.max_iterations = 3;
  const auto est = estimate_condition_number(star, nullptr, opt, ConditionMethod::Lanczos);
  EXPECT_FALSE(est.converged);
  EXPECT_LE(est.iterations, 6u);
}

TEST(Lanczos, Deterministic) {
  const auto d = diagonal(50);
  const auto a = estimate_condition_number(d, nullptr, {}, ConditionMethod::Lanczos);
  const auto b = estimate_condition_number(d, nullptr, {}, ConditionMethod::Lanczos);
  EXPECT_EQ(a.condition, b.condition);
  EXPECT_EQ(a.iterations, b.iterations);
}

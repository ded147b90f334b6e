#include <gtest/gtest.h>

#include <random>

#include "isoembed/embed.hpp"
#include "isoembed/linalg.hpp"
#include "isoembed/split.hpp"
#include "support.hpp"

using namespace isoembed;
using isoembed::testing::random_matrix;
using isoembed::testing::random_rational_vec;
using isoembed::testing::random_vec;

namespace {

mink_vector<double> mv(std::initializer_list<double> c) { return mink_vector<double>(vec<double>(c)); }
mink_vector<rational> mr(std::initializer_list<int> c) {
  vec<rational> v;
  for (int x : c) v.push_back(x);
  return mink_vector<rational>(v);
}

}  // namespace

TEST(MinkInner, BasisVectors) {
  EXPECT_EQ(mink_inner(mv({1, 0, 0, 0}), mv({1, 0, 0, 0})), 1.0);
  EXPECT_EQ(mink_inner(mv({0, 0, 1, 0}), mv({0, 0, 1, 0})), -1.0);
}

TEST(MinkInner, HandExpandedTwoTermSum) { EXPECT_EQ(mink_inner(mr({1, 1}), mr({1, -1})), rational(2)); }

TEST(MinkInner, DimensionMismatchThrows) {
  EXPECT_THROW(mink_inner(mv({1, 0}), mv({1, 0, 0, 0})), dimension_mismatch);
  EXPECT_THROW(mink_vector<double>(vec<double>{1, 2, 3}), dimension_mismatch);
}

TEST(SquaredLength, Examples) {
  std::mt19937_64 rng(1);
  const mink_vector<rational> u(random_rational_vec(6, rng));
  EXPECT_EQ(squared_length(u, u), rational(0));
  EXPECT_EQ(squared_length(mr({1, 1}), mr({0, 0})), rational(0));
  EXPECT_EQ(squared_length(mr({2, 0}), mr({0, 0})), rational(4));
}

TEST(StandardSplit, OneDimensionalSubspaces) {
  const auto s = standard_split<rational>(1);
  EXPECT_EQ(s.sigma_point({rational(1)}), mr({1, 1}));
  EXPECT_EQ(s.delta_point({rational(1)}), mr({1, -1}));
}

TEST(StandardSplit, BasisVectorsAreIsotropic) {
  for (std::size_t d = 1; d <= 6; ++d) {
    const auto s = standard_split<rational>(d);
    for (std::size_t i = 0; i < d; ++i) {
      vec<rational> e(d, 0);
      e[i] = 1;
      const auto h = s.sigma_point(e), k = s.delta_point(e);
      EXPECT_EQ(mink_inner(h, h), rational(0));
      EXPECT_EQ(mink_inner(k, k), rational(0));
    }
  }
}

TEST(StandardSplit, ProjectionsSumToIdentity) {
  std::mt19937_64 rng(2);
  for (std::size_t d = 1; d <= 6; ++d) {
    const auto s = standard_split<rational>(d);
    const mink_vector<rational> v(random_rational_vec(2 * d, rng));
    EXPECT_EQ(project_delta(s, v) + project_sigma(s, v), v);
  }
}

TEST(ProjectDelta, HalfFormula) {
  const auto s = standard_split<rational>(1);
  const auto p = project_delta(s, mr({1, 0}));
  EXPECT_EQ(p.coords()[0], rational(1, 2));
  EXPECT_EQ(p.coords()[1], rational(-1, 2));
}

TEST(ProjectDelta, Idempotent) {
  const auto s = standard_split<rational>(2);
  const auto v = s.delta_point({rational(3), rational(-5, 2)});
  EXPECT_EQ(project_delta(s, v), v);
  EXPECT_EQ(project_sigma(s, v), mink_vector<rational>(2));
}

TEST(ProjectDelta, SplittingIdentityRational) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t d = 1 + trial % 6;
    const auto s = standard_split<rational>(d);
    const mink_vector<rational> v(random_rational_vec(2 * d, rng));
    EXPECT_EQ(mink_inner(v, v), 2 * mink_inner(project_delta(s, v), project_sigma(s, v)));
  }
}

TEST(DeltaPoint, Examples) {
  const auto s = standard_split<rational>(2);
  EXPECT_EQ(delta_point(s, vec<rational>{0, 0}), mink_vector<rational>(2));
  const auto r = delta_point(s, vec<rational>{1, 2});
  EXPECT_EQ(r, mr({1, 2, -1, -2}));
  EXPECT_EQ(mink_inner(r, r), rational(0));
  EXPECT_EQ(project_delta(s, r), r);
  EXPECT_THROW(delta_point(s, vec<rational>{1}), dimension_mismatch);
}

TEST(MomentCurve, Examples) {
  EXPECT_EQ(moment_curve_point(rational(1), 3), (vec<rational>{1, 1, 1}));
  EXPECT_EQ(moment_curve_point(rational(2), 3), (vec<rational>{2, 4, 8}));
  for (std::size_t d = 1; d <= 8; ++d) {
    std::vector<vec<rational>> pts;
    for (std::size_t t = 1; t <= d + 1; ++t) pts.push_back(moment_curve_point(rational(t), d));
    EXPECT_EQ(affine_rank(pts), d);
  }
}

TEST(SolvePairing, IdentityRows) {
  std::vector<vec<rational>> rows{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  const vec<rational> b{3, rational(-1, 2), 7};
  EXPECT_EQ(solve_pairing_system(rows, b, 3), b);
}

TEST(SolvePairing, MinNormSingleRow) {
  EXPECT_EQ(solve_pairing_system<rational>({{1, 0}}, {3}, 2), (vec<rational>{3, 0}));
  const auto x = solve_pairing_system<double>({{1, 0}}, {3}, 2);
  EXPECT_NEAR(x[0], 3, 1e-15);
  EXPECT_NEAR(x[1], 0, 1e-15);
}

TEST(SolvePairing, EmptySystem) {
  EXPECT_EQ(solve_pairing_system<rational>({}, {}, 4), vec<rational>(4, 0));
  EXPECT_EQ(solve_pairing_system<double>({}, {}, 2), vec<double>(2, 0.0));
}

TEST(SolvePairing, RankDeficientNamesRow) {
  try {
    solve_pairing_system<rational>({{1, 2, 0}, {0, 1, 1}, {2, 4, 0}}, {1, 1, 2}, 3);
    FAIL();
  } catch (const rank_deficient& e) {
    EXPECT_EQ(e.row(), 2u);
  }
  EXPECT_THROW(solve_pairing_system<double>({{1, 2}, {2, 4}}, {1, 1}, 2), rank_deficient);
}

// Substitution, and minimality: the solution lies in the row space, so adding
// any null-space direction can only make it longer.
TEST(SolvePairing, SubstitutionAndMinimality) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 2 + trial % 7, k = 1 + trial % d;
    std::vector<vec<double>> rows;
    for (std::size_t i = 0; i < k; ++i) rows.push_back(random_vec(d, rng));
    const auto rhs = random_vec(k, rng);
    const auto x = solve_pairing_system(rows, rhs, d);
    for (std::size_t i = 0; i < k; ++i) EXPECT_NEAR(dot(rows[i], x), rhs[i], 1e-10 * std::max(1.0, std::fabs(rhs[i])));
    for (int n = 0; n < 5; ++n) {
      auto z = random_vec(d, rng);
      // remove the row-space component of z with an exact-enough projection
      const auto c = solve_pairing_system(rows, [&] {
        vec<double> r;
        for (const auto& row : rows) r.push_back(dot(row, z));
        return r;
      }(), d);
      z = z - c;
      EXPECT_LE(norm2(x), norm2(x + z) + 1e-12);
    }
  }

  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t d = 2 + trial % 5, k = 1 + trial % d;
    std::vector<vec<rational>> rows;
    for (std::size_t i = 0; i < k; ++i) rows.push_back(random_rational_vec(d, rng));
    const auto rhs = random_rational_vec(k, rng);
    try {
      const auto x = solve_pairing_system(rows, rhs, d);
      for (std::size_t i = 0; i < k; ++i) EXPECT_EQ(dot(rows[i], x), rhs[i]);
    } catch (const rank_deficient&) {
      EXPECT_LT(affine_rank([&] {
                  auto pts = rows;
                  pts.push_back(vec<rational>(d, 0));
                  return pts;
                }()),
                k);
    }
  }
}

TEST(QL, Identity) {
  const auto r = ql_decompose(matrix<double>::identity(4));
  EXPECT_EQ(r.q, matrix<double>::identity(4));
  EXPECT_EQ(r.l, matrix<double>::identity(4));
}

TEST(QL, SignNormalization) {
  matrix<double> a(1, 1);
  a(0, 0) = -2;
  const auto r = ql_decompose(a);
  EXPECT_EQ(r.q(0, 0), -1.0);
  EXPECT_EQ(r.l(0, 0), 2.0);
}

TEST(QL, RandomFullRankProperties) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 1 + trial % 16;
    const auto a = random_matrix(d, d, rng);
    const auto r = ql_decompose(a);
    EXPECT_LE(max_abs(a - r.q * r.l), 1e-10 * max_abs(a));
    EXPECT_LE(max_abs(r.q.transpose() * r.q - matrix<double>::identity(d)), 1e-10);
    for (std::size_t i = 0; i < d; ++i) {
      EXPECT_GT(r.l(i, i), 0.0);
      for (std::size_t j = i + 1; j < d; ++j) EXPECT_EQ(r.l(i, j), 0.0);
    }
  }
}

TEST(QL, RankDeficientLeadingColumns) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t d = 3 + trial % 8, m = 1 + trial % (d - 1);
    auto a = random_matrix(d, d, rng);
    // first d - m columns become combinations of the last m
    for (std::size_t j = 0; j + m < d; ++j) {
      const auto coef = random_vec(m, rng);
      for (std::size_t i = 0; i < d; ++i) {
        a(i, j) = 0;
        for (std::size_t t = 0; t < m; ++t) a(i, j) += coef[t] * a(i, d - m + t);
      }
    }
    const auto r = ql_decompose(a);
    EXPECT_LE(max_abs(a - r.q * r.l), 1e-10 * max_abs(a));
    EXPECT_LE(max_abs(r.q.transpose() * r.q - matrix<double>::identity(d)), 1e-10);
    for (std::size_t i = 0; i < d; ++i) EXPECT_GE(r.l(i, i), 0.0);
    for (std::size_t i = d - m; i < d; ++i) EXPECT_GT(r.l(i, i), 0.0);
  }
}

TEST(AffineRank, Examples) {
  EXPECT_EQ(affine_rank(std::vector<vec<rational>>{{3, 4}}), 0u);
  EXPECT_EQ(affine_rank(std::vector<vec<rational>>{{0, 0}, {1, 1}, {3, 3}}), 1u);
  EXPECT_THROW(affine_rank(std::vector<vec<rational>>{}), precondition_error);
}

TEST(AffineRank, AgreesWithMinorOracle) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> small(-1, 1);
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t dim = 1 + trial % 4, count = 1 + (trial / 4) % 5;
    std::vector<vec<rational>> pts;
    for (std::size_t i = 0; i < count; ++i) {
      vec<rational> p(dim);
      for (auto& x : p) x = small(rng);
      pts.push_back(p);
    }
    const auto expected = isoembed::testing::affine_rank_by_minors(pts);
    EXPECT_EQ(affine_rank(pts), expected);
    std::vector<vec<double>> fp;
    for (const auto& p : pts) {
      vec<double> q;
      for (const auto& x : p) q.push_back(rational_to_double(x));
      fp.push_back(q);
    }
    EXPECT_EQ(affine_rank(fp), expected);
  }
}

TEST(GeneralSplit, LorentzInvarianceAndIsotropy) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t d = 1 + trial % 8;
    std::vector<mink_vector<double>> h;
    for (std::size_t i = 0; i <= d; ++i) h.emplace_back(random_vec(2 * d, rng));
    const auto split = isotropic_pair_for(h, d).split;
    for (int s = 0; s < 5; ++s) {
      const mink_vector<double> u(random_vec(2 * d, rng)), v(random_vec(2 * d, rng));
      EXPECT_NEAR(mink_inner(split.to_standard(u), split.to_standard(v)), mink_inner(u, v), 1e-10);
      EXPECT_NEAR(mink_inner(split.from_standard(u), split.from_standard(v)), mink_inner(u, v), 1e-10);
      const auto pd = split.project_delta(u), ps = split.project_sigma(u);
      const double n2 = dot(u.coords(), u.coords());
      EXPECT_NEAR(mink_inner(pd, pd), 0.0, 1e-10 * n2);
      EXPECT_NEAR(mink_inner(ps, ps), 0.0, 1e-10 * n2);
      EXPECT_NEAR(mink_inner(u, u), 2 * mink_inner(pd, ps), 1e-10 * n2);
      for (std::size_t i = 0; i < 2 * d; ++i) EXPECT_NEAR((pd + ps).coords()[i], u.coords()[i], 1e-12);
    }
  }
}

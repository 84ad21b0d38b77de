/*
 * Copyright 2026 The ORVOS Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "orvos/errors.hpp"
#include "orvos/reservoir.hpp"

namespace orvos {
namespace {

using testing::warped_oracle;

TEST(DenseToSparse, HandDerivedSets) {
  EXPECT_EQ(dense_to_sparse_indices(3, 5), (IndexSet{1, 2, 3}));
  EXPECT_EQ(dense_to_sparse_indices(10, 5), (IndexSet{1, 4, 7, 9, 10}));
  EXPECT_EQ(dense_to_sparse_indices(7, 6), (IndexSet{1, 3, 4, 6, 7}));
}

TEST(DenseToSparse, FloatingEvaluationOfTheWarpAgreesOnSmallCases) {
  // Plain double evaluation is exact enough here; it cross-checks the oracle.
  for (std::size_t n = 1; n <= 60; ++n) {
    for (std::size_t n_max = 2; n_max <= 12; ++n_max) {
      if (n <= n_max) continue;
      std::set<std::size_t> s;
      for (std::size_t k = 0; k < n_max; ++k) {
        const double u = static_cast<double>(k) / static_cast<double>(n_max - 1);
        const double phi = 1.0 - (1.0 - u) * (1.0 - u);
        s.insert(static_cast<std::size_t>(std::floor(phi * static_cast<double>(n - 1) + 1e-9)) + 1);
      }
      EXPECT_EQ(IndexSet(s.begin(), s.end()), warped_oracle(n, n_max)) << n << "," << n_max;
    }
  }
}

TEST(DenseToSparse, InvalidArguments) {
  EXPECT_THROW(dense_to_sparse_indices(5, 1), InvalidArgument);
  EXPECT_THROW(dense_to_sparse_indices(0, 4), InvalidArgument);
  EXPECT_THROW(uniform_indices(5, 0), InvalidArgument);
}

TEST(DenseToSparse, SweepProperties) {
  // The acceptance suite sweeps the full range; this covers a slice quickly.
  for (std::size_t n = 1; n <= 1500; ++n) {
    for (std::size_t n_max = 2; n_max <= 48; ++n_max) {
      const IndexSet got = dense_to_sparse_indices(n, n_max);
      ASSERT_EQ(got, warped_oracle(n, n_max)) << n << "," << n_max;
      if (n <= n_max) continue;
      ASSERT_EQ(got.front(), 1u);
      ASSERT_EQ(got.back(), n);
      ASSERT_LE(got.size(), n_max);
      for (std::size_t i = 2; i < got.size(); ++i) {
        ASSERT_LE(got[i] - got[i - 1], got[i - 1] - got[i - 2] + 1) << n << "," << n_max;
      }
      if (n_max >= 4) {
        ASSERT_GE(testing::recency_margin(testing::warped_grid(n, n_max), n), 0) << n << "," << n_max;
      }
    }
  }
}

TEST(DenseToSparse, RecencyDensityCountsGridPoints) {
  // Collapsed duplicates sit in the dense recent end, so the distinct set can
  // lean early even though the grid itself leans late. (7, 6) is the one such
  // case with n_max <= 256 and n <= 10000.
  EXPECT_EQ(testing::warped_grid(7, 6), (std::vector<std::size_t>{1, 3, 4, 6, 6, 7}));
  EXPECT_EQ(testing::recency_margin(testing::warped_grid(7, 6), 7), 0);
  EXPECT_EQ(testing::recency_margin(dense_to_sparse_indices(7, 6), 7), -1);
  EXPECT_EQ(testing::recency_margin(dense_to_sparse_indices(10, 5), 10), 1);
}

TEST(UniformIndices, Examples) {
  EXPECT_EQ(uniform_indices(10, 5), (IndexSet{1, 3, 5, 7, 10}));
  EXPECT_EQ(uniform_indices(4, 4), (IndexSet{1, 2, 3, 4}));
  for (std::size_t n = 2; n <= 300; ++n) {
    for (std::size_t n_max = 2; n_max < n; n_max += 3) {
      const IndexSet s = uniform_indices(n, n_max);
      EXPECT_EQ(s.front(), 1u);
      EXPECT_EQ(s.back(), n);
      EXPECT_LE(s.size(), n_max);
    }
  }
  EXPECT_EQ(sample_indices(Retention::kUniform, 10, 5), uniform_indices(10, 5));
  EXPECT_EQ(sample_indices(Retention::kDenseToSparse, 10, 5), dense_to_sparse_indices(10, 5));
}

Vector token(double v, std::size_t d = 3) { return Vector(d, v); }

TEST(Reservoir, WriteAssignsConsecutiveTimestamps) {
  TokenReservoir r(5);
  EXPECT_EQ(r.read_history().rows(), 0u);
  r.write(token(1));
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r.entries()[0].timestamp, 1u);
  for (int i = 2; i <= 6; ++i) r.write(token(i));
  EXPECT_EQ(r.size(), 6u);
  EXPECT_EQ(r.entries().back().timestamp, 6u);
  EXPECT_THROW(r.write(token(0, 4)), ShapeError);
}

TEST(Reservoir, ReadsSampledRowsInOrder) {
  TokenReservoir r(5);
  for (int i = 1; i <= 10; ++i) r.write(token(i));
  const TokenMatrix h = r.read_history();
  ASSERT_EQ(h.rows(), 5u);
  const double expected[] = {1, 4, 7, 9, 10};
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(h(i, 0), expected[i]);
  EXPECT_EQ(r.history_indices(), (IndexSet{1, 4, 7, 9, 10}));

  TokenReservoir small(8);
  for (int i = 1; i <= 4; ++i) small.write(token(i));
  const TokenMatrix all = small.read_history();
  ASSERT_EQ(all.rows(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(all(i, 2), static_cast<double>(i + 1));
}

TEST(Reservoir, ThousandWritesStayBoundedAtRead) {
  TokenReservoir r(32);
  for (int i = 1; i <= 1000; ++i) r.write(token(i));
  EXPECT_EQ(r.size(), 1000u);
  EXPECT_LE(r.read_history().rows(), 32u);
}

TEST(Reservoir, AppendOnlyAndDeterministic) {
  TokenReservoir a(4), b(4);
  for (int i = 1; i <= 3; ++i) a.write(token(i * 0.5));
  const auto before = a.entries();
  for (int i = 4; i <= 9; ++i) a.write(token(i * 0.5));
  for (std::size_t i = 0; i < before.size(); ++i) EXPECT_EQ(a.entries()[i], before[i]);
  for (int i = 1; i <= 9; ++i) b.write(token(i * 0.5));
  EXPECT_EQ(a.read_history(), b.read_history());
}

TEST(Reservoir, UniformRetentionReadsUniformRows) {
  TokenReservoir r(5, Retention::kUniform);
  for (int i = 1; i <= 10; ++i) r.write(token(i));
  EXPECT_EQ(r.history_indices(), (IndexSet{1, 3, 5, 7, 10}));
}

TEST(Reservoir, CompactedModeStaysBounded) {
  TokenReservoir r(4, Retention::kDenseToSparse, true);
  for (int i = 1; i <= 50; ++i) r.write(token(i));
  EXPECT_LE(r.size(), 4u);
  EXPECT_EQ(r.steps(), 50u);
  const IndexSet idx = r.history_indices();
  EXPECT_EQ(idx.back(), 50u);
  EXPECT_TRUE(std::is_sorted(idx.begin(), idx.end()));
  const TokenMatrix h = r.read_history();
  for (std::size_t i = 0; i < idx.size(); ++i) EXPECT_EQ(h(i, 0), static_cast<double>(idx[i]));
}

TEST(Reservoir, DebugDump) {
  TokenReservoir r(3);
  r.write(Vector{1.5, -2.0});
  r.write(Vector{0.0, 3.0});
  std::ostringstream os;
  r.dump(os);
  EXPECT_EQ(os.str(), "t=1 [1.5, -2]\nt=2 [0, 3]\n");
}

}  // namespace
}  // namespace orvos

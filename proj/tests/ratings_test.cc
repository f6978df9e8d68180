// Copyright 2026 The matspace Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "matspace/ratings.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "matspace/error.h"
#include "test_util.h"

namespace matspace {
namespace {

using testing::uniform;

RatingsTable table_of(const std::string& id, int attr, std::vector<int> ratings) {
  RatingsTable t;
  for (std::size_t i = 0; i < ratings.size(); ++i) {
    t.add({id, "p" + std::to_string(i), attr, ratings[i]});
  }
  return t;
}

// Textbook sums, kept separate from the library's centred accumulation.
double pearson_oracle(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  long double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += static_cast<long double>(x[i]) * x[i];
    syy += static_cast<long double>(y[i]) * y[i];
    sxy += static_cast<long double>(x[i]) * y[i];
  }
  const long double num = n * sxy - sx * sy;
  const long double den = std::sqrt(n * sxx - sx * sx) * std::sqrt(n * syy - sy * sy);
  return static_cast<double>(num / den);
}

std::vector<double> rank_oracle(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double less = 0, equal = 0;
    for (double w : v) {
      less += w < v[i];
      equal += w == v[i];
    }
    r[i] = less + (equal + 1.0) / 2.0;
  }
  return r;
}

TEST(Attributes, Registry) {
  const auto& names = attribute_names();
  ASSERT_EQ(names.size(), 14u);
  EXPECT_EQ(names[0], "plastic-like");
  EXPECT_EQ(names[6], "hard");
  EXPECT_EQ(names[13], "sharpness of reflections");
  EXPECT_EQ(attribute_id("Tint_of_Reflections").index, 11);
  EXPECT_EQ(attribute_id("rubber like").index, 1);
  EXPECT_EQ(attribute_id(9).name, "bright");
  EXPECT_FALSE(find_attribute("shiny").has_value());
  EXPECT_THROW(attribute_id("shiny"), Error);
  EXPECT_THROW(attribute_id(14), Error);
}

TEST(Ratings, HeaderOnlyIsEmpty) {
  std::istringstream in("brdf_id,participant_id,attribute,rating\n");
  EXPECT_TRUE(parse_ratings(in).empty());
}

TEST(Ratings, RejectsOutOfRangeWithLineNumber) {
  std::istringstream in(
      "brdf_id,participant_id,attribute,rating\n"
      "a,p1,glossy,3\n"
      "a,p2,glossy,6\n");
  try {
    parse_ratings(in);
    FAIL() << "accepted rating 6";
  } catch (const RowError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Ratings, RejectsUnknownAttributeAndBadHeader) {
  std::istringstream unknown(
      "brdf_id,participant_id,attribute,rating\na,p1,shiny,3\n");
  EXPECT_THROW(parse_ratings(unknown), SchemaError);
  std::istringstream header("id,who,attr,score\n");
  EXPECT_THROW(parse_ratings(header), SchemaError);
  std::istringstream text(
      "brdf_id,participant_id,attribute,rating\na,p1,matte,x\n");
  EXPECT_THROW(parse_ratings(text), RowError);
}

TEST(Ratings, CsvRoundTripAndFullStudySize) {
  std::vector<std::string> ids;
  for (int i = 0; i < 400; ++i) ids.push_back("b" + std::to_string(i));
  const Eigen::MatrixXd scores = Eigen::MatrixXd::Constant(400, 14, 0.5);
  const RatingsTable t = simulate_ratings(ids, scores, 10, 0.2, 3);
  EXPECT_EQ(t.size(), 56000u);
  std::stringstream buf;
  write_ratings(t, buf);
  const RatingsTable back = parse_ratings(buf);
  ASSERT_EQ(back.size(), t.size());
  for (std::size_t i = 0; i < t.size(); i += 997) {
    EXPECT_EQ(back.records()[i].brdf_id, t.records()[i].brdf_id);
    EXPECT_EQ(back.records()[i].attribute, t.records()[i].attribute);
    EXPECT_EQ(back.records()[i].rating, t.records()[i].rating);
  }
}

TEST(Mos, Normalisation) {
  for (int k = 1; k <= 5; ++k) {
    EXPECT_EQ(mos(table_of("x", 3, {k, k, k}), "x", attribute_id(3)),
              (k - 1) / 4.0);
  }
  EXPECT_EQ(mos(table_of("x", 0, {1, 2, 3, 4, 5}), "x", attribute_id(0)), 0.5);
  EXPECT_THROW(mos(table_of("x", 0, {3}), "x", attribute_id(1)), MissingDataError);
  EXPECT_THROW(mos(table_of("x", 0, {3}), "y", attribute_id(0)), MissingDataError);
}

TEST(Mos, PermutationInvariant) {
  std::mt19937_64 rng(8);
  std::vector<int> r(37);
  for (auto& v : r) v = 1 + static_cast<int>(rng() % 5);
  const double a = mos(table_of("x", 2, r), "x", attribute_id(2));
  for (int t = 0; t < 10; ++t) {
    std::shuffle(r.begin(), r.end(), rng);
    EXPECT_EQ(mos(table_of("x", 2, r), "x", attribute_id(2)), a);
  }
}

TEST(Mos, MatrixHasNanForMissing) {
  RatingsTable t = table_of("a", 0, {5});
  t.add({"b", "p", 1, 1});
  const MosMatrix m = mos_matrix(t);
  ASSERT_EQ(m.brdf_ids, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(m.values(0, 0), 1.0);
  EXPECT_TRUE(std::isnan(m.values(0, 1)));
  EXPECT_EQ(m.values(1, 1), 0.0);
  EXPECT_EQ(*m.row("b"), 1u);
  EXPECT_FALSE(m.row("c"));
}

TEST(Correlation, PearsonAndSpearmanOracles) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> x(20), y(20);
    for (int i = 0; i < 20; ++i) {
      // Rounded values so ties occur for the rank test.
      x[i] = std::round(uniform(rng, 0, 8)) / 8;
      y[i] = 0.5 * x[i] + uniform(rng, -0.3, 0.3);
    }
    EXPECT_NEAR(pearson(x, y), pearson_oracle(x, y), 1e-12);
    EXPECT_NEAR(spearman(x, y), pearson_oracle(rank_oracle(x), rank_oracle(y)), 1e-12);
    EXPECT_EQ(pearson(x, y), pearson(y, x));
  }
}

TEST(Correlation, ExactCases) {
  const std::vector<double> y = {0.1, 0.4, 0.35, 0.9, 0.0};
  std::vector<double> anti(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) anti[i] = 1.0 - y[i];
  EXPECT_EQ(pearson(y, y), 1.0);
  EXPECT_EQ(pearson(y, anti), -1.0);
  EXPECT_EQ(spearman(y, y), 1.0);
  EXPECT_TRUE(std::isnan(pearson(y, std::vector<double>(5, 0.3))));
}

TEST(Correlation, PValue) {
  // n = 10, r = 0.6319: the two-sided 5% critical value for 8 df.
  EXPECT_NEAR(correlation_p_value(0.6319, 10), 0.05, 2e-4);
  EXPECT_EQ(correlation_p_value(1.0, 10), 0.0);
  EXPECT_NEAR(correlation_p_value(0.0, 10), 1.0, 1e-15);
  EXPECT_EQ(correlation_p_value(0.3, 10), correlation_p_value(-0.3, 10));
  EXPECT_EQ(classify_correlation(0.9, 0.01), CorrelationBand::kVeryStrong);
  EXPECT_EQ(classify_correlation(-0.75, 0.01), CorrelationBand::kStrong);
  EXPECT_EQ(classify_correlation(0.5, 0.01), CorrelationBand::kWeak);
  EXPECT_EQ(classify_correlation(0.95, 0.2), CorrelationBand::kNotSignificant);
}

TEST(Correlation, MatrixProperties) {
  std::vector<std::string> ids;
  for (int i = 0; i < 20; ++i) ids.push_back("b" + std::to_string(i));
  std::mt19937_64 rng(10);
  Eigen::MatrixXd scores(20, 14);
  for (auto& v : scores.reshaped()) v = uniform(rng, 0, 1);
  scores.col(5) = 1.0 - scores.col(4).array();
  const RatingsTable t = simulate_ratings(ids, scores, 10, 0.0, 1);
  const CorrelationResult c = correlation_matrix(t);
  const MosMatrix m = mos_matrix(t);
  for (int a = 0; a < 14; ++a) {
    EXPECT_EQ(c.pearson(a, a), 1.0);
    for (int b = 0; b < 14; ++b) {
      EXPECT_EQ(c.pearson(a, b), c.pearson(b, a));
      EXPECT_EQ(c.pearson_p(a, b), c.pearson_p(b, a));
      EXPECT_LE(std::abs(c.pearson(a, b)), 1.0);
      std::vector<double> x(20), y(20);
      for (int i = 0; i < 20; ++i) {
        x[i] = m.values(i, a);
        y[i] = m.values(i, b);
      }
      EXPECT_NEAR(c.pearson(a, b), pearson_oracle(x, y), 1e-12);
    }
  }
  EXPECT_NEAR(c.pearson(4, 5), -1.0, 1e-12);
  std::ostringstream out;
  write_significance_csv(c, out);
  EXPECT_NE(out.str().find("very-strong"), std::string::npos);
}

TEST(Correlation, TooFewPairs) {
  RatingsTable t;
  for (int a = 0; a < 14; ++a) {
    t.add({"x", "p", a, 3});
    t.add({"y", "p", a, 4});
  }
  EXPECT_THROW(correlation_matrix(t), MissingDataError);
}

TEST(Stats, QuartilesMatchSortOracle) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> v(1 + rng() % 30);
    for (auto& x : v) x = uniform(rng, 0, 1);
    const BoxStats s = box_stats(v);
    std::sort(v.begin(), v.end());
    auto q = [&](double p) {
      const double h = (v.size() - 1) * p;
      const std::size_t lo = static_cast<std::size_t>(std::floor(h));
      const std::size_t hi = std::min(lo + 1, v.size() - 1);
      return v[lo] + (h - lo) * (v[hi] - v[lo]);
    };
    EXPECT_NEAR(s.q1, q(0.25), 1e-15);
    EXPECT_NEAR(s.median, q(0.5), 1e-15);
    EXPECT_NEAR(s.q3, q(0.75), 1e-15);
    EXPECT_NEAR(s.iqr(), q(0.75) - q(0.25), 1e-15);
    EXPECT_EQ(s.min, v.front());
    EXPECT_EQ(s.max, v.back());
  }
}

TEST(Stats, ClusterExamples) {
  RatingsTable t = table_of("one", 7, {4, 4, 4, 4});
  for (int r : {1, 5, 1, 5}) t.add({"two", "p", 7, r});
  const std::map<std::string, std::string> clusters = {{"one", "fabric"},
                                                       {"two", "metallic"}};
  const ClusterStats s = cluster_stats(t, clusters);
  ASSERT_EQ(s.entries.size(), 2u);
  const auto& fabric = s.entries[0];
  EXPECT_EQ(fabric.cluster, "fabric");
  EXPECT_EQ(fabric.mean_score.mean, 0.75);
  EXPECT_EQ(fabric.agreement.mean, 0.0);
  EXPECT_EQ(fabric.mean_score.iqr(), 0.0);
  const auto& metal = s.entries[1];
  EXPECT_EQ(metal.agreement.mean, 0.25);
  EXPECT_EQ(metal.mean_score.mean, 0.5);
  // Four clusters have no members.
  EXPECT_EQ(s.warnings.size(), 4u);
  EXPECT_THROW(cluster_stats(t, {{"one", "wood"}}), SchemaError);
}

TEST(Stats, ClusterValuesInUnitRange) {
  std::vector<std::string> ids;
  std::map<std::string, std::string> clusters;
  for (int i = 0; i < 60; ++i) {
    ids.push_back("b" + std::to_string(i));
    clusters[ids.back()] = std::string(kClusterNames[i % 6]);
  }
  std::mt19937_64 rng(13);
  Eigen::MatrixXd scores(60, 14);
  for (auto& v : scores.reshaped()) v = uniform(rng, 0, 1);
  const ClusterStats s = cluster_stats(simulate_ratings(ids, scores, 10, 0.3, 2), clusters);
  EXPECT_EQ(s.entries.size(), 6u * 14u);
  for (const auto& e : s.entries) {
    for (double v : {e.mean_score.min, e.mean_score.max, e.agreement.min, e.agreement.max}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(Simulate, NoiselessRatingsRoundTruth) {
  const std::vector<std::string> ids = {"a"};
  Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(1, 14);
  for (int k = 0; k < 14; ++k) scores(0, k) = (k % 5) / 4.0;
  const RatingsTable t = simulate_ratings(ids, scores, 3, 0.0, 1);
  for (int k = 0; k < 14; ++k) {
    EXPECT_EQ(mos(t, "a", attribute_id(k)), (k % 5) / 4.0);
  }
}

}  // namespace
}  // namespace matspace

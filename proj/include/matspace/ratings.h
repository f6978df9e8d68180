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

#ifndef MATSPACE_RATINGS_H_
#define MATSPACE_RATINGS_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace matspace {

inline constexpr int kAttributeCount = 14;

// The fixed attribute registry, in index order.
const std::array<std::string_view, kAttributeCount>& attribute_names();

struct AttributeId {
  std::string_view name;
  int index = 0;
};

// Case-insensitive; '-' and '_' compare equal to spaces.
std::optional<AttributeId> find_attribute(std::string_view name);
// As find_attribute but throws SchemaError for unknown names.
AttributeId attribute_id(std::string_view name);
AttributeId attribute_id(int index);

struct RatingRecord {
  std::string brdf_id;
  std::string participant_id;
  int attribute = 0;
  int rating = 0;  // 1..5
};

class RatingsTable {
 public:
  // Throws ArgumentError for a rating outside 1..5 or a bad attribute index.
  void add(RatingRecord record);
  const std::vector<RatingRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  // Distinct BRDF ids, sorted.
  std::vector<std::string> brdf_ids() const;

 private:
  std::vector<RatingRecord> records_;
};

// CSV with header brdf_id,participant_id,attribute,rating. A bad rating
// throws RowError with the 1-based line number; a bad header or unknown
// attribute throws SchemaError.
RatingsTable parse_ratings(std::istream& in);
RatingsTable load_ratings(const std::filesystem::path& path);
void write_ratings(const RatingsTable& table, std::ostream& out);

// (mean rating - 1) / 4. Throws MissingDataError without records.
double mos(const RatingsTable& table, std::string_view brdf_id,
           const AttributeId& attr);

// Per-BRDF MOS for every attribute; NaN where a pair has no records.
struct MosMatrix {
  std::vector<std::string> brdf_ids;  // sorted
  Eigen::MatrixXd values;             // brdf x attribute
  std::optional<std::size_t> row(std::string_view brdf_id) const;
};
MosMatrix mos_matrix(const RatingsTable& table);

// Sample correlations; NaN when either input has zero variance.
double pearson(std::span<const double> x, std::span<const double> y);
double spearman(std::span<const double> x, std::span<const double> y);
// Two-sided p-value of the t-test on r with n - 2 degrees of freedom.
double correlation_p_value(double r, std::size_t n);

enum class CorrelationBand { kNotSignificant, kWeak, kStrong, kVeryStrong };
// kNotSignificant when p > 0.05; otherwise by |r| > 0.8, > 0.7, else weak.
CorrelationBand classify_correlation(double r, double p);
std::string_view band_name(CorrelationBand band);

struct CorrelationResult {
  Eigen::MatrixXd pearson;    // 14 x 14
  Eigen::MatrixXd pearson_p;
  Eigen::MatrixXd spearman;
  Eigen::MatrixXd spearman_p;
  Eigen::MatrixXi pairs;      // BRDFs rated on both attributes
};
// Over per-BRDF MOS pairs. Throws MissingDataError if some attribute pair
// has fewer than 3 common BRDFs.
CorrelationResult correlation_matrix(const RatingsTable& table);

// Quantile by linear interpolation between closest ranks (h = (n-1)q).
// `sorted` must be ascending and non-empty.
double quantile_sorted(std::span<const double> sorted, double q);

struct BoxStats {
  double mean = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double min = 0.0;
  double max = 0.0;
  double iqr() const { return q3 - q1; }
};
BoxStats box_stats(std::vector<double> values);

inline constexpr std::array<std::string_view, 6> kClusterNames = {
    "fabric", "metallic", "acrylic", "plastic", "phenolic", "metallic-paint"};

struct ClusterAttributeStats {
  std::string cluster;
  int attribute = 0;
  std::size_t n_brdfs = 0;
  BoxStats mean_score;  // over per-BRDF MOS
  BoxStats agreement;   // over per-BRDF population variance, [0,1] scale
};

struct ClusterStats {
  std::vector<ClusterAttributeStats> entries;
  std::vector<std::string> warnings;
};

// Clusters must be drawn from kClusterNames (SchemaError otherwise).
// Clusters without rated BRDFs are skipped with a warning.
ClusterStats cluster_stats(const RatingsTable& table,
                           const std::map<std::string, std::string>& clusters);

// CSV brdf_id,cluster.
std::map<std::string, std::string> parse_clusters(std::istream& in);
std::map<std::string, std::string> load_clusters(
    const std::filesystem::path& path);

void write_matrix_csv(const Eigen::MatrixXd& m, std::ostream& out);
void write_significance_csv(const CorrelationResult& c, std::ostream& out);
void write_cluster_stats_csv(const ClusterStats& s, std::ostream& out);

// Draws `raters` ratings per (BRDF, attribute) from a true normalised score:
// rating = clamp(round(1 + 4 (y + N(0, sigma))), 1, 5). Participant ids are
// "p<k>".
RatingsTable simulate_ratings(std::span<const std::string> brdf_ids,
                              const Eigen::MatrixXd& true_scores, int raters,
                              double sigma, std::uint64_t seed);

}  // namespace matspace

#endif  // MATSPACE_RATINGS_H_

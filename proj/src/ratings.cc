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
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>

#include "matspace/error.h"

namespace matspace {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string normalise_name(std::string_view name) {
  std::string out;
  bool space = false;
  for (char ch : name) {
    if (ch == '-' || ch == '_' || std::isspace(static_cast<unsigned char>(ch))) {
      space = !out.empty();
      continue;
    }
    if (space) out.push_back(' ');
    space = false;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

// Reads the next non-blank line; strips a trailing '\r'.
bool next_line(std::istream& in, std::string& line, std::size_t& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!trim(line).empty()) return true;
  }
  return false;
}

void expect_header(std::istream& in, std::size_t& line_no,
                   std::span<const std::string_view> columns) {
  std::string line;
  if (!next_line(in, line, line_no)) {
    throw SchemaError("missing CSV header");
  }
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto fields = split_csv(line);
  if (fields.size() != columns.size() ||
      !std::equal(fields.begin(), fields.end(), columns.begin())) {
    std::string want;
    for (auto c : columns) want += (want.empty() ? "" : ",") + std::string(c);
    throw SchemaError("expected header '" + want + "', got '" + line + "'");
  }
}

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double normalised(int rating) { return (rating - 1) / 4.0; }

using RatingIndex = std::map<std::pair<std::string, int>, std::vector<int>>;

RatingIndex index_ratings(const RatingsTable& table) {
  RatingIndex index;
  for (const RatingRecord& r : table.records()) {
    index[{r.brdf_id, r.attribute}].push_back(r.rating);
  }
  return index;
}

void write_csv_header(std::ostream& out) {
  out << "attribute";
  for (auto name : attribute_names()) out << ',' << name;
  out << '\n';
}

}  // namespace

const std::array<std::string_view, kAttributeCount>& attribute_names() {
  static constexpr std::array<std::string_view, kAttributeCount> kNames = {
      "plastic-like", "rubber-like", "metallic-like", "fabric-like",
      "ceramic-like", "soft",        "hard",          "matte",
      "glossy",       "bright",      "rough",         "tint of reflections",
      "strength of reflections",     "sharpness of reflections"};
  return kNames;
}

std::optional<AttributeId> find_attribute(std::string_view name) {
  const std::string key = normalise_name(name);
  const auto& names = attribute_names();
  for (int i = 0; i < kAttributeCount; ++i) {
    if (normalise_name(names[i]) == key) return AttributeId{names[i], i};
  }
  return std::nullopt;
}

AttributeId attribute_id(std::string_view name) {
  if (auto a = find_attribute(name)) return *a;
  throw SchemaError("unknown attribute '" + std::string(name) + "'");
}

AttributeId attribute_id(int index) {
  if (index < 0 || index >= kAttributeCount) {
    throw ArgumentError("attribute index out of range");
  }
  return AttributeId{attribute_names()[index], index};
}

void RatingsTable::add(RatingRecord record) {
  if (record.rating < 1 || record.rating > 5) {
    throw ArgumentError("rating must be in 1..5");
  }
  if (record.attribute < 0 || record.attribute >= kAttributeCount) {
    throw ArgumentError("attribute index out of range");
  }
  records_.push_back(std::move(record));
}

std::vector<std::string> RatingsTable::brdf_ids() const {
  std::vector<std::string> ids;
  for (const auto& r : records_) ids.push_back(r.brdf_id);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

RatingsTable parse_ratings(std::istream& in) {
  static constexpr std::array<std::string_view, 4> kColumns = {
      "brdf_id", "participant_id", "attribute", "rating"};
  std::size_t line_no = 0;
  expect_header(in, line_no, kColumns);
  RatingsTable table;
  std::string line;
  while (next_line(in, line, line_no)) {
    const auto f = split_csv(line);
    if (f.size() != kColumns.size()) {
      throw RowError(line_no, "expected 4 fields");
    }
    if (f[0].empty()) throw RowError(line_no, "empty brdf_id");
    const AttributeId attr = attribute_id(f[2]);
    int rating = 0;
    const auto [end, ec] =
        std::from_chars(f[3].data(), f[3].data() + f[3].size(), rating);
    if (ec != std::errc() || end != f[3].data() + f[3].size()) {
      throw RowError(line_no, "rating '" + std::string(f[3]) + "' is not an integer");
    }
    if (rating < 1 || rating > 5) {
      throw RowError(line_no, "rating " + std::to_string(rating) + " outside 1..5");
    }
    table.add({std::string(f[0]), std::string(f[1]), attr.index, rating});
  }
  return table;
}

RatingsTable load_ratings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_ratings(in);
}

void write_ratings(const RatingsTable& table, std::ostream& out) {
  out << "brdf_id,participant_id,attribute,rating\n";
  for (const auto& r : table.records()) {
    out << r.brdf_id << ',' << r.participant_id << ','
        << attribute_names()[r.attribute] << ',' << r.rating << '\n';
  }
}

double mos(const RatingsTable& table, std::string_view brdf_id,
           const AttributeId& attr) {
  long sum = 0;
  long count = 0;
  for (const auto& r : table.records()) {
    if (r.attribute == attr.index && r.brdf_id == brdf_id) {
      sum += r.rating;
      ++count;
    }
  }
  if (count == 0) {
    throw MissingDataError("no ratings for " + std::string(brdf_id) + " / " +
                           std::string(attr.name));
  }
  return (static_cast<double>(sum) / static_cast<double>(count) - 1.0) / 4.0;
}

std::optional<std::size_t> MosMatrix::row(std::string_view brdf_id) const {
  const auto it = std::lower_bound(brdf_ids.begin(), brdf_ids.end(), brdf_id);
  if (it == brdf_ids.end() || *it != brdf_id) return std::nullopt;
  return static_cast<std::size_t>(it - brdf_ids.begin());
}

MosMatrix mos_matrix(const RatingsTable& table) {
  MosMatrix m;
  m.brdf_ids = table.brdf_ids();
  m.values = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(m.brdf_ids.size()),
                                       kAttributeCount, kNaN);
  for (const auto& [key, ratings] : index_ratings(table)) {
    const long sum = std::accumulate(ratings.begin(), ratings.end(), 0L);
    const double mean = static_cast<double>(sum) / static_cast<double>(ratings.size());
    m.values(static_cast<Eigen::Index>(*m.row(key.first)), key.second) = (mean - 1.0) / 4.0;
  }
  return m;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ArgumentError("correlation needs two equal-length series of >= 2");
  }
  const double mx = mean_of(x);
  const double my = mean_of(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return kNaN;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ArgumentError("length mismatch");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

double correlation_p_value(double r, std::size_t n) {
  if (std::isnan(r) || n < 3) return kNaN;
  if (std::abs(r) >= 1.0) return 0.0;
  const double df = static_cast<double>(n - 2);
  const double t = std::abs(r) * std::sqrt(df / (1.0 - r * r));
  const boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, t));
}

CorrelationBand classify_correlation(double r, double p) {
  if (std::isnan(r) || std::isnan(p) || p > 0.05) {
    return CorrelationBand::kNotSignificant;
  }
  if (std::abs(r) > 0.8) return CorrelationBand::kVeryStrong;
  if (std::abs(r) > 0.7) return CorrelationBand::kStrong;
  return CorrelationBand::kWeak;
}

std::string_view band_name(CorrelationBand band) {
  switch (band) {
    case CorrelationBand::kNotSignificant: return "not-significant";
    case CorrelationBand::kWeak: return "weak";
    case CorrelationBand::kStrong: return "strong";
    case CorrelationBand::kVeryStrong: return "very-strong";
  }
  return "";
}

CorrelationResult correlation_matrix(const RatingsTable& table) {
  const MosMatrix m = mos_matrix(table);
  const int n = kAttributeCount;
  CorrelationResult c;
  c.pearson.resize(n, n);
  c.pearson_p.resize(n, n);
  c.spearman.resize(n, n);
  c.spearman_p.resize(n, n);
  c.pairs.resize(n, n);
  std::vector<double> x, y;
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      x.clear();
      y.clear();
      for (Eigen::Index i = 0; i < m.values.rows(); ++i) {
        if (std::isnan(m.values(i, a)) || std::isnan(m.values(i, b))) continue;
        x.push_back(m.values(i, a));
        y.push_back(m.values(i, b));
      }
      if (x.size() < 3) {
        throw MissingDataError("fewer than 3 BRDFs rated on both " +
                               std::string(attribute_names()[a]) + " and " +
                               std::string(attribute_names()[b]));
      }
      const double r = pearson(x, y);
      const double rho = spearman(x, y);
      const double pr = correlation_p_value(r, x.size());
      const double ps = correlation_p_value(rho, x.size());
      c.pearson(a, b) = c.pearson(b, a) = r;
      c.spearman(a, b) = c.spearman(b, a) = rho;
      c.pearson_p(a, b) = c.pearson_p(b, a) = pr;
      c.spearman_p(a, b) = c.spearman_p(b, a) = ps;
      c.pairs(a, b) = c.pairs(b, a) = static_cast<int>(x.size());
    }
  }
  return c;
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw ArgumentError("quantile of empty data");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

BoxStats box_stats(std::vector<double> values) {
  if (values.empty()) throw ArgumentError("box stats of empty data");
  std::sort(values.begin(), values.end());
  BoxStats s;
  s.mean = mean_of(values);
  s.q1 = quantile_sorted(values, 0.25);
  s.median = quantile_sorted(values, 0.5);
  s.q3 = quantile_sorted(values, 0.75);
  s.min = values.front();
  s.max = values.back();
  return s;
}

ClusterStats cluster_stats(const RatingsTable& table,
                           const std::map<std::string, std::string>& clusters) {
  for (const auto& [id, cluster] : clusters) {
    if (std::find(kClusterNames.begin(), kClusterNames.end(), cluster) ==
        kClusterNames.end()) {
      throw SchemaError("unknown cluster '" + cluster + "' for " + id);
    }
  }
  const RatingIndex index = index_ratings(table);
  ClusterStats out;
  for (std::string_view cluster : kClusterNames) {
    std::vector<std::string> members;
    for (const auto& [id, c] : clusters) {
      if (c == cluster) members.push_back(id);
    }
    bool any = false;
    for (int a = 0; a < kAttributeCount; ++a) {
      std::vector<double> means, variances;
      for (const auto& id : members) {
        const auto it = index.find({id, a});
        if (it == index.end()) continue;
        std::vector<double> v;
        for (int r : it->second) v.push_back(normalised(r));
        const double mu = mean_of(v);
        double var = 0.0;
        for (double x : v) var += (x - mu) * (x - mu);
        means.push_back(mu);
        variances.push_back(var / static_cast<double>(v.size()));
      }
      if (means.empty()) continue;
      any = true;
      ClusterAttributeStats e;
      e.cluster = std::string(cluster);
      e.attribute = a;
      e.n_brdfs = means.size();
      e.mean_score = box_stats(std::move(means));
      e.agreement = box_stats(std::move(variances));
      out.entries.push_back(std::move(e));
    }
    if (!any && !members.empty()) {
      out.warnings.push_back("cluster '" + std::string(cluster) +
                             "' has no rated BRDFs; skipped");
    } else if (!any) {
      out.warnings.push_back("cluster '" + std::string(cluster) + "' is empty; skipped");
    }
  }
  return out;
}

std::map<std::string, std::string> parse_clusters(std::istream& in) {
  static constexpr std::array<std::string_view, 2> kColumns = {"brdf_id", "cluster"};
  std::size_t line_no = 0;
  expect_header(in, line_no, kColumns);
  std::map<std::string, std::string> out;
  std::string line;
  while (next_line(in, line, line_no)) {
    const auto f = split_csv(line);
    if (f.size() != 2 || f[0].empty()) throw RowError(line_no, "expected brdf_id,cluster");
    out[std::string(f[0])] = std::string(f[1]);
  }
  return out;
}

std::map<std::string, std::string> load_clusters(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_clusters(in);
}

void write_matrix_csv(const Eigen::MatrixXd& m, std::ostream& out) {
  write_csv_header(out);
  const auto old = out.precision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out << attribute_names()[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << ',' << m(i, j);
    out << '\n';
  }
  out.precision(old);
}

void write_significance_csv(const CorrelationResult& c, std::ostream& out) {
  out << "attribute_a,attribute_b,pearson_r,pearson_p,spearman_rho,spearman_p,n,band\n";
  const auto old = out.precision(17);
  for (int a = 0; a < kAttributeCount; ++a) {
    for (int b = a + 1; b < kAttributeCount; ++b) {
      out << attribute_names()[a] << ',' << attribute_names()[b] << ','
          << c.pearson(a, b) << ',' << c.pearson_p(a, b) << ','
          << c.spearman(a, b) << ',' << c.spearman_p(a, b) << ','
          << c.pairs(a, b) << ','
          << band_name(classify_correlation(c.pearson(a, b), c.pearson_p(a, b)))
          << '\n';
    }
  }
  out.precision(old);
}

void write_cluster_stats_csv(const ClusterStats& s, std::ostream& out) {
  out << "cluster,attribute,n_brdfs,mean,mean_q1,mean_median,mean_q3,mean_iqr,"
         "mean_min,mean_max,var_mean,var_q1,var_median,var_q3,var_iqr,var_min,"
         "var_max\n";
  const auto old = out.precision(17);
  for (const auto& e : s.entries) {
    out << e.cluster << ',' << attribute_names()[e.attribute] << ',' << e.n_brdfs;
    for (const BoxStats* b : {&e.mean_score, &e.agreement}) {
      out << ',' << b->mean << ',' << b->q1 << ',' << b->median << ',' << b->q3
          << ',' << b->iqr() << ',' << b->min << ',' << b->max;
    }
    out << '\n';
  }
  out.precision(old);
}

RatingsTable simulate_ratings(std::span<const std::string> brdf_ids,
                              const Eigen::MatrixXd& true_scores, int raters,
                              double sigma, std::uint64_t seed) {
  if (true_scores.rows() != static_cast<Eigen::Index>(brdf_ids.size()) ||
      true_scores.cols() != kAttributeCount) {
    throw ArgumentError("true scores must be (BRDFs x 14)");
  }
  if (raters < 1 || !(sigma >= 0.0)) throw ArgumentError("bad simulation settings");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  RatingsTable table;
  for (std::size_t i = 0; i < brdf_ids.size(); ++i) {
    for (int k = 0; k < raters; ++k) {
      for (int a = 0; a < kAttributeCount; ++a) {
        const double y = true_scores(static_cast<Eigen::Index>(i), a) +
                         (sigma > 0.0 ? noise(rng) : 0.0);
        const int r = static_cast<int>(std::lround(1.0 + 4.0 * y));
        table.add({brdf_ids[i], "p" + std::to_string(k), a, std::clamp(r, 1, 5)});
      }
    }
  }
  return table;
}

}  // namespace matspace

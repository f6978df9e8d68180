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

#include "matspace/dataset_io.h"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "matspace/error.h"

namespace matspace {
namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) out.push_back(f);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

void write_alphas_csv(std::span<const ManifestEntry> manifest, std::ostream& out) {
  const int m = manifest.empty() ? 0 : static_cast<int>(manifest.front().alpha5.size());
  out << "brdf_id,origin";
  for (int k = 1; k <= m; ++k) out << ",a" << k;
  out << '\n';
  const auto old = out.precision(17);
  for (const auto& e : manifest) {
    out << e.id << ',' << (e.synthesized ? "synthesized" : "seed");
    for (double v : e.alpha5) out << ',' << v;
    out << '\n';
  }
  out.precision(old);
}

std::vector<AlphaRow> parse_alphas_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("missing alphas header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line);
  if (header.size() < 3 || header[0] != "brdf_id" || header[1] != "origin") {
    throw SchemaError("alphas header must start with brdf_id,origin");
  }
  const std::size_t m = header.size() - 2;
  std::vector<AlphaRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != m + 2) throw RowError(line_no, "wrong field count");
    AlphaRow row{f[0], f[1], CoeffVector(static_cast<Eigen::Index>(m))};
    for (std::size_t k = 0; k < m; ++k) {
      std::size_t used = 0;
      try {
        row.alpha(static_cast<Eigen::Index>(k)) = std::stod(f[k + 2], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != f[k + 2].size()) {
        throw RowError(line_no, "bad coefficient '" + f[k + 2] + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<AlphaRow> load_alphas_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_alphas_csv(in);
}

MerlSet load_merl_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw IoError(dir.string() + " is not a directory");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".binary") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  MerlSet set;
  for (const auto& f : files) {
    set.ids.push_back(f.stem().string());
    set.brdfs.push_back(read_merl(f));
  }
  return set;
}

void save_expansion(const Expansion& e, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "brdfs");
  save_basis(e.basis, dir / "basis.bin");
  save_hull(e.hull, e.basis.basis_hash(), dir / "hull.json");
  write_text(dir / "manifest.json", manifest_json(e));
  std::ostringstream alphas;
  write_alphas_csv(e.manifest, alphas);
  write_text(dir / "alphas.csv", alphas.str());
  for (std::size_t i = 0; i < e.brdfs.size(); ++i) {
    write_merl(e.brdfs[i], dir / "brdfs" / (e.manifest[i].id + ".binary"));
  }
}

void write_path_csv(const EditResult& result, const RbfModel& model, std::ostream& out) {
  const Eigen::Index m = result.path.empty() ? 0 : result.path.front().size();
  out << "step";
  for (Eigen::Index k = 1; k <= m; ++k) out << ",a" << k;
  out << ",phi\n";
  const auto old = out.precision(17);
  for (std::size_t s = 0; s < result.path.size(); ++s) {
    out << s;
    for (double v : result.path[s]) out << ',' << v;
    out << ',' << eval_raw(model, result.path[s]) << '\n';
  }
  out.precision(old);
}

}  // namespace matspace

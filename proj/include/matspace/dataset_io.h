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

#ifndef MATSPACE_DATASET_IO_H_
#define MATSPACE_DATASET_IO_H_

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "matspace/editor.h"
#include "matspace/merl_io.h"
#include "matspace/synthesis.h"

namespace matspace {

// One row of alphas.csv: brdf_id,origin,a1..aM.
struct AlphaRow {
  std::string id;
  std::string origin;  // "seed" or "synthesized"
  CoeffVector alpha;
};

void write_alphas_csv(std::span<const ManifestEntry> manifest, std::ostream& out);
std::vector<AlphaRow> parse_alphas_csv(std::istream& in);
std::vector<AlphaRow> load_alphas_csv(const std::filesystem::path& path);

// Every *.binary file in `dir`, sorted by name; ids are the file stems.
struct MerlSet {
  std::vector<std::string> ids;
  std::vector<Brdf> brdfs;
};
MerlSet load_merl_dir(const std::filesystem::path& dir);

// basis.bin, hull.json, manifest.json, alphas.csv and brdfs/<id>.binary.
void save_expansion(const Expansion& e, const std::filesystem::path& dir);

// step,a1..aM,phi for every iterate.
void write_path_csv(const EditResult& result, const RbfModel& model, std::ostream& out);

}  // namespace matspace

#endif  // MATSPACE_DATASET_IO_H_

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

#ifndef MATSPACE_SERVICE_H_
#define MATSPACE_SERVICE_H_

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "matspace/editor.h"
#include "matspace/functionals.h"
#include "matspace/pca_basis.h"
#include "matspace/preview.h"
#include "matspace/ratings.h"
#include "matspace/synthesis.h"

namespace httplib {
class Server;
}

namespace matspace {

struct Material {
  std::string id;
  std::string origin;     // "loaded" or "edit"
  std::string parent_id;  // empty unless an edit
  std::string basis_hash;
  Brdf brdf;
  CoeffVector alpha5;
  CoeffVector alpha15;
  ChromaRecord chroma;
  std::array<double, kAttributeCount> attributes{};      // clamped
  std::array<double, kAttributeCount> attributes_raw{};  // raw
};

// Immutable materials by id. Insertion is the only mutation.
class MaterialRegistry {
 public:
  // Returns the stored material; an existing id keeps its first value.
  std::shared_ptr<const Material> insert(Material m);
  std::shared_ptr<const Material> find(const std::string& id) const;
  // Throws NotFoundError.
  std::shared_ptr<const Material> get(const std::string& id) const;
  // In insertion order.
  std::vector<std::string> ids() const;
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<const Material>> by_id_;
  std::vector<std::string> order_;
};

struct ServiceConfig {
  PreviewScene scene;
  EditOptions edit;
  int slice_resolution = 128;
};

// Edit loop shared by the HTTP server and the CLI. Thread-safe.
class EditService {
 public:
  // Throws ArgumentError unless there is one model per attribute and
  // CompatibilityError if a model was trained on another basis.
  EditService(PcaBasis basis, HullModel hull, std::vector<RbfModel> models,
              ServiceConfig config = {});

  std::shared_ptr<const Material> register_brdf(const std::string& id, Brdf brdf);

  // {material_id, attribute, target_y, chroma?: {delta_a, delta_b, scale}}
  // -> {new_material_id, attribute_vector, path, preview_url, status, ...}.
  // Unknown material: NotFoundError. Bad request: ArgumentError/SchemaError.
  nlohmann::json handle_edit_request(const nlohmann::json& request);

  nlohmann::json materials_json() const;
  nlohmann::json material_json(const std::string& id) const;
  nlohmann::json attributes_json() const;
  std::vector<std::uint8_t> preview_png(const std::string& id);

  // Raw slice of one functional over the hull bounds of dims i, j
  // (0-based); `fixed` holds the other coordinates in ascending order.
  // The returned spec records the bounds.
  std::pair<Eigen::MatrixXd, SliceSpec> slice_grid(int attribute, int i, int j,
                                                   const std::vector<double>& fixed) const;
  std::vector<std::uint8_t> slice_png(int attribute, int i, int j,
                                      const std::vector<double>& fixed) const;

  std::array<double, kAttributeCount> predict(const CoeffVector& alpha5) const;

  const MaterialRegistry& registry() const { return registry_; }
  const PcaBasis& basis() const { return basis_; }
  const HullModel& hull() const { return hull_; }
  const std::vector<RbfModel>& models() const { return models_; }

 private:
  Material describe(const std::string& id, Brdf brdf, const CoeffVector& alpha5) const;

  PcaBasis basis_;
  HullModel hull_;
  std::vector<RbfModel> models_;  // indexed by attribute
  ServiceConfig config_;
  MaterialRegistry registry_;
  std::mutex preview_mu_;
  std::map<std::string, std::shared_ptr<const std::vector<std::uint8_t>>> previews_;
};

// Error -> HTTP status (404 not found, 400 bad input, 409 basis mismatch,
// 500 otherwise).
int http_status_for(const std::exception& e);

// Registers the JSON/PNG routes on `server`.
void install_routes(httplib::Server& server, EditService& service);

// Blocks serving on host:port.
void serve(EditService& service, const std::string& host, int port);

// Colour-mapped PNG of a value grid (row 0 of the image is the top, i.e.
// the largest y).
Image grid_image(const Eigen::MatrixXd& grid, double lo, double hi);

}  // namespace matspace

#endif  // MATSPACE_SERVICE_H_

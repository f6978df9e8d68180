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

#include "matspace/service.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "matspace/digest.h"
#include "matspace/error.h"

namespace matspace {
namespace {

nlohmann::json vec_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double number_field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) {
    throw SchemaError(std::string("field '") + key + "' must be a number");
  }
  return j[key].get<double>();
}

// Perceptually ordered blue -> teal -> yellow ramp.
std::array<std::uint8_t, 3> ramp(double t) {
  static constexpr double kStops[5][3] = {{68, 1, 84},
                                          {59, 82, 139},
                                          {33, 145, 140},
                                          {94, 201, 98},
                                          {253, 231, 37}};
  t = std::clamp(t, 0.0, 1.0) * 4.0;
  const int i = std::min(static_cast<int>(t), 3);
  const double f = t - i;
  std::array<std::uint8_t, 3> out{};
  for (int c = 0; c < 3; ++c) {
    out[c] = static_cast<std::uint8_t>(
        std::lround((1.0 - f) * kStops[i][c] + f * kStops[i + 1][c]));
  }
  return out;
}

}  // namespace

std::shared_ptr<const Material> MaterialRegistry::insert(Material m) {
  auto ptr = std::make_shared<const Material>(std::move(m));
  std::lock_guard lock(mu_);
  const auto [it, fresh] = by_id_.emplace(ptr->id, ptr);
  if (fresh) order_.push_back(ptr->id);
  return it->second;
}

std::shared_ptr<const Material> MaterialRegistry::find(const std::string& id) const {
  std::lock_guard lock(mu_);
  const auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : it->second;
}

std::shared_ptr<const Material> MaterialRegistry::get(const std::string& id) const {
  auto m = find(id);
  if (!m) throw NotFoundError("unknown material '" + id + "'");
  return m;
}

std::vector<std::string> MaterialRegistry::ids() const {
  std::lock_guard lock(mu_);
  return order_;
}

std::size_t MaterialRegistry::size() const {
  std::lock_guard lock(mu_);
  return order_.size();
}

EditService::EditService(PcaBasis basis, HullModel hull,
                         std::vector<RbfModel> models, ServiceConfig config)
    : basis_(std::move(basis)), hull_(std::move(hull)), config_(std::move(config)) {
  if (!basis_.reference()) throw ArgumentError("basis has no reference table");
  if (hull_.dimension() != basis_.components()) {
    throw CompatibilityError("hull dimension does not match the basis");
  }
  config_.scene.validate();
  models_.resize(kAttributeCount);
  std::vector<bool> seen(kAttributeCount, false);
  for (RbfModel& m : models) {
    if (m.attribute < 0 || m.attribute >= kAttributeCount || seen[m.attribute]) {
      throw ArgumentError("models must cover each attribute once");
    }
    check_compatible(m, basis_.basis_hash());
    if (m.dimension() != basis_.components()) {
      throw CompatibilityError("model dimension does not match the basis");
    }
    seen[m.attribute] = true;
    models_[m.attribute] = std::move(m);
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw ArgumentError("one model per attribute is required");
  }
}

std::array<double, kAttributeCount> EditService::predict(const CoeffVector& alpha5) const {
  std::array<double, kAttributeCount> out{};
  for (int a = 0; a < kAttributeCount; ++a) out[a] = eval(models_[a], alpha5);
  return out;
}

Material EditService::describe(const std::string& id, Brdf brdf,
                               const CoeffVector& alpha5) const {
  Material m;
  m.id = id;
  m.basis_hash = basis_.basis_hash();
  m.alpha5 = alpha5;
  m.alpha15 = project(basis_, map_brdf(brdf, *basis_.reference()));
  m.chroma = split_achromatic(brdf).chroma;
  for (int a = 0; a < kAttributeCount; ++a) {
    m.attributes_raw[a] = eval_raw(models_[a], alpha5);
    m.attributes[a] = std::clamp(m.attributes_raw[a], 0.0, 1.0);
  }
  m.brdf = std::move(brdf);
  return m;
}

std::shared_ptr<const Material> EditService::register_brdf(const std::string& id,
                                                           Brdf brdf) {
  if (brdf.channels() != 3) throw ArgumentError("materials must be RGB");
  if (brdf.shape() != basis_.reference()->shape) {
    throw CompatibilityError("material table shape does not match the basis");
  }
  const CoeffVector alpha5 = achromatic_alpha(basis_, brdf);
  Material m = describe(id, std::move(brdf), alpha5);
  m.origin = "loaded";
  return registry_.insert(std::move(m));
}

nlohmann::json EditService::handle_edit_request(const nlohmann::json& request) {
  if (!request.is_object()) throw SchemaError("edit request must be a JSON object");
  if (!request.contains("material_id") || !request["material_id"].is_string()) {
    throw SchemaError("field 'material_id' must be a string");
  }
  if (!request.contains("attribute") || !request["attribute"].is_string()) {
    throw SchemaError("field 'attribute' must be a string");
  }
  const std::string parent_id = request["material_id"].get<std::string>();
  const AttributeId attr = attribute_id(request["attribute"].get<std::string>());
  const double target = number_field(request, "target_y");
  if (!(target >= 0.0 && target <= 1.0)) throw ArgumentError("target_y must be in [0, 1]");
  ChromaEdit chroma;
  if (request.contains("chroma") && !request["chroma"].is_null()) {
    const auto& c = request["chroma"];
    if (!c.is_object()) throw SchemaError("field 'chroma' must be an object");
    chroma.delta_a = c.contains("delta_a") ? number_field(c, "delta_a") : 0.0;
    chroma.delta_b = c.contains("delta_b") ? number_field(c, "delta_b") : 0.0;
    chroma.scale = c.contains("scale") ? number_field(c, "scale") : 1.0;
    if (!std::isfinite(chroma.delta_a) || !std::isfinite(chroma.delta_b) ||
        !(chroma.scale >= 0.0) || !std::isfinite(chroma.scale)) {
      throw ArgumentError("chroma edit values must be finite, scale >= 0");
    }
  }

  const auto parent = registry_.get(parent_id);
  const RbfModel& model = models_[attr.index];
  const EditResult result =
      edit(model, hull_, parent->alpha5, target, config_.edit);

  const std::string key = parent_id + '\n' + std::string(attr.name) + '\n' +
                          exact(target) + '\n' + exact(chroma.delta_a) + '\n' +
                          exact(chroma.delta_b) + '\n' + exact(chroma.scale);
  const std::string id = "e-" + sha256_hex(key).substr(0, 16);

  auto stored = registry_.find(id);
  if (!stored) {
    Brdf brdf = apply_edit(basis_, parent->brdf, result, chroma);
    Material m = describe(id, std::move(brdf), result.alpha_final);
    m.origin = "edit";
    m.parent_id = parent_id;
    stored = registry_.insert(std::move(m));
  }
  preview_png(stored->id);

  nlohmann::json path = nlohmann::json::array();
  for (const auto& p : result.path) path.push_back(vec_json(p));
  return {{"new_material_id", stored->id},
          {"parent_id", parent_id},
          {"attribute", std::string(attr.name)},
          {"target_y", target},
          {"achieved_y", result.achieved_y},
          {"status", std::string(status_name(result.status))},
          {"attribute_vector", stored->attributes},
          {"attribute_vector_raw", stored->attributes_raw},
          {"alpha", vec_json(stored->alpha5)},
          {"path", std::move(path)},
          {"preview_url", "/materials/" + stored->id + "/preview.png"}};
}

nlohmann::json EditService::materials_json() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& id : registry_.ids()) {
    const auto m = registry_.get(id);
    list.push_back({{"id", m->id}, {"origin", m->origin}, {"parent_id", m->parent_id}});
  }
  return {{"materials", std::move(list)}};
}

nlohmann::json EditService::material_json(const std::string& id) const {
  const auto m = registry_.get(id);
  nlohmann::json attrs = nlohmann::json::object();
  for (int a = 0; a < kAttributeCount; ++a) {
    attrs[std::string(attribute_names()[a])] = m->attributes[a];
  }
  return {{"id", m->id},
          {"origin", m->origin},
          {"parent_id", m->parent_id},
          {"basis_hash", m->basis_hash},
          {"alpha5", vec_json(m->alpha5)},
          {"alpha15", vec_json(m->alpha15)},
          {"attribute_vector", m->attributes},
          {"attribute_vector_raw", m->attributes_raw},
          {"attributes", std::move(attrs)},
          {"in_hull", hull_.contains(m->alpha5)},
          {"preview_url", "/materials/" + m->id + "/preview.png"}};
}

nlohmann::json EditService::attributes_json() const {
  nlohmann::json list = nlohmann::json::array();
  for (int a = 0; a < kAttributeCount; ++a) {
    list.push_back({{"index", a}, {"name", std::string(attribute_names()[a])}});
  }
  return {{"attributes", std::move(list)}};
}

std::vector<std::uint8_t> EditService::preview_png(const std::string& id) {
  {
    std::lock_guard lock(preview_mu_);
    const auto it = previews_.find(id);
    if (it != previews_.end()) return *it->second;
  }
  const auto m = registry_.get(id);
  auto png = std::make_shared<const std::vector<std::uint8_t>>(
      encode_png(render_sphere(m->brdf, config_.scene)));
  std::lock_guard lock(preview_mu_);
  return *previews_.emplace(id, std::move(png)).first->second;
}

std::pair<Eigen::MatrixXd, SliceSpec> EditService::slice_grid(
    int attribute, int i, int j, const std::vector<double>& fixed) const {
  const int d = hull_.dimension();
  if (attribute < 0 || attribute >= kAttributeCount) {
    throw ArgumentError("attribute index out of range");
  }
  if (i < 0 || j < 0 || i >= d || j >= d || i == j) {
    throw ArgumentError("slice dims must be distinct coordinates");
  }
  if (fixed.size() != static_cast<std::size_t>(d - 2)) {
    throw ArgumentError("slice needs " + std::to_string(d - 2) + " fixed values");
  }
  const auto [lo, hi] = hull_.bounds();
  SliceSpec spec;
  spec.dim_x = i;
  spec.dim_y = j;
  spec.anchor = CoeffVector::Zero(d);
  std::size_t f = 0;
  for (int k = 0; k < d; ++k) {
    if (k != i && k != j) spec.anchor(k) = fixed[f++];
  }
  auto padded = [](double a, double b) {
    const double pad = b > a ? 0.05 * (b - a) : 1.0;
    return std::make_pair(a - pad, b + pad);
  };
  std::tie(spec.x_min, spec.x_max) = padded(lo(i), hi(i));
  std::tie(spec.y_min, spec.y_max) = padded(lo(j), hi(j));
  spec.nx = spec.ny = config_.slice_resolution;
  return {slice(models_[attribute], spec), spec};
}

std::vector<std::uint8_t> EditService::slice_png(int attribute, int i, int j,
                                                 const std::vector<double>& fixed) const {
  return encode_png(grid_image(slice_grid(attribute, i, j, fixed).first, 0.0, 1.0));
}

Image grid_image(const Eigen::MatrixXd& grid, double lo, double hi) {
  Image img;
  img.width = static_cast<int>(grid.cols());
  img.height = static_cast<int>(grid.rows());
  img.rgb.resize(3 * static_cast<std::size_t>(img.width) * img.height);
  const double span = hi > lo ? hi - lo : 1.0;
  for (int r = 0; r < img.height; ++r) {
    const Eigen::Index row = grid.rows() - 1 - r;
    for (int c = 0; c < img.width; ++c) {
      const auto px = ramp((grid(row, c) - lo) / span);
      const std::size_t o = 3 * (static_cast<std::size_t>(r) * img.width + c);
      std::copy(px.begin(), px.end(), img.rgb.begin() + static_cast<long>(o));
    }
  }
  return img;
}

int http_status_for(const std::exception& e) {
  if (dynamic_cast<const NotFoundError*>(&e)) return 404;
  if (dynamic_cast<const CompatibilityError*>(&e)) return 409;
  if (dynamic_cast<const ArgumentError*>(&e) || dynamic_cast<const SchemaError*>(&e) ||
      dynamic_cast<const DomainError*>(&e) || dynamic_cast<const MissingDataError*>(&e) ||
      dynamic_cast<const nlohmann::json::exception*>(&e)) {
    return 400;
  }
  return 500;
}

}  // namespace matspace

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

// Command-line driver: expand -> train -> predict/edit/similar/slice,
// plus rating statistics, previews and the HTTP service.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "matspace/dataset_io.h"
#include "matspace/editor.h"
#include "matspace/error.h"
#include "matspace/functionals.h"
#include "matspace/preview.h"
#include "matspace/ratings.h"
#include "matspace/service.h"
#include "matspace/synthesis.h"
#include "matspace/synthetic.h"

namespace fs = std::filesystem;
using namespace matspace;

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

// Models plus the basis and hull they belong to.
struct Workspace {
  PcaBasis basis;
  HullModel hull;
  std::vector<RbfModel> models;
};

Workspace load_workspace(const fs::path& data_dir, const fs::path& model_dir,
                         bool need_hull) {
  Workspace w;
  w.basis = load_basis(data_dir / "basis.bin");
  if (need_hull) {
    auto [hull, hash] = load_hull(data_dir / "hull.json");
    if (hash != w.basis.basis_hash()) {
      throw CompatibilityError("hull.json was built with another basis");
    }
    w.hull = std::move(hull);
  }
  if (!model_dir.empty()) {
    w.models = load_models(model_dir);
    for (const auto& m : w.models) check_compatible(m, w.basis.basis_hash());
  }
  return w;
}

const RbfModel& model_for(const Workspace& w, const AttributeId& attr) {
  for (const auto& m : w.models) {
    if (m.attribute == attr.index) return m;
  }
  throw NotFoundError("no model for attribute '" + std::string(attr.name) + "'");
}

PreviewScene scene_from(const std::string& env, double yaw, double pitch, int resolution,
                        double exposure, const std::string& light) {
  PreviewScene s;
  s.camera_yaw = yaw;
  s.camera_pitch = pitch;
  s.resolution = resolution;
  s.exposure = exposure;
  if (!env.empty()) {
    s.lighting = load_environment(env);
  } else if (!light.empty()) {
    const auto v = parse_list(light);
    if (v.size() != 3) throw ArgumentError("--light expects x,y,z");
    DirectionalLight d;
    d.direction = Eigen::Vector3d(v[0], v[1], v[2]);
    s.lighting = d;
  }
  s.validate();
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Perceptual-attribute BRDF editing toolkit"};
  app.require_subcommand(1);

  // synthetic-seeds
  auto* seeds_cmd = app.add_subcommand("synthetic-seeds", "Write analytic seed BRDFs");
  std::string seeds_out;
  std::size_t seeds_count = 94;
  std::uint64_t seeds_seed = 1;
  std::vector<int> seeds_shape = {90, 90, 180};
  seeds_cmd->add_option("--out", seeds_out, "Output directory")->required();
  seeds_cmd->add_option("--count", seeds_count, "Number of materials");
  seeds_cmd->add_option("--seed", seeds_seed, "Random seed");
  seeds_cmd->add_option("--shape", seeds_shape, "theta_h theta_d phi_d")->expected(3);

  // expand
  auto* expand_cmd = app.add_subcommand("expand", "Grow a seed set inside its hull");
  std::string expand_seeds, expand_out;
  std::size_t expand_count = 400;
  std::uint64_t expand_seed = 1;
  expand_cmd->add_option("--seeds", expand_seeds, "Directory of *.binary seeds")->required();
  expand_cmd->add_option("--out", expand_out, "Output directory")->required();
  expand_cmd->add_option("--count", expand_count, "Total materials after expansion");
  expand_cmd->add_option("--seed", expand_seed, "Random seed");

  // simulate-ratings
  auto* sim_cmd = app.add_subcommand("simulate-ratings",
                                     "Draw 1-5 ratings from smooth synthetic attribute scores");
  std::string sim_alphas, sim_out;
  int sim_raters = 10;
  double sim_sigma = 0.15;
  std::uint64_t sim_seed = 1;
  sim_cmd->add_option("--alphas", sim_alphas, "alphas.csv")->required();
  sim_cmd->add_option("--out", sim_out, "Ratings CSV")->required();
  sim_cmd->add_option("--raters", sim_raters, "Ratings per BRDF and attribute");
  sim_cmd->add_option("--sigma", sim_sigma, "Rater noise on the [0,1] scale");
  sim_cmd->add_option("--seed", sim_seed, "Random seed");

  // train
  auto* train_cmd = app.add_subcommand("train", "Fit one RBF functional per attribute");
  std::string train_ratings, train_data, train_out;
  int train_centers = kDefaultCenters;
  std::uint64_t train_seed = 0;
  train_cmd->add_option("--ratings", train_ratings, "Ratings CSV")->required();
  train_cmd->add_option("--data", train_data, "Expansion directory (alphas.csv, basis.bin)")
      ->required();
  train_cmd->add_option("--out", train_out, "Model directory")->required();
  train_cmd->add_option("--centers", train_centers, "Neurons per network");
  train_cmd->add_option("--seed", train_seed, "Random seed");

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "Attribute values of a BRDF");
  std::string predict_data, predict_models, predict_brdf;
  predict_cmd->add_option("--data", predict_data, "Expansion directory")->required();
  predict_cmd->add_option("--models", predict_models, "Model directory")->required();
  predict_cmd->add_option("brdf", predict_brdf, "MERL file")->required();

  // edit
  auto* edit_cmd = app.add_subcommand("edit", "Move a BRDF towards an attribute value");
  std::string edit_data, edit_models, edit_brdf, edit_attr, edit_out, edit_path;
  double edit_target = 0.5, edit_da = 0.0, edit_db = 0.0, edit_scale = 1.0;
  edit_cmd->add_option("--data", edit_data, "Expansion directory")->required();
  edit_cmd->add_option("--models", edit_models, "Model directory")->required();
  edit_cmd->add_option("--brdf", edit_brdf, "Input MERL file")->required();
  edit_cmd->add_option("--attribute", edit_attr, "Attribute name")->required();
  edit_cmd->add_option("--target", edit_target, "Target value in [0,1]")->required();
  edit_cmd->add_option("--out", edit_out, "Output MERL file")->required();
  edit_cmd->add_option("--path-csv", edit_path, "Write the descent path here");
  edit_cmd->add_option("--delta-a", edit_da, "Lab a offset");
  edit_cmd->add_option("--delta-b", edit_db, "Lab b offset");
  edit_cmd->add_option("--chroma-scale", edit_scale, "Lab chroma scale");

  // similar
  auto* similar_cmd = app.add_subcommand("similar", "Distance between two BRDFs");
  std::string sim_a, sim_b, sim_metric, similar_data, similar_models;
  similar_cmd->add_option("a", sim_a, "First MERL file")->required();
  similar_cmd->add_option("b", sim_b, "Second MERL file")->required();
  similar_cmd->add_option("--metric", sim_metric,
                          "Attribute name or plain|cosine-weighted|cosine-weighted-cuberoot")
      ->required();
  similar_cmd->add_option("--data", similar_data, "Expansion directory (attribute metric)");
  similar_cmd->add_option("--models", similar_models, "Model directory (attribute metric)");

  // slice
  auto* slice_cmd = app.add_subcommand("slice", "2D slice of one functional");
  std::string slice_data, slice_models, slice_attr, slice_png, slice_csv, slice_fixed;
  int slice_i = 1, slice_j = 2, slice_res = 128;
  slice_cmd->add_option("--data", slice_data, "Expansion directory")->required();
  slice_cmd->add_option("--models", slice_models, "Model directory")->required();
  slice_cmd->add_option("--attribute", slice_attr, "Attribute name")->required();
  slice_cmd->add_option("-i", slice_i, "First free coefficient (1-based)");
  slice_cmd->add_option("-j", slice_j, "Second free coefficient (1-based)");
  slice_cmd->add_option("--fixed", slice_fixed,
                        "Other coefficients, ascending, comma separated (default: hull centroid)");
  slice_cmd->add_option("--resolution", slice_res, "Grid nodes per side");
  slice_cmd->add_option("--png", slice_png, "Write a colour-mapped PNG");
  slice_cmd->add_option("--csv", slice_csv, "Write raw grid values (rows: y ascending)");

  // stats
  auto* stats_cmd = app.add_subcommand("stats", "Correlations and cluster statistics");
  std::string stats_ratings, stats_clusters, stats_out;
  stats_cmd->add_option("--ratings", stats_ratings, "Ratings CSV")->required();
  stats_cmd->add_option("--clusters", stats_clusters, "brdf_id,cluster CSV");
  stats_cmd->add_option("--out", stats_out, "Output directory")->required();

  // render
  auto* render_cmd = app.add_subcommand("render", "Sphere preview PNG");
  std::string render_brdf, render_out, render_env, render_light;
  double render_yaw = 0.0, render_pitch = 0.0, render_exposure = 1.0, render_rot = 0.0;
  int render_res = 256;
  render_cmd->add_option("brdf", render_brdf, "MERL file")->required();
  render_cmd->add_option("--out", render_out, "PNG file")->required();
  render_cmd->add_option("--env", render_env, "Lat-long HDR or PFM environment");
  render_cmd->add_option("--env-rotation", render_rot, "Environment rotation (radians)");
  render_cmd->add_option("--light", render_light, "Directional light x,y,z");
  render_cmd->add_option("--yaw", render_yaw, "Camera yaw (radians)");
  render_cmd->add_option("--pitch", render_pitch, "Camera pitch (radians)");
  render_cmd->add_option("--resolution", render_res, "Image size");
  render_cmd->add_option("--exposure", render_exposure, "Exposure multiplier");

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "HTTP/JSON editing service");
  std::string serve_data, serve_models, serve_materials, serve_host = "127.0.0.1",
                                                          serve_env;
  int serve_port = 8080, serve_res = 256;
  serve_cmd->add_option("--data", serve_data, "Expansion directory")->required();
  serve_cmd->add_option("--models", serve_models, "Model directory")->required();
  serve_cmd->add_option("--materials", serve_materials,
                        "Directory of *.binary materials (default: <data>/brdfs)");
  serve_cmd->add_option("--host", serve_host, "Bind address");
  serve_cmd->add_option("--port", serve_port, "Port");
  serve_cmd->add_option("--preview-resolution", serve_res, "Preview size");
  serve_cmd->add_option("--env", serve_env, "Environment for previews");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*seeds_cmd) {
      const TableShape shape{seeds_shape[0], seeds_shape[1], seeds_shape[2]};
      const auto seeds = synthetic_seeds(shape, seeds_count, seeds_seed);
      fs::create_directories(seeds_out);
      char name[32];
      for (std::size_t i = 0; i < seeds.size(); ++i) {
        std::snprintf(name, sizeof name, "seed-%03zu.binary", i);
        write_merl(seeds[i], fs::path(seeds_out) / name);
      }
      std::cout << "wrote " << seeds.size() << " seeds to " << seeds_out << '\n';
    } else if (*expand_cmd) {
      const MerlSet set = load_merl_dir(expand_seeds);
      const Expansion e = expand_dataset(set.brdfs, set.ids, expand_count, expand_seed);
      save_expansion(e, expand_out);
      std::cout << "expanded " << set.brdfs.size() << " seeds to " << e.brdfs.size()
                << " materials; basis " << e.basis.basis_hash() << '\n';
    } else if (*sim_cmd) {
      const auto rows = load_alphas_csv(sim_alphas);
      std::vector<std::string> ids;
      std::vector<CoeffVector> alphas;
      for (const auto& r : rows) {
        ids.push_back(r.id);
        alphas.push_back(r.alpha);
      }
      const Eigen::MatrixXd scores = synthetic_attribute_scores(alphas, sim_seed);
      const RatingsTable t = simulate_ratings(ids, scores, sim_raters, sim_sigma, sim_seed + 1);
      auto out = open_out(sim_out);
      write_ratings(t, out);
      std::cout << "wrote " << t.size() << " ratings\n";
    } else if (*train_cmd) {
      const PcaBasis basis = load_basis(fs::path(train_data) / "basis.bin");
      const auto rows = load_alphas_csv(fs::path(train_data) / "alphas.csv");
      std::map<std::string, CoeffVector> alphas;
      std::map<std::string, int> strata;
      for (const auto& r : rows) {
        alphas[r.id] = r.alpha;
        strata[r.id] = r.origin == "seed" ? 0 : 1;
      }
      TrainOptions opt;
      opt.n_centers = train_centers;
      opt.seed = train_seed;
      opt.basis_hash = basis.basis_hash();
      const auto models = train_all(load_ratings(train_ratings), alphas, strata, opt);
      save_models(models, train_out);
      std::printf("%-26s %10s %10s %12s\n", "attribute", "mse_train", "mse_val", "beta");
      for (const auto& m : models) {
        std::printf("%-26s %10.5f %10.5f %12.6g\n",
                    std::string(attribute_names()[m.attribute]).c_str(), m.report.mse_train,
                    m.report.mse_validation, m.beta);
      }
    } else if (*predict_cmd) {
      const Workspace w = load_workspace(predict_data, predict_models, false);
      const CoeffVector a = achromatic_alpha(w.basis, read_merl(predict_brdf));
      for (const auto& m : w.models) {
        std::printf("%s,%.6f\n", std::string(attribute_names()[m.attribute]).c_str(),
                    eval(m, a));
      }
    } else if (*edit_cmd) {
      const Workspace w = load_workspace(edit_data, edit_models, true);
      const Brdf original = read_merl(edit_brdf);
      const RbfModel& model = model_for(w, attribute_id(edit_attr));
      const CoeffVector a = achromatic_alpha(w.basis, original);
      const EditResult r = edit(model, w.hull, a, edit_target);
      write_merl(apply_edit(w.basis, original, r, {edit_da, edit_db, edit_scale}), edit_out);
      if (!edit_path.empty()) {
        auto out = open_out(edit_path);
        write_path_csv(r, model, out);
      }
      std::printf("status=%s start=%.6f achieved=%.6f steps=%zu\n",
                  std::string(status_name(r.status)).c_str(), eval_raw(model, a),
                  r.achieved_y, r.path.size() - 1);
    } else if (*similar_cmd) {
      const Brdf a = read_merl(sim_a), b = read_merl(sim_b);
      if (find_attribute(sim_metric)) {
        if (similar_data.empty() || similar_models.empty()) {
          throw ArgumentError("attribute metrics need --data and --models");
        }
        const Workspace w = load_workspace(similar_data, similar_models, false);
        const RbfModel& m = model_for(w, attribute_id(sim_metric));
        std::printf("%.6f\n", attr_distance(m, achromatic_alpha(w.basis, a),
                                            achromatic_alpha(w.basis, b),
                                            w.basis.basis_hash()));
      } else {
        std::printf("%.6g\n", rmse_distance(a, b, parse_rmse_variant(sim_metric)));
      }
    } else if (*slice_cmd) {
      const Workspace w = load_workspace(slice_data, slice_models, true);
      ServiceConfig config;
      config.slice_resolution = slice_res;
      EditService service(w.basis, w.hull, w.models, config);
      const int i = slice_i - 1, j = slice_j - 1;
      std::vector<double> fixed;
      if (!slice_fixed.empty()) {
        fixed = parse_list(slice_fixed);
      } else {
        const CoeffVector c = w.hull.centroid();
        for (int k = 0; k < c.size(); ++k) {
          if (k != i && k != j) fixed.push_back(c(k));
        }
      }
      const int attr = attribute_id(slice_attr).index;
      const auto [grid, spec] = service.slice_grid(attr, i, j, fixed);
      if (!slice_png.empty()) write_png(grid_image(grid, 0.0, 1.0), slice_png);
      if (!slice_csv.empty()) {
        auto out = open_out(slice_csv);
        out.precision(17);
        for (Eigen::Index r = 0; r < grid.rows(); ++r) {
          for (Eigen::Index c = 0; c < grid.cols(); ++c) out << (c ? "," : "") << grid(r, c);
          out << '\n';
        }
      }
      std::printf("x=a%d in [%g, %g], y=a%d in [%g, %g], range [%g, %g]\n", slice_i,
                  spec.x_min, spec.x_max, slice_j, spec.y_min, spec.y_max, grid.minCoeff(),
                  grid.maxCoeff());
    } else if (*stats_cmd) {
      const RatingsTable t = load_ratings(stats_ratings);
      const fs::path out(stats_out);
      const CorrelationResult c = correlation_matrix(t);
      {
        auto f = open_out(out / "pearson.csv");
        write_matrix_csv(c.pearson, f);
      }
      {
        auto f = open_out(out / "spearman.csv");
        write_matrix_csv(c.spearman, f);
      }
      {
        auto f = open_out(out / "significance.csv");
        write_significance_csv(c, f);
      }
      if (!stats_clusters.empty()) {
        const ClusterStats s = cluster_stats(t, load_clusters(stats_clusters));
        auto f = open_out(out / "cluster_stats.csv");
        write_cluster_stats_csv(s, f);
        for (const auto& w : s.warnings) std::cerr << "warning: " << w << '\n';
      }
      std::cout << "wrote statistics for " << t.brdf_ids().size() << " BRDFs to " << stats_out
                << '\n';
    } else if (*render_cmd) {
      PreviewScene s = scene_from(render_env, render_yaw, render_pitch, render_res,
                                  render_exposure, render_light);
      if (auto* env = std::get_if<EnvironmentMap>(&s.lighting)) env->rotation = render_rot;
      write_png(render_sphere(read_merl(render_brdf), s), render_out);
    } else if (*serve_cmd) {
      const Workspace w = load_workspace(serve_data, serve_models, true);
      ServiceConfig config;
      config.scene = scene_from(serve_env, 0.0, 0.0, serve_res, 1.0, "");
      EditService service(w.basis, w.hull, w.models, config);
      const fs::path dir =
          serve_materials.empty() ? fs::path(serve_data) / "brdfs" : fs::path(serve_materials);
      const MerlSet set = load_merl_dir(dir);
      for (std::size_t i = 0; i < set.ids.size(); ++i) {
        service.register_brdf(set.ids[i], set.brdfs[i]);
      }
      std::cout << "serving " << set.ids.size() << " materials on http://" << serve_host
                << ':' << serve_port << std::endl;
      serve(service, serve_host, serve_port);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

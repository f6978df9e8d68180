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

// Project headers first: httplib.h drags in <resolv.h> (see http_server.cc).
#include "matspace/service.h"

#include <chrono>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>

#include "matspace/error.h"
#include "matspace/synthetic.h"

namespace matspace {
namespace {

constexpr TableShape kShape{8, 8, 16};

struct Fixture {
  Expansion expansion;
  std::vector<RbfModel> models;
};

const Fixture& fixture() {
  static const Fixture f = [] {
    Fixture out;
    const auto seeds = synthetic_seeds(kShape, 20, 11);
    out.expansion = expand_dataset(seeds, {}, 60, 3);
    std::vector<CoeffVector> alphas;
    for (const auto& m : out.expansion.manifest) alphas.push_back(m.alpha5);
    const Eigen::MatrixXd scores = synthetic_attribute_scores(alphas, 5);
    for (int a = 0; a < kAttributeCount; ++a) {
      TrainOptions opt;
      opt.attribute = a;
      opt.seed = 100 + a;
      opt.basis_hash = out.expansion.basis.basis_hash();
      const std::vector<double> y(scores.col(a).data(), scores.col(a).data() + scores.rows());
      out.models.push_back(train(alphas, y, opt));
    }
    return out;
  }();
  return f;
}

std::unique_ptr<EditService> make_service() {
  const Fixture& f = fixture();
  ServiceConfig config;
  config.scene.resolution = 32;
  config.slice_resolution = 24;
  auto s = std::make_unique<EditService>(f.expansion.basis, f.expansion.hull, f.models, config);
  for (std::size_t i = 0; i < 5; ++i) {
    s->register_brdf(f.expansion.manifest[i].id, f.expansion.brdfs[i]);
  }
  return s;
}

TEST(Registry, FirstInsertWins) {
  MaterialRegistry r;
  Material a;
  a.id = "x";
  a.origin = "first";
  Material b = a;
  b.origin = "second";
  r.insert(a);
  EXPECT_EQ(r.insert(b)->origin, "first");
  EXPECT_EQ(r.size(), 1u);
  EXPECT_THROW(r.get("y"), NotFoundError);
  EXPECT_EQ(r.find("y"), nullptr);
}

TEST(Service, ConstructorChecksModels) {
  const Fixture& f = fixture();
  auto fewer = f.models;
  fewer.pop_back();
  EXPECT_THROW(EditService(f.expansion.basis, f.expansion.hull, fewer), ArgumentError);
  auto other = f.models;
  other[3].basis_hash = "something-else";
  EXPECT_THROW(EditService(f.expansion.basis, f.expansion.hull, other), CompatibilityError);
}

TEST(Service, IdentityEdit) {
  auto s = make_service();
  const auto parent = s->registry().get("seed-002");
  const double current = parent->attributes_raw[8];
  const auto res = s->handle_edit_request(
      {{"material_id", "seed-002"}, {"attribute", "glossy"}, {"target_y", current}});
  EXPECT_EQ(res["status"], "converged");
  EXPECT_EQ(res["path"].size(), 1u);
  const auto alpha = res["alpha"].get<std::vector<double>>();
  for (int k = 0; k < 5; ++k) EXPECT_EQ(alpha[k], parent->alpha5(k));
  const auto child = s->registry().get(res["new_material_id"]);
  EXPECT_EQ(child->parent_id, "seed-002");
  EXPECT_EQ(child->attributes, parent->attributes);
}

TEST(Service, EditIsDeterministicAndConsistent) {
  auto s = make_service();
  const nlohmann::json req = {{"material_id", "seed-001"},
                              {"attribute", "metallic-like"},
                              {"target_y", 0.6}};
  const auto a = s->handle_edit_request(req);
  const auto b = s->handle_edit_request(req);
  EXPECT_EQ(a, b);
  auto other = make_service();
  EXPECT_EQ(other->handle_edit_request(req), a);

  // The attribute vector is the models evaluated at the new coefficients.
  const auto m = s->registry().get(a["new_material_id"]);
  const auto alpha = a["alpha"].get<std::vector<double>>();
  const CoeffVector v = Eigen::Map<const CoeffVector>(alpha.data(), 5);
  for (int k = 0; k < kAttributeCount; ++k) {
    const double raw = eval_raw(fixture().models[k], v);
    EXPECT_EQ(a["attribute_vector_raw"][k].get<double>(), raw);
    EXPECT_EQ(a["attribute_vector"][k].get<double>(), std::clamp(raw, 0.0, 1.0));
  }
  EXPECT_TRUE(s->hull().contains(v));
  for (const auto& p : a["path"]) {
    const auto pv = p.get<std::vector<double>>();
    EXPECT_TRUE(s->hull().contains(Eigen::Map<const CoeffVector>(pv.data(), 5)));
  }
  EXPECT_EQ(a["preview_url"], "/materials/" + a["new_material_id"].get<std::string>() +
                                  "/preview.png");
  // Edits of edits chain.
  const auto c = s->handle_edit_request({{"material_id", a["new_material_id"]},
                                         {"attribute", "matte"},
                                         {"target_y", 0.3},
                                         {"chroma", {{"delta_a", 2.0}}}});
  EXPECT_NE(c["new_material_id"], a["new_material_id"]);
  EXPECT_EQ(s->registry().size(), 7u);
}

TEST(Service, BadRequests) {
  auto s = make_service();
  EXPECT_THROW(s->handle_edit_request(
                   {{"material_id", "nope"}, {"attribute", "soft"}, {"target_y", 0.5}}),
               NotFoundError);
  EXPECT_THROW(s->handle_edit_request(
                   {{"material_id", "seed-000"}, {"attribute", "shiny"}, {"target_y", 0.5}}),
               SchemaError);
  EXPECT_THROW(s->handle_edit_request(
                   {{"material_id", "seed-000"}, {"attribute", "soft"}, {"target_y", 1.5}}),
               ArgumentError);
  EXPECT_THROW(s->handle_edit_request({{"material_id", "seed-000"}, {"attribute", "soft"}}),
               SchemaError);
  EXPECT_THROW(s->handle_edit_request(nlohmann::json::array()), SchemaError);
}

TEST(Service, MaterialViews) {
  auto s = make_service();
  const auto list = s->materials_json();
  ASSERT_EQ(list["materials"].size(), 5u);
  EXPECT_EQ(list["materials"][0]["id"], "seed-000");
  const auto m = s->material_json("seed-003");
  EXPECT_EQ(m["attributes"].size(), 14u);
  EXPECT_EQ(m["attribute_vector"].size(), 14u);
  EXPECT_EQ(m["basis_hash"], fixture().expansion.basis.basis_hash());
  EXPECT_TRUE(m["in_hull"].get<bool>());
  EXPECT_EQ(s->attributes_json()["attributes"][13]["name"], "sharpness of reflections");
}

TEST(Service, PreviewIsCachedPng) {
  auto s = make_service();
  const auto a = s->preview_png("seed-000");
  const auto b = s->preview_png("seed-000");
  EXPECT_EQ(a, b);
  const Image img = decode_png(a);
  EXPECT_EQ(img.width, 32);
  EXPECT_THROW(s->preview_png("nope"), NotFoundError);
}

TEST(Service, SliceGrid) {
  auto s = make_service();
  const std::vector<double> fixed = {0.01, -0.02, 0.0};
  const auto [grid, spec] = s->slice_grid(4, 0, 2, fixed);
  ASSERT_EQ(grid.rows(), 24);
  EXPECT_EQ(spec.anchor(1), 0.01);
  EXPECT_EQ(spec.anchor(3), -0.02);
  EXPECT_EQ(spec.anchor(4), 0.0);
  const auto [lo, hi] = s->hull().bounds();
  EXPECT_LT(spec.x_min, lo(0));
  EXPECT_GT(spec.y_max, hi(2));
  EXPECT_EQ(grid(5, 7), eval_raw(fixture().models[4], spec.point(7, 5)));
  EXPECT_THROW(s->slice_grid(4, 1, 1, fixed), ArgumentError);
  EXPECT_THROW(s->slice_grid(4, 0, 1, {0.0}), ArgumentError);
  EXPECT_EQ(decode_png(s->slice_png(4, 0, 2, fixed)).height, 24);
}

TEST(Service, GridImageTopRowIsLargestY) {
  Eigen::MatrixXd g(2, 1);
  g << 0.0, 1.0;  // row 0 = smallest y
  const Image img = grid_image(g, 0.0, 1.0);
  EXPECT_EQ(img.rgb[0], 253);  // top pixel holds the high value
  EXPECT_EQ(img.rgb[3], 68);
}

TEST(Service, StatusCodes) {
  EXPECT_EQ(http_status_for(NotFoundError("x")), 404);
  EXPECT_EQ(http_status_for(CompatibilityError("x")), 409);
  EXPECT_EQ(http_status_for(ArgumentError("x")), 400);
  EXPECT_EQ(http_status_for(SchemaError("x")), 400);
  EXPECT_EQ(http_status_for(NumericError("x")), 500);
}

class HttpTest : public ::testing::Test {
 protected:
  void SetUp() override {
    service_ = make_service();
    install_routes(server_, *service_);
    port_ = server_.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port_, 0);
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  void TearDown() override {
    server_.stop();
    thread_.join();
  }
  httplib::Client client() { return httplib::Client("127.0.0.1", port_); }

  std::unique_ptr<EditService> service_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

TEST_F(HttpTest, Routes) {
  auto c = client();
  auto r = c.Get("/attributes");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(nlohmann::json::parse(r->body)["attributes"].size(), 14u);

  r = c.Get("/materials");
  ASSERT_TRUE(r);
  EXPECT_EQ(nlohmann::json::parse(r->body)["materials"].size(), 5u);

  r = c.Get("/materials/seed-004");
  ASSERT_TRUE(r);
  EXPECT_EQ(nlohmann::json::parse(r->body)["id"], "seed-004");

  r = c.Get("/materials/missing");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 404);
  EXPECT_TRUE(nlohmann::json::parse(r->body).contains("error"));

  r = c.Post("/edit",
             R"({"material_id":"seed-000","attribute":"bright","target_y":0.7})",
             "application/json");
  ASSERT_TRUE(r);
  ASSERT_EQ(r->status, 200) << r->body;
  const auto body = nlohmann::json::parse(r->body);
  EXPECT_EQ(body, service_->handle_edit_request(
                      {{"material_id", "seed-000"}, {"attribute", "bright"}, {"target_y", 0.7}}));

  r = c.Get(body["preview_url"].get<std::string>());
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(r->get_header_value("Content-Type"), "image/png");
  EXPECT_EQ(decode_png({r->body.begin(), r->body.end()}).width, 32);

  r = c.Post("/edit", "{not json", "application/json");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 400);

  r = c.Get("/slice?attr=glossy&i=1&j=2");
  ASSERT_TRUE(r);
  ASSERT_EQ(r->status, 200) << r->body;
  EXPECT_FALSE(r->get_header_value("X-Slice-Bounds").empty());
  EXPECT_EQ(decode_png({r->body.begin(), r->body.end()}).width, 24);

  r = c.Get("/slice?attr=glossy&i=1&j=2&fixed=0,0,0");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  r = c.Get("/slice?attr=glossy&i=1&j=1");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 400);
  r = c.Get("/slice?attr=glossy&i=x&j=1");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 400);
}

TEST_F(HttpTest, ConcurrentEdits) {
  std::vector<std::thread> threads;
  std::vector<std::string> ids(4);
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      auto c = client();
      const nlohmann::json req = {{"material_id", "seed-00" + std::to_string(t)},
                                  {"attribute", "rough"},
                                  {"target_y", 0.4}};
      auto r = c.Post("/edit", req.dump(), "application/json");
      if (r && r->status == 200) ids[t] = nlohmann::json::parse(r->body)["new_material_id"];
    });
  }
  for (auto& th : threads) th.join();
  for (const auto& id : ids) EXPECT_TRUE(service_->registry().find(id) != nullptr);
  EXPECT_EQ(service_->registry().size(), 9u);
}

}  // namespace
}  // namespace matspace

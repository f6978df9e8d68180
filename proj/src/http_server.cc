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

// Project headers (and Eigen) must precede httplib.h: it pulls in
// <resolv.h>, whose _res macro breaks Eigen's product kernels.
#include "matspace/service.h"

#include <charconv>
#include <cmath>
#include <sstream>

#include <httplib.h>

#include "matspace/error.h"

namespace matspace {
namespace {

void send_json(httplib::Response& res, const nlohmann::json& body) {
  res.set_content(body.dump(), "application/json");
}

void send_png(httplib::Response& res, const std::vector<std::uint8_t>& png) {
  res.set_content(std::string(png.begin(), png.end()), "image/png");
}

template <typename F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const std::exception& e) {
      res.status = http_status_for(e);
      send_json(res, {{"error", e.what()}});
    }
  };
}

int int_param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) {
    throw ArgumentError(std::string("missing query parameter '") + name + "'");
  }
  const std::string v = req.get_param_value(name);
  int out = 0;
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || end != v.data() + v.size()) {
    throw ArgumentError(std::string("parameter '") + name + "' must be an integer");
  }
  return out;
}

std::vector<double> list_param(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || !std::isfinite(v)) {
      throw ArgumentError("bad number '" + item + "' in list");
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace

void install_routes(httplib::Server& server, EditService& service) {
  server.Get("/attributes", guarded([&service](const httplib::Request&,
                                               httplib::Response& res) {
               send_json(res, service.attributes_json());
             }));
  server.Get("/materials", guarded([&service](const httplib::Request&,
                                              httplib::Response& res) {
               send_json(res, service.materials_json());
             }));
  server.Get(R"(/materials/([^/]+)/preview\.png)",
             guarded([&service](const httplib::Request& req, httplib::Response& res) {
               send_png(res, service.preview_png(req.matches[1]));
             }));
  server.Get(R"(/materials/([^/]+))",
             guarded([&service](const httplib::Request& req, httplib::Response& res) {
               send_json(res, service.material_json(req.matches[1]));
             }));
  server.Post("/edit", guarded([&service](const httplib::Request& req,
                                          httplib::Response& res) {
                nlohmann::json body;
                try {
                  body = nlohmann::json::parse(req.body);
                } catch (const nlohmann::json::exception& e) {
                  throw SchemaError(std::string("request body is not JSON: ") + e.what());
                }
                send_json(res, service.handle_edit_request(body));
              }));
  // i and j are 1-based coefficient indices; fixed lists the remaining
  // coordinates in ascending order.
  server.Get("/slice", guarded([&service](const httplib::Request& req,
                                          httplib::Response& res) {
               if (!req.has_param("attr")) throw ArgumentError("missing 'attr'");
               const AttributeId attr = attribute_id(req.get_param_value("attr"));
               const int i = int_param(req, "i") - 1;
               const int j = int_param(req, "j") - 1;
               std::vector<double> fixed;
               if (req.has_param("fixed") && !req.get_param_value("fixed").empty()) {
                 fixed = list_param(req.get_param_value("fixed"));
               } else {
                 const CoeffVector c = service.hull().centroid();
                 for (int k = 0; k < c.size(); ++k) {
                   if (k != i && k != j) fixed.push_back(c(k));
                 }
               }
               const auto [grid, spec] = service.slice_grid(attr.index, i, j, fixed);
               std::ostringstream bounds;
               bounds.precision(17);
               bounds << spec.x_min << ',' << spec.x_max << ',' << spec.y_min << ','
                      << spec.y_max;
               res.set_header("X-Slice-Bounds", bounds.str());
               send_png(res, encode_png(grid_image(grid, 0.0, 1.0)));
             }));
}

void serve(EditService& service, const std::string& host, int port) {
  httplib::Server server;
  install_routes(server, service);
  if (!server.listen(host, port)) {
    throw IoError("cannot listen on " + host + ":" + std::to_string(port));
  }
}

}  // namespace matspace

#include "coax/model_io.hpp"

#include <json.hpp>

#include "coax/error.hpp"

namespace coax {

using nlohmann::json;

std::string groups_to_json(const std::vector<CorrelationGroup>& groups, std::size_t n_dims,
                           const std::vector<std::string>& names) {
  json doc;
  doc["format"] = "coax-models";
  doc["version"] = 1;
  doc["n_dims"] = n_dims;
  doc["names"] = names;
  doc["groups"] = json::array();
  for (const auto& g : groups) {
    json jg;
    jg["predictor"] = g.predictor;
    jg["dependents"] = json::array();
    for (const auto& m : g.models) {
      jg["dependents"].push_back({{"dim", m.dependent_dim},
                                  {"m", m.m},
                                  {"b", m.b},
                                  {"eps_lb", m.eps_lb},
                                  {"eps_ub", m.eps_ub},
                                  {"fit_quality", m.fit_quality}});
    }
    doc["groups"].push_back(std::move(jg));
  }
  return doc.dump(2) + "\n";
}

std::vector<CorrelationGroup> groups_from_json(const std::string& text, std::size_t expected_dims) {
  std::vector<CorrelationGroup> groups;
  try {
    const json doc = json::parse(text);
    if (doc.value("format", "") != "coax-models") throw Error(ErrorCode::Parse, "not a coax model file");
    if (doc.at("version").get<int>() != 1) throw Error(ErrorCode::Parse, "unsupported model file version");
    const auto n_dims = doc.at("n_dims").get<std::size_t>();
    if (expected_dims != 0 && n_dims != expected_dims) {
      throw Error(ErrorCode::InvalidArgument, "model file was learned on " + std::to_string(n_dims) +
                                                  " dimensions, dataset has " + std::to_string(expected_dims));
    }
    for (const auto& jg : doc.at("groups")) {
      CorrelationGroup g;
      g.predictor = jg.at("predictor").get<std::size_t>();
      for (const auto& jm : jg.at("dependents")) {
        SoftFdModel m;
        m.indexed_dim = g.predictor;
        m.dependent_dim = jm.at("dim").get<std::size_t>();
        m.m = jm.at("m").get<double>();
        m.b = jm.at("b").get<double>();
        m.eps_lb = jm.at("eps_lb").get<double>();
        m.eps_ub = jm.at("eps_ub").get<double>();
        m.fit_quality = jm.value("fit_quality", 0.0);
        g.models.push_back(m);
      }
      groups.push_back(std::move(g));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("malformed model file: ") + e.what());
  }
  return groups;
}

std::string stats_to_json(const IndexStats& s) {
  json doc = {{"primary_ratio", s.primary_ratio},
              {"n_rows", s.n_rows},
              {"primary_rows", s.primary_rows},
              {"outlier_rows", s.outlier_rows},
              {"indexed_dims", s.indexed_dims},
              {"dependent_dims", s.dependent_dims},
              {"primary_grid_dims", s.primary_grid_dims},
              {"primary_directory_bytes", s.primary_directory_bytes},
              {"outlier_directory_bytes", s.outlier_directory_bytes}};
  return doc.dump(2) + "\n";
}

}  // namespace coax

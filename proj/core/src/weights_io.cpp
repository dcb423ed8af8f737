#include "geodex/weights_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "geodex/errors.hpp"

namespace geodex {
namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kFormatTag = "geodex-mlp";
constexpr int kVersion = 1;

Json to_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(x);
  return a;
}

const Json& member(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) throw ParseError(where + ": missing '" + key + "'");
  return obj.at(key);
}

Eigen::VectorXd vector_from(const Json& a, const std::string& where) {
  if (!a.is_array()) throw ParseError(where + ": expected an array of numbers");
  Eigen::VectorXd v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_number()) throw ParseError(where + ": non-numeric entry");
    v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
  }
  return v;
}

Eigen::MatrixXd matrix_from(const Json& a, const std::string& where) {
  if (!a.is_array() || a.empty()) throw ParseError(where + ": expected a non-empty array of rows");
  const std::size_t cols = a[0].is_array() ? a[0].size() : 0;
  if (cols == 0) throw ParseError(where + ": empty weight row");
  Eigen::MatrixXd m(a.size(), cols);
  for (std::size_t r = 0; r < a.size(); ++r) {
    const Eigen::VectorXd row = vector_from(a[r], where);
    if (static_cast<std::size_t>(row.size()) != cols) throw ParseError(where + ": ragged weight rows");
    m.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return m;
}

}  // namespace

std::string format_weights(const WeightsFile& file) {
  Json j;
  j["format"] = kFormatTag;
  j["version"] = kVersion;
  j["input_dim"] = file.network.input_dim();
  j["output_dim"] = file.network.output_dim();
  Json layers = Json::array();
  for (const auto& layer : file.network.layers()) {
    Json rows = Json::array();
    for (int r = 0; r < layer.weight.rows(); ++r) rows.push_back(to_json(layer.weight.row(r).transpose()));
    Json l;
    l["weight"] = std::move(rows);
    l["bias"] = to_json(layer.bias);
    l["activation"] = to_string(layer.activation);
    layers.push_back(std::move(l));
  }
  j["layers"] = std::move(layers);
  if (file.header) {
    const auto& h = *file.header;
    Json hj;
    hj["manifold"] = h.manifold;
    if (h.source) hj["source_point"] = to_json(*h.source);
    if (h.domain) hj["domain_box"] = Json{{"lower", to_json(h.domain->lower)}, {"upper", to_json(h.domain->upper)}};
    if (h.standardisation) {
      hj["standardisation"] =
          Json{{"center", to_json(h.standardisation->center)}, {"scale", to_json(h.standardisation->scale)}};
    }
    if (h.checkpoint_loss) hj["checkpoint_loss"] = *h.checkpoint_loss;
    j["header"] = std::move(hj);
  }
  return j.dump(1) + "\n";
}

WeightsFile parse_weights(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("weights file is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || j.value("format", std::string{}) != kFormatTag) {
    throw ParseError("weights file: missing or unknown 'format' tag");
  }
  if (member(j, "version", "weights file").get<int>() != kVersion) throw ParseError("weights file: unsupported version");

  const Json& lj = member(j, "layers", "weights file");
  if (!lj.is_array() || lj.empty()) throw ParseError("weights file: 'layers' must be a non-empty array");
  std::vector<DenseLayer> layers;
  for (std::size_t l = 0; l < lj.size(); ++l) {
    const std::string where = "layer " + std::to_string(l);
    DenseLayer layer;
    layer.weight = matrix_from(member(lj[l], "weight", where), where + " weight");
    layer.bias = vector_from(member(lj[l], "bias", where), where + " bias");
    const Json& act = member(lj[l], "activation", where);
    if (!act.is_string()) throw ParseError(where + ": activation must be a string");
    layer.activation = activation_from_string(act.get<std::string>());
    layers.push_back(std::move(layer));
  }

  WeightsFile file;
  try {
    file.network = MlpNetwork(std::move(layers));
  } catch (const ConfigError& e) {
    throw ParseError(std::string("weights file: ") + e.what());
  }
  if (member(j, "input_dim", "weights file").get<int>() != file.network.input_dim() ||
      member(j, "output_dim", "weights file").get<int>() != file.network.output_dim()) {
    throw ParseError("weights file: declared input/output dims do not match the layers");
  }

  if (j.contains("header")) {
    const Json& hj = j.at("header");
    FieldHeader h;
    h.manifold = hj.value("manifold", std::string{});
    if (hj.contains("source_point")) h.source = vector_from(hj.at("source_point"), "header source_point");
    if (hj.contains("domain_box")) {
      const Json& b = hj.at("domain_box");
      DomainBox box{vector_from(member(b, "lower", "domain_box"), "domain_box lower"),
                    vector_from(member(b, "upper", "domain_box"), "domain_box upper")};
      if (box.lower.size() != box.upper.size()) throw ParseError("domain_box bounds differ in length");
      h.domain = box;
    }
    if (hj.contains("standardisation")) {
      const Json& s = hj.at("standardisation");
      h.standardisation = Standardisation{vector_from(member(s, "center", "standardisation"), "center"),
                                          vector_from(member(s, "scale", "standardisation"), "scale")};
    }
    if (hj.contains("checkpoint_loss")) h.checkpoint_loss = hj.at("checkpoint_loss").get<double>();
    file.header = std::move(h);
  }
  return file;
}

WeightsFile read_weights(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open weights file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_weights(ss.str());
}

void write_weights(const std::string& path, const WeightsFile& file) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write weights file '" + path + "'");
  out << format_weights(file);
}

}  // namespace geodex

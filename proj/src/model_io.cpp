#include "pintw/model_io.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "pintw/errors.hpp"

namespace pintw {
namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;

json to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

json to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    rows.push_back(to_json(Eigen::VectorXd(m.row(i).transpose())));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", rows}};
}

Eigen::VectorXd vector_from(const json& arr) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  }
  return v;
}

Eigen::MatrixXd matrix_from(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  Eigen::MatrixXd m(rows, cols);
  const json& data = j.at("data");
  for (Eigen::Index i = 0; i < rows; ++i) {
    m.row(i) = vector_from(data[static_cast<std::size_t>(i)]).transpose();
  }
  return m;
}

json plane_to_json(const Hyperplane& p) {
  return {{"w", to_json(p.w)},
          {"b", p.b},
          {"w_star", to_json(p.w_star)},
          {"b_star", p.b_star}};
}

Hyperplane plane_from_json(const json& j) {
  Hyperplane p;
  p.w = vector_from(j.at("w"));
  p.b = j.at("b").get<double>();
  p.w_star = vector_from(j.at("w_star"));
  p.b_star = j.at("b_star").get<double>();
  return p;
}

json model_to_json(const Model& m) {
  json j;
  j["variant"] = to_string(m.variant);
  j["kernel"] = {{"kind", to_string(m.kernel.kind)}, {"sigma", m.kernel.sigma}};
  j["plane_pos"] = plane_to_json(m.plane_pos);
  j["plane_neg"] = plane_to_json(m.plane_neg);
  j["support"] = to_json(m.support);
  j["support_priv"] = to_json(m.support_priv);
  j["hyperparams"] = {{"c1", m.hp.c1},       {"c2", m.hp.c2},
                      {"gamma", m.hp.gamma}, {"tau", m.hp.tau},
                      {"seed", m.hp.seed}};
  j["distance_rule"] = to_string(m.distance_rule);
  j["privileged_terms"] = m.privileged_terms;
  if (m.scaler) {
    j["scaler"] = {{"mean", to_json(m.scaler->mean)},
                   {"scale", to_json(m.scaler->scale)}};
  }
  return j;
}

Model model_from_json(const json& j) {
  Model m;
  m.variant = j.at("variant").get<std::string>() == "kernel"
                  ? ModelVariant::kernel
                  : ModelVariant::linear;
  m.kernel.kind = kernel_kind_from_string(j.at("kernel").at("kind").get<std::string>());
  m.kernel.sigma = j.at("kernel").at("sigma").get<double>();
  m.plane_pos = plane_from_json(j.at("plane_pos"));
  m.plane_neg = plane_from_json(j.at("plane_neg"));
  m.support = matrix_from(j.at("support"));
  m.support_priv = matrix_from(j.at("support_priv"));
  const json& hp = j.at("hyperparams");
  m.hp.c1 = hp.at("c1").get<double>();
  m.hp.c2 = hp.at("c2").get<double>();
  m.hp.gamma = hp.at("gamma").get<double>();
  m.hp.tau = hp.at("tau").get<double>();
  m.hp.seed = hp.at("seed").get<std::uint64_t>();
  m.hp.kernel = m.kernel;
  m.distance_rule = distance_rule_from_string(j.at("distance_rule").get<std::string>());
  m.privileged_terms = j.at("privileged_terms").get<bool>();
  if (j.contains("scaler")) {
    Scaler s;
    s.mean = vector_from(j.at("scaler").at("mean"));
    s.scale = vector_from(j.at("scaler").at("scale"));
    m.scaler = std::move(s);
  }
  return m;
}

json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError("malformed model file " + path + ": " + e.what());
  }
  return j;
}

void write_file(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write model file: " + path);
  out << j.dump(2) << "\n";
}

void check_version(const json& j, const std::string& path) {
  if (!j.contains("version") || j.at("version").get<int>() != kSchemaVersion) {
    throw DataError("unsupported model schema in " + path);
  }
}

}  // namespace

void save_model(const Model& model, const std::string& path) {
  json j = model_to_json(model);
  j["version"] = kSchemaVersion;
  j["type"] = "binary";
  write_file(j, path);
}

Model load_model(const std::string& path) {
  json j = read_file(path);
  check_version(j, path);
  if (j.at("type").get<std::string>() != "binary") {
    throw DataError(path + " holds a multiclass model; load it as such");
  }
  return model_from_json(j);
}

void save_multiclass(const MulticlassModel& model, const std::string& path) {
  json j;
  j["version"] = kSchemaVersion;
  j["type"] = "multiclass";
  j["class_ids"] = model.class_ids;
  json models = json::array();
  for (const Model& m : model.models) models.push_back(model_to_json(m));
  j["models"] = std::move(models);
  write_file(j, path);
}

MulticlassModel load_multiclass(const std::string& path) {
  json j = read_file(path);
  check_version(j, path);
  if (j.at("type").get<std::string>() != "multiclass") {
    throw DataError(path + " holds a binary model; load it as such");
  }
  MulticlassModel mc;
  mc.class_ids = j.at("class_ids").get<std::vector<int>>();
  for (const json& mj : j.at("models")) mc.models.push_back(model_from_json(mj));
  if (mc.class_ids.size() != mc.models.size()) {
    throw DataError("model count does not match class count in " + path);
  }
  return mc;
}

bool model_file_is_multiclass(const std::string& path) {
  json j = read_file(path);
  check_version(j, path);
  return j.at("type").get<std::string>() == "multiclass";
}

void save_pca_basis(const PCABasis& basis, const std::string& path) {
  json j;
  j["version"] = kSchemaVersion;
  j["type"] = "pca_basis";
  j["mean"] = to_json(basis.mean);
  j["components"] = to_json(basis.components);
  j["explained_variance"] = to_json(basis.explained_variance);
  write_file(j, path);
}

PCABasis load_pca_basis(const std::string& path) {
  json j = read_file(path);
  check_version(j, path);
  if (j.at("type").get<std::string>() != "pca_basis") {
    throw DataError(path + " is not a PCA basis file");
  }
  PCABasis basis;
  basis.mean = vector_from(j.at("mean"));
  basis.components = matrix_from(j.at("components"));
  basis.explained_variance = vector_from(j.at("explained_variance"));
  return basis;
}

}  // namespace pintw

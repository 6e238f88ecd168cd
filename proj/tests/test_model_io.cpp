#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "pintw/errors.hpp"
#include "pintw/evaluation.hpp"
#include "pintw/model_io.hpp"
#include "pintw/synthetic.hpp"

using namespace pintw;

namespace {

Model train_small_model(KernelKind kind) {
  Dataset ds = make_blobs(60, 2, 6.0, 31);
  PCABasis basis = fit_pca(ds.features, 0.95);
  ds.privileged = extract_privileged(ds.features, basis);
  ClassPartition part = partition_by_class(ds);
  Hyperparams hp;
  hp.kernel.kind = kind;
  hp.kernel.sigma = 1.7;
  SolverConfig cfg;
  return train_pin_twsvmpi(part, hp, cfg);
}

}  // namespace

TEST_CASE("binary model round-trips with bit-identical predictions") {
  for (KernelKind kind : {KernelKind::linear, KernelKind::rbf}) {
    Model m = train_small_model(kind);
    const std::string path = "tmp_model.json";
    save_model(m, path);
    Model loaded = load_model(path);

    Dataset probe = make_blobs(40, 2, 6.0, 33);
    for (Eigen::Index i = 0; i < probe.num_samples(); ++i) {
      Eigen::VectorXd x = probe.features.row(i).transpose();
      CHECK(predict(m, x) == predict(loaded, x));
      CHECK(plane_score(m, m.plane_pos, x) ==
            plane_score(loaded, loaded.plane_pos, x));  // exact, not approx
    }
    CHECK(loaded.hp.tau == m.hp.tau);
    CHECK(loaded.kernel.sigma == m.kernel.sigma);
    CHECK(loaded.distance_rule == m.distance_rule);
    std::remove(path.c_str());
  }
}

TEST_CASE("scaler round-trips inside the model") {
  Dataset ds = make_blobs(60, 2, 6.0, 35);
  auto [scaled, scaler] = standardize(ds);
  PCABasis basis = fit_pca(scaled.features, 0.95);
  scaled.privileged = extract_privileged(scaled.features, basis);
  ClassPartition part = partition_by_class(scaled);
  Hyperparams hp;
  SolverConfig cfg;
  Model m = train_pin_twsvmpi(part, hp, cfg);
  m.scaler = scaler;

  const std::string path = "tmp_scaled_model.json";
  save_model(m, path);
  Model loaded = load_model(path);
  REQUIRE(loaded.scaler.has_value());
  // Predictions on raw (unscaled) inputs must agree exactly.
  for (Eigen::Index i = 0; i < 10; ++i) {
    Eigen::VectorXd x = ds.features.row(i).transpose();
    CHECK(predict(m, x) == predict(loaded, x));
  }
  std::remove(path.c_str());
}

TEST_CASE("multiclass model round-trip") {
  Dataset ds = make_blobs(60, 2, 6.0, 37);
  PCABasis basis = fit_pca(ds.features, 0.95);
  ds.privileged = extract_privileged(ds.features, basis);
  Hyperparams hp;
  SolverConfig cfg;
  MulticlassModel mc = train_multiclass(ds, hp, cfg);

  const std::string path = "tmp_multiclass.json";
  save_multiclass(mc, path);
  CHECK(model_file_is_multiclass(path));
  MulticlassModel loaded = load_multiclass(path);
  CHECK(loaded.class_ids == mc.class_ids);
  Eigen::VectorXi p1 = predict(mc, ds.features);
  Eigen::VectorXi p2 = predict(loaded, ds.features);
  CHECK((p1 - p2).cwiseAbs().maxCoeff() == 0);
  std::remove(path.c_str());
}

TEST_CASE("pca basis round-trips exactly") {
  Dataset ds = make_blobs(50, 2, 4.0, 39);
  PCABasis basis = fit_pca(ds.features, 2);
  const std::string path = "tmp_basis.json";
  save_pca_basis(basis, path);
  PCABasis loaded = load_pca_basis(path);
  CHECK((loaded.mean - basis.mean).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((loaded.components - basis.components).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((loaded.explained_variance - basis.explained_variance)
            .lpNorm<Eigen::Infinity>() == 0.0);
  std::remove(path.c_str());
}

TEST_CASE("type and version tags are enforced") {
  Model m = train_small_model(KernelKind::linear);
  const std::string path = "tmp_tagged.json";
  save_model(m, path);
  CHECK_FALSE(model_file_is_multiclass(path));
  CHECK_THROWS_AS(load_multiclass(path), DataError);
  CHECK_THROWS_AS(load_pca_basis(path), DataError);
  std::remove(path.c_str());

  std::ofstream(path) << "{\"version\": 999}\n";
  CHECK_THROWS_AS(load_model(path), DataError);
  std::remove(path.c_str());

  std::ofstream(path) << "not json at all\n";
  CHECK_THROWS_AS(load_model(path), DataError);
  std::remove(path.c_str());

  CHECK_THROWS_AS(load_model("does_not_exist.json"), DataError);
}

#include <doctest.h>

#include <random>

#include "pintw/errors.hpp"
#include "pintw/evaluation.hpp"
#include "pintw/pca.hpp"
#include "pintw/synthetic.hpp"
#include "pintw/trainer.hpp"

using namespace pintw;

namespace {

Dataset blobs_with_pca_privileged(Eigen::Index n, std::uint64_t seed) {
  Dataset ds = make_blobs(n, 2, 6.0, seed);
  PCABasis basis = fit_pca(ds.features, 0.95);
  ds.privileged = extract_privileged(ds.features, basis);
  return ds;
}

// Primal objective of the class-1 privileged problem at recovered variables.
double primal_value(const ClassPartition& part, const Hyperparams& hp,
                    const Hyperplane& plane) {
  const Eigen::VectorXd proj =
      part.A * plane.w + Eigen::VectorXd::Constant(part.m1(), plane.b);
  const Eigen::VectorXd proj_star =
      part.A_star * plane.w_star +
      Eigen::VectorXd::Constant(part.m1(), plane.b_star);
  const Eigen::VectorXd xi =
      part.B_star * plane.w_star +
      Eigen::VectorXd::Constant(part.m2(), plane.b_star);
  return 0.5 * plane.w.squaredNorm() + 0.5 * hp.gamma * plane.w_star.squaredNorm() +
         0.5 * proj.squaredNorm() + 0.5 * hp.gamma * proj_star.squaredNorm() +
         hp.c1 * xi.sum();
}

}  // namespace

TEST_CASE("pinball loss: both branches and the hinge limit") {
  CHECK(pinball_loss(0.5, 1, 0.6) == doctest::Approx(0.4));   // u = 0.4
  CHECK(pinball_loss(0.5, 1, 1.4) == doctest::Approx(0.2));   // u = -0.4
  CHECK(pinball_loss(0.0, 1, 6.0) == doctest::Approx(0.0));   // u = -5, hinge
}

TEST_CASE("pinball loss is convex in the score") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> score(-3.0, 3.0);
  std::uniform_real_distribution<double> mix(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const double tau = mix(rng);
    const double s1 = score(rng), s2 = score(rng), lam = mix(rng);
    const double mixed = pinball_loss(tau, 1, lam * s1 + (1 - lam) * s2);
    const double bound =
        lam * pinball_loss(tau, 1, s1) + (1 - lam) * pinball_loss(tau, 1, s2);
    CHECK(mixed <= bound + 1e-12);
  }
}

TEST_CASE("tau = 0 pinball equals the hinge pointwise") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> unif(-10.0, 10.0);
  for (int trial = 0; trial < 10000; ++trial) {
    const double score = unif(rng);
    const double u = 1.0 - score;
    CHECK(pinball_loss(0.0, 1, score) == doctest::Approx(std::max(u, 0.0)));
  }
}

TEST_CASE("symmetric two-point dataset yields reflected hyperplanes") {
  ClassPartition part;
  part.A = Eigen::MatrixXd::Constant(1, 1, 1.0);
  part.B = Eigen::MatrixXd::Constant(1, 1, -1.0);
  part.A_star = part.A;
  part.B_star = part.B;
  Hyperparams hp;
  hp.c1 = hp.c2 = 1.0;
  hp.tau = 0.5;
  SolverConfig cfg;
  Model m = train_pin_twsvmpi(part, hp, cfg);
  // Mirroring x -> -x swaps the classes, so the two planes are reflections
  // of each other: |score_neg(-x)| = |score_pos(x)| everywhere.
  CHECK(m.plane_pos.w.norm() == doctest::Approx(m.plane_neg.w.norm()).epsilon(1e-6));
  for (double x : {-2.0, -0.5, 0.0, 0.7, 1.4}) {
    const double s_pos = m.plane_pos.w(0) * x + m.plane_pos.b;
    const double s_neg = m.plane_neg.w(0) * (-x) + m.plane_neg.b;
    CHECK(std::abs(s_pos) == doctest::Approx(std::abs(s_neg)).epsilon(1e-6));
  }
}

TEST_CASE("separable blobs with PCA privileged info: 100% training accuracy") {
  Dataset ds = blobs_with_pca_privileged(200, 3);
  ClassPartition part = partition_by_class(ds);
  Hyperparams hp;
  SolverConfig cfg;
  Model m = train_pin_twsvmpi(part, hp, cfg);
  Eigen::VectorXi preds = predict(m, ds.features);
  CHECK(accuracy(preds, ds.labels) == doctest::Approx(1.0));
}

TEST_CASE("recovered variables satisfy the primal pinball constraints") {
  Dataset ds = blobs_with_pca_privileged(60, 5);
  ClassPartition part = partition_by_class(ds);
  Hyperparams hp;
  hp.tau = 0.5;
  SolverConfig cfg;
  cfg.tol = 1e-9;
  Model m = train_pin_twsvmpi(part, hp, cfg);

  // Class-1 constraints: -(Bw + e b) >= e - xi and <= e + xi / tau with
  // xi = B* w* + e b* evaluated on the opposite class.
  Eigen::VectorXd score =
      part.B * m.plane_pos.w + Eigen::VectorXd::Constant(part.m2(), m.plane_pos.b);
  Eigen::VectorXd xi = correcting_values(m, m.plane_pos, part.B_star);
  for (Eigen::Index i = 0; i < part.m2(); ++i) {
    CHECK(-score[i] >= 1.0 - xi[i] - 1e-6);
    CHECK(-score[i] <= 1.0 + xi[i] / hp.tau + 1e-6);
  }
}

TEST_CASE("duality gap vanishes at oracle-solved solutions") {
  Dataset ds = blobs_with_pca_privileged(40, 7);
  ClassPartition part = partition_by_class(ds);
  Hyperparams hp;
  hp.tau = 0.5;
  SolverConfig cfg;
  cfg.tol = 1e-9;
  TrainDiagnostics diag;
  Model m = train_pin_twsvmpi(part, hp, cfg, &diag);
  GeneralQP qp = assemble_pin_twsvmpi_dual(WhichClass::class1, part, hp);
  const double primal = primal_value(part, hp, m.plane_pos);
  const double dual = diag.class1.objective + qp.objective_constant;
  CHECK(std::abs(primal + dual) <= 1e-4 * (1.0 + std::abs(primal)));
}

TEST_CASE("label swap with c1/c2 exchange mirrors every prediction") {
  Dataset ds = blobs_with_pca_privileged(80, 9);
  ClassPartition part = partition_by_class(ds);
  Hyperparams hp;
  hp.c1 = 0.5;
  hp.c2 = 2.0;
  hp.tau = 0.5;
  SolverConfig cfg;
  Model m = train_pin_twsvmpi(part, hp, cfg);

  ClassPartition swapped;
  swapped.A = part.B;
  swapped.B = part.A;
  swapped.A_star = part.B_star;
  swapped.B_star = part.A_star;
  Hyperparams hp_swapped = hp;
  std::swap(hp_swapped.c1, hp_swapped.c2);
  Model ms = train_pin_twsvmpi(swapped, hp_swapped, cfg);

  Eigen::VectorXi p1 = predict(m, ds.features);
  Eigen::VectorXi p2 = predict(ms, ds.features);
  CHECK((p1 + p2).cwiseAbs().maxCoeff() == 0);
}

TEST_CASE("prediction: zero distance wins, ties go to +1") {
  Model m;
  m.variant = ModelVariant::linear;
  m.plane_pos.w = Eigen::Vector2d(1, 0);
  m.plane_pos.b = 0.0;
  m.plane_neg.w = Eigen::Vector2d(0, 1);
  m.plane_neg.b = 1.0;
  Eigen::VectorXd on_plane1(2);
  on_plane1 << 0.0, 5.0;  // score_pos = 0, score_neg = 6
  CHECK(predict(m, on_plane1) == 1);

  Model tie = m;
  tie.plane_neg = tie.plane_pos;  // identical planes: every point ties
  Eigen::VectorXd x(2);
  x << 3.0, -2.0;
  CHECK(predict(tie, x) == 1);
}

TEST_CASE("euclidean distance rule is scale-consistent") {
  Dataset ds = blobs_with_pca_privileged(60, 11);
  ClassPartition part = partition_by_class(ds);
  Hyperparams hp;
  SolverConfig cfg;
  Model m = train_pin_twsvmpi(part, hp, cfg);
  m.distance_rule = DistanceRule::euclidean;
  Model scaled = m;
  scaled.plane_pos.w *= 3.7;
  scaled.plane_pos.b *= 3.7;
  scaled.plane_neg.w *= 3.7;
  scaled.plane_neg.b *= 3.7;
  Eigen::VectorXi p1 = predict(m, ds.features);
  Eigen::VectorXi p2 = predict(scaled, ds.features);
  CHECK((p1 - p2).cwiseAbs().maxCoeff() == 0);
}

TEST_CASE("correcting values: zero function and affine evaluation") {
  Model m;
  m.variant = ModelVariant::linear;
  Hyperplane plane;
  plane.w_star = Eigen::VectorXd::Zero(3);
  plane.b_star = 0.0;
  Eigen::MatrixXd Xs = Eigen::MatrixXd::Random(4, 3);
  CHECK(correcting_values(m, plane, Xs).lpNorm<Eigen::Infinity>() == 0.0);

  plane.w_star = Eigen::VectorXd::Unit(3, 0);
  plane.b_star = 1.0;
  Eigen::VectorXd vals = correcting_values(m, plane, Xs);
  for (Eigen::Index i = 0; i < 4; ++i) {
    CHECK(vals[i] == doctest::Approx(Xs(i, 0) + 1.0));
  }
}

TEST_CASE("tau = 0 baseline equals the classical twin machine") {
  // Fixed 10-point instance; both sides solved by the dense oracle through
  // independent formulations (hinge primal vs box dual).
  Eigen::MatrixXd X(10, 2);
  X << 2.0, 0.3,
       2.5, -0.4,
       3.1, 0.8,
       1.8, -0.9,
       2.7, 0.1,
       -2.2, 0.5,
       -2.9, -0.3,
       -1.9, 0.9,
       -3.3, -0.6,
       -2.4, 0.2;
  Dataset ds;
  ds.features = X;
  ds.labels.resize(10);
  ds.labels << 1, 1, 1, 1, 1, -1, -1, -1, -1, -1;
  ClassPartition part = partition_by_class(ds);
  Hyperparams hp;
  hp.tau = 0.0;
  SolverConfig cfg;
  Model pin0 = train_pin_twsvm(part, hp, cfg);
  Model classic = train_classic_twsvm(part, hp, cfg);
  auto plane_gap = [](const Hyperplane& a, const Hyperplane& b) {
    double num = (a.w - b.w).lpNorm<Eigen::Infinity>() + std::abs(a.b - b.b);
    return num;
  };
  CHECK(plane_gap(pin0.plane_pos, classic.plane_pos) < 1e-4);
  CHECK(plane_gap(pin0.plane_neg, classic.plane_neg) < 1e-4);
}

TEST_CASE("baseline pinball machine separates the blobs") {
  Dataset ds = make_blobs(100, 2, 6.0, 13);
  ClassPartition part = partition_by_class(ds);
  Hyperparams hp;
  hp.tau = 0.5;
  SolverConfig cfg;
  Model m = train_pin_twsvm(part, hp, cfg);
  CHECK(accuracy(predict(m, ds.features), ds.labels) == doctest::Approx(1.0));
}

TEST_CASE("all-zero features produce a degenerate-model error") {
  ClassPartition part;
  part.A = Eigen::MatrixXd::Zero(3, 2);
  part.B = Eigen::MatrixXd::Zero(3, 2);
  part.A_star = Eigen::MatrixXd::Random(3, 2);
  part.B_star = Eigen::MatrixXd::Random(3, 2);
  Hyperparams hp;
  SolverConfig cfg;
  CHECK_THROWS_AS(train_pin_twsvmpi(part, hp, cfg), SolverError);
}

TEST_CASE("kernel path separates blobs that are not linearly separable") {
  // Ring vs center: rbf required.
  std::mt19937_64 rng(15);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> angle(0.0, 6.283185307);
  const Eigen::Index n = 120;
  Dataset ds;
  ds.features.resize(n, 2);
  ds.labels.resize(n);
  for (Eigen::Index i = 0; i < n / 2; ++i) {  // center cluster
    ds.features(i, 0) = 0.3 * normal(rng);
    ds.features(i, 1) = 0.3 * normal(rng);
    ds.labels(i) = 1;
  }
  for (Eigen::Index i = n / 2; i < n; ++i) {  // ring radius 4
    const double a = angle(rng);
    ds.features(i, 0) = 4.0 * std::cos(a) + 0.2 * normal(rng);
    ds.features(i, 1) = 4.0 * std::sin(a) + 0.2 * normal(rng);
    ds.labels(i) = -1;
  }
  PCABasis basis = fit_pca(ds.features, 0.95);
  ds.privileged = extract_privileged(ds.features, basis);
  ClassPartition part = partition_by_class(ds);
  Hyperparams hp;
  hp.kernel = {KernelKind::rbf, 1.5};
  SolverConfig cfg;
  Model m = train_pin_twsvmpi(part, hp, cfg);
  CHECK(m.variant == ModelVariant::kernel);
  CHECK(accuracy(predict(m, ds.features), ds.labels) >= 0.99);
}

TEST_CASE("multiclass: two-class input reduces to the binary path") {
  Dataset ds = blobs_with_pca_privileged(80, 17);
  Hyperparams hp;
  SolverConfig cfg;
  MulticlassModel mc = train_multiclass(ds, hp, cfg);
  CHECK(mc.models.size() == 2);
  ClassPartition part = partition_by_class(ds);
  Model binary = train_pin_twsvmpi(part, hp, cfg);
  Eigen::VectorXi p_mc = predict(mc, ds.features);
  Eigen::VectorXi p_bin = predict(binary, ds.features);
  CHECK((p_mc - p_bin).cwiseAbs().maxCoeff() == 0);
}

TEST_CASE("multiclass: three separated blobs, one model per class") {
  std::mt19937_64 rng(19);
  std::normal_distribution<double> normal;
  const Eigen::Index per = 40;
  Dataset ds;
  ds.features.resize(3 * per, 2);
  ds.labels.resize(3 * per);
  const double centers[3][2] = {{0, 0}, {8, 0}, {0, 8}};
  for (int c = 0; c < 3; ++c) {
    for (Eigen::Index i = 0; i < per; ++i) {
      ds.features(c * per + i, 0) = centers[c][0] + normal(rng);
      ds.features(c * per + i, 1) = centers[c][1] + normal(rng);
      ds.labels(c * per + i) = c;
    }
  }
  // Standardize first (the usual pipeline): larger margins make the pinball
  // upper constraint expensive, so raw coordinates with a small tau or
  // standardized coordinates are both fine; mixing large scales with a large
  // tau over-shrinks the planes.
  auto [scaled, scaler] = standardize(ds);
  PCABasis basis = fit_pca(scaled.features, 0.95);
  scaled.privileged = extract_privileged(scaled.features, basis);
  Hyperparams hp;
  hp.tau = 0.1;
  SolverConfig cfg;
  MulticlassModel mc = train_multiclass(scaled, hp, cfg);
  CHECK(mc.models.size() == 3);
  CHECK(mc.class_ids == std::vector<int>{0, 1, 2});
  CHECK(accuracy(predict(mc, scaled.features), scaled.labels) >= 0.99);
}

// Command-line front end: train / predict / cv / bench / extract-pi.
#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pintw/evaluation.hpp"
#include "pintw/model_io.hpp"
#include "pintw/pca.hpp"
#include "pintw/synthetic.hpp"
#include "pintw/trainer.hpp"

namespace {

using namespace pintw;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitSolver = 4;

struct CommonArgs {
  std::string data_path;
  std::string format = "csv";
  int privileged_cols = 0;
  double pca_components = 0.95;
  bool no_standardize = false;

  double c1 = 1.0, c2 = 1.0, gamma = 1.0, tau = 0.5, sigma = 1.0;
  std::string kernel = "linear";
  std::string distance_rule = "paper_squared_norm";
  double tol = 1e-6;
  int max_iter = 100000;
  std::uint64_t seed = 0;
};

void add_data_flags(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--data", a.data_path, "input dataset")->required();
  cmd->add_option("--format", a.format, "csv or sparse")
      ->check(CLI::IsMember({"csv", "sparse"}));
}

void add_hyper_flags(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--c1", a.c1, "class-1 trade-off");
  cmd->add_option("--c2", a.c2, "class-2 trade-off");
  cmd->add_option("--gamma", a.gamma, "privileged regularization");
  cmd->add_option("--tau", a.tau, "pinball parameter in [0,1]");
  cmd->add_option("--kernel", a.kernel, "linear or rbf")
      ->check(CLI::IsMember({"linear", "rbf"}));
  cmd->add_option("--sigma", a.sigma, "rbf width");
  cmd->add_option("--distance-rule", a.distance_rule,
                  "paper_squared_norm or euclidean")
      ->check(CLI::IsMember({"paper_squared_norm", "euclidean"}));
  cmd->add_option("--tol", a.tol, "solver KKT tolerance");
  cmd->add_option("--max-iter", a.max_iter, "solver iteration budget");
  cmd->add_option("--seed", a.seed, "random seed");
}

Dataset load(const CommonArgs& a) {
  Dataset ds = load_dataset(
      a.data_path, a.format == "csv" ? DataFormat::csv : DataFormat::sparse_index);
  if (a.privileged_cols > 0) ds = split_privileged_columns(ds, a.privileged_cols);
  return ds;
}

Hyperparams hyperparams(const CommonArgs& a) {
  Hyperparams hp;
  hp.c1 = a.c1;
  hp.c2 = a.c2;
  hp.gamma = a.gamma;
  hp.tau = a.tau;
  hp.kernel.kind = kernel_kind_from_string(a.kernel);
  hp.kernel.sigma = a.sigma;
  hp.seed = a.seed;
  hp.validate();
  return hp;
}

SolverConfig solver_config(const CommonArgs& a) {
  SolverConfig cfg;
  cfg.tol = a.tol;
  cfg.max_iter = a.max_iter;
  return cfg;
}

void require_converged(const TrainDiagnostics& diag, double tol) {
  for (const DualSolution* s : {&diag.class1, &diag.class2}) {
    if (!s->converged && s->kkt_residual > 100.0 * tol) {
      throw SolverError("dual solve did not converge (KKT residual " +
                        std::to_string(s->kkt_residual) + ")");
    }
  }
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write output file: " + path);
  return out;
}

int run_train(const CommonArgs& a, const std::string& model_path) {
  Dataset ds = load(a);
  std::optional<Scaler> scaler;
  if (!a.no_standardize) {
    auto [scaled, s] = standardize(ds);
    ds = std::move(scaled);
    scaler = std::move(s);
  }
  if (!ds.privileged) {
    PCABasis basis = fit_pca(ds.features, a.pca_components);
    ds.privileged = extract_privileged(ds.features, basis);
  }

  Hyperparams hp = hyperparams(a);
  SolverConfig cfg = solver_config(a);
  const DistanceRule rule = distance_rule_from_string(a.distance_rule);

  bool binary = true;
  for (Eigen::Index i = 0; i < ds.labels.size(); ++i) {
    binary = binary && (ds.labels[i] == 1 || ds.labels[i] == -1);
  }
  if (binary) {
    TrainDiagnostics diag;
    Model model = train_pin_twsvmpi(partition_by_class(ds), hp, cfg, &diag);
    require_converged(diag, cfg.tol);
    model.distance_rule = rule;
    model.scaler = scaler;
    save_model(model, model_path);
  } else {
    MulticlassModel mc = train_multiclass(ds, hp, cfg);
    for (Model& m : mc.models) {
      m.distance_rule = rule;
      m.scaler = scaler;
    }
    save_multiclass(mc, model_path);
  }
  std::cout << "model written: " << model_path << "\n";
  return 0;
}

int run_predict(const CommonArgs& a, const std::string& model_path,
                const std::string& out_path) {
  Dataset ds = load(a);
  std::ofstream out = open_output(out_path);
  Eigen::VectorXi preds;
  if (model_file_is_multiclass(model_path)) {
    MulticlassModel mc = load_multiclass(model_path);
    preds = predict(mc, ds.features);
    out << "label\n";
    for (Eigen::Index i = 0; i < preds.size(); ++i) out << preds[i] << "\n";
  } else {
    Model model = load_model(model_path);
    preds.resize(ds.num_samples());
    out << "label\tdist_pos\tdist_neg\n";
    for (Eigen::Index i = 0; i < ds.num_samples(); ++i) {
      Eigen::VectorXd x = ds.features.row(i).transpose();
      preds[i] = predict(model, x);
      out << preds[i] << "\t" << plane_distance(model, model.plane_pos, x)
          << "\t" << plane_distance(model, model.plane_neg, x) << "\n";
    }
  }
  std::cout << "accuracy " << accuracy(preds, ds.labels) << "\n";
  return 0;
}

int run_cv(const CommonArgs& a, std::vector<double> grid_c,
           std::vector<double> grid_gamma, std::vector<double> grid_tau,
           std::vector<double> grid_sigma, int folds,
           const std::string& out_path, bool timings) {
  Dataset ds = load(a);
  HyperGrid grid = HyperGrid::defaults();
  if (!grid_c.empty()) grid.c = grid_c;
  if (!grid_gamma.empty()) grid.gamma = grid_gamma;
  if (!grid_tau.empty()) grid.tau = grid_tau;
  if (!grid_sigma.empty()) grid.sigma = grid_sigma;

  CVOptions opt;
  opt.folds = folds;
  opt.pca_components = a.pca_components;
  opt.kernel = kernel_kind_from_string(a.kernel);
  opt.seed = a.seed;
  opt.solver = solver_config(a);

  CVReport report = kfold_cv(ds, grid, opt);
  const std::string text = report.to_text(timings);
  if (out_path.empty()) {
    std::cout << text;
  } else {
    open_output(out_path) << text;
    std::cout << "report written: " << out_path << "\n";
  }
  return 0;
}

// Synthetic comparison suite: accuracy and train time of the privileged
// machine vs the pinball baseline vs the tau = 0 (hinge) baseline, swept
// over label-flip noise.
int run_bench(const CommonArgs& a, const std::string& out_path, int n,
              int seeds) {
  std::ofstream out = open_output(out_path);
  out << "noise\tmethod\tmean_accuracy\tmean_train_seconds\n";
  SolverConfig cfg = solver_config(a);

  for (double noise : {0.0, 0.05, 0.10, 0.15, 0.20}) {
    double acc[3] = {0, 0, 0};
    double sec[3] = {0, 0, 0};
    for (int s = 0; s < seeds; ++s) {
      Dataset train = make_blobs(n, 2, 3.0, a.seed + 17 * s);
      Dataset test = make_blobs(n, 2, 3.0, a.seed + 17 * s + 7);
      train = flip_labels(train, noise, a.seed + 17 * s + 13);

      auto [scaled, scaler] = standardize(train);
      train = std::move(scaled);
      PCABasis basis = fit_pca(train.features, 0.95);
      train.privileged = extract_privileged(train.features, basis);
      ClassPartition part = partition_by_class(train);

      for (int method = 0; method < 3; ++method) {
        Hyperparams hp = hyperparams(a);
        if (method == 2) hp.tau = 0.0;
        const auto t0 = std::chrono::steady_clock::now();
        Model model = method == 0 ? train_pin_twsvmpi(part, hp, cfg)
                                  : train_pin_twsvm(part, hp, cfg);
        model.scaler = scaler;
        sec[method] += std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - t0).count();
        acc[method] += accuracy(predict(model, test.features), test.labels);
      }
    }
    const char* names[3] = {"pin_twsvmpi", "pin_twsvm", "twsvm_tau0"};
    for (int method = 0; method < 3; ++method) {
      out << noise << "\t" << names[method] << "\t" << acc[method] / seeds
          << "\t" << sec[method] / seeds << "\n";
    }
  }
  std::cout << "bench report written: " << out_path << "\n";
  return 0;
}

int run_extract_pi(const CommonArgs& a, const std::string& out_path,
                   const std::string& basis_path) {
  Dataset ds = load(a);
  PCABasis basis = fit_pca(ds.features, a.pca_components);
  Eigen::MatrixXd pi = extract_privileged(ds.features, basis);
  std::ofstream out = open_output(out_path);
  for (Eigen::Index i = 0; i < pi.rows(); ++i) {
    for (Eigen::Index j = 0; j < pi.cols(); ++j) {
      out << pi(i, j) << (j + 1 < pi.cols() ? "," : "");
    }
    out << "\n";
  }
  if (!basis_path.empty()) save_pca_basis(basis, basis_path);
  std::cout << "privileged matrix written: " << out_path << " ("
            << pi.cols() << " components)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pinball-loss twin SVM with privileged information"};
  app.require_subcommand(1);
  CommonArgs a;

  std::string model_path, out_path, basis_path;
  std::vector<double> grid_c, grid_gamma, grid_tau, grid_sigma;
  int folds = 5;
  bool timings = false;
  int bench_n = 200, bench_seeds = 5;

  CLI::App* train = app.add_subcommand("train", "train a model");
  add_data_flags(train, a);
  add_hyper_flags(train, a);
  train->add_option("--privileged-cols", a.privileged_cols,
                    "trailing feature columns treated as privileged");
  train->add_option("--pca-components", a.pca_components,
                    "PCA count or variance fraction for synthesized privileged info");
  train->add_flag("--no-standardize", a.no_standardize, "skip feature standardization");
  train->add_option("--model", model_path, "output model file")->required();

  CLI::App* predict_cmd = app.add_subcommand("predict", "predict labels");
  add_data_flags(predict_cmd, a);
  predict_cmd->add_option("--model", model_path, "trained model file")->required();
  predict_cmd->add_option("--output", out_path, "predictions file")->required();

  CLI::App* cv = app.add_subcommand("cv", "cross-validated evaluation");
  add_data_flags(cv, a);
  add_hyper_flags(cv, a);
  cv->add_option("--folds", folds, "fold count");
  cv->add_option("--pca-components", a.pca_components, "PCA setting");
  cv->add_option("--grid-c", grid_c, "comma-separated c values")->delimiter(',');
  cv->add_option("--grid-gamma", grid_gamma, "comma-separated gamma values")
      ->delimiter(',');
  cv->add_option("--grid-tau", grid_tau, "comma-separated tau values")
      ->delimiter(',');
  cv->add_option("--grid-sigma", grid_sigma, "comma-separated sigma values")
      ->delimiter(',');
  cv->add_option("--output", out_path, "report file (stdout when omitted)");
  cv->add_flag("--timings", timings, "include per-fold train time in the report");

  CLI::App* bench = app.add_subcommand("bench", "synthetic comparison suite");
  add_hyper_flags(bench, a);
  bench->add_option("--n", bench_n, "samples per synthetic dataset");
  bench->add_option("--seeds", bench_seeds, "repetitions per noise level");
  bench->add_option("--output", out_path, "report file")->required();

  CLI::App* extract = app.add_subcommand("extract-pi", "PCA privileged features");
  add_data_flags(extract, a);
  extract->add_option("--pca-components", a.pca_components, "PCA setting");
  extract->add_option("--output", out_path, "privileged matrix file")->required();
  extract->add_option("--basis", basis_path, "PCA basis file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (train->parsed()) return run_train(a, model_path);
    if (predict_cmd->parsed()) return run_predict(a, model_path, out_path);
    if (cv->parsed()) {
      return run_cv(a, grid_c, grid_gamma, grid_tau, grid_sigma, folds,
                    out_path, timings);
    }
    if (bench->parsed()) return run_bench(a, out_path, bench_n, bench_seeds);
    if (extract->parsed()) return run_extract_pi(a, out_path, basis_path);
  } catch (const SolverError& e) {
    std::cerr << "error: solver: " << e.what() << "\n";
    return kExitSolver;
  } catch (const DataError& e) {
    std::cerr << "error: data: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitUsage;
}

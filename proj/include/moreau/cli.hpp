#pragma once

// Command-line front end: argument/config parsing into a RunConfig, command
// dispatch, and output emission (iteration CSV, summary CSV, restored image,
// gnuplot-ready curve data).
//
// Commands:
//   solve   min ‖Kx−b‖₁ + λ‖x‖₁ with K from CSV (identity when omitted),
//           any schedule flavor via --var-a/--var-b, --rho/--mu or --eps.
//   deblur  the L1-L1 image deblurring benchmark; --a may repeat for sweeps.
//   svm     kernel SVM training plus k-fold cross-validation; --a may repeat.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error. Flags override
// config-file values (--config, `key = value` lines with [command] sections).

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "moreau/experiments.hpp"
#include "moreau/io.hpp"
#include "moreau/linops.hpp"
#include "moreau/prox.hpp"
#include "moreau/smoothing.hpp"
#include "moreau/solvers.hpp"

namespace moreau::cli {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct HelpRequested {
  std::string text;
};

struct RunConfig {
  std::string command;
  // schedule spec (solve)
  std::optional<double> var_a, var_b, rho, mu, eps;
  // schedule parameter values (deblur/svm); one run per entry
  std::vector<double> a_values;
  int iters = 0;
  std::uint64_t seed = 1;
  int thin = 1;
  std::string out_dir;
  // solve inputs
  std::string operator_path;
  std::string b_path;
  double lambda = 0.0;
  // deblur inputs
  std::string image_path;
  bool use_phantom = false;
  double noise_std = 1e-3;
  // svm inputs
  std::string data_path;
  bool use_blobs = false;
  int n_per_class = 100;
  int blob_dim = 2;
  double center_dist = 2.0;
  double blob_std = 0.3;
  double C = 100.0;
  double sigma = 0.5;
  int folds = 10;

  bool operator==(const RunConfig&) const = default;
};

namespace detail {

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace detail

/// The command line that reproduces this configuration exactly; echoed into
/// summary.csv so a run can be replayed from its own outputs.
inline std::string canonical_flags(const RunConfig& c) {
  using detail::fmt;
  std::ostringstream os;
  os << c.command;
  if (c.command == "solve") {
    os << " --b " << c.b_path;
    if (!c.operator_path.empty()) os << " --operator " << c.operator_path;
    os << " --lambda " << fmt(c.lambda);
    if (c.eps) os << " --eps " << fmt(*c.eps);
    if (c.var_a) os << " --var-a " << fmt(*c.var_a);
    if (c.var_b) os << " --var-b " << fmt(*c.var_b);
    if (c.rho) os << " --rho " << fmt(*c.rho);
    if (c.mu) os << " --mu " << fmt(*c.mu);
  } else if (c.command == "deblur") {
    if (c.use_phantom) {
      os << " --phantom";
    } else {
      os << " --image " << c.image_path;
    }
    for (double a : c.a_values) os << " --a " << fmt(a);
    os << " --lambda " << fmt(c.lambda) << " --noise-std " << fmt(c.noise_std);
  } else if (c.command == "svm") {
    if (c.use_blobs) {
      os << " --blobs --n-per-class " << c.n_per_class << " --blob-dim " << c.blob_dim
         << " --center-dist " << fmt(c.center_dist) << " --blob-std " << fmt(c.blob_std);
    } else {
      os << " --data " << c.data_path;
    }
    for (double a : c.a_values) os << " --a " << fmt(a);
    os << " --C " << fmt(c.C) << " --sigma " << fmt(c.sigma) << " --folds " << c.folds;
  }
  os << " --iters " << c.iters << " --seed " << c.seed << " --thin " << c.thin
     << " --out " << c.out_dir;
  return os.str();
}

/// Parses flags (and an optional config file) into a validated RunConfig.
/// Throws UsageError on any parse problem and HelpRequested for --help.
inline RunConfig parse_args(const std::vector<std::string>& args) {
  RunConfig cfg;
  const char* env_out = std::getenv("MOREAU_OUT_DIR");
  cfg.out_dir = env_out ? env_out : ".";

  CLI::App app{"moreau: Moreau-envelope smoothing of composite objectives, "
               "accelerated first-order solvers, and benchmarks"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key = value configuration file ([command] sections)");

  auto add_common = [&cfg](CLI::App* sub, int default_iters) {
    sub->fallthrough();  // lets --config given after the subcommand reach the app
    sub->add_option("--iters", cfg.iters, "iteration budget")
        ->default_val(default_iters)
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", cfg.seed, "RNG seed")->default_val(1);
    sub->add_option("--thin", cfg.thin, "log every j-th iteration")
        ->default_val(1)
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", cfg.out_dir, "output directory")->capture_default_str();
  };

  CLI::App* solve = app.add_subcommand("solve", "solve min |Kx-b|_1 + lambda*|x|_1");
  solve->add_option("--b", cfg.b_path, "target vector CSV")->required();
  solve->add_option("--operator", cfg.operator_path, "dense operator CSV (identity if omitted)");
  solve->add_option("--lambda", cfg.lambda, "l1 regularization weight")->default_val(0.0);
  solve->add_option("--var-a", cfg.var_a, "variable schedule: rho_k = 1/(a k)");
  solve->add_option("--var-b", cfg.var_b, "variable schedule: mu_k = 1/(b k)");
  solve->add_option("--rho", cfg.rho, "constant f-term smoothing");
  solve->add_option("--mu", cfg.mu, "constant g-term smoothing");
  solve->add_option("--eps", cfg.eps, "target accuracy (constant smoothing)");
  add_common(solve, 1000);

  CLI::App* deblur = app.add_subcommand("deblur", "L1-L1 image deblurring benchmark");
  deblur->add_option("--image", cfg.image_path, "clean input image (PGM)");
  deblur->add_flag("--phantom", cfg.use_phantom, "use the built-in 128x128 phantom");
  deblur->add_option("--a", cfg.a_values, "schedule parameter, mu_k = 1/(a k); repeatable");
  deblur->add_option("--lambda", cfg.lambda, "wavelet regularization weight")->default_val(2e-5);
  deblur->add_option("--noise-std", cfg.noise_std, "Gaussian noise level")->default_val(1e-3);
  add_common(deblur, 100);

  CLI::App* svm = app.add_subcommand("svm", "kernel SVM cross-validation benchmark");
  svm->add_option("--data", cfg.data_path, "dataset CSV (label,feature1,...)");
  svm->add_flag("--blobs", cfg.use_blobs, "generate a synthetic two-blob dataset");
  svm->add_option("--n-per-class", cfg.n_per_class, "blob points per class")->default_val(100);
  svm->add_option("--blob-dim", cfg.blob_dim, "blob dimension")->default_val(2);
  svm->add_option("--center-dist", cfg.center_dist, "blob center separation")->default_val(2.0);
  svm->add_option("--blob-std", cfg.blob_std, "blob standard deviation")->default_val(0.3);
  svm->add_option("--a", cfg.a_values, "schedule parameter, mu_k = 1/(a k); repeatable");
  svm->add_option("--C", cfg.C, "hinge-loss weight")->default_val(100.0);
  svm->add_option("--sigma", cfg.sigma, "Gaussian kernel width")->default_val(0.5);
  svm->add_option("--folds", cfg.folds, "cross-validation folds")->default_val(10);
  add_common(svm, 10000);

  std::vector<const char*> argv;
  argv.push_back("moreau");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested{app.help()};
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested{app.help("", CLI::AppFormatMode::All)};
  } catch (const CLI::ParseError& e) {
    throw UsageError(std::string(e.what()) + "\n\n" + app.help());
  }

  cfg.command = app.get_subcommands().front()->get_name();
  if (cfg.command == "solve") {
    const int schedule_specs = (cfg.eps ? 1 : 0) + (cfg.var_a || cfg.var_b ? 1 : 0) +
                               (cfg.rho || cfg.mu ? 1 : 0);
    if (schedule_specs != 1) {
      throw UsageError("solve: give exactly one schedule, via --eps, --var-a/--var-b or --rho/--mu");
    }
    if (cfg.var_a && !cfg.var_b) {
      throw UsageError("solve: --var-a also needs --var-b");
    }
    if (cfg.rho && !cfg.mu) {
      throw UsageError("solve: --rho also needs --mu");
    }
  } else if (cfg.command == "deblur") {
    if (cfg.use_phantom == !cfg.image_path.empty()) {
      throw UsageError("deblur: exactly one of --image or --phantom is required");
    }
    if (cfg.a_values.empty()) throw UsageError("deblur: --a is required");
  } else if (cfg.command == "svm") {
    if (cfg.use_blobs == !cfg.data_path.empty()) {
      throw UsageError("svm: exactly one of --data or --blobs is required");
    }
    if (cfg.a_values.empty()) throw UsageError("svm: --a is required");
  }
  return cfg;
}

inline RunConfig parse_args(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return parse_args(args);
}

struct OutputContext {
  std::string subdir;  // "" writes into the output directory itself
  std::optional<Image> restored;
  std::optional<double> a_value;
  std::optional<double> final_isnr;
  std::optional<double> cv_error;
};

/// Writes iters.csv, the curve .dat files, the restored image when present,
/// and appends one row to summary.csv. Returns the written paths.
inline std::vector<std::string> emit_outputs(const RunReport& report, const RunConfig& cfg,
                                             const OutputContext& ctx = {}) {
  namespace fs = std::filesystem;
  std::vector<std::string> written;
  const fs::path root = cfg.out_dir;
  const fs::path dir = ctx.subdir.empty() ? root : root / ctx.subdir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("emit_outputs: cannot create " + dir.string());

  auto open_out = [&](const fs::path& p) {
    std::ofstream out(p);
    if (!out) throw std::runtime_error("emit_outputs: cannot write " + p.string());
    return out;
  };

  {
    const fs::path p = dir / "iters.csv";
    auto out = open_out(p);
    write_report_csv(report, out);
    written.push_back(p.string());
  }
  {
    const fs::path p = dir / "objective.dat";
    auto out = open_out(p);
    out.precision(17);
    out << "# iter objective\n";
    for (const auto& rec : report.log) out << rec.k << " " << rec.objective << "\n";
    written.push_back(p.string());
  }
  bool any_isnr = false;
  for (const auto& rec : report.log) any_isnr |= rec.isnr.has_value();
  if (any_isnr) {
    const fs::path p = dir / "isnr.dat";
    auto out = open_out(p);
    out.precision(17);
    out << "# iter isnr\n";
    for (const auto& rec : report.log) {
      if (rec.isnr) out << rec.k << " " << *rec.isnr << "\n";
    }
    written.push_back(p.string());
  }
  if (ctx.restored) {
    const fs::path p = dir / "restored.pgm";
    write_pgm(p.string(), *ctx.restored);
    written.push_back(p.string());
  }

  const fs::path summary = root / "summary.csv";
  const bool fresh = !fs::exists(summary);
  std::ofstream out(summary, std::ios::app);
  if (!out) throw std::runtime_error("emit_outputs: cannot write " + summary.string());
  out.precision(17);
  if (fresh) out << "command,a,fval,isnr,cv_error,flags\n";
  out << cfg.command << ",";
  if (ctx.a_value) out << *ctx.a_value;
  out << "," << report.final_objective << ",";
  if (ctx.final_isnr) out << *ctx.final_isnr;
  out << ",";
  if (ctx.cv_error) out << *ctx.cv_error;
  out << "," << canonical_flags(cfg) << "\n";
  written.push_back(summary.string());
  return written;
}

namespace detail {

inline Vector flatten(const Matrix& m) {
  Vector v(m.size());
  Index k = 0;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) v[k++] = m(i, j);
  }
  return v;
}

inline std::string a_subdir(const RunConfig& cfg, double a) {
  if (cfg.a_values.size() < 2) return "";
  std::ostringstream os;
  os << "a_" << a;
  return os.str();
}

inline int run_solve(const RunConfig& cfg) {
  const Vector b = flatten(read_csv_matrix(cfg.b_path));
  LinearMap op = cfg.operator_path.empty() ? make_identity(b.size())
                                           : make_dense(read_csv_matrix(cfg.operator_path));
  if (op.out_dim != b.size()) {
    throw std::runtime_error("solve: operator rows must match the target length");
  }
  const Index n = op.in_dim;

  std::vector<CompositeTerm> terms;
  terms.push_back({catalog_l1_deviation(b), std::move(op)});
  if (cfg.lambda > 0.0) {
    terms.push_back({catalog_scaled_l1(cfg.lambda, n), make_identity(n)});
  }

  const bool lipschitz_mode = cfg.var_a.has_value() || cfg.rho.has_value();
  std::variant<ProxFunction, SmoothFunction> f_term =
      lipschitz_mode ? std::variant<ProxFunction, SmoothFunction>(zero_prox_function(n))
                     : std::variant<ProxFunction, SmoothFunction>(catalog_zero(n));
  const CompositeProblem problem = make_problem(std::move(f_term), std::move(terms));

  Schedule sch = [&]() -> Schedule {
    if (cfg.eps) return AccuracySchedule{*cfg.eps};
    if (cfg.var_a) return VariableSchedule{*cfg.var_a, *cfg.var_b};
    if (cfg.var_b) return VariableSmoothFSchedule{*cfg.var_b};
    return ConstantSchedule{cfg.rho, *cfg.mu};
  }();

  RunOptions opt;
  opt.log_every = cfg.thin;
  const RunReport report = run(problem, sch, Vector::Zero(n), cfg.iters, opt);
  if (report.failed) throw std::runtime_error("solve: " + report.failure_reason);

  emit_outputs(report, cfg);
  Matrix solution(1, report.final_x.size());
  solution.row(0) = report.final_x.transpose();
  write_csv_matrix((std::filesystem::path(cfg.out_dir) / "solution.csv").string(), solution);
  return 0;
}

inline bool has_suffix(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

inline int run_deblur_command(const RunConfig& cfg) {
  Image img;
  bool csv_input = false;
  if (cfg.use_phantom) {
    img.rows = 128;
    img.cols = 128;
    img.pixels = make_phantom(img.rows, img.cols);
  } else if (has_suffix(cfg.image_path, ".csv")) {
    const Matrix m = read_csv_matrix(cfg.image_path);
    img.rows = m.rows();
    img.cols = m.cols();
    img.pixels = flatten(m);
    csv_input = true;
  } else {
    img = read_pgm(cfg.image_path);
  }
  const DeblurInstance inst = make_deblur_instance(img.pixels, img.rows, img.cols,
                                                   cfg.lambda, cfg.noise_std, cfg.seed);
  for (double a : cfg.a_values) {
    const RunReport report = run_deblur(inst, a, cfg.iters, cfg.thin);
    if (report.failed) throw std::runtime_error("deblur: " + report.failure_reason);
    OutputContext ctx;
    ctx.subdir = a_subdir(cfg, a);
    ctx.a_value = a;
    ctx.final_isnr = isnr(inst.original, inst.observed, report.final_x);
    ctx.restored = Image{img.rows, img.cols, report.final_x};
    emit_outputs(report, cfg, ctx);
    if (csv_input) {
      Matrix restored(img.rows, img.cols);
      for (Index i = 0; i < img.rows; ++i) {
        restored.row(i) = report.final_x.segment(i * img.cols, img.cols).transpose();
      }
      const std::filesystem::path dir = ctx.subdir.empty()
                                            ? std::filesystem::path(cfg.out_dir)
                                            : std::filesystem::path(cfg.out_dir) / ctx.subdir;
      write_csv_matrix((dir / "restored.csv").string(), restored);
    }
  }
  return 0;
}

inline int run_svm_command(const RunConfig& cfg) {
  SvmDataset ds;
  if (cfg.use_blobs) {
    ds = make_blobs(cfg.n_per_class, cfg.blob_dim, cfg.center_dist, cfg.blob_std, cfg.seed,
                    cfg.sigma, cfg.C);
  } else {
    const LabeledPoints raw = read_dataset_csv(cfg.data_path);
    ds.points = raw.points;
    ds.labels = raw.labels;
    ds.kernel_std = cfg.sigma;
    ds.C = cfg.C;
  }
  for (double a : cfg.a_values) {
    RunReport report;
    train_svm(ds, a, cfg.iters, cfg.thin, &report);
    const double error = kfold_cv(ds, cfg.folds, a, cfg.iters, cfg.seed);
    OutputContext ctx;
    ctx.subdir = a_subdir(cfg, a);
    ctx.a_value = a;
    ctx.cv_error = error;
    emit_outputs(report, cfg, ctx);
  }
  return 0;
}

}  // namespace detail

/// Runs the configured command. Throws on runtime failures (exit code 1).
inline int run_command(const RunConfig& cfg) {
  if (cfg.command == "solve") return detail::run_solve(cfg);
  if (cfg.command == "deblur") return detail::run_deblur_command(cfg);
  if (cfg.command == "svm") return detail::run_svm_command(cfg);
  throw std::runtime_error("unknown command " + cfg.command);
}

}  // namespace moreau::cli

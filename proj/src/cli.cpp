#include "easirp/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>

#include "easirp/costmodel.hpp"
#include "easirp/data.hpp"
#include "easirp/errors.hpp"
#include "easirp/metrics.hpp"
#include "easirp/mlp.hpp"
#include "easirp/pipeline.hpp"
#include "easirp/random.hpp"
#include "easirp/reproduce.hpp"

namespace easirp {

namespace {

namespace fs = std::filesystem;

// Usage-level failure detected after CLI11 parsing (e.g. p < n).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string mode = "ica";
  std::size_t m = 0, p = 0, n = 0;
  double mu = 1e-3;
  std::size_t epochs = 50;
  double tol = 1e-4;
  std::size_t batch = 1;
  std::uint64_t seed = 0;
  std::string data, out, model, test_out;
  std::optional<std::size_t> labels_col;
  std::optional<std::size_t> train_size;
  bool standardize = false;
  std::string init = "identity";
  std::string precision = "double";
  bool keep_second_order = false;
  bool tsv = false;
  std::size_t samples = 5000;
  std::size_t drop = 0;
  std::string table = "table1";
  std::size_t mlp_epochs = 100;
};

void require_input(const std::string& path) {
  if (!fs::is_regular_file(path)) throw std::runtime_error("input file not found: " + path);
}

void require_output(const std::string& path) {
  if (path.empty()) return;
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty() && !fs::is_directory(parent)) throw UsageError("output directory does not exist: " + parent.string());
}

// Output stream that is either a file or the caller's stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : out_(&fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw std::runtime_error("cannot write " + path);
      out_ = &file_;
    }
  }
  std::ostream& get() { return *out_; }

 private:
  std::ofstream file_;
  std::ostream* out_;
};

PipelineConfig pipeline_config(const Options& o) {
  Mode mode;
  try {
    mode = parse_mode(o.mode);
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  EasiConfig easi;
  easi.learning_rate = o.mu;
  easi.max_epochs = o.epochs;
  easi.convergence_tol = o.tol;
  easi.batch_size = o.batch;
  easi.init = o.init == "orthonormal" ? InitScheme::SeededOrthonormal : InitScheme::TruncatedIdentity;
  easi.init_seed = derive_seed(o.seed, streams::kEasiInit);
  easi.precision = o.precision == "single" ? Precision::Single : Precision::Double;
  PipelineConfig cfg = PipelineConfig::make(mode, o.m, o.p, o.n, easi, derive_seed(o.seed, streams::kProjection));
  cfg.standardize_input = o.standardize;
  if (o.keep_second_order) {
    cfg.keep_second_order = true;
    if (mode == Mode::RpThenIca) cfg.easi.terms = forced_terms(mode, true);
  }
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

void add_dims(CLI::App* cmd, Options& o) {
  cmd->add_option("--mode", o.mode, "rp | pca | ica | rp+ica")
      ->check(CLI::IsMember({"rp", "pca", "ica", "rp+ica"}));
  cmd->add_option("--m", o.m, "input dimension")->required();
  cmd->add_option("--p", o.p, "projection dimension (rp modes)");
  cmd->add_option("--n", o.n, "output dimension");
}

void add_easi(CLI::App* cmd, Options& o) {
  cmd->add_option("--mu", o.mu, "EASI learning rate")->capture_default_str();
  cmd->add_option("--epochs", o.epochs, "maximum EASI epochs")->capture_default_str();
  cmd->add_option("--tol", o.tol, "convergence tolerance on the relative epoch update")->capture_default_str();
  cmd->add_option("--batch", o.batch, "samples averaged per update")->capture_default_str();
  cmd->add_option("--init", o.init, "identity | orthonormal")->check(CLI::IsMember({"identity", "orthonormal"}));
  cmd->add_option("--precision", o.precision, "double | single")->check(CLI::IsMember({"double", "single"}));
  cmd->add_flag("--keep-second-order", o.keep_second_order, "rp+ica: keep the y y^T - I term");
  cmd->add_flag("--standardize", o.standardize, "standardize features with training statistics");
}

int cmd_gen_data(const Options& o, std::ostream& out) {
  require_output(o.out);
  require_output(o.test_out);
  const Dataset all = generate_waveform(o.samples, derive_seed(o.seed, streams::kData), o.drop);
  if (o.train_size) {
    if (o.test_out.empty()) throw UsageError("--train-size needs --test-out");
    const auto [train_set, test_set] = split(all, *o.train_size);
    save_csv(train_set, o.out);
    save_csv(test_set, o.test_out);
  } else {
    save_csv(all, o.out);
  }
  out << "wrote " << all.sample_count() << " samples x " << all.feature_count() << " features\n";
  return kExitOk;
}

int cmd_fit(const Options& o, std::ostream& out) {
  const PipelineConfig cfg = pipeline_config(o);
  require_input(o.data);
  require_output(o.out);
  const Dataset data = load_csv(o.data, o.labels_col);
  const FittedPipeline fp = fit(cfg, data);
  save(fp, o.out);
  out << "mode=" << mode_name(cfg.mode) << " m=" << cfg.m << " p=" << cfg.p << " n=" << cfg.n;
  if (fp.trace()) out << " epochs=" << fp.trace()->epochs_run << " converged=" << (fp.trace()->converged ? 1 : 0);
  out << '\n';
  return kExitOk;
}

int cmd_transform(const Options& o, std::ostream& out) {
  require_input(o.model);
  require_input(o.data);
  require_output(o.out);
  const FittedPipeline fp = load(o.model);
  const Dataset reduced = transform(fp, load_csv(o.data, o.labels_col));
  if (o.out.empty()) throw UsageError("--out is required");
  save_csv(reduced, o.out);
  out << "wrote " << reduced.sample_count() << " samples x " << reduced.feature_count() << " features\n";
  return kExitOk;
}

int cmd_eval(const Options& o, std::ostream& out) {
  require_input(o.model);
  require_input(o.data);
  require_output(o.out);
  if (!o.labels_col) throw UsageError("eval needs --labels-col");
  const FittedPipeline fp = load(o.model);
  const Dataset data = load_csv(o.data, o.labels_col);
  const std::size_t train_count = o.train_size.value_or(data.sample_count() * 4 / 5);
  const auto [train_set, test_set] = split(transform(fp, data), train_count);
  MlpConfig mlp;
  mlp.epochs = o.mlp_epochs;
  mlp.seed = derive_seed(o.seed, streams::kMlp);
  const Mlp model = train_mlp(train_set, mlp);
  const auto& cfg = fp.config();
  MetricsRow row{std::string(mode_name(cfg.mode)), cfg.m, cfg.p, cfg.n, o.seed, accuracy(model, test_set),
                 covariance_diagnostic(test_set.samples()).whiteness_error, std::nullopt};
  Sink sink(o.out, out);
  write_metrics_tsv(sink.get(), {row});
  return kExitOk;
}

int cmd_cost(const Options& o, std::ostream& out) {
  Mode mode;
  try {
    mode = parse_mode(o.mode);
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  ResourceEstimate est;
  try {
    est = estimate_resources(mode, o.m, o.p, o.n);
  } catch (const ArgumentError& e) {
    throw UsageError(e.what());
  }
  require_output(o.out);
  Sink sink(o.out, out);
  if (o.tsv) {
    write_resource_tsv(sink.get(), {est});
  } else {
    print_resource_table(sink.get(), est);
  }
  return kExitOk;
}

int cmd_reproduce(const Options& o, std::ostream& out) {
  require_output(o.out);
  Sink sink(o.out, out);
  if (o.table == "table1") {
    write_table1_tsv(sink.get(), o.seed, reproduce_table1(o.seed));
  } else {
    write_table2_tsv(sink.get(), reproduce_table2());
  }
  return kExitOk;
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Streaming dimensionality reduction: random projection, PCA whitening and EASI ICA"};
  app.require_subcommand(1, 1);
  Options o;

  auto* gen = app.add_subcommand("gen-data", "generate the waveform dataset as CSV (label in the last column)");
  gen->add_option("--samples", o.samples, "number of samples")->capture_default_str();
  gen->add_option("--drop", o.drop, "drop this many trailing features")->capture_default_str();
  gen->add_option("--seed", o.seed, "master seed")->capture_default_str();
  gen->add_option("--out", o.out, "output CSV")->required();
  gen->add_option("--train-size", o.train_size, "write the first N samples to --out and the rest to --test-out");
  gen->add_option("--test-out", o.test_out, "output CSV for the test part");

  auto* fitc = app.add_subcommand("fit", "fit a reduction pipeline and write a model file");
  add_dims(fitc, o);
  fitc->get_option("--mode")->required();
  add_easi(fitc, o);
  fitc->add_option("--seed", o.seed, "master seed")->capture_default_str();
  fitc->add_option("--data", o.data, "training CSV")->required();
  fitc->add_option("--labels-col", o.labels_col, "zero-based label column to exclude");
  fitc->add_option("--out", o.out, "model file")->required();

  auto* tr = app.add_subcommand("transform", "apply a model file to a CSV");
  tr->add_option("--model", o.model, "model file")->required();
  tr->add_option("--data", o.data, "input CSV")->required();
  tr->add_option("--labels-col", o.labels_col, "zero-based label column, carried to the output");
  tr->add_option("--out", o.out, "output CSV")->required();

  auto* ev = app.add_subcommand("eval", "train the classifier on reduced features and report metrics as TSV");
  ev->add_option("--model", o.model, "model file")->required();
  ev->add_option("--data", o.data, "labeled CSV")->required();
  ev->add_option("--labels-col", o.labels_col, "zero-based label column")->required();
  ev->add_option("--train-size", o.train_size, "first N rows train the classifier (default 80%)");
  ev->add_option("--mlp-epochs", o.mlp_epochs, "classifier epochs")->capture_default_str();
  ev->add_option("--seed", o.seed, "master seed")->capture_default_str();
  ev->add_option("--out", o.out, "TSV output (default stdout)");

  auto* cost = app.add_subcommand("cost", "print the hardware resource estimate");
  add_dims(cost, o);
  cost->get_option("--mode")->required();
  cost->add_flag("--tsv", o.tsv, "emit TSV instead of an aligned table");
  cost->add_option("--out", o.out, "output file (default stdout)");

  auto* rep = app.add_subcommand("reproduce", "regenerate a results table");
  rep->add_option("--table", o.table, "table1 | table2")->check(CLI::IsMember({"table1", "table2"}))->required();
  rep->add_option("--seed", o.seed, "master seed")->capture_default_str();
  rep->add_option("--out", o.out, "output TSV (default stdout)");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_gen_data(o, out);
    if (fitc->parsed()) return cmd_fit(o, out);
    if (tr->parsed()) return cmd_transform(o, out);
    if (ev->parsed()) return cmd_eval(o, out);
    if (cost->parsed()) return cmd_cost(o, out);
    if (rep->parsed()) return cmd_reproduce(o, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace easirp

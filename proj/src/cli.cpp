#include "xylreg/cli.hpp"

#include <charconv>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "xylreg/archive.hpp"
#include "xylreg/dataset.hpp"
#include "xylreg/error.hpp"
#include "xylreg/model.hpp"
#include "xylreg/sweep.hpp"

namespace xylreg::cli {

namespace {

/// A failure that maps straight to an exit code.
struct Exit {
  int code;
  std::string message;
};

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io:
      return kIo;
    case ErrorCode::ArityMismatch:
    case ErrorCode::BadArchive:
      return kModelMismatch;
    case ErrorCode::InvalidTrainCount:
    case ErrorCode::InvalidCount:
    case ErrorCode::NonPositiveSigma:
    case ErrorCode::InvalidHiddenCount:
    case ErrorCode::InvalidConfig:
    case ErrorCode::EmptyCandidates:
      return kUsage;
    default:
      return kDataInvalid;
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Exit{kIo, "cannot open '" + path + "' for reading"};
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Exit{kIo, "cannot open '" + path.string() + "' for writing"};
  out << content;
  if (!out) throw Exit{kIo, "failed writing '" + path.string() + "'"};
}

Dataset load_dataset(const std::string& path, TargetColumns targets) {
  std::istringstream in(read_file(path));
  return load_csv(in, targets);
}

TargetKind require_target(const std::string& name) {
  const auto t = parse_target(name);
  if (!t) throw Exit{kUsage, "unknown target '" + name + "'; expected ibp or fbp"};
  return *t;
}

void warn_diagnostics(const Dataset& ds, std::ostream& err) {
  for (const auto& d : validate(ds, 0.5)) err << "warning: " << d.message << '\n';
}

struct TrainFlags {
  TrainConfig cfg;

  void attach(CLI::App* app) {
    app->add_option("--learning-rate", cfg.learning_rate, "MLFN step size")
        ->capture_default_str();
    app->add_option("--momentum", cfg.momentum, "MLFN momentum in [0,1)")
        ->capture_default_str();
    app->add_option("--max-epochs", cfg.max_epochs)->capture_default_str();
    app->add_option("--patience", cfg.patience, "epochs without improvement before stopping")
        ->capture_default_str();
    app->add_option("--init-scale", cfg.init_scale, "uniform init half-width")
        ->capture_default_str();
  }

  std::map<std::string, std::string> describe() const {
    return {{"learning_rate", format_real(cfg.learning_rate)},
            {"momentum", format_real(cfg.momentum)},
            {"max_epochs", std::to_string(cfg.max_epochs)},
            {"patience", std::to_string(cfg.patience)},
            {"init_scale", format_real(cfg.init_scale)}};
  }
};

// ---------------------------------------------------------------------------

struct GenDataArgs {
  std::size_t n = 22;
  std::uint64_t seed = 1;
  std::string out;
};

int gen_data(const GenDataArgs& a, std::ostream& out) {
  if (a.n < 2) throw Exit{kUsage, "--n must be at least 2 (got " + std::to_string(a.n) + ")"};
  const auto ds = generate_synthetic(a.n, a.seed);
  write_file(a.out, to_csv(ds));
  out << "wrote " << ds.size() << " rows to " << a.out << '\n';
  return kOk;
}

struct SweepArgs {
  std::string data;
  std::string target;
  std::size_t train_count = 14;
  std::uint64_t seed = 0;
  std::size_t mlfn_min = 2;
  std::size_t mlfn_max = 30;
  std::size_t threads = 0;
  std::string out;
  TrainFlags train;
};

int sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
  const auto target = require_target(a.target);
  const auto ds = load_dataset(a.data, TargetColumns::Required);
  warn_diagnostics(ds, err);
  if (a.train_count < 1 || a.train_count >= ds.size()) {
    throw Exit{kUsage, "--train-count " + std::to_string(a.train_count) +
                           " leaves no test rows in a " + std::to_string(ds.size()) +
                           "-row dataset"};
  }

  SweepConfig cfg;
  cfg.train_count = a.train_count;
  cfg.master_seed = a.seed;
  cfg.mlfn_min = a.mlfn_min;
  cfg.mlfn_max = a.mlfn_max;
  cfg.mlfn = a.train.cfg;
  cfg.threads = a.threads;
  const auto result = run_sweep(ds, target, cfg);

  const std::filesystem::path dir(a.out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Exit{kIo, "cannot create directory '" + a.out + "': " + ec.message()};

  const std::string stem(short_name(target));
  std::ostringstream csv;
  write_sweep_csv(csv, result);
  write_file(dir / ("sweep_" + stem + ".csv"), csv.str());
  write_file(dir / ("sweep_" + stem + ".txt"), format_sweep_table(result));

  ModelArchive archive;
  archive.target = target;
  archive.model = *result.best_model;
  archive.metadata.model_spec = result.best.tag();
  archive.metadata.seed = result.best.kind == ModelId::Kind::Mlfn
                              ? candidate_seed(a.seed, result.best)
                              : a.seed;
  archive.metadata.config = a.train.describe();
  archive.metadata.config["master_seed"] = std::to_string(a.seed);
  archive.metadata.config["train_count"] = std::to_string(a.train_count);
  const auto train_set = ds.subset(result.train_rows);
  archive.metadata.dataset_fingerprint = fingerprint(train_set);
  archive.metadata.trained_rows = train_set.size();
  for (const auto& r : result.rows) {
    if (r.model == result.best) archive.metadata.config["notes"] = r.notes;
  }
  try {
    save_archive(dir / ("best_" + stem + ".json"), archive);
  } catch (const Error& e) {
    throw Exit{kIo, e.what()};
  }

  for (const auto& r : result.rows) {
    if (r.model != result.best) continue;
    out << "best: " << r.model.label() << " | trained " << r.trained << " | tested "
        << r.tested << " | rms " << format_real(r.rms) << '\n';
  }
  return kOk;
}

struct TrainArgs {
  std::string data;
  std::string target;
  std::string model;
  std::uint64_t seed = 0;
  std::string out;
  TrainFlags train;
};

std::optional<double> parse_positive_real(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

int train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  const auto target = require_target(a.target);

  ModelArchive archive;
  archive.target = target;
  archive.metadata.seed = a.seed;
  archive.metadata.model_spec = a.model;

  std::string_view spec = a.model;
  enum class Kind { Linear, Grnn, Mlfn } kind;
  std::optional<double> sigma;
  std::size_t hidden = 0;
  if (spec == "linear") {
    kind = Kind::Linear;
  } else if (spec == "grnn") {
    kind = Kind::Grnn;
  } else if (spec.starts_with("grnn:")) {
    kind = Kind::Grnn;
    sigma = parse_positive_real(spec.substr(5));
    if (!sigma || !(*sigma > 0.0)) {
      throw Exit{kUsage, "GRNN sigma in '" + a.model + "' must be a positive number"};
    }
  } else if (const auto id = ModelId::parse(spec); id && id->kind == ModelId::Kind::Mlfn) {
    kind = Kind::Mlfn;
    hidden = id->hidden;
  } else {
    throw Exit{kUsage, "unknown model spec '" + a.model +
                           "'; expected linear, grnn[:sigma] or mlfn:<h>"};
  }

  const auto ds = load_dataset(a.data, TargetColumns::Required);
  warn_diagnostics(ds, err);
  switch (kind) {
    case Kind::Linear: {
      auto lm = fit_ols(ds, target);
      archive.metadata.config["ridge"] = format_real(lm.ridge);
      archive.model = std::move(lm);
      break;
    }
    case Kind::Grnn: {
      if (!sigma) {
        sigma = select_bandwidth(ds, target, default_bandwidths());
        archive.metadata.config["sigma_selection"] = "loo";
      }
      archive.metadata.config["sigma"] = format_real(*sigma);
      archive.model = fit_grnn(ds, target, *sigma);
      break;
    }
    case Kind::Mlfn: {
      auto cfg = a.train.cfg;
      cfg.seed = a.seed;
      auto result = train_mlfn(ds, target, hidden, cfg);
      archive.metadata.config = a.train.describe();
      archive.metadata.config["stop"] = std::string(to_string(result.history.stop));
      archive.metadata.config["epochs"] = std::to_string(result.history.train_mse.size());
      if (result.history.stop == StopReason::Diverged) {
        err << "warning: training diverged; archived the last finite parameters\n";
      }
      archive.model = std::move(result.model);
      break;
    }
  }
  archive.metadata.dataset_fingerprint = fingerprint(ds);
  archive.metadata.trained_rows = ds.size();
  try {
    save_archive(a.out, archive);
  } catch (const Error& e) {
    throw Exit{kIo, e.what()};
  }

  out << "trained " << a.model << " on " << ds.size() << " rows";
  if (const auto* mm = std::get_if<MlfnModel>(&archive.model)) {
    out << " (" << mm->parameter_count() << " parameters)";
  }
  out << "; wrote " << a.out << '\n';
  return kOk;
}

ModelArchive read_archive(const std::string& path) {
  const auto text = read_file(path);
  return deserialize(text);
}

/// Exit 5 when the data file's feature columns cannot feed the model.
void check_feature_arity(const std::string& text) {
  const auto header = csv_header(text);
  if (header.empty()) return;
  std::size_t features = 0;
  for (const auto& h : header) {
    if (h != column_name(TargetKind::InitialBoilingPoint) &&
        h != column_name(TargetKind::FinalBoilingPoint)) {
      ++features;
    }
  }
  if (features != kFeatureCount) {
    throw Exit{kModelMismatch, "data file has " + std::to_string(features) +
                                   " feature columns; the model expects " +
                                   std::to_string(kFeatureCount)};
  }
}

struct PredictArgs {
  std::string model;
  std::string data;
  std::string out;
};

int predict_cmd(const PredictArgs& a, std::ostream& out) {
  const auto archive = read_archive(a.model);
  const auto text = read_file(a.data);
  check_feature_arity(text);
  std::istringstream in(text);
  const auto ds = load_csv(in, TargetColumns::Optional);

  std::ostringstream csv;
  csv << "row,prediction\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    csv << (i + 1) << ',' << format_real(predict(archive.model, ds[i].features)) << '\n';
  }
  write_file(a.out, csv.str());
  out << "wrote " << ds.size() << " predictions to " << a.out << '\n';
  return kOk;
}

struct ReportArgs {
  std::string model;
  std::string data;
  std::string target;
  std::string out;
};

int report(const ReportArgs& a, std::ostream& out, std::ostream& err) {
  const auto archive = read_archive(a.model);
  const auto target = a.target.empty() ? archive.target : require_target(a.target);
  if (target != archive.target) {
    throw Exit{kModelMismatch, "model predicts " + std::string(column_name(archive.target)) +
                                   ", not " + std::string(column_name(target))};
  }
  const auto text = read_file(a.data);
  check_feature_arity(text);
  std::istringstream in(text);
  const auto ds = load_csv(in, TargetColumns::Optional);
  if (!ds.has_target(target)) {
    throw Exit{kDataInvalid,
               "data file has no " + std::string(column_name(target)) + " column"};
  }

  const bool own_training_data = fingerprint(ds) == archive.metadata.dataset_fingerprint;
  if (own_training_data) {
    err << "note: scoring the model on the rows it was trained on\n";
  }

  const auto eval = evaluate(archive.model, ds, target);
  std::ostringstream summary;
  summary << "rms=" << format_real(eval.rms) << " n=" << eval.pairs.size()
          << " target=" << column_name(target) << " model=" << archive.metadata.model_spec
          << " set=" << (own_training_data ? "training" : "other");

  std::ostringstream csv;
  csv << "actual,predicted\n";
  for (const auto& [actual, predicted] : eval.pairs) {
    csv << format_real(actual) << ',' << format_real(predicted) << '\n';
  }
  csv << "# " << summary.str() << '\n';
  write_file(a.out, csv.str());
  out << summary.str() << '\n';
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Small-sample boiling-point regression toolkit", "xylreg"};
  app.require_subcommand(1);

  GenDataArgs gen_args;
  auto* gen = app.add_subcommand("gen-data", "Write a synthetic composition dataset");
  gen->add_option("--n", gen_args.n, "row count")->capture_default_str();
  gen->add_option("--seed", gen_args.seed)->capture_default_str();
  gen->add_option("--out", gen_args.out, "output CSV")->required();

  SweepArgs sweep_args;
  auto* sw = app.add_subcommand("sweep", "Linear / GRNN / MLFN comparison on one split");
  sw->add_option("--data", sweep_args.data, "input CSV")->required();
  sw->add_option("--target", sweep_args.target, "ibp or fbp")->required();
  sw->add_option("--train-count", sweep_args.train_count)->capture_default_str();
  sw->add_option("--seed", sweep_args.seed, "master seed")->capture_default_str();
  sw->add_option("--mlfn-min", sweep_args.mlfn_min)->capture_default_str();
  sw->add_option("--mlfn-max", sweep_args.mlfn_max)->capture_default_str();
  sw->add_option("--threads", sweep_args.threads, "0 = all cores")->capture_default_str();
  sw->add_option("--out", sweep_args.out, "output directory")->required();
  sweep_args.train.attach(sw);

  TrainArgs train_args;
  auto* tr = app.add_subcommand("train", "Fit one model on a whole file");
  tr->add_option("--data", train_args.data, "input CSV")->required();
  tr->add_option("--target", train_args.target, "ibp or fbp")->required();
  tr->add_option("--model", train_args.model, "linear | grnn[:sigma] | mlfn:<h>")
      ->required();
  tr->add_option("--seed", train_args.seed)->capture_default_str();
  tr->add_option("--out", train_args.out, "output archive")->required();
  train_args.train.attach(tr);

  PredictArgs predict_args;
  auto* pr = app.add_subcommand("predict", "Predict with an archived model");
  pr->add_option("--model", predict_args.model, "model archive")->required();
  pr->add_option("--data", predict_args.data, "feature CSV")->required();
  pr->add_option("--out", predict_args.out, "predictions CSV")->required();

  ReportArgs report_args;
  auto* rp = app.add_subcommand("report", "Predicted-vs-actual table with RMS");
  rp->add_option("--model", report_args.model, "model archive")->required();
  rp->add_option("--data", report_args.data, "CSV with the target column")->required();
  rp->add_option("--target", report_args.target, "ibp or fbp (default: archive target)");
  rp->add_option("--out", report_args.out, "report CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << " (run with --help for usage)\n";
    return kUsage;
  }

  try {
    if (*gen) return gen_data(gen_args, out);
    if (*sw) return sweep(sweep_args, out, err);
    if (*tr) return train(train_args, out, err);
    if (*pr) return predict_cmd(predict_args, out);
    if (*rp) return report(report_args, out, err);
  } catch (const Exit& e) {
    err << "error: " << e.message;
    if (e.code == kUsage) err << " (run with --help for usage)";
    err << '\n';
    return e.code;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataInvalid;
  }
  return kUsage;
}

}  // namespace xylreg::cli

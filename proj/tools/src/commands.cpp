#include "adasent_tools/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>

#include "adasent/error.hpp"
#include "adasent/pca.hpp"

namespace adasent::tools {

namespace {

namespace fs = std::filesystem;

std::string fmt(Real x) {
  if (std::isnan(x)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string exact(Real x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw InputError("cannot write output file: " + path.string());
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void print_warnings(const std::vector<std::string>& warnings, std::ostream& log,
                    std::size_t limit = 5) {
  for (std::size_t i = 0; i < warnings.size() && i < limit; ++i) {
    log << "warning: " << warnings[i] << '\n';
  }
  if (warnings.size() > limit) {
    log << "warning: (" << warnings.size() - limit << " more warnings)\n";
  }
}

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> valid;
  std::vector<std::size_t> test;
};

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

}  // namespace

std::pair<Real, Real> mean_and_stddev(const std::vector<Real>& values) {
  if (values.empty()) return {std::nan(""), std::nan("")};
  const Real mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
  if (values.size() == 1) return {mean, 0.0};
  Real ss = 0.0;
  for (Real v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<Real>(values.size() - 1))};
}

PreparedData prepare_data(const RunConfig& config, std::ostream& log) {
  config.validate();
  if (config.data.empty()) throw InputError("no dataset given (set data=...)");
  if (config.embeddings.empty()) throw InputError("no embedding file given (set embeddings=...)");
  PreparedData prepared;
  prepared.dataset = load_dataset(config.dataset, resolve_data_path(config.data));
  print_warnings(prepared.dataset.warnings, log);
  if (prepared.dataset.dropped_empty) {
    log << "dropped " << prepared.dataset.dropped_empty << " empty examples\n";
  }
  const auto words = vocabulary_of(prepared.dataset.examples);
  prepared.embeddings =
      load_embeddings(resolve_data_path(config.embeddings), config.embedding_dim, &words);
  print_warnings(prepared.embeddings.warnings, log);
  std::size_t covered = 0;
  for (const auto& w : words) covered += prepared.embeddings.vocab.contains(w) ? 1 : 0;
  log << "dataset " << config.dataset << ": " << prepared.dataset.examples.size()
      << " examples, " << prepared.dataset.spec.num_classes << " classes; embeddings cover "
      << covered << "/" << words.size() << " word types\n";
  return prepared;
}

namespace {

Split single_split(const RunConfig& config, const LoadedDataset& ds) {
  Split s;
  if (ds.spec.protocol == SplitProtocol::kFixedTest) {
    const auto folds = make_folds(ds.examples, SplitProtocol::kFixedTest, config.seed,
                                  ds.spec.num_classes);
    s.train = folds.members(0);
    s.test = folds.members(1);
  } else {
    s.train = all_indices(ds.examples.size());
  }
  split_validation(s.train, s.valid, ds.examples, config.valid_fraction, config.seed,
                   ds.spec.num_classes);
  return s;
}

void write_metrics(const fs::path& path, const TrainResult& result) {
  auto out = open_output(path);
  out << "epoch,train_data_loss,train_regularization,train_objective,train_accuracy,"
         "valid_accuracy,recurrent_norm_sq,max_grad_norm\n";
  for (const auto& m : result.history) {
    out << m.epoch << ',' << fmt(m.train.data) << ',' << fmt(m.train.regularization) << ','
        << fmt(m.train.total) << ',' << fmt(m.train_accuracy) << ',' << fmt(m.valid_accuracy)
        << ',' << fmt(m.recurrent_norm) << ',' << fmt(m.max_grad_norm) << '\n';
  }
}

}  // namespace

TrainRun cmd_train(const RunConfig& config, std::ostream& log) {
  PreparedData data = prepare_data(config, log);
  const auto& ds = data.dataset;
  const Split split = single_split(config, ds);
  const auto& vocab = data.embeddings.vocab;
  const auto train_set = encode(ds.examples, split.train, vocab, config.max_tokens);
  const auto valid_set = encode(ds.examples, split.valid, vocab, config.max_tokens);
  const auto test_set = encode(ds.examples, split.test, vocab, config.max_tokens);
  log << "training " << to_string(config.model) << " on " << train_set.size() << " examples ("
      << valid_set.size() << " validation, " << test_set.size() << " test)\n";

  TrainRun run;
  run.result = train(train_set, valid_set, data.embeddings.table,
                     config.train_config(ds.spec.num_classes), [&log](const EpochMetrics& m) {
                       log << "epoch " << m.epoch << " objective " << fmt(m.train.total)
                           << " train_acc " << fmt(m.train_accuracy) << " valid_acc "
                           << fmt(m.valid_accuracy) << '\n';
                     });
  run.test_accuracy = accuracy(run.result.best, test_set);
  if (!test_set.empty()) log << "test accuracy " << fmt(run.test_accuracy) << '\n';

  const fs::path out_dir(config.out);
  fs::create_directories(out_dir);
  run.checkpoint = out_dir / "checkpoint.txt";
  run.metrics = out_dir / "metrics.csv";
  run.config_echo = out_dir / "config.txt";
  save_checkpoint(run.checkpoint, {vocab, run.result.best, config.seed, config.echo()});
  write_metrics(run.metrics, run.result);
  open_output(run.config_echo) << config.echo();
  log << "best epoch " << run.result.best_epoch << "; wrote " << run.checkpoint.string() << '\n';
  return run;
}

CrossvalSummary crossval(const RunConfig& config, const PreparedData& data, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  const auto& ds = data.dataset;
  const auto& vocab = data.embeddings.vocab;
  const std::size_t K = ds.spec.num_classes;
  const auto folds = make_folds(ds.examples, ds.spec.protocol, config.seed, K);
  const bool fixed_test = ds.spec.protocol == SplitProtocol::kFixedTest;
  const std::size_t fold_count = fixed_test ? 1 : config.folds;

  CrossvalSummary summary;
  for (std::size_t restart = 0; restart < config.restarts; ++restart) {
    TrainConfig tc = config.train_config(K);
    tc.seed = config.seed + restart;
    std::vector<Real> fold_acc;
    for (std::size_t f = 0; f < fold_count; ++f) {
      const auto fold_start = std::chrono::steady_clock::now();
      Split s;
      if (fixed_test) {
        s.train = folds.members(0);
        s.test = folds.members(1);
      } else {
        s.train = folds.complement(f);
        s.test = folds.members(f);
      }
      split_validation(s.train, s.valid, ds.examples, config.valid_fraction, tc.seed + 31 * f, K);
      const auto train_set = encode(ds.examples, s.train, vocab, config.max_tokens);
      const auto valid_set = encode(ds.examples, s.valid, vocab, config.max_tokens);
      const auto test_set = encode(ds.examples, s.test, vocab, config.max_tokens);
      const auto result = train(train_set, valid_set, data.embeddings.table, tc);
      FoldResult fr{restart, f, train_set.size(), test_set.size(), accuracy(result.best, test_set),
                    seconds_since(fold_start)};
      log << "restart " << restart << " fold " << f << ": accuracy " << fmt(fr.accuracy) << " ("
          << fmt(fr.seconds) << "s)\n";
      fold_acc.push_back(fr.accuracy);
      summary.folds.push_back(fr);
    }
    summary.run_accuracies.push_back(mean_and_stddev(fold_acc).first);
  }
  if (config.restarts > 1) {
    std::tie(summary.mean, summary.stddev) = mean_and_stddev(summary.run_accuracies);
  } else {
    std::vector<Real> acc;
    for (const auto& f : summary.folds) acc.push_back(f.accuracy);
    std::tie(summary.mean, summary.stddev) = mean_and_stddev(acc);
  }
  summary.wall_seconds = seconds_since(start);
  return summary;
}

CrossvalSummary cmd_crossval(const RunConfig& config, std::ostream& log) {
  const PreparedData data = prepare_data(config, log);
  const CrossvalSummary summary = crossval(config, data, log);
  const fs::path out_dir(config.out);
  fs::create_directories(out_dir);
  {
    auto out = open_output(out_dir / "folds.csv");
    out << "restart,fold,train_size,test_size,accuracy,seconds\n";
    for (const auto& f : summary.folds) {
      out << f.restart << ',' << f.fold << ',' << f.train_size << ',' << f.test_size << ','
          << fmt(f.accuracy) << ',' << fmt(f.seconds) << '\n';
    }
  }
  {
    auto out = open_output(out_dir / "summary.csv");
    out << "model,dataset,runs,mean_accuracy,std_accuracy,wall_seconds\n";
    out << to_string(config.model) << ',' << config.dataset << ','
        << (config.restarts > 1 ? summary.run_accuracies.size() : summary.folds.size()) << ','
        << fmt(100.0 * summary.mean) << ',' << fmt(100.0 * summary.stddev) << ','
        << fmt(summary.wall_seconds) << '\n';
  }
  open_output(out_dir / "config.txt") << config.echo();
  char line[128];
  std::snprintf(line, sizeof line, "%s on %s: %.2f +- %.2f (%.1fs)\n",
                std::string(to_string(config.model)).c_str(), config.dataset.c_str(),
                100.0 * summary.mean, 100.0 * summary.stddev, summary.wall_seconds);
  log << line;
  return summary;
}

SweepReport cmd_gradcheck(const SweepConfig& sweep, std::ostream& log) {
  const SweepReport report = run_gradcheck(sweep);
  for (const auto& p : report.problems) {
    log << (p.passed ? "PASS " : "FAIL ") << p.description << '\n';
    for (const auto& t : p.tensors) {
      const bool bad = t.max_relative_error > sweep.settings.tolerance;
      if (!bad && !t.data_gradient_zero) continue;
      log << "  " << t.name << ": max_rel_err " << t.max_relative_error;
      if (t.data_gradient_zero) log << " (data gradient exactly zero)";
      if (bad) {
        log << " at coordinate " << t.worst_coordinate << " analytic " << t.worst_analytic
            << " numeric " << t.worst_numeric << " EXCEEDS " << sweep.settings.tolerance;
      }
      log << '\n';
    }
  }
  log << (report.passed ? "PASS" : "FAIL") << ": " << report.problems.size()
      << " problems, max relative error " << report.max_relative_error << " (" << report.worst
      << ")\n";
  return report;
}

BeliefExport cmd_inspect_beliefs(const fs::path& checkpoint_path, const fs::path& sentences,
                                 const fs::path& out_dir, std::ostream& log) {
  const Checkpoint ck = load_checkpoint(checkpoint_path);
  if (ck.params.config.kind != ModelKind::kAdaSent) {
    throw InputError("belief scores need an adasent checkpoint; " + checkpoint_path.string() +
                     " holds a " + std::string(to_string(ck.params.config.kind)) + " model");
  }
  std::ifstream in(sentences);
  if (!in) throw InputError("cannot open sentences file: " + sentences.string());

  struct Row {
    std::size_t line;
    ForwardPass pass;
  };
  std::vector<Row> rows;
  BeliefExport result;
  std::string line;
  std::size_t line_no = 0;
  std::size_t widest = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto ids = lookup_tokens(tokenize(to_utf8(line)), ck.vocab, ck.params.config.max_tokens);
    if (ids.empty()) {
      log << "warning: " << sentences.string() << ":" << line_no << ": empty sentence skipped\n";
      ++result.skipped;
      continue;
    }
    rows.push_back({line_no, forward(ck.params, ids)});
    widest = std::max(widest, ids.size());
  }

  result.rows = rows.size();
  result.beliefs = out_dir / "beliefs.csv";
  result.level_probs = out_dir / "level_probs.csv";
  auto beliefs = open_output(result.beliefs);
  auto levels = open_output(result.level_probs);
  beliefs << "line,length";
  levels << "line,length,consensus_p1";
  for (std::size_t t = 1; t <= widest; ++t) {
    beliefs << ",level_" << t;
    levels << ",level_" << t;
  }
  beliefs << '\n';
  levels << '\n';
  for (const auto& row : rows) {
    const auto& mix = row.pass.mixture;
    const std::size_t T = mix.beliefs.dim();
    beliefs << row.line << ',' << T;
    levels << row.line << ',' << T << ',' << exact(mix.distribution[1]);
    for (std::size_t t = 0; t < widest; ++t) {
      beliefs << ',';
      levels << ',';
      if (t < T) {
        beliefs << exact(mix.beliefs[t]);
        levels << exact(mix.levels[t].probs[1]);
      }
    }
    beliefs << '\n';
    levels << '\n';
  }
  log << "wrote " << result.rows << " rows to " << result.beliefs.string() << " and "
      << result.level_probs.string() << '\n';
  return result;
}

std::size_t cmd_export_pca(const fs::path& checkpoint_path, const std::string& dataset,
                           const fs::path& data_path, const fs::path& out_file, std::ostream& log) {
  const Checkpoint ck = load_checkpoint(checkpoint_path);
  const LoadedDataset ds = load_dataset(dataset, data_path);
  if (ds.examples.size() < 3) throw InputError("PCA export needs at least 3 examples");
  std::vector<Vector> points;
  std::vector<std::size_t> labels;
  points.reserve(ds.examples.size());
  for (const auto& ex : ds.examples) {
    const auto ids = lookup_tokens(ex.tokens, ck.vocab, ck.params.config.max_tokens);
    points.push_back(selected_representation(forward(ck.params, ids)));
    labels.push_back(ex.label);
  }
  if (points.front().dim() < 2) throw InputError("PCA export needs representations of dim >= 2");
  const PcaResult pca = principal_components(points, 2);
  auto out = open_output(out_file);
  out << "x,y,label\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vector xy = project(points[i], pca);
    out << exact(xy[0]) << ',' << exact(xy[1]) << ',' << labels[i] << '\n';
  }
  log << "wrote " << points.size() << " points to " << out_file.string() << " (PC variances "
      << fmt(pca.variances[0]) << ", " << fmt(pca.variances[1]) << ")\n";
  return points.size();
}

std::size_t cmd_convert_dataset(const ConvertRequest& request, std::ostream& log) {
  std::vector<Example> examples;
  if (request.format == "two-file") {
    if (request.positive.empty() || request.negative.empty()) {
      throw InputError("two-file format needs --pos and --neg");
    }
    examples = convert_two_file(request.positive, request.negative);
  } else if (request.format == "cr") {
    if (request.inputs.empty()) throw InputError("cr format needs at least one --input");
    examples = convert_customer_reviews(request.inputs);
  } else if (request.format == "trec") {
    if (request.inputs.size() != 1) throw InputError("trec format needs exactly one --input");
    examples = convert_trec(request.inputs.front());
  } else {
    throw InputError("unknown format '" + request.format + "' (expected two-file, cr or trec)");
  }
  auto out = open_output(request.out);
  write_normalized(out, examples);
  log << "wrote " << examples.size() << " examples to " << request.out.string() << '\n';
  return examples.size();
}

DatasetStats cmd_stats(const std::string& dataset, const fs::path& path, std::ostream& log) {
  const LoadedDataset ds = load_dataset(dataset, path);
  print_warnings(ds.warnings, log);
  const DatasetStats s = dataset_stats(ds.examples, ds.spec.num_classes);
  log << "N=" << s.size << " K=" << ds.spec.num_classes << " dist=(";
  for (std::size_t c = 0; c < s.distribution.size(); ++c) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%.3f", c ? ", " : "", s.distribution[c]);
    log << buf;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, ") |w|=%.2f", s.mean_length);
  log << buf;
  if (ds.dropped_empty) log << " dropped_empty=" << ds.dropped_empty;
  log << '\n';
  return s;
}

}  // namespace adasent::tools

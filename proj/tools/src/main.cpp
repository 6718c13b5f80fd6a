#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>

#include "adasent/error.hpp"
#include "adasent_tools/commands.hpp"

namespace {

using adasent::RunConfig;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitBadInput = 2;

/// Flags mirroring every RunConfig key, plus --config and --set.
struct ConfigFlags {
  std::string config_file;
  std::vector<std::string> sets;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;

  void attach(CLI::App& app) {
    app.add_option("--config", config_file, "key=value config file")->check(CLI::ExistingFile);
    app.add_option("--set", sets, "Override as key=value (repeatable)");
    for (const auto& key : RunConfig::keys()) {
      std::string flag = "--" + key;
      std::replace(flag.begin(), flag.end(), '_', '-');
      options[key] = app.add_option(flag, values[key], "Config key '" + key + "'");
    }
  }

  /// Precedence: command line > config file > defaults.
  RunConfig resolve() const {
    RunConfig config;
    if (!config_file.empty()) config.merge_file(config_file);
    for (const auto& [key, opt] : options) {
      if (opt->count() > 0) config.set(key, values.at(key));
    }
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw adasent::InputError("--set expects key=value, got '" + s + "'");
      config.set(s.substr(0, eq), s.substr(eq + 1));
    }
    config.validate();
    return config;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AdaSent hierarchical sentence models: training, evaluation and diagnostics"};
  app.require_subcommand(1);

  ConfigFlags train_flags;
  auto* train = app.add_subcommand("train", "Train one model and write checkpoint + metrics");
  train_flags.attach(*train);

  ConfigFlags cv_flags;
  auto* crossval = app.add_subcommand("crossval", "10-fold cross-validation / restarts");
  cv_flags.attach(*crossval);

  adasent::SweepConfig sweep;
  std::vector<std::string> kinds;
  std::size_t min_length = sweep.draw.min_length;
  std::size_t max_length = sweep.draw.max_length;
  auto* gradcheck = app.add_subcommand("gradcheck", "Compare backprop gradients with central differences");
  gradcheck->add_option("--problems", sweep.problems_per_kind, "Random problems per model kind")
      ->capture_default_str();
  gradcheck->add_option("--seed", sweep.seed, "Seed of the first problem")->capture_default_str();
  gradcheck->add_option("--kinds", kinds, "Model kinds (default: all)");
  gradcheck->add_option("--min-length", min_length, "Shortest sentence")->capture_default_str();
  gradcheck->add_option("--max-length", max_length, "Longest sentence")->capture_default_str();
  gradcheck->add_option("--tolerance", sweep.settings.tolerance, "Max relative error")
      ->capture_default_str();
  gradcheck->add_option("--step", sweep.settings.step, "Central-difference step")
      ->capture_default_str();
  gradcheck->add_option("--floor", sweep.settings.floor, "Relative-error denominator floor")
      ->capture_default_str();

  std::string checkpoint;
  std::string sentences;
  std::string belief_out = ".";
  auto* inspect = app.add_subcommand("inspect-beliefs", "Export per-level belief scores");
  inspect->add_option("--checkpoint", checkpoint, "Trained adasent checkpoint")->required();
  inspect->add_option("--sentences", sentences, "One sentence per line")->required();
  inspect->add_option("--out", belief_out, "Output directory")->capture_default_str();

  std::string pca_dataset = "custom";
  std::string pca_data;
  std::string pca_out = "pca.csv";
  auto* pca = app.add_subcommand("export-pca", "Project selected representations onto 2 PCs");
  pca->add_option("--checkpoint", checkpoint, "Trained checkpoint")->required();
  pca->add_option("--dataset", pca_dataset, "Dataset name")->capture_default_str();
  pca->add_option("--data", pca_data, "Normalized dataset")->required();
  pca->add_option("--out", pca_out, "Output CSV")->capture_default_str();

  adasent::tools::ConvertRequest convert;
  std::string convert_out;
  std::vector<std::string> convert_inputs;
  std::string pos;
  std::string neg;
  auto* conv = app.add_subcommand("convert-dataset", "Convert a public release to label<TAB>text");
  conv->add_option("--format", convert.format, "two-file, cr or trec")->required();
  conv->add_option("--pos", pos, "Positive / subjective file (two-file)");
  conv->add_option("--neg", neg, "Negative / objective file (two-file)");
  conv->add_option("--input", convert_inputs, "Input files (cr, trec)");
  conv->add_option("--out", convert_out, "Output file")->required();

  std::string stats_dataset = "custom";
  std::string stats_data;
  auto* stats = app.add_subcommand("stats", "Dataset statistics (N, class distribution, |w|)");
  stats->add_option("--dataset", stats_dataset, "Dataset name")->capture_default_str();
  stats->add_option("--data", stats_data, "Normalized dataset")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) {
      adasent::tools::cmd_train(train_flags.resolve(), std::cout);
    } else if (crossval->parsed()) {
      adasent::tools::cmd_crossval(cv_flags.resolve(), std::cout);
    } else if (gradcheck->parsed()) {
      if (!kinds.empty()) {
        sweep.kinds.clear();
        for (const auto& k : kinds) sweep.kinds.push_back(adasent::parse_model_kind(k));
      }
      sweep.draw.min_length = min_length;
      sweep.draw.max_length = max_length;
      if (min_length == 0 || max_length < min_length) {
        throw adasent::InputError("sentence lengths must satisfy 1 <= min <= max");
      }
      const auto report = adasent::tools::cmd_gradcheck(sweep, std::cout);
      return report.passed ? kExitOk : kExitInternal;
    } else if (inspect->parsed()) {
      adasent::tools::cmd_inspect_beliefs(checkpoint, sentences, belief_out, std::cout);
    } else if (pca->parsed()) {
      adasent::tools::cmd_export_pca(checkpoint, pca_dataset,
                                     adasent::resolve_data_path(pca_data), pca_out, std::cout);
    } else if (conv->parsed()) {
      convert.positive = pos;
      convert.negative = neg;
      for (const auto& p : convert_inputs) convert.inputs.emplace_back(p);
      convert.out = convert_out;
      adasent::tools::cmd_convert_dataset(convert, std::cout);
    } else if (stats->parsed()) {
      adasent::tools::cmd_stats(stats_dataset, adasent::resolve_data_path(stats_data), std::cout);
    }
  } catch (const adasent::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitOk;
}

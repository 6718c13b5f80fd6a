#include "adasent/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "adasent/error.hpp"

namespace adasent {

Real gradient_relative_error(Real analytic, Real numeric, Real floor) {
  const Real denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

GradcheckProblem draw_gradcheck_problem(ModelKind kind, const GradcheckDraw& draw,
                                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform_int = [&rng](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  std::uniform_real_distribution<Real> unit(-1.0, 1.0);

  ModelConfig config;
  config.kind = kind;
  config.pyramid_dim = uniform_int(draw.min_dim, draw.max_dim);
  config.num_classes = uniform_int(draw.min_classes, draw.max_classes);
  config.hidden_dim = uniform_int(2, 5);
  config.pooling = uniform_int(0, 1) == 0 ? PoolingKind::kAverage : PoolingKind::kMax;
  config.fine_tune_embeddings = true;
  config.project_words = kind != ModelKind::kCbow || uniform_int(0, 1) == 1;
  const std::size_t word_dim = uniform_int(2, config.pyramid_dim);
  const std::size_t vocab = uniform_int(4, 9);

  EmbeddingTable table{Matrix(word_dim, vocab), true};
  for (auto& x : table.vectors.values()) x = unit(rng);

  GradcheckProblem problem;
  problem.seed = seed;
  problem.params = ModelParams::create(config, std::move(table), rng);
  for (auto& t : tensors(problem.params)) {
    for (auto& x : t.values) x += 0.5 * unit(rng);
  }
  problem.lambda = std::uniform_real_distribution<Real>(5e-5, 0.01)(rng);
  for (std::size_t b = 0; b < draw.batch_size; ++b) {
    LabeledSequence ex;
    const std::size_t length = uniform_int(draw.min_length, draw.max_length);
    for (std::size_t i = 0; i < length; ++i) ex.ids.push_back(uniform_int(0, vocab - 1));
    ex.label = uniform_int(0, config.num_classes - 1);
    problem.batch.push_back(std::move(ex));
  }
  std::ostringstream desc;
  desc << to_string(kind) << " seed=" << seed << " D=" << config.pyramid_dim
       << " d=" << word_dim << " H=" << config.hidden_dim << " K=" << config.num_classes
       << " pooling=" << to_string(config.pooling) << " T=";
  for (std::size_t b = 0; b < problem.batch.size(); ++b) {
    desc << (b ? "," : "") << problem.batch[b].ids.size();
  }
  if (kind == ModelKind::kCbow && !config.project_words) desc << " unprojected";
  problem.description = desc.str();
  return problem;
}

ProblemReport check_problem(GradcheckProblem& problem, const GradcheckSettings& settings) {
  auto& params = problem.params;
  Gradients grads = Gradients::zeros_like(params);
  accumulate_gradients(problem.batch, params, problem.lambda, grads);
  if (settings.corrupt) settings.corrupt(grads);
  Gradients data_only = Gradients::zeros_like(params);
  accumulate_gradients(problem.batch, params, 0.0, data_only);

  ProblemReport report;
  report.description = problem.description;
  report.kind = params.config.kind;
  const auto analytic = tensors(grads.values);
  const auto data_views = tensors(data_only.values);
  const std::size_t count = tensors(params).size();
  for (std::size_t t = 0; t < count; ++t) {
    TensorCheck check;
    check.name = analytic[t].name;
    check.coordinates = analytic[t].values.size();
    check.data_gradient_zero = std::all_of(data_views[t].values.begin(),
                                           data_views[t].values.end(),
                                           [](Real x) { return x == 0.0; });
    for (std::size_t i = 0; i < check.coordinates; ++i) {
      const Real numeric = finite_difference_grad(problem.batch, params, problem.lambda, t, i,
                                                  settings.step);
      const Real a = analytic[t].values[i];
      const Real err = gradient_relative_error(a, numeric, settings.floor);
      if (i == 0 || err > check.max_relative_error) {
        check.max_relative_error = err;
        check.worst_coordinate = i;
        check.worst_analytic = a;
        check.worst_numeric = numeric;
      }
    }
    if (check.max_relative_error > settings.tolerance) report.passed = false;
    report.tensors.push_back(std::move(check));
  }
  return report;
}

SweepReport run_gradcheck(const SweepConfig& config) {
  SweepReport sweep;
  std::uint64_t seed = config.seed;
  for (ModelKind kind : config.kinds) {
    for (std::size_t i = 0; i < config.problems_per_kind; ++i) {
      auto problem = draw_gradcheck_problem(kind, config.draw, seed++);
      auto report = check_problem(problem, config.settings);
      for (const auto& t : report.tensors) {
        if (t.max_relative_error >= sweep.max_relative_error) {
          sweep.max_relative_error = t.max_relative_error;
          sweep.worst = report.description + " / " + t.name + "[" +
                        std::to_string(t.worst_coordinate) + "]";
        }
      }
      sweep.passed = sweep.passed && report.passed;
      sweep.problems.push_back(std::move(report));
    }
  }
  return sweep;
}

}  // namespace adasent

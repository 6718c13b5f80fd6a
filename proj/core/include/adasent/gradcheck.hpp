#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "adasent/model.hpp"
#include "adasent/training.hpp"

namespace adasent {

/// Relative error used throughout gradient checking:
/// |a - n| / max(|a|, |n|, floor).
Real gradient_relative_error(Real analytic, Real numeric, Real floor);

/// One randomly drawn small problem.
struct GradcheckProblem {
  ModelParams params;
  std::vector<LabeledSequence> batch;
  Real lambda = 0.0;
  std::uint64_t seed = 0;
  std::string description;
};

struct GradcheckDraw {
  std::size_t min_length = 1;
  std::size_t max_length = 6;
  std::size_t min_dim = 3;
  std::size_t max_dim = 8;
  std::size_t min_classes = 2;
  std::size_t max_classes = 3;
  std::size_t batch_size = 2;
};

/// Random parameters (every tensor including biases perturbed), a random
/// batch and lambda drawn from [5e-5, 0.01].
GradcheckProblem draw_gradcheck_problem(ModelKind kind, const GradcheckDraw& draw,
                                        std::uint64_t seed);

struct TensorCheck {
  std::string name;
  std::size_t coordinates = 0;
  Real max_relative_error = 0.0;
  std::size_t worst_coordinate = 0;
  Real worst_analytic = 0.0;
  Real worst_numeric = 0.0;
  /// The data term (regularization excluded) has an exactly zero gradient.
  bool data_gradient_zero = false;
};

struct ProblemReport {
  std::string description;
  ModelKind kind = ModelKind::kAdaSent;
  std::vector<TensorCheck> tensors;
  bool passed = true;
};

/// Hook applied to the analytic gradients before comparison (a negative
/// control corrupts one tensor here).
using GradientHook = std::function<void(Gradients&)>;

struct GradcheckSettings {
  Real step = 1e-5;
  Real tolerance = 1e-4;
  Real floor = 1e-6;
  GradientHook corrupt;
};

ProblemReport check_problem(GradcheckProblem& problem, const GradcheckSettings& settings);

struct SweepConfig {
  std::vector<ModelKind> kinds{std::begin(kAllModelKinds), std::end(kAllModelKinds)};
  std::size_t problems_per_kind = 4;
  GradcheckDraw draw;
  GradcheckSettings settings;
  std::uint64_t seed = 2015;
};

struct SweepReport {
  std::vector<ProblemReport> problems;
  bool passed = true;
  Real max_relative_error = 0.0;
  std::string worst;  ///< "<problem> / <tensor>[<coordinate>]"
};

SweepReport run_gradcheck(const SweepConfig& config);

}  // namespace adasent

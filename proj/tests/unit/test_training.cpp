#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "adasent/error.hpp"
#include "adasent/gradcheck.hpp"
#include "adasent/training.hpp"
#include "oracles.hpp"

using namespace adasent;

namespace {

ModelParams small_model(ModelKind kind, std::uint64_t seed = 1, std::size_t dim = 4) {
  std::mt19937_64 rng(seed);
  ModelConfig config;
  config.kind = kind;
  config.pyramid_dim = dim;
  config.hidden_dim = 5;
  config.num_classes = 2;
  return ModelParams::create(config, fixture::random_table(std::min<std::size_t>(3, dim), 20, rng), rng);
}

TrainConfig quick_config(ModelKind kind) {
  TrainConfig tc;
  tc.model.kind = kind;
  tc.model.pyramid_dim = 6;
  tc.model.hidden_dim = 8;
  tc.batch_size = 10;
  tc.learning_rate = 0.1;
  return tc;
}

}  // namespace

TEST(NllLoss, Examples) {
  EXPECT_NEAR(nll_loss(Vector{0.5, 0.5}, 0), 0.693147180559945, 1e-12);
  EXPECT_EQ(nll_loss(Vector{0.0, 1.0}, 1), 0.0);
  EXPECT_NEAR(nll_loss(Vector{0.9, 0.1}, 1), 2.302585092994046, 1e-12);
  EXPECT_NEAR(nll_loss(Vector{1.0, 0.0}, 1), -std::log(1e-12), 1e-9);
  EXPECT_THROW(nll_loss(Vector{0.5, 0.5}, 2), InvalidLabelError);
}

TEST(Objective, RegularizationTerm) {
  auto params = small_model(ModelKind::kAdaSent, 1, 2);
  params.composition.w_left = Matrix::identity(2);
  params.composition.w_right = Matrix::identity(2);
  const std::vector<LabeledSequence> batch{{{1, 2, 3}, 0}};
  const auto r = objective(batch, params, 1.0);
  EXPECT_DOUBLE_EQ(r.regularization, 4.0);
  EXPECT_DOUBLE_EQ(r.total, r.data + r.regularization);
  EXPECT_DOUBLE_EQ(objective(batch, params, 0.0).total, r.data);
  EXPECT_THROW(objective(std::span<const LabeledSequence>{}, params, 0.0), Error);
}

TEST(Objective, CbowHasNoRecurrentPenalty) {
  const auto params = small_model(ModelKind::kCbow);
  EXPECT_EQ(recurrent_norm_squared(params), 0.0);
  const auto rnn = small_model(ModelKind::kRnn);
  EXPECT_DOUBLE_EQ(recurrent_norm_squared(rnn), frobenius_squared(rnn.forward_rnn.recurrent));
}

TEST(Backward, SingleTokenLeavesPyramidUntouched) {
  for (auto kind : {ModelKind::kAdaSent, ModelKind::kGrConv}) {
    const auto params = small_model(kind);
    auto grads = Gradients::zeros_like(params);
    const std::vector<LabeledSequence> batch{{{7}, 1}};
    accumulate_gradients(batch, params, 0.0, grads);
    const auto& c = grads.values.composition;
    for (const auto* m : {&c.w_left, &c.w_right, &c.g_left, &c.g_right})
      for (double v : m->values()) EXPECT_EQ(v, 0.0);
    for (const auto* b : {&c.b_w, &c.b_g})
      for (double v : b->values()) EXPECT_EQ(v, 0.0);
    EXPECT_GT(frobenius_squared(grads.values.classifier.w_out), 0.0);
    EXPECT_GT(frobenius_squared(grads.values.projection.matrix), 0.0);
  }
}

TEST(Backward, RegularizationGradientIsTwoLambdaW) {
  const auto params = small_model(ModelKind::kAdaSent);
  auto grads = Gradients::zeros_like(params);
  add_regularization_gradient(params, 0.3, grads);
  const auto& w = params.composition.w_left.values();
  const auto& g = grads.values.composition.w_left.values();
  for (std::size_t i = 0; i < w.size(); ++i) EXPECT_EQ(g[i], 2 * 0.3 * w[i]);
}

TEST(Backward, ForcedLeftGatesPassGradientUnattenuated) {
  std::mt19937_64 rng(3);
  auto p = CompositionParams::random(4, rng);
  fixture::jitter(p, rng);
  const auto words = fixture::random_words(5, 4, rng);
  const auto trace = forward_pyramid(words, p, {GateCoefficients{1, 0, 0}});
  auto unit_grads = zero_unit_grads(trace);
  const Vector delta = fixture::random_vector(4, rng);
  unit_grads.back()[0] = delta;
  auto grads = CompositionParams::zeros(4);
  const auto word_grads = backward_pyramid(trace, p, unit_grads, grads);
  EXPECT_LE(oracle::max_abs_diff(word_grads[0].raw(), delta.raw()), 1e-12);
  for (std::size_t j = 1; j < 5; ++j) EXPECT_LE(oracle::max_abs_diff(word_grads[j].raw(), Vector(4).raw()), 1e-12);
}

TEST(FiniteDifference, QuadraticAndLinear) {
  EXPECT_NEAR(central_difference([](double x) { return x * x; }, 1.0, 1e-5), 2.0, 1e-9);
  for (double step : {1e-5, 0.1, 3.0})
    EXPECT_NEAR(central_difference([](double x) { return 3.0 * x - 2.0; }, 4.0, step), 3.0, 1e-9);
}

TEST(Gradcheck, AllKindsAgreeWithOracle) {
  SweepConfig sweep;
  sweep.problems_per_kind = 2;
  const auto report = run_gradcheck(sweep);
  EXPECT_TRUE(report.passed) << report.worst << " " << report.max_relative_error;
  EXPECT_LE(report.max_relative_error, 1e-4);
}

TEST(Gradcheck, CorruptedBackwardIsCaught) {
  auto problem = draw_gradcheck_problem(ModelKind::kAdaSent, {}, 99);
  GradcheckSettings settings;
  settings.corrupt = [](Gradients& g) { g.values.composition.g_left.values()[0] += 0.1; };
  const auto report = check_problem(problem, settings);
  EXPECT_FALSE(report.passed);
  bool named = false;
  for (const auto& t : report.tensors)
    if (t.name == "g_left") named = t.max_relative_error > settings.tolerance;
  EXPECT_TRUE(named);
}

TEST(Gradcheck, SingleTokenPyramidGradientsAreExactZero) {
  GradcheckDraw draw;
  draw.min_length = draw.max_length = 1;
  auto problem = draw_gradcheck_problem(ModelKind::kAdaSent, draw, 5);
  const auto report = check_problem(problem, {});
  EXPECT_TRUE(report.passed);
  for (const auto& t : report.tensors)
    if (t.name == "g_left" || t.name == "b_w") EXPECT_TRUE(t.data_gradient_zero) << t.name;
}

TEST(ClipGradients, ScalesToThreshold) {
  auto params = small_model(ModelKind::kCbow);
  auto grads = Gradients::zeros_like(params);
  grads.values.classifier.b_out = Vector{3.0, 4.0};
  EXPECT_DOUBLE_EQ(clip_gradients(grads, 1.0), 5.0);
  EXPECT_NEAR(grads.values.classifier.b_out[0], 0.6, 1e-15);
  EXPECT_NEAR(grads.values.classifier.b_out[1], 0.8, 1e-15);

  grads.values.classifier.b_out = Vector{3.0, 4.0};
  clip_gradients(grads, 10.0);
  EXPECT_EQ(grads.values.classifier.b_out, (Vector{3.0, 4.0}));
}

TEST(ClipGradients, PreservesDirection) {
  const auto params = small_model(ModelKind::kAdaSent);
  auto grads = Gradients::zeros_like(params);
  accumulate_gradients(fixture::separable_set(8, 2), params, 1e-3, grads);
  std::vector<double> before;
  for (const auto& t : tensors(std::as_const(grads.values))) before.insert(before.end(), t.values.begin(), t.values.end());
  const double n = global_norm(grads);
  EXPECT_NEAR(n, oracle::naive_norm(before), 1e-12);
  const double tau = n / 3;
  clip_gradients(grads, tau);
  std::vector<double> after;
  for (const auto& t : tensors(std::as_const(grads.values))) after.insert(after.end(), t.values.begin(), t.values.end());
  double dot = 0.0;
  for (std::size_t i = 0; i < before.size(); ++i) dot += before[i] * after[i];
  EXPECT_NEAR(global_norm(grads), tau, 1e-10);
  EXPECT_NEAR(dot / (oracle::naive_norm(before) * oracle::naive_norm(after)), 1.0, 1e-12);
}

TEST(AdaGrad, FirstStepZeroGradientAndShrinkingSteps) {
  auto params = small_model(ModelKind::kCbow);
  auto state = AdaGradState::for_params(params, 0.05);
  auto grads = Gradients::zeros_like(params);
  grads.values.classifier.b_out = Vector{0.2, -3.0};
  const Vector b0 = params.classifier.b_out;
  const Matrix w0 = params.classifier.w_out;
  adagrad_step(params, grads, state);
  const double step1 = params.classifier.b_out[0] - b0[0];
  EXPECT_NEAR(step1, -0.05 * 0.2 / (0.2 + 1e-8), 1e-15);
  EXPECT_NEAR(params.classifier.b_out[1] - b0[1], 0.05, 1e-9);
  EXPECT_EQ(params.classifier.w_out, w0);

  const Vector b1 = params.classifier.b_out;
  adagrad_step(params, grads, state);
  EXPECT_LT(std::abs(params.classifier.b_out[0] - b1[0]), std::abs(step1));
}

TEST(AdaGrad, AccumulatorsNeverDecrease) {
  auto params = small_model(ModelKind::kAdaSent);
  auto state = AdaGradState::for_params(params, 0.05);
  const auto data = fixture::separable_set(10, 3);
  auto previous = state.accumulators;
  for (int step = 0; step < 5; ++step) {
    auto grads = Gradients::zeros_like(params);
    accumulate_gradients(data, params, 1e-3, grads);
    adagrad_step(params, grads, state);
    for (std::size_t t = 0; t < previous.size(); ++t)
      for (std::size_t i = 0; i < previous[t].size(); ++i) EXPECT_GE(state.accumulators[t][i], previous[t][i]);
    previous = state.accumulators;
  }
}

TEST(Train, OverfitsSeparableSet) {
  const auto data = fixture::separable_set(50, 7);
  std::mt19937_64 rng(1);
  auto tc = quick_config(ModelKind::kAdaSent);
  tc.epochs = 200;
  const auto table = fixture::random_table(6, 21, rng);
  std::size_t reached = 0;
  const auto result = train(data, {}, table, tc, [&](const EpochMetrics& m) {
    if (reached == 0 && m.train_accuracy >= 0.98) reached = m.epoch;
  });
  EXPECT_GT(reached, 0u);
  EXPECT_GE(accuracy(result.best, data), 0.98);
}

TEST(Train, ObjectiveDecreasesOverFirstEpochs) {
  const auto data = fixture::separable_set(50, 8);
  std::mt19937_64 rng(2);
  TrainConfig tc;
  tc.model.pyramid_dim = 6;
  tc.model.hidden_dim = 10;
  tc.epochs = 5;
  const auto result = train(data, {}, fixture::random_table(6, 21, rng), tc);
  ASSERT_EQ(result.history.size(), 5u);
  EXPECT_LT(result.history[0].train.total, result.initial.total);
  for (std::size_t e = 1; e < 5; ++e) EXPECT_LT(result.history[e].train.total, result.history[e - 1].train.total);
}

TEST(Train, HugeLambdaShrinksRecurrentNorms) {
  const auto data = fixture::separable_set(30, 9);
  std::mt19937_64 rng(3);
  auto tc = quick_config(ModelKind::kAdaSent);
  tc.lambda = 1e3;
  tc.epochs = 5;
  const auto result = train(data, {}, fixture::random_table(6, 21, rng), tc);
  double previous = result.initial.regularization / tc.lambda;
  for (const auto& m : result.history) {
    EXPECT_LT(m.recurrent_norm, previous);
    previous = m.recurrent_norm;
  }
}

TEST(Train, DeterministicForFixedSeed) {
  const auto data = fixture::separable_set(20, 10);
  std::mt19937_64 rng(4);
  const auto table = fixture::random_table(6, 21, rng);
  auto tc = quick_config(ModelKind::kBrnn);
  tc.epochs = 3;
  const auto a = train(data, data, table, tc);
  const auto b = train(data, data, table, tc);
  ASSERT_EQ(a.history.size(), b.history.size());
  for (std::size_t e = 0; e < a.history.size(); ++e) {
    EXPECT_EQ(a.history[e].train.total, b.history[e].train.total);
    EXPECT_EQ(a.history[e].max_grad_norm, b.history[e].max_grad_norm);
  }
  EXPECT_EQ(a.best.classifier.w_out, b.best.classifier.w_out);
}

TEST(Train, FrozenEmbeddingsAreNeverModified) {
  const auto data = fixture::separable_set(20, 11);
  std::mt19937_64 rng(5);
  auto table = fixture::random_table(6, 21, rng);
  auto tc = quick_config(ModelKind::kAdaSent);
  tc.epochs = 2;
  tc.model.fine_tune_embeddings = false;
  table.trainable = false;
  const auto frozen = train(data, {}, table, tc);
  EXPECT_EQ(frozen.best.embeddings.vectors, table.vectors);

  tc.model.fine_tune_embeddings = true;
  table.trainable = true;
  const auto tuned = train(data, {}, table, tc);
  EXPECT_NE(tuned.best.embeddings.vectors, table.vectors);
  EXPECT_NE(tuned.best.projection.matrix, frozen.best.projection.matrix);
}

TEST(Train, SelectsBestValidationEpoch) {
  const auto data = fixture::separable_set(30, 12);
  std::mt19937_64 rng(6);
  auto tc = quick_config(ModelKind::kCbow);
  tc.epochs = 6;
  const std::vector<LabeledSequence> valid(data.begin(), data.begin() + 10);
  const auto result = train(data, valid, fixture::random_table(6, 21, rng), tc);
  double best = -1;
  std::size_t epoch = 0;
  for (const auto& m : result.history)
    if (m.valid_accuracy > best) {
      best = m.valid_accuracy;
      epoch = m.epoch;
    }
  EXPECT_EQ(result.best_epoch, epoch);
  EXPECT_DOUBLE_EQ(accuracy(result.best, valid), best);
}

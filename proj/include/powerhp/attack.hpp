#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "powerhp/objective.hpp"
#include "powerhp/optimizers.hpp"
#include "powerhp/vec.hpp"

namespace powerhp {

class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual int num_classes() const = 0;
  virtual int input_dim() const = 0;
  // Full probability vector; sums to 1 within 1e-12.
  virtual std::vector<double> predict_proba(const Vector& x) const = 0;

  int predict(const Vector& x) const;
};

// Linear softmax model, weights row-major (classes x dim).
class ToySoftmaxClassifier final : public Classifier {
 public:
  ToySoftmaxClassifier(int dim, int classes, std::vector<double> weights,
                       std::vector<double> bias);

  int num_classes() const override { return classes_; }
  int input_dim() const override { return dim_; }
  std::vector<double> predict_proba(const Vector& x) const override;

 private:
  int dim_;
  int classes_;
  std::vector<double> weights_;
  std::vector<double> bias_;
};

struct LabeledPoint {
  Vector x;
  int label;
};

// Gaussian blobs around well-separated class centers, all features within
// [-1, 1]. Centers share a common background vector so images vary a lot
// coordinate-wise while class boundaries stay nearby — the geometry that
// makes small-perturbation attacks meaningful.
struct ToyDataset {
  std::vector<LabeledPoint> train;
  std::vector<LabeledPoint> test;
  std::vector<Vector> centers;
  double blob_sigma = 0.0;
};

ToyDataset make_toy_dataset(std::uint64_t seed, int dim = 16, int classes = 4,
                            int train_per_class = 150,
                            int test_per_class = 50);

double accuracy(const Classifier& clf, const std::vector<LabeledPoint>& data);

// Multinomial logistic regression by full-batch gradient descent.
// Throws ClassifierError if held-out accuracy ends up below min_accuracy.
ToySoftmaxClassifier train_toy_classifier(const ToyDataset& data,
                                          double min_accuracy = 0.95);

// argmin of predict_proba; ties resolve to the lowest class index.
int least_likely_target(const Classifier& clf, const Vector& a);

struct AttackProblem {
  const Classifier* classifier = nullptr;
  Vector base_point;  // entries within [-1, 1]
  int target = 0;
  double kappa = 0.001;
  double lambda = 0.01;

  void validate() const;
};

// The pieces of the attack loss at a candidate x. The perturbation
// actually applied to the image is clip(a + tanh(x)) - a; its norm feeds
// both the penalty term and the reported perturbation size.
struct AttackLossParts {
  double margin = 0.0;       // max_{i != target} p_i - p_target
  double pert_norm = 0.0;    // L2 norm of the applied perturbation
  double loss = 0.0;         // max(margin, kappa) + lambda * pert_norm
  int clip_activations = 0;  // entries of a + tanh(x) outside [-1, 1]
};

AttackLossParts attack_loss_parts(const AttackProblem& problem,
                                  const Vector& x);
double attack_loss(const AttackProblem& problem, const Vector& x);

// Strictly below kappa; a margin landing exactly on kappa does not count.
bool is_successful(const AttackProblem& problem, const Vector& x);

// Last-evaluation diagnostics shared between the attack objective and the
// per-iteration observer, so success can be tracked without re-querying.
struct AttackSideChannel {
  double last_margin = std::numeric_limits<double>::infinity();
  double last_pert_norm = 0.0;
  std::int64_t clip_activations = 0;  // cumulative over all evals
};

// f(x) = -attack_loss(x), one classifier call (= one query) per eval.
Objective make_attack_objective(const AttackProblem& problem,
                                std::shared_ptr<AttackSideChannel> side);

struct AttackInstanceResult {
  int instance_id = 0;
  bool success = false;
  double best_norm = 0.0;  // smallest successful perturbation norm
  int t_star = 0;          // iteration that produced it
  std::int64_t queries = 0;
  double r2 = 0.0;         // fidelity of the perturbed image vs the original
  int true_label = 0;
  int target = 0;
};

// R^2 of the perturbed image against the original:
// 1 - sum_j (p_j - a_j)^2 / sum_j (a_j - mean(a))^2.
double perturbation_r2(const Vector& base_point, const Vector& perturbed);

struct AttackSummary {
  int instances = 0;
  int successes = 0;
  double success_rate = 0.0;
  // Aggregates over successful instances only; absent when none succeeded.
  std::optional<double> mean_r2, std_r2;
  std::optional<double> mean_norm, std_norm;
  std::optional<double> mean_t_star, std_t_star;
};

AttackSummary attack_metrics(const std::vector<AttackInstanceResult>& results);

struct AttackSuiteConfig {
  std::uint64_t classifier_seed = 7;
  int instances = 20;
  double kappa = 0.001;
  double lambda = 0.01;
  // Optimizer settings; mu0 is forced to the zero vector and the seed is
  // derived per instance from master_seed.
  PowerHPConfig optimizer;
  std::uint64_t master_seed = 1;
};

struct AttackSuiteOutcome {
  std::vector<AttackInstanceResult> results;
  AttackSummary summary;
  double classifier_accuracy = 0.0;
};

// Trains the toy classifier, picks the first `instances` correctly
// classified held-out points as attack targets, and runs the optimizer
// against each. Fully deterministic in (classifier_seed, master_seed).
AttackSuiteOutcome run_attack_suite(const AttackSuiteConfig& config);

}  // namespace powerhp

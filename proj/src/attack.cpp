#include "powerhp/attack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "powerhp/errors.hpp"
#include "powerhp/rng.hpp"

namespace powerhp {

namespace {

void softmax_inplace(std::vector<double>& logits) {
  const double top = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double& v : logits) {
    v = std::exp(v - top);
    total += v;
  }
  for (double& v : logits) v /= total;
}

double clip01(double v) { return std::clamp(v, -1.0, 1.0); }

double sample_mean(const std::vector<double>& xs) {
  double acc = 0.0;
  for (double x : xs) acc += x;
  return acc / static_cast<double>(xs.size());
}

double sample_std(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = sample_mean(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

}  // namespace

int Classifier::predict(const Vector& x) const {
  const std::vector<double> p = predict_proba(x);
  return static_cast<int>(
      std::max_element(p.begin(), p.end()) - p.begin());
}

ToySoftmaxClassifier::ToySoftmaxClassifier(int dim, int classes,
                                           std::vector<double> weights,
                                           std::vector<double> bias)
    : dim_(dim),
      classes_(classes),
      weights_(std::move(weights)),
      bias_(std::move(bias)) {
  if (dim_ < 1 || classes_ < 2)
    throw ClassifierError("ToySoftmaxClassifier: need dim >= 1, classes >= 2");
  if (weights_.size() != static_cast<std::size_t>(dim_ * classes_) ||
      bias_.size() != static_cast<std::size_t>(classes_))
    throw ClassifierError("ToySoftmaxClassifier: weight shape mismatch");
}

std::vector<double> ToySoftmaxClassifier::predict_proba(
    const Vector& x) const {
  if (x.dim() != static_cast<std::size_t>(dim_))
    throw UsageError("predict_proba: input dimension mismatch");
  std::vector<double> logits(classes_);
  for (int c = 0; c < classes_; ++c) {
    double acc = bias_[c];
    const double* row = weights_.data() + static_cast<std::size_t>(c) * dim_;
    for (int i = 0; i < dim_; ++i) acc += row[i] * x[i];
    logits[c] = acc;
  }
  softmax_inplace(logits);
  return logits;
}

ToyDataset make_toy_dataset(std::uint64_t seed, int dim, int classes,
                            int train_per_class, int test_per_class) {
  if (dim < 2 || classes < 2)
    throw UsageError("make_toy_dataset: need dim >= 2, classes >= 2");
  SeededRng rng(seed);

  // Shared background in [-0.6, 0.6]^d; class centers sit a small step
  // away from it along orthonormal directions.
  std::vector<double> background(dim);
  for (double& v : background) v = -0.6 + 1.2 * rng.uniform();

  const double offset_radius = 0.3;
  std::vector<std::vector<double>> dirs(classes, std::vector<double>(dim));
  for (int c = 0; c < classes; ++c) {
    for (double& v : dirs[c]) v = rng.normal();
    for (int prev = 0; prev < c; ++prev) {
      double proj = 0.0;
      for (int i = 0; i < dim; ++i) proj += dirs[c][i] * dirs[prev][i];
      for (int i = 0; i < dim; ++i) dirs[c][i] -= proj * dirs[prev][i];
    }
    double len = 0.0;
    for (double v : dirs[c]) len += v * v;
    len = std::sqrt(len);
    if (len < 1e-9) throw ClassifierError("make_toy_dataset: degenerate dirs");
    for (double& v : dirs[c]) v /= len;
  }

  ToyDataset data;
  for (int c = 0; c < classes; ++c) {
    std::vector<double> center(dim);
    for (int i = 0; i < dim; ++i)
      center[i] = background[i] + offset_radius * dirs[c][i];
    data.centers.emplace_back(std::move(center));
  }

  // Orthonormal offsets put centers sqrt(2)*radius apart; six blob sigmas
  // of separation keeps the classes cleanly learnable.
  data.blob_sigma = offset_radius * std::numbers::sqrt2 / 6.0;

  auto draw = [&](int label) {
    std::vector<double> x(dim);
    for (int i = 0; i < dim; ++i)
      x[i] = clip01(data.centers[label][i] + data.blob_sigma * rng.normal());
    return LabeledPoint{Vector(std::move(x)), label};
  };
  for (int c = 0; c < classes; ++c)
    for (int k = 0; k < train_per_class; ++k) data.train.push_back(draw(c));
  for (int c = 0; c < classes; ++c)
    for (int k = 0; k < test_per_class; ++k) data.test.push_back(draw(c));
  return data;
}

double accuracy(const Classifier& clf, const std::vector<LabeledPoint>& data) {
  if (data.empty()) throw UsageError("accuracy: empty dataset");
  int hits = 0;
  for (const LabeledPoint& p : data)
    if (clf.predict(p.x) == p.label) ++hits;
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

ToySoftmaxClassifier train_toy_classifier(const ToyDataset& data,
                                          double min_accuracy) {
  if (data.train.empty() || data.test.empty())
    throw ClassifierError("train_toy_classifier: empty split");
  const int dim = static_cast<int>(data.train.front().x.dim());
  const int classes = static_cast<int>(data.centers.size());
  const std::size_t n = data.train.size();

  std::vector<double> w(static_cast<std::size_t>(dim) * classes, 0.0);
  std::vector<double> b(classes, 0.0);
  std::vector<double> grad_w(w.size());
  std::vector<double> grad_b(b.size());

  const double lr = 1.0;
  const double l2 = 1e-3;
  const int epochs = 300;

  std::vector<double> logits(classes);
  for (int epoch = 0; epoch < epochs; ++epoch) {
    std::fill(grad_w.begin(), grad_w.end(), 0.0);
    std::fill(grad_b.begin(), grad_b.end(), 0.0);
    for (const LabeledPoint& p : data.train) {
      for (int c = 0; c < classes; ++c) {
        double acc = b[c];
        const double* row = w.data() + static_cast<std::size_t>(c) * dim;
        for (int i = 0; i < dim; ++i) acc += row[i] * p.x[i];
        logits[c] = acc;
      }
      softmax_inplace(logits);
      for (int c = 0; c < classes; ++c) {
        const double err = logits[c] - (c == p.label ? 1.0 : 0.0);
        grad_b[c] += err;
        double* grow = grad_w.data() + static_cast<std::size_t>(c) * dim;
        for (int i = 0; i < dim; ++i) grow[i] += err * p.x[i];
      }
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < w.size(); ++i)
      w[i] -= lr * (grad_w[i] * inv_n + l2 * w[i]);
    for (int c = 0; c < classes; ++c) b[c] -= lr * grad_b[c] * inv_n;
  }

  ToySoftmaxClassifier clf(dim, classes, std::move(w), std::move(b));
  const double acc = accuracy(clf, data.test);
  if (acc < min_accuracy)
    throw ClassifierError("train_toy_classifier: held-out accuracy " +
                          std::to_string(acc) + " below " +
                          std::to_string(min_accuracy));
  return clf;
}

int least_likely_target(const Classifier& clf, const Vector& a) {
  const std::vector<double> p = clf.predict_proba(a);
  int best = 0;
  for (int c = 1; c < static_cast<int>(p.size()); ++c)
    if (p[c] < p[best]) best = c;  // strict: ties keep the lowest index
  return best;
}

void AttackProblem::validate() const {
  if (!classifier) throw UsageError("AttackProblem: classifier is required");
  if (base_point.dim() != static_cast<std::size_t>(classifier->input_dim()))
    throw UsageError("AttackProblem: base_point dimension mismatch");
  for (double v : base_point)
    if (v < -1.0 || v > 1.0)
      throw UsageError("AttackProblem: base_point entries must be in [-1,1]");
  if (target < 0 || target >= classifier->num_classes())
    throw UsageError("AttackProblem: target class out of range");
  if (lambda < 0.0) throw UsageError("AttackProblem: lambda must be >= 0");
}

namespace {

AttackLossParts loss_parts_impl(const AttackProblem& problem, const Vector& x,
                                AttackSideChannel* side) {
  const std::size_t d = problem.base_point.dim();
  if (x.dim() != d)
    throw UsageError("attack_loss: x dimension mismatch");

  std::vector<double> perturbed(d);
  AttackLossParts parts;
  double sq = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double raw = problem.base_point[i] + std::tanh(x[i]);
    const double clipped = clip01(raw);
    if (clipped != raw) ++parts.clip_activations;
    perturbed[i] = clipped;
    const double applied = clipped - problem.base_point[i];
    sq += applied * applied;
  }
  parts.pert_norm = std::sqrt(sq);

  const std::vector<double> p =
      problem.classifier->predict_proba(Vector(std::move(perturbed)));
  double other = -std::numeric_limits<double>::infinity();
  for (int c = 0; c < static_cast<int>(p.size()); ++c)
    if (c != problem.target) other = std::max(other, p[c]);
  parts.margin = other - p[problem.target];
  parts.loss =
      std::max(parts.margin, problem.kappa) + problem.lambda * parts.pert_norm;

  if (side) {
    side->last_margin = parts.margin;
    side->last_pert_norm = parts.pert_norm;
    side->clip_activations += parts.clip_activations;
  }
  return parts;
}

}  // namespace

AttackLossParts attack_loss_parts(const AttackProblem& problem,
                                  const Vector& x) {
  problem.validate();
  return loss_parts_impl(problem, x, nullptr);
}

double attack_loss(const AttackProblem& problem, const Vector& x) {
  return attack_loss_parts(problem, x).loss;
}

bool is_successful(const AttackProblem& problem, const Vector& x) {
  return attack_loss_parts(problem, x).margin < problem.kappa;
}

Objective make_attack_objective(const AttackProblem& problem,
                                std::shared_ptr<AttackSideChannel> side) {
  problem.validate();
  AttackProblem copy = problem;
  return Objective(
      "attack", static_cast<int>(problem.base_point.dim()),
      [copy, side](const Vector& x) {
        return -loss_parts_impl(copy, x, side.get()).loss;
      });
}

double perturbation_r2(const Vector& base_point, const Vector& perturbed) {
  check_same_dim(base_point, perturbed, "perturbation_r2");
  double mean = 0.0;
  for (double v : base_point) mean += v;
  mean /= static_cast<double>(base_point.dim());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < base_point.dim(); ++i) {
    ss_res += (perturbed[i] - base_point[i]) * (perturbed[i] - base_point[i]);
    ss_tot += (base_point[i] - mean) * (base_point[i] - mean);
  }
  if (ss_tot <= 0.0)
    throw UsageError("perturbation_r2: base point has zero variance");
  return 1.0 - ss_res / ss_tot;
}

AttackSummary attack_metrics(
    const std::vector<AttackInstanceResult>& results) {
  AttackSummary summary;
  summary.instances = static_cast<int>(results.size());
  std::vector<double> r2s, norms, t_stars;
  for (const AttackInstanceResult& r : results) {
    if (!r.success) continue;
    ++summary.successes;
    r2s.push_back(r.r2);
    norms.push_back(r.best_norm);
    t_stars.push_back(static_cast<double>(r.t_star));
  }
  summary.success_rate =
      summary.instances == 0
          ? 0.0
          : static_cast<double>(summary.successes) / summary.instances;
  if (summary.successes > 0) {
    summary.mean_r2 = sample_mean(r2s);
    summary.std_r2 = sample_std(r2s);
    summary.mean_norm = sample_mean(norms);
    summary.std_norm = sample_std(norms);
    summary.mean_t_star = sample_mean(t_stars);
    summary.std_t_star = sample_std(t_stars);
  }
  return summary;
}

AttackSuiteOutcome run_attack_suite(const AttackSuiteConfig& config) {
  if (config.instances < 1)
    throw ConfigError("attack suite: instances must be >= 1");

  const ToyDataset data = make_toy_dataset(config.classifier_seed);
  const ToySoftmaxClassifier clf = train_toy_classifier(data);

  AttackSuiteOutcome outcome;
  outcome.classifier_accuracy = accuracy(clf, data.test);

  // Attack the first `instances` correctly classified held-out points.
  std::vector<const LabeledPoint*> victims;
  for (const LabeledPoint& p : data.test) {
    if (clf.predict(p.x) == p.label) victims.push_back(&p);
    if (static_cast<int>(victims.size()) == config.instances) break;
  }
  if (static_cast<int>(victims.size()) < config.instances)
    throw ClassifierError(
        "attack suite: not enough correctly classified test points");

  const SeededRng master(config.master_seed);
  for (int m = 0; m < config.instances; ++m) {
    const LabeledPoint& victim = *victims[m];

    AttackProblem problem;
    problem.classifier = &clf;
    problem.base_point = victim.x;
    problem.target = least_likely_target(clf, victim.x);
    problem.kappa = config.kappa;
    problem.lambda = config.lambda;

    auto side = std::make_shared<AttackSideChannel>();
    Objective objective = make_attack_objective(problem, side);

    PowerHPConfig opt = config.optimizer;
    opt.mu0 = Vector::zeros(victim.x.dim());
    opt.seed = master.split(static_cast<std::uint64_t>(m)).seed();

    AttackInstanceResult res;
    res.instance_id = m;
    res.true_label = victim.label;
    res.target = problem.target;
    res.best_norm = std::numeric_limits<double>::infinity();

    Vector best_x;
    auto observer = [&](int t, const Vector& mu, double, double) {
      if (side->last_margin < problem.kappa &&
          side->last_pert_norm < res.best_norm) {
        res.success = true;
        res.best_norm = side->last_pert_norm;
        res.t_star = t;
        best_x = mu;
      }
    };

    const TrialRecord rec = run_gs_powerhp(objective, opt, observer);
    res.queries = rec.queries;
    if (res.success) {
      std::vector<double> perturbed(victim.x.dim());
      for (std::size_t i = 0; i < victim.x.dim(); ++i)
        perturbed[i] = clip01(victim.x[i] + std::tanh(best_x[i]));
      res.r2 = perturbation_r2(victim.x, Vector(std::move(perturbed)));
    } else {
      res.best_norm = 0.0;
    }
    outcome.results.push_back(std::move(res));
  }

  outcome.summary = attack_metrics(outcome.results);
  return outcome;
}

}  // namespace powerhp

#pragma once

#include <Eigen/Core>
#include <functional>
#include <iosfwd>
#include <vector>

#include "vsrlab/error.hpp"
#include "vsrlab/rng.hpp"

namespace vsr {

// One evaluated candidate: a parameter vector and its observed quality.
struct Sample {
  Eigen::VectorXd x;
  double y = 0.0;
};

// Evaluation-ordered list of samples. best() is the sample with the largest
// observed value; ties resolve to the earliest index, so best() never moves
// backwards as the archive grows.
class SampleArchive {
 public:
  void add(Sample s);
  int size() const { return static_cast<int>(samples_.size()); }
  bool empty() const { return samples_.empty(); }
  const Sample& operator[](int i) const { return samples_[i]; }
  const std::vector<Sample>& samples() const { return samples_; }

  const Sample& best() const;
  int best_index() const;

 private:
  std::vector<Sample> samples_;
  int best_index_ = -1;
};

struct BOConfig {
  int n0 = 8;             // initial samples
  int n_final = 50;       // total evaluation budget
  double ucb_beta = 3.0;  // exploration weight
  double lower = -2.0;    // search bounds, applied per dimension
  double upper = 2.0;
  double length_scale = 10.0;   // Matern 5/2
  double signal_variance = 1.0;  // on standardized targets
  double jitter = 1e-6;          // escalated x10 up to 1e-2 on failure
  int restarts = 8;              // acquisition multi-starts
  int max_opt_iterations = 100;  // quasi-Newton iteration cap per start

  void validate() const;  // throws Error on inconsistent values
};

// Gaussian-process surrogate with a Matern 5/2 kernel and fixed length
// scale. Targets are standardized internally; posterior() de-standardizes.
class GPModel {
 public:
  struct Posterior {
    double mu;
    double sigma;  // >= 0
  };

  Posterior posterior(const Eigen::VectorXd& x) const;  // throws ShapeMismatch
  double ucb(const Eigen::VectorXd& x, double beta) const;
  // Returns the UCB value and writes its analytic gradient.
  double ucb_with_gradient(const Eigen::VectorXd& x, double beta,
                           Eigen::VectorXd& grad) const;

  int dim() const { return static_cast<int>(train_x_.cols()); }
  int train_size() const { return static_cast<int>(train_x_.rows()); }
  const Eigen::MatrixXd& train_x() const { return train_x_; }
  // Training input with the largest observed target (earliest on ties).
  const Eigen::VectorXd& best_train_x() const { return best_train_x_; }
  double target_mean() const { return y_mean_; }
  double target_scale() const { return y_scale_; }
  double jitter_used() const { return jitter_; }

  friend GPModel fit_gp(const SampleArchive&, const BOConfig&);

 private:
  Eigen::MatrixXd train_x_;  // n x d
  Eigen::MatrixXd chol_l_;   // lower Cholesky factor of K + jitter I
  Eigen::VectorXd alpha_;    // (K + jitter I)^-1 y_std
  Eigen::VectorXd best_train_x_;
  double y_mean_ = 0.0;
  double y_scale_ = 1.0;
  double length_scale_ = 10.0;
  double signal_variance_ = 1.0;
  double jitter_ = 1e-6;
};

// Matern 5/2 kernel value for a pair of points.
double matern52(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                double length_scale, double signal_variance);

// Fits the surrogate on the archive: standardizes targets (zero-centering
// only when their variance is degenerate), factorizes the jittered kernel
// matrix, escalating jitter x10 up to 1e-2 before throwing SingularKernel.
GPModel fit_gp(const SampleArchive& samples, const BOConfig& cfg);

// Multi-start bounded quasi-Newton ascent of the UCB acquisition. Starts are
// the best observed point plus restarts-1 uniform points in bounds; the
// result is the best endpoint, clamped to bounds. With no restart budget the
// best observed point is returned.
Eigen::VectorXd maximize_acquisition(const GPModel& model, const BOConfig& cfg,
                                     Rng& rng);

using Objective = std::function<double(const Eigen::VectorXd&)>;

// Thrown when the objective fails mid-run; carries the archive built so far.
struct LearningFailure : Error {
  LearningFailure(const std::string& what, SampleArchive partial_archive)
      : Error(what), partial(std::move(partial_archive)) {}
  SampleArchive partial;
};

// The learning loop: evaluates every initial candidate (clamped to bounds),
// then iterates fit -> maximize acquisition -> evaluate -> append until the
// archive holds n_final samples. Exactly n_final evaluations on success.
SampleArchive bo_learn(const Objective& objective,
                       const std::vector<Eigen::VectorXd>& init,
                       const BOConfig& cfg, Rng& rng);

// Pure random-search baseline: n_final uniform points in bounds, evaluated.
SampleArchive random_learn(const Objective& objective, int dim,
                           const BOConfig& cfg, Rng& rng);

// JSON-lines persistence, one sample per line {index, y, theta}; numeric
// round-trip is exact.
void save_archive_jsonl(const SampleArchive& archive, std::ostream& out);
SampleArchive load_archive_jsonl(std::istream& in);

}  // namespace vsr

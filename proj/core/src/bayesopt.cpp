#include "vsrlab/bayesopt.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <deque>
#include <istream>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

namespace vsr {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void SampleArchive::add(Sample s) {
  samples_.push_back(std::move(s));
  if (best_index_ < 0 || samples_.back().y > samples_[best_index_].y)
    best_index_ = static_cast<int>(samples_.size()) - 1;
}

const Sample& SampleArchive::best() const {
  if (best_index_ < 0) throw Error("SampleArchive::best on empty archive");
  return samples_[best_index_];
}

int SampleArchive::best_index() const {
  if (best_index_ < 0) throw Error("SampleArchive::best on empty archive");
  return best_index_;
}

void BOConfig::validate() const {
  if (n0 < 1 || n0 >= n_final)
    throw Error("BOConfig: need 1 <= n0 < n_final");
  if (ucb_beta < 0.0) throw Error("BOConfig: ucb_beta must be >= 0");
  if (!(lower < upper)) throw Error("BOConfig: need lower < upper");
  if (length_scale <= 0.0 || signal_variance <= 0.0 || jitter <= 0.0)
    throw Error("BOConfig: kernel parameters must be positive");
}

double matern52(const VectorXd& a, const VectorXd& b, double length_scale,
                double signal_variance) {
  const double s = std::sqrt(5.0) * (a - b).norm() / length_scale;
  return signal_variance * (1.0 + s + s * s / 3.0) * std::exp(-s);
}

namespace {

// d k(r) / d r divided by r; finite at r = 0.
inline double matern52_slope_over_r(double r, double length_scale,
                                    double signal_variance) {
  const double a = std::sqrt(5.0) / length_scale;
  return -signal_variance * (a * a / 3.0) * (1.0 + a * r) * std::exp(-a * r);
}

inline VectorXd clamp_to_bounds(VectorXd x, const BOConfig& cfg) {
  for (Eigen::Index i = 0; i < x.size(); ++i)
    x[i] = std::clamp(x[i], cfg.lower, cfg.upper);
  return x;
}

}  // namespace

GPModel fit_gp(const SampleArchive& samples, const BOConfig& cfg) {
  if (samples.empty()) throw Error("fit_gp: need at least one sample");
  const int n = samples.size();
  const int d = static_cast<int>(samples[0].x.size());

  GPModel m;
  m.length_scale_ = cfg.length_scale;
  m.signal_variance_ = cfg.signal_variance;
  m.best_train_x_ = samples.best().x;
  m.train_x_.resize(n, d);
  VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    if (samples[i].x.size() != d) throw ShapeMismatch("fit_gp: ragged inputs");
    m.train_x_.row(i) = samples[i].x.transpose();
    y[i] = samples[i].y;
  }

  // Standardize targets; degenerate variance leaves them zero-centered.
  m.y_mean_ = y.mean();
  const double var = (y.array() - m.y_mean_).square().sum() / n;
  m.y_scale_ = std::sqrt(var);
  if (!(m.y_scale_ > 1e-12)) m.y_scale_ = 1.0;
  const VectorXd y_std = (y.array() - m.y_mean_) / m.y_scale_;

  MatrixXd gram(n, n);
  for (int i = 0; i < n; ++i) {
    gram(i, i) = cfg.signal_variance;
    for (int j = i + 1; j < n; ++j) {
      const double k = matern52(samples[i].x, samples[j].x, cfg.length_scale,
                                cfg.signal_variance);
      gram(i, j) = k;
      gram(j, i) = k;
    }
  }

  for (double jitter = cfg.jitter; jitter <= 1e-2 + 1e-15; jitter *= 10.0) {
    MatrixXd k_j = gram + jitter * MatrixXd::Identity(n, n);
    Eigen::LLT<MatrixXd> llt(k_j);
    if (llt.info() == Eigen::Success) {
      m.chol_l_ = llt.matrixL();
      m.alpha_ = llt.solve(y_std);
      m.jitter_ = jitter;
      return m;
    }
  }
  throw SingularKernel("fit_gp: Cholesky failed after jitter escalation");
}

GPModel::Posterior GPModel::posterior(const VectorXd& x) const {
  if (x.size() != dim())
    throw ShapeMismatch("posterior: query dimension mismatch");
  const int n = train_size();
  VectorXd k_star(n);
  for (int i = 0; i < n; ++i)
    k_star[i] = matern52(x, train_x_.row(i).transpose(), length_scale_,
                         signal_variance_);
  const double mu_std = k_star.dot(alpha_);
  const VectorXd v =
      chol_l_.triangularView<Eigen::Lower>().solve(k_star);
  const double var_std = std::max(0.0, signal_variance_ - v.squaredNorm());
  return {y_mean_ + y_scale_ * mu_std, y_scale_ * std::sqrt(var_std)};
}

double GPModel::ucb(const VectorXd& x, double beta) const {
  const Posterior p = posterior(x);
  return p.mu + beta * p.sigma;
}

double GPModel::ucb_with_gradient(const VectorXd& x, double beta,
                                  VectorXd& grad) const {
  if (x.size() != dim())
    throw ShapeMismatch("ucb_with_gradient: query dimension mismatch");
  const int n = train_size();

  MatrixXd diff = (-train_x_).rowwise() + x.transpose();  // rows: x - x_i
  VectorXd r = diff.rowwise().norm();
  VectorXd k_star(n), slope(n);
  for (int i = 0; i < n; ++i) {
    const double s = std::sqrt(5.0) * r[i] / length_scale_;
    k_star[i] = signal_variance_ * (1.0 + s + s * s / 3.0) * std::exp(-s);
    slope[i] = matern52_slope_over_r(r[i], length_scale_, signal_variance_);
  }

  const double mu_std = k_star.dot(alpha_);
  const VectorXd v = chol_l_.triangularView<Eigen::Lower>().solve(k_star);
  const double var_std = std::max(0.0, signal_variance_ - v.squaredNorm());
  const double sigma_std = std::sqrt(var_std);

  // w = (K + jitter I)^-1 k*
  VectorXd w = chol_l_.triangularView<Eigen::Lower>().solve(k_star);
  chol_l_.transpose().triangularView<Eigen::Upper>().solveInPlace(w);

  VectorXd coef = slope.cwiseProduct(alpha_);
  if (sigma_std > 1e-12)
    coef -= (beta / sigma_std) * slope.cwiseProduct(w);
  grad = y_scale_ * (diff.transpose() * coef);
  return y_mean_ + y_scale_ * mu_std + beta * y_scale_ * sigma_std;
}

namespace {

// Memory-limited quasi-Newton ascent of the acquisition, with the iterate
// projected onto the box after every trial step.
struct BoundedAscent {
  const GPModel& model;
  const BOConfig& cfg;
  double beta;

  double eval(const VectorXd& x, VectorXd& grad) const {
    return model.ucb_with_gradient(x, beta, grad);
  }

  // Gradient components that push outside the box at an active bound do not
  // count toward convergence.
  double projected_grad_norm(const VectorXd& x, const VectorXd& grad) const {
    double norm = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      double g = grad[i];
      if (x[i] >= cfg.upper - 1e-12 && g > 0.0) g = 0.0;
      if (x[i] <= cfg.lower + 1e-12 && g < 0.0) g = 0.0;
      norm = std::max(norm, std::abs(g));
    }
    return norm;
  }

  // Returns (value, endpoint) starting from x0.
  std::pair<double, VectorXd> run(VectorXd x0, int max_iterations) const {
    VectorXd x = clamp_to_bounds(std::move(x0), cfg);
    VectorXd grad(x.size());
    double f = eval(x, grad);

    std::deque<std::pair<VectorXd, VectorXd>> history;  // (s, y) pairs
    constexpr int kMemory = 10;

    for (int iter = 0; iter < max_iterations; ++iter) {
      if (projected_grad_norm(x, grad) < 1e-9) break;

      // Two-loop recursion on the ascent direction.
      VectorXd q = grad;
      std::vector<double> alpha_hist(history.size());
      for (int i = static_cast<int>(history.size()) - 1; i >= 0; --i) {
        const auto& [s, ygrad] = history[i];
        const double rho = 1.0 / ygrad.dot(s);
        alpha_hist[i] = rho * s.dot(q);
        q -= alpha_hist[i] * ygrad;
      }
      if (!history.empty()) {
        const auto& [s, ygrad] = history.back();
        q *= s.dot(ygrad) / ygrad.squaredNorm();
      } else {
        const double gnorm = grad.norm();
        if (gnorm > 0.0) q /= gnorm;  // unit first step
      }
      VectorXd dir = q;
      if (dir.dot(grad) <= 0.0) {  // not an ascent direction: restart
        history.clear();
        dir = grad / std::max(grad.norm(), 1e-12);
      }

      // Backtracking line search along the projected path.
      double step = 1.0;
      bool moved = false;
      VectorXd x_new, grad_new;
      double f_new = f;
      for (int ls = 0; ls < 40; ++ls) {
        VectorXd trial = clamp_to_bounds(x + step * dir, cfg);
        if ((trial - x).lpNorm<Eigen::Infinity>() == 0.0) break;
        VectorXd g_trial(x.size());
        const double f_trial = eval(trial, g_trial);
        if (f_trial >= f + 1e-4 * grad.dot(trial - x)) {
          x_new = std::move(trial);
          grad_new = std::move(g_trial);
          f_new = f_trial;
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;  // line search failed; keep current iterate

      const VectorXd s = x_new - x;
      const VectorXd ygrad = grad - grad_new;  // gradient change of -f
      if (s.dot(ygrad) > 1e-12) {
        history.emplace_back(s, ygrad);
        if (static_cast<int>(history.size()) > kMemory) history.pop_front();
      }
      x = std::move(x_new);
      grad = std::move(grad_new);
      f = f_new;
    }
    return {f, x};
  }
};

}  // namespace

VectorXd maximize_acquisition(const GPModel& model, const BOConfig& cfg,
                              Rng& rng) {
  const int d = model.dim();
  const VectorXd& best_observed = model.best_train_x();
  if (cfg.restarts <= 0) return clamp_to_bounds(best_observed, cfg);

  BoundedAscent ascent{model, cfg, cfg.ucb_beta};
  double best_value = -std::numeric_limits<double>::infinity();
  VectorXd best_x = clamp_to_bounds(best_observed, cfg);

  std::uniform_real_distribution<double> unif(cfg.lower, cfg.upper);
  for (int s = 0; s < cfg.restarts; ++s) {
    VectorXd start(d);
    if (s == 0) {
      start = best_observed;
    } else {
      for (int i = 0; i < d; ++i) start[i] = unif(rng);
    }
    auto [value, endpoint] = ascent.run(std::move(start), cfg.max_opt_iterations);
    if (value > best_value) {
      best_value = value;
      best_x = std::move(endpoint);
    }
  }
  return clamp_to_bounds(best_x, cfg);
}

namespace {

void checked_evaluate(const Objective& objective, VectorXd x,
                      SampleArchive& archive) {
  double y;
  try {
    y = objective(x);
  } catch (const LearningFailure&) {
    throw;
  } catch (const std::exception& e) {
    throw LearningFailure(std::string("objective failed: ") + e.what(),
                          archive);
  }
  if (!std::isfinite(y))
    throw LearningFailure("objective returned a non-finite value", archive);
  archive.add({std::move(x), y});
}

bool exact_duplicate(const SampleArchive& archive, const VectorXd& x) {
  for (const Sample& s : archive.samples())
    if (s.x.size() == x.size() &&
        (s.x - x).lpNorm<Eigen::Infinity>() == 0.0)
      return true;
  return false;
}

}  // namespace

SampleArchive bo_learn(const Objective& objective,
                       const std::vector<VectorXd>& init, const BOConfig& cfg,
                       Rng& rng) {
  if (init.empty()) throw Error("bo_learn: need at least one initial candidate");
  if (static_cast<int>(init.size()) > std::max(cfg.n0, cfg.n_final))
    throw Error("bo_learn: more initial candidates than n0 allows");

  SampleArchive archive;
  for (const VectorXd& x : init) {
    if (archive.size() >= cfg.n_final) break;
    checked_evaluate(objective, clamp_to_bounds(x, cfg), archive);
  }

  std::uniform_real_distribution<double> nudge(-5e-7, 5e-7);
  while (archive.size() < cfg.n_final) {
    const GPModel model = fit_gp(archive, cfg);
    VectorXd x = maximize_acquisition(model, cfg, rng);
    // Exact duplicates would make the next kernel matrix singular.
    for (int guard = 0; guard < 100 && exact_duplicate(archive, x); ++guard) {
      for (Eigen::Index i = 0; i < x.size(); ++i) x[i] += nudge(rng);
      x = clamp_to_bounds(std::move(x), cfg);
    }
    checked_evaluate(objective, std::move(x), archive);
  }
  return archive;
}

SampleArchive random_learn(const Objective& objective, int dim,
                           const BOConfig& cfg, Rng& rng) {
  SampleArchive archive;
  std::uniform_real_distribution<double> unif(cfg.lower, cfg.upper);
  while (archive.size() < cfg.n_final) {
    VectorXd x(dim);
    for (int i = 0; i < dim; ++i) x[i] = unif(rng);
    checked_evaluate(objective, std::move(x), archive);
  }
  return archive;
}

void save_archive_jsonl(const SampleArchive& archive, std::ostream& out) {
  for (int i = 0; i < archive.size(); ++i) {
    nlohmann::json line;
    line["index"] = i;
    line["y"] = archive[i].y;
    line["theta"] = std::vector<double>(
        archive[i].x.data(), archive[i].x.data() + archive[i].x.size());
    out << line.dump() << '\n';
  }
}

SampleArchive load_archive_jsonl(std::istream& in) {
  SampleArchive archive;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    const auto& theta = j.at("theta");
    VectorXd x(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) x[i] = theta[i];
    archive.add({std::move(x), j.at("y").get<double>()});
  }
  return archive;
}

}  // namespace vsr

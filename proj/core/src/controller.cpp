#include "vsrlab/controller.hpp"

#include <cmath>

#include "vsrlab/error.hpp"
#include "vsrlab/morphology.hpp"

namespace vsr {

double forward(const ControllerSpec& spec, const BrainParams& theta,
               std::span<const double> inputs) {
  const int in = spec.n_inputs, h = spec.n_hidden, out = spec.n_outputs;
  if (out != 1) throw ShapeMismatch("forward expects a single output neuron");
  if (static_cast<int>(inputs.size()) != in)
    throw ShapeMismatch("forward: input length does not match n_inputs");
  if (theta.size() != spec.param_count())
    throw ShapeMismatch("forward: theta length does not match param_count");

  using RowMajor =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const double* p = theta.data();
  Eigen::Map<const RowMajor> w1(p, h, in);
  Eigen::Map<const Eigen::VectorXd> b1(p + h * in, h);
  Eigen::Map<const Eigen::RowVectorXd> w2(p + h * in + h, h);
  const double b2 = p[h * in + h + h];

  Eigen::Map<const Eigen::VectorXd> x(inputs.data(), in);
  const Eigen::VectorXd hidden = (w1 * x + b1).cwiseMax(0.0);
  const double z = w2 * hidden + b2;
  const double y = 1.0 / (1.0 + std::exp(-z));
  return kDeformMin + y * (kDeformMax - kDeformMin);
}

BrainParams random_params(const ControllerSpec& spec, Rng& rng) {
  BrainParams theta(spec.param_count());
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (Eigen::Index i = 0; i < theta.size(); ++i) theta[i] = dist(rng);
  return theta;
}

BrainParams gaussian_perturb(const BrainParams& theta, double sigma, Rng& rng) {
  if (sigma == 0.0) return theta;
  BrainParams out = theta;
  std::normal_distribution<double> dist(0.0, sigma);
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] += dist(rng);
  return out;
}

}  // namespace vsr

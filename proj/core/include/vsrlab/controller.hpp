#pragma once

#include <Eigen/Core>
#include <span>

#include "vsrlab/rng.hpp"

namespace vsr {

// Flat parameter vector of the shared per-voxel MLP. The same vector drives
// every voxel of a body; outputs differ only through the inputs.
using BrainParams = Eigen::VectorXd;

// Architecture of the per-voxel MLP: n_inputs -> ReLU(n_hidden) -> sigmoid.
// The default (30, 10, 1) has 321 parameters.
struct ControllerSpec {
  int n_inputs = 30;
  int n_hidden = 10;
  int n_outputs = 1;

  int param_count() const {
    return (n_inputs + 1) * n_hidden + (n_hidden + 1) * n_outputs;
  }
};

// Single forward pass. Parameter layout is [W1 row-major, b1, W2 row-major,
// b2]; the sigmoid output is rescaled into the voxel deformation range, so
// the result is always in (0.6, 1.6). Throws ShapeMismatch on wrong sizes.
double forward(const ControllerSpec& spec, const BrainParams& theta,
               std::span<const double> inputs);

// Entries i.i.d. uniform on [-1, 1].
BrainParams random_params(const ControllerSpec& spec, Rng& rng);

// theta + N(0, sigma^2 I). sigma = 0 returns the input unchanged.
BrainParams gaussian_perturb(const BrainParams& theta, double sigma, Rng& rng);

}  // namespace vsr

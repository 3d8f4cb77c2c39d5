#pragma once

#include <Eigen/Dense>
#include <vector>

#include "bems/autodiff.hpp"
#include "bems/rng.hpp"

namespace bems::agent {

// Dense ReLU network: affine-rectify chains with a linear head. Weights
// are [in x out]; inputs are row vectors (rows = batch).
struct Mlp {
  std::vector<int> sizes;  // [input, hidden..., output]
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::MatrixXd> biases;  // 1 x out each

  // Fan-in scaled uniform init; the final layer is additionally scaled by
  // final_layer_scale (policy heads start near zero with 1e-2).
  static Mlp make(std::vector<int> sizes, Rng& rng,
                  double final_layer_scale = 1.0);

  Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const;

  // Registers parameters on a tape in a fixed order (w0, b0, w1, b1, ...).
  std::vector<int> tape_params(autodiff::Tape& tape, bool requires_grad) const;
  // Builds the forward graph from an existing input node and the node ids
  // returned by tape_params.
  int tape_forward(autodiff::Tape& tape, int x,
                   const std::vector<int>& params) const;

  // Parameter access in tape_params order, for optimizers and checks.
  std::vector<Eigen::MatrixXd*> params();
  std::vector<const Eigen::MatrixXd*> params() const;

  int input_dim() const { return sizes.front(); }
  int output_dim() const { return sizes.back(); }
  bool all_finite() const;
};

}  // namespace bems::agent

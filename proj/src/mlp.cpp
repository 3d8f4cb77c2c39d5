#include "bems/mlp.hpp"

#include <cmath>

#include "bems/errors.hpp"

namespace bems::agent {

Mlp Mlp::make(std::vector<int> sizes, Rng& rng, double final_layer_scale) {
  if (sizes.size() < 2) throw UsageError("Mlp needs at least two layer sizes");
  for (int s : sizes) {
    if (s < 1) throw UsageError("Mlp layer sizes must be positive");
  }
  Mlp net;
  net.sizes = std::move(sizes);
  const std::size_t layers = net.sizes.size() - 1;
  net.weights.reserve(layers);
  net.biases.reserve(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    const int in = net.sizes[l];
    const int out = net.sizes[l + 1];
    const double k = 1.0 / std::sqrt(static_cast<double>(in));
    const double scale = (l + 1 == layers) ? final_layer_scale : 1.0;
    Eigen::MatrixXd w(in, out);
    for (int r = 0; r < in; ++r) {
      for (int c = 0; c < out; ++c) w(r, c) = scale * rng.uniform(-k, k);
    }
    Eigen::MatrixXd b(1, out);
    for (int c = 0; c < out; ++c) b(0, c) = scale * rng.uniform(-k, k);
    net.weights.push_back(std::move(w));
    net.biases.push_back(std::move(b));
  }
  return net;
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x) const {
  if (x.cols() != input_dim()) {
    throw UsageError("Mlp forward: input dim " + std::to_string(x.cols()) +
                     ", expected " + std::to_string(input_dim()));
  }
  Eigen::MatrixXd h = x;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    Eigen::MatrixXd z;
    z.noalias() = h * weights[l];
    z.rowwise() += biases[l].row(0);
    if (l + 1 < weights.size()) z = z.array().max(0.0).matrix();
    h = std::move(z);
  }
  return h;
}

std::vector<int> Mlp::tape_params(autodiff::Tape& tape,
                                  bool requires_grad) const {
  std::vector<int> ids;
  ids.reserve(2 * weights.size());
  for (std::size_t l = 0; l < weights.size(); ++l) {
    ids.push_back(tape.input(weights[l], requires_grad));
    ids.push_back(tape.input(biases[l], requires_grad));
  }
  return ids;
}

int Mlp::tape_forward(autodiff::Tape& tape, int x,
                      const std::vector<int>& params) const {
  if (params.size() != 2 * weights.size()) {
    throw UsageError("tape_forward: wrong parameter node count");
  }
  int h = x;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    h = tape.affine(h, params[2 * l], params[2 * l + 1]);
    if (l + 1 < weights.size()) h = tape.relu(h);
  }
  return h;
}

std::vector<Eigen::MatrixXd*> Mlp::params() {
  std::vector<Eigen::MatrixXd*> ps;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    ps.push_back(&weights[l]);
    ps.push_back(&biases[l]);
  }
  return ps;
}

std::vector<const Eigen::MatrixXd*> Mlp::params() const {
  std::vector<const Eigen::MatrixXd*> ps;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    ps.push_back(&weights[l]);
    ps.push_back(&biases[l]);
  }
  return ps;
}

bool Mlp::all_finite() const {
  for (const auto* p : params()) {
    if (!p->allFinite()) return false;
  }
  return true;
}

}  // namespace bems::agent

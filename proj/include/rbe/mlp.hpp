#pragma once

#include <cstdint>
#include <vector>

#include "rbe/mdp.hpp"

namespace rbe {

/// Fully connected ReLU trunk with two linear heads reading the last hidden
/// layer: a q head and an h head, both with n_actions outputs. All weights
/// live in one flat parameter vector (trunk layers, then q head, then h
/// head; each layer is a column-major weight block followed by its bias).
/// The h head sees the trunk through a gradient stop.
class Mlp {
 public:
  Mlp(int n_inputs, std::vector<int> hidden_sizes, int n_actions, std::uint64_t seed);

  struct Cache {
    std::vector<Mat> activations;  // a_0 = input, a_l = relu(z_l)
    Mat q;                         // n_actions x batch
    Mat h;
  };

  int n_inputs() const { return n_inputs_; }
  int n_actions() const { return n_actions_; }
  Eigen::Index n_parameters() const { return params_.size(); }
  const std::vector<int>& hidden_sizes() const { return hidden_; }

  Vec& parameters() { return params_; }
  const Vec& parameters() const { return params_; }
  // Offset of the h head within the parameter vector; everything from here
  // to the end belongs to the h head.
  Eigen::Index h_head_offset() const { return layers_.back().offset; }

  // inputs: n_inputs x batch.
  void forward(const Mat& inputs, Cache& cache) const;
  Mat q_values(const Mat& inputs) const;

  // Accumulates into grad the gradient of sum(dq . q) + sum(dh . h), where
  // the h term only reaches the h head.
  void backward(const Cache& cache, const Mat& dq, const Mat& dh, Vec& grad) const;

 private:
  struct Layer {
    Eigen::Index offset;
    int in;
    int out;
  };
  Eigen::Map<const Mat> weight(const Layer& l) const { return {params_.data() + l.offset, l.out, l.in}; }
  Eigen::Map<const Vec> bias(const Layer& l) const {
    return {params_.data() + l.offset + static_cast<Eigen::Index>(l.out) * l.in, l.out};
  }

  int n_inputs_;
  int n_actions_;
  std::vector<int> hidden_;
  std::vector<Layer> layers_;  // trunk..., q head, h head
  Vec params_;
};

/// Bias-corrected ADAM on a flat parameter vector (descent direction).
struct Adam {
  double alpha = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  Vec m;
  Vec v;
  long t = 0;

  Adam() = default;
  Adam(Eigen::Index n, double step, double b1 = 0.9, double b2 = 0.999, double e = 1e-8);
  void step(Vec& params, const Vec& grad);
};

}  // namespace rbe

#include "rbe/features.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "rbe/errors.hpp"
#include "rbe/rng.hpp"

namespace rbe {

FeatureMap::FeatureMap(Mat m) : matrix(std::move(m)) {
  if (matrix.rows() < 1 || matrix.cols() < 1) throw Error("feature matrix is empty");
  if (!matrix.allFinite()) throw Error("feature matrix has non-finite entries");
  if (matrix.cwiseAbs().rowwise().sum().maxCoeff() == 0.0) {
    throw Error("feature matrix has no non-zero row");
  }
}

FeatureMap one_hot(int n_states) {
  if (n_states < 1) throw Error("one_hot needs n >= 1");
  return FeatureMap(Mat::Identity(n_states, n_states));
}

FeatureMap dependent_features(int n_states) {
  if (n_states < 3 || n_states % 2 == 0) {
    throw Error("dependent_features supports odd n >= 3, got " + std::to_string(n_states));
  }
  const int m = (n_states + 1) / 2;
  Mat x = Mat::Zero(n_states, m);
  for (int i = 0; i < n_states; ++i) {
    const int first = i < m ? 0 : i - m + 1;
    const int last = i < m ? i : m - 1;
    const double value = 1.0 / std::sqrt(static_cast<double>(last - first + 1));
    for (int j = first; j <= last; ++j) x(i, j) = value;
  }
  return FeatureMap(std::move(x));
}

FeatureMap hard_alias_1_features() {
  const FeatureMap dependent = dependent_features(5);
  Mat x = Mat::Zero(8, 4);
  for (int s : {0, 2, 7}) x(s, 0) = 1.0;
  const int others[] = {1, 3, 4, 5, 6};
  for (int k = 0; k < 5; ++k) x.row(others[k]).tail(3) = dependent.row(k);
  return FeatureMap(std::move(x));
}

FeatureMap hard_alias_2_features() {
  Mat x(2, 1);
  x << 1.0, 2.0;
  return FeatureMap(std::move(x));
}

FrozenReluNet::FrozenReluNet(int n_inputs, const std::vector<int>& hidden_sizes, int n_outputs,
                             std::uint64_t seed, OutputActivation output_activation)
    : output_activation_(output_activation), seed_(seed) {
  if (n_inputs < 1 || n_outputs < 1) throw Error("frozen net needs positive input and output sizes");
  Rng rng(seed);
  int fan_in = n_inputs;
  std::vector<int> sizes = hidden_sizes;
  sizes.push_back(n_outputs);
  for (int width : sizes) {
    if (width < 1) throw Error("frozen net layer sizes must be >= 1");
    DenseWeights layer{Mat(width, fan_in), Vec::Zero(width)};
    const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (int r = 0; r < width; ++r) {
      for (int c = 0; c < fan_in; ++c) layer.weight(r, c) = scale * rng.normal();
    }
    layers_.push_back(std::move(layer));
    fan_in = width;
  }
}

FrozenReluNet::FrozenReluNet(std::vector<DenseWeights> layers, OutputActivation output_activation)
    : layers_(std::move(layers)), output_activation_(output_activation) {
  if (layers_.empty()) throw Error("frozen net needs at least one layer");
  for (std::size_t i = 1; i < layers_.size(); ++i) {
    if (layers_[i].weight.cols() != layers_[i - 1].weight.rows()) {
      throw Error("frozen net layer shapes do not chain");
    }
  }
}

Vec FrozenReluNet::forward(const Vec& input) const {
  if (input.size() != n_inputs()) throw Error("frozen net input has the wrong size");
  Vec a = input;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    a = layers_[i].weight * a + layers_[i].bias;
    const bool last = i + 1 == layers_.size();
    if (!last || output_activation_ == OutputActivation::relu) a = a.cwiseMax(0.0);
  }
  return a;
}

FeatureMap FrozenReluNet::features_over_one_hot() const {
  const int n = n_inputs();
  Mat x(n, n_outputs());
  for (int s = 0; s < n; ++s) x.row(s) = forward(Vec::Unit(n, s)).transpose();
  FeatureMap out;
  out.matrix = std::move(x);  // may legitimately be all zero (zero weights)
  return out;
}

FrozenFeatures frozen_relu_features(int n_inputs, const std::vector<int>& hidden_sizes,
                                    int n_outputs, std::uint64_t seed,
                                    OutputActivation output_activation) {
  constexpr int kMaxResamples = 1000;
  for (int k = 0; k <= kMaxResamples; ++k) {
    FrozenReluNet net(n_inputs, hidden_sizes, n_outputs, seed + k, output_activation);
    FeatureMap features = net.features_over_one_hot();
    const bool dead_column = (features.matrix.cwiseAbs().colwise().sum().array() == 0.0).any();
    if (!dead_column) {
      return FrozenFeatures{std::move(net), FeatureMap(std::move(features.matrix)), seed, k};
    }
    log_warning("frozen net with seed " + std::to_string(seed + k) +
                " has an all-zero feature column; resampling with seed " +
                std::to_string(seed + k + 1));
  }
  throw Error("frozen_relu_features: every resampled net had a dead feature column");
}

FeatureMap augmented_h_features(const FeatureMap& base, int n_extra, std::uint64_t seed) {
  if (n_extra < 0) throw Error("n_extra must be non-negative");
  if (n_extra == 0) return base;
  const int k = base.n_features();
  Rng rng(seed);
  Mat w(k, n_extra);
  const double scale = 1.0 / std::sqrt(static_cast<double>(k));
  for (int c = 0; c < n_extra; ++c) {
    for (int r = 0; r < k; ++r) w(r, c) = scale * rng.normal();
  }
  Mat x(base.n_rows(), k + n_extra);
  x.leftCols(k) = base.matrix;
  x.rightCols(n_extra) = (base.matrix * w).cwiseMax(0.0);
  return FeatureMap(std::move(x));
}

void write_features_csv(std::ostream& out, const FeatureMap& features) {
  out << "state";
  for (int j = 0; j < features.n_features(); ++j) out << ",f" << j;
  out << '\n';
  char buf[64];
  for (int s = 0; s < features.n_rows(); ++s) {
    out << s;
    for (int j = 0; j < features.n_features(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", features.matrix(s, j));
      out << ',' << buf;
    }
    out << '\n';
  }
}

}  // namespace rbe

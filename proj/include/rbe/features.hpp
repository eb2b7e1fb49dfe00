#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "rbe/mdp.hpp"

namespace rbe {

/// Row s of `matrix` is the feature vector x(s).
struct FeatureMap {
  Mat matrix;

  FeatureMap() = default;
  explicit FeatureMap(Mat m);

  int n_rows() const { return static_cast<int>(matrix.rows()); }
  int n_features() const { return static_cast<int>(matrix.cols()); }
  auto row(int s) const { return matrix.row(s); }
};

FeatureMap one_hot(int n_states);

/// Dependent features for an odd-length random walk: with m = (n + 1) / 2
/// features, state i < m activates the first i + 1 features, state i >= m
/// activates features i - m + 1 .. m - 1, and every row is normalized to
/// unit length. n = 5 gives the familiar 3-feature layout.
FeatureMap dependent_features(int n_states);

/// 8 states, 4 features. States 0, 2 and 7 share the one-hot column 0; the
/// remaining states 1, 3, 4, 5, 6 (in that order) take the rows of
/// dependent_features(5) in columns 1..3.
FeatureMap hard_alias_1_features();

/// Single feature taking value 1 in the first state and 2 in the second.
FeatureMap hard_alias_2_features();

enum class OutputActivation { identity, relu };

struct DenseWeights {
  Mat weight;  // out x in
  Vec bias;
};

/// A randomly initialized network that is never trained. Hidden layers use
/// ReLU; the output layer uses `output_activation`. Weights are Gaussian with
/// standard deviation 1/sqrt(fan_in), biases are zero.
class FrozenReluNet {
 public:
  FrozenReluNet(int n_inputs, const std::vector<int>& hidden_sizes, int n_outputs,
                std::uint64_t seed, OutputActivation output_activation = OutputActivation::identity);
  FrozenReluNet(std::vector<DenseWeights> layers, OutputActivation output_activation);

  Vec forward(const Vec& input) const;
  // Row s is forward(e_s).
  FeatureMap features_over_one_hot() const;

  int n_inputs() const { return static_cast<int>(layers_.front().weight.cols()); }
  int n_outputs() const { return static_cast<int>(layers_.back().weight.rows()); }
  std::uint64_t seed() const { return seed_; }
  const std::vector<DenseWeights>& layers() const { return layers_; }

 private:
  std::vector<DenseWeights> layers_;
  OutputActivation output_activation_;
  std::uint64_t seed_ = 0;
};

struct FrozenFeatures {
  FrozenReluNet net;
  FeatureMap features;
  std::uint64_t requested_seed;
  int resamples;  // how many times seed + k was tried because of a dead column
};

/// Builds a frozen net and its features over one-hot inputs. If any feature
/// column is identically zero the net is rebuilt with seed + 1 (and so on);
/// each resample is logged.
FrozenFeatures frozen_relu_features(int n_inputs, const std::vector<int>& hidden_sizes,
                                    int n_outputs, std::uint64_t seed,
                                    OutputActivation output_activation = OutputActivation::identity);

/// Appends n_extra columns relu(X w_k) with w_k ~ N(0, 1/n_features).
FeatureMap augmented_h_features(const FeatureMap& base, int n_extra, std::uint64_t seed);

/// CSV with header `state,f0,f1,...`.
void write_features_csv(std::ostream& out, const FeatureMap& features);

}  // namespace rbe

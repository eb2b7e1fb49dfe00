#include "rbe/mlp.hpp"

#include <cmath>

#include "rbe/errors.hpp"
#include "rbe/rng.hpp"

namespace rbe {

Mlp::Mlp(int n_inputs, std::vector<int> hidden_sizes, int n_actions, std::uint64_t seed)
    : n_inputs_(n_inputs), n_actions_(n_actions), hidden_(std::move(hidden_sizes)) {
  if (n_inputs_ < 1 || n_actions_ < 1) throw Error("mlp needs inputs and actions");
  Eigen::Index offset = 0;
  int in = n_inputs_;
  auto add = [&](int out) {
    if (out < 1) throw Error("mlp layer sizes must be positive");
    layers_.push_back({offset, in, out});
    offset += static_cast<Eigen::Index>(out) * in + out;
  };
  for (int size : hidden_) {
    add(size);
    in = size;
  }
  const int last = in;
  add(n_actions_);
  in = last;
  add(n_actions_);

  params_ = Vec::Zero(offset);
  Rng rng(seed);
  for (const Layer& l : layers_) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(l.in));
    const Eigen::Index n = static_cast<Eigen::Index>(l.out) * l.in;
    for (Eigen::Index i = 0; i < n; ++i) params_[l.offset + i] = scale * rng.normal();
  }
}

void Mlp::forward(const Mat& inputs, Cache& cache) const {
  if (inputs.rows() != n_inputs_) throw Error("mlp input has the wrong dimension");
  const std::size_t n_trunk = hidden_.size();
  cache.activations.resize(n_trunk + 1);
  cache.activations[0] = inputs;
  for (std::size_t l = 0; l < n_trunk; ++l) {
    const Layer& layer = layers_[l];
    cache.activations[l + 1] =
        ((weight(layer) * cache.activations[l]).colwise() + bias(layer)).cwiseMax(0.0);
  }
  const Mat& top = cache.activations.back();
  const Layer& q_head = layers_[n_trunk];
  const Layer& h_head = layers_[n_trunk + 1];
  cache.q = (weight(q_head) * top).colwise() + bias(q_head);
  cache.h = (weight(h_head) * top).colwise() + bias(h_head);
}

Mat Mlp::q_values(const Mat& inputs) const {
  Cache cache;
  forward(inputs, cache);
  return cache.q;
}

void Mlp::backward(const Cache& cache, const Mat& dq, const Mat& dh, Vec& grad) const {
  if (grad.size() != params_.size()) grad = Vec::Zero(params_.size());
  const std::size_t n_trunk = hidden_.size();
  const Mat& top = cache.activations.back();

  auto accumulate = [&](const Layer& l, const Mat& delta, const Mat& input) {
    Eigen::Map<Mat> gw(grad.data() + l.offset, l.out, l.in);
    Eigen::Map<Vec> gb(grad.data() + l.offset + static_cast<Eigen::Index>(l.out) * l.in, l.out);
    gw.noalias() += delta * input.transpose();
    gb += delta.rowwise().sum();
  };

  const Layer& q_head = layers_[n_trunk];
  const Layer& h_head = layers_[n_trunk + 1];
  accumulate(q_head, dq, top);
  if (dh.size() > 0) accumulate(h_head, dh, top);

  Mat delta = weight(q_head).transpose() * dq;
  for (std::size_t l = n_trunk; l-- > 0;) {
    delta = delta.cwiseProduct((cache.activations[l + 1].array() > 0.0).cast<double>().matrix());
    accumulate(layers_[l], delta, cache.activations[l]);
    if (l > 0) delta = weight(layers_[l]).transpose() * delta;
  }
}

Adam::Adam(Eigen::Index n, double step, double b1, double b2, double e)
    : alpha(step), beta1(b1), beta2(b2), eps(e), m(Vec::Zero(n)), v(Vec::Zero(n)) {}

void Adam::step(Vec& params, const Vec& grad) {
  ++t;
  m = beta1 * m + (1.0 - beta1) * grad;
  v = beta2 * v + (1.0 - beta2) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  params.array() -= alpha * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
}

}  // namespace rbe

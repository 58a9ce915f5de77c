#include "pcvx/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace pcvx {

MlpParams make_mlp(const std::vector<int>& layer_sizes) {
  if (layer_sizes.size() < 2) throw std::invalid_argument("make_mlp: need input and output layers");
  for (int s : layer_sizes)
    if (s < 1) throw std::invalid_argument("make_mlp: layer sizes must be positive");
  MlpParams params;
  params.layer_sizes = layer_sizes;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    params.weights.emplace_back(layer_sizes[l + 1] * layer_sizes[l], 0.0);
    params.biases.emplace_back(layer_sizes[l + 1], 0.0);
  }
  return params;
}

MlpGrads make_grads(const MlpParams& params) {
  MlpGrads grads;
  for (const auto& w : params.weights) grads.weights.emplace_back(w.size(), 0.0);
  for (const auto& b : params.biases) grads.biases.emplace_back(b.size(), 0.0);
  return grads;
}

RmsPropState make_rmsprop_state(const MlpParams& params) {
  RmsPropState state;
  for (const auto& w : params.weights) state.weights.emplace_back(w.size(), 0.0);
  for (const auto& b : params.biases) state.biases.emplace_back(b.size(), 0.0);
  return state;
}

void init_params(MlpParams& params, Rng& rng) {
  for (int l = 0; l < params.layer_count(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(params.layer_sizes[l]));
    for (double& w : params.weights[l]) w = rng.uniform(-bound, bound);
    for (double& b : params.biases[l]) b = 0.0;
  }
}

namespace {

// Activations per layer (index 0 is the input), post-ReLU for hidden layers.
std::vector<std::vector<double>> forward_trace(const MlpParams& params,
                                               std::span<const double> input) {
  if (static_cast<int>(input.size()) != params.input_dim())
    throw std::invalid_argument("mlp_forward: input width mismatch");
  std::vector<std::vector<double>> acts(params.layer_count() + 1);
  acts[0].assign(input.begin(), input.end());
  for (int l = 0; l < params.layer_count(); ++l) {
    const int in = params.layer_sizes[l];
    const int out = params.layer_sizes[l + 1];
    const bool is_output = l == params.layer_count() - 1;
    acts[l + 1].resize(out);
    const double* w = params.weights[l].data();
    for (int o = 0; o < out; ++o) {
      double z = params.biases[l][o];
      const double* row = w + o * in;
      const double* x = acts[l].data();
      for (int k = 0; k < in; ++k) z += row[k] * x[k];
      acts[l + 1][o] = is_output ? z : std::max(0.0, z);
    }
  }
  return acts;
}

}  // namespace

std::vector<double> mlp_forward(const MlpParams& params, std::span<const double> input) {
  return forward_trace(params, input).back();
}

MlpGrads q_gradient(const MlpParams& params, const std::vector<QSample>& batch,
                    double* loss) {
  if (batch.empty()) throw std::invalid_argument("q_gradient: empty batch");
  MlpGrads grads = make_grads(params);
  const int layers = params.layer_count();
  const double inv_batch = 1.0 / static_cast<double>(batch.size());
  double loss_sum = 0.0;

  for (const QSample& sample : batch) {
    const auto acts = forward_trace(params, sample.state);
    if (sample.action < 0 || sample.action >= params.output_dim())
      throw std::out_of_range("q_gradient: action index outside the output layer");
    const double residual = acts.back()[sample.action] - sample.target;
    loss_sum += residual * residual;

    // Output delta: only the taken action carries error.
    std::vector<double> delta(params.output_dim(), 0.0);
    delta[sample.action] = 2.0 * residual * inv_batch;

    for (int l = layers - 1; l >= 0; --l) {
      const int in = params.layer_sizes[l];
      const int out = params.layer_sizes[l + 1];
      const std::vector<double>& x = acts[l];
      for (int o = 0; o < out; ++o) {
        const double d = delta[o];
        if (d == 0.0) continue;
        grads.biases[l][o] += d;
        double* grow = grads.weights[l].data() + o * in;
        for (int k = 0; k < in; ++k) grow[k] += d * x[k];
      }
      if (l == 0) break;
      std::vector<double> prev(in, 0.0);
      for (int o = 0; o < out; ++o) {
        const double d = delta[o];
        if (d == 0.0) continue;
        const double* row = params.weights[l].data() + o * in;
        for (int k = 0; k < in; ++k) prev[k] += d * row[k];
      }
      // ReLU mask of the pre-layer activations.
      for (int k = 0; k < in; ++k)
        if (acts[l][k] <= 0.0) prev[k] = 0.0;
      delta = std::move(prev);
    }
  }
  if (loss) *loss = loss_sum * inv_batch;
  return grads;
}

void rmsprop_step(MlpParams& params, const MlpGrads& grads, RmsPropState& state,
                  double lr, double decay, double eps) {
  auto update = [&](std::vector<double>& theta, const std::vector<double>& g,
                    std::vector<double>& v) {
    if (theta.size() != g.size() || theta.size() != v.size())
      throw std::invalid_argument("rmsprop_step: shape mismatch");
    for (std::size_t k = 0; k < theta.size(); ++k) {
      v[k] = decay * v[k] + (1.0 - decay) * g[k] * g[k];
      theta[k] -= lr * g[k] / (std::sqrt(v[k]) + eps);
    }
  };
  for (int l = 0; l < params.layer_count(); ++l) {
    update(params.weights[l], grads.weights[l], state.weights[l]);
    update(params.biases[l], grads.biases[l], state.biases[l]);
  }
}

}  // namespace pcvx

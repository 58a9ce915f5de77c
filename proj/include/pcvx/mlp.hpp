// Fully-connected Q-network: ReLU hidden layers, linear output head, one
// output unit per action. Plain double loops, no BLAS; the networks here
// are a few thousand parameters.
#pragma once

#include <span>
#include <vector>

#include "pcvx/rng.hpp"

namespace pcvx {

// weights[l] is row-major [out x in] for layer l; layer_sizes includes the
// input width, so weights.size() == layer_sizes.size() - 1.
struct MlpParams {
  std::vector<int> layer_sizes;
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;

  int input_dim() const { return layer_sizes.front(); }
  int output_dim() const { return layer_sizes.back(); }
  int layer_count() const { return static_cast<int>(weights.size()); }
};

// Gradient (or any parameter-shaped accumulator) congruent to MlpParams.
struct MlpGrads {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
};

struct RmsPropState {
  std::vector<std::vector<double>> weights;  // running mean of squared grads
  std::vector<std::vector<double>> biases;
};

// One labelled Q-regression sample: push Q(state)[action] towards target.
struct QSample {
  std::span<const double> state;
  int action = 0;
  double target = 0.0;
};

MlpParams make_mlp(const std::vector<int>& layer_sizes);  // zero-initialized
MlpGrads make_grads(const MlpParams& params);
RmsPropState make_rmsprop_state(const MlpParams& params);

// Zero-mean uniform weights scaled by 1/sqrt(fan_in); zero biases.
void init_params(MlpParams& params, Rng& rng);

// Deterministic forward pass; throws on input width mismatch.
std::vector<double> mlp_forward(const MlpParams& params, std::span<const double> input);

// Gradient of (1/B) * sum_b (Q(s_b)[a_b] - y_b)^2 over all parameters.
// Only the selected action's output unit receives direct output error.
// Returns the batch loss through *loss when non-null.
MlpGrads q_gradient(const MlpParams& params, const std::vector<QSample>& batch,
                    double* loss = nullptr);

// v <- decay*v + (1-decay)*g^2 ; theta <- theta - lr*g/(sqrt(v)+eps)
void rmsprop_step(MlpParams& params, const MlpGrads& grads, RmsPropState& state,
                  double lr, double decay = 0.9, double eps = 1e-8);

}  // namespace pcvx

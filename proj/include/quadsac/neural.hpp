#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace quadsac {

enum class Activation { tanh, relu };

// Dense MLP shape: layer_sizes = input, hidden..., output.
// Hidden layers use hidden_activation, the output layer is linear.
struct MlpSpec {
  std::vector<int> layer_sizes;
  Activation hidden_activation = Activation::tanh;

  int num_layers() const { return static_cast<int>(layer_sizes.size()) - 1; }
  void validate() const;  // at least one hidden layer, all widths >= 1
};

// Parameters plus Adam moments. weights[l] is (layer_sizes[l+1] x layer_sizes[l]).
struct MlpNet {
  MlpSpec spec;
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
  std::vector<Eigen::MatrixXd> m_weights, v_weights;
  std::vector<Eigen::VectorXd> m_biases, v_biases;
  std::int64_t step_count = 0;
};

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  void validate() const;
};

// Weights uniform in +-sqrt(1/fan_in), biases zero, moments zero.
MlpNet init_weights(const MlpSpec& spec, std::uint64_t seed);

// Per-layer activations kept for the backward pass.
// acts[0] is the input, acts[l] the post-activation of layer l,
// acts.back() the linear output. Batch samples are columns.
struct ForwardCache {
  std::vector<Eigen::MatrixXd> acts;
};

// input is (layer_sizes[0] x batch); returns (layer_sizes.back() x batch).
Eigen::MatrixXd forward(const MlpNet& net, const Eigen::MatrixXd& input,
                        ForwardCache* cache = nullptr);
Eigen::VectorXd forward(const MlpNet& net, const Eigen::VectorXd& input);

struct Gradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
};

Gradients zero_gradients(const MlpNet& net);

// Reverse mode for the scalar output_grad^T * output. Returns the input
// gradient; fills *grads with parameter gradients when non-null (pass
// nullptr when only the input gradient is needed, e.g. dQ/da).
Eigen::MatrixXd backward(const MlpNet& net, const ForwardCache& cache,
                         const Eigen::MatrixXd& output_grad,
                         Gradients* grads = nullptr);

// Standard Adam with bias correction. Rejects non-finite gradients.
void adam_step(MlpNet& net, const Gradients& grads, const AdamConfig& cfg);

bool net_finite(const MlpNet& net);

}  // namespace quadsac

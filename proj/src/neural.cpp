#include "quadsac/neural.hpp"

#include <cmath>
#include <stdexcept>

#include "quadsac/rng.hpp"

namespace quadsac {

void MlpSpec::validate() const {
  if (layer_sizes.size() < 3) {
    throw std::invalid_argument("MlpSpec: need at least one hidden layer");
  }
  for (int s : layer_sizes) {
    if (s < 1) throw std::invalid_argument("MlpSpec: layer widths must be >= 1");
  }
}

void AdamConfig::validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("Adam: learning_rate must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw std::invalid_argument("Adam: beta1 out of [0,1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw std::invalid_argument("Adam: beta2 out of [0,1)");
  if (!(epsilon > 0.0)) throw std::invalid_argument("Adam: epsilon must be > 0");
}

MlpNet init_weights(const MlpSpec& spec, std::uint64_t seed) {
  spec.validate();
  MlpNet net;
  net.spec = spec;
  Rng rng(seed);
  const int L = spec.num_layers();
  net.weights.reserve(L);
  for (int l = 0; l < L; ++l) {
    const int fan_in = spec.layer_sizes[l];
    const int fan_out = spec.layer_sizes[l + 1];
    const double bound = std::sqrt(1.0 / fan_in);
    Eigen::MatrixXd w(fan_out, fan_in);
    // Row-major fill order so the stream of draws is part of the format.
    for (int r = 0; r < fan_out; ++r) {
      for (int c = 0; c < fan_in; ++c) {
        w(r, c) = rng.uniform(-bound, bound);
      }
    }
    net.weights.push_back(std::move(w));
    net.biases.emplace_back(Eigen::VectorXd::Zero(fan_out));
    net.m_weights.emplace_back(Eigen::MatrixXd::Zero(fan_out, fan_in));
    net.v_weights.emplace_back(Eigen::MatrixXd::Zero(fan_out, fan_in));
    net.m_biases.emplace_back(Eigen::VectorXd::Zero(fan_out));
    net.v_biases.emplace_back(Eigen::VectorXd::Zero(fan_out));
  }
  return net;
}

namespace {

Eigen::MatrixXd apply_activation(const Eigen::MatrixXd& z, Activation act) {
  if (act == Activation::tanh) return z.array().tanh();
  return z.array().max(0.0);
}

// Derivative expressed through the post-activation value a = f(z).
Eigen::ArrayXXd activation_grad_from_output(const Eigen::MatrixXd& a, Activation act) {
  if (act == Activation::tanh) return 1.0 - a.array().square();
  return (a.array() > 0.0).cast<double>();
}

}  // namespace

Eigen::MatrixXd forward(const MlpNet& net, const Eigen::MatrixXd& input,
                        ForwardCache* cache) {
  const int L = net.spec.num_layers();
  if (input.rows() != net.spec.layer_sizes[0]) {
    throw std::invalid_argument("forward: input row count does not match net input size");
  }
  if (cache) {
    cache->acts.clear();
    cache->acts.reserve(L + 1);
    cache->acts.push_back(input);
  }
  Eigen::MatrixXd a = input;
  for (int l = 0; l < L; ++l) {
    Eigen::MatrixXd z = (net.weights[l] * a).colwise() + net.biases[l];
    if (l + 1 < L) {
      a = apply_activation(z, net.spec.hidden_activation);
    } else {
      a = std::move(z);
    }
    if (cache) cache->acts.push_back(a);
  }
  return a;
}

Eigen::VectorXd forward(const MlpNet& net, const Eigen::VectorXd& input) {
  return forward(net, Eigen::MatrixXd(input), nullptr).col(0);
}

Gradients zero_gradients(const MlpNet& net) {
  Gradients g;
  const int L = net.spec.num_layers();
  g.weights.reserve(L);
  g.biases.reserve(L);
  for (int l = 0; l < L; ++l) {
    g.weights.emplace_back(Eigen::MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
    g.biases.emplace_back(Eigen::VectorXd::Zero(net.biases[l].size()));
  }
  return g;
}

Eigen::MatrixXd backward(const MlpNet& net, const ForwardCache& cache,
                         const Eigen::MatrixXd& output_grad, Gradients* grads) {
  const int L = net.spec.num_layers();
  if (static_cast<int>(cache.acts.size()) != L + 1) {
    throw std::invalid_argument("backward: cache does not match net depth");
  }
  if (output_grad.rows() != net.spec.layer_sizes.back() ||
      output_grad.cols() != cache.acts[0].cols()) {
    throw std::invalid_argument("backward: output_grad shape mismatch");
  }
  if (grads) {
    grads->weights.assign(L, Eigen::MatrixXd());
    grads->biases.assign(L, Eigen::VectorXd());
  }
  // delta holds dL/dz for the current layer; the output layer is linear.
  Eigen::MatrixXd delta = output_grad;
  for (int l = L - 1; l >= 0; --l) {
    if (grads) {
      grads->weights[l] = delta * cache.acts[l].transpose();
      grads->biases[l] = delta.rowwise().sum();
    }
    Eigen::MatrixXd da = net.weights[l].transpose() * delta;
    if (l > 0) {
      delta = da.array() * activation_grad_from_output(cache.acts[l], net.spec.hidden_activation);
    } else {
      delta = std::move(da);
    }
  }
  return delta;
}

void adam_step(MlpNet& net, const Gradients& grads, const AdamConfig& cfg) {
  cfg.validate();
  const int L = net.spec.num_layers();
  if (static_cast<int>(grads.weights.size()) != L ||
      static_cast<int>(grads.biases.size()) != L) {
    throw std::invalid_argument("adam_step: gradient count does not match net depth");
  }
  for (int l = 0; l < L; ++l) {
    if (!grads.weights[l].allFinite() || !grads.biases[l].allFinite()) {
      throw std::runtime_error("adam_step: non-finite gradient");
    }
  }
  net.step_count += 1;
  const double t = static_cast<double>(net.step_count);
  const double bc1 = 1.0 - std::pow(cfg.beta1, t);
  const double bc2 = 1.0 - std::pow(cfg.beta2, t);
  for (int l = 0; l < L; ++l) {
    auto update = [&](auto& param, auto& m, auto& v, const auto& g) {
      m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
      v = (cfg.beta2 * v.array() + (1.0 - cfg.beta2) * g.array().square()).matrix();
      auto m_hat = m.array() / bc1;
      auto v_hat = v.array() / bc2;
      param.array() -= cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.epsilon);
    };
    update(net.weights[l], net.m_weights[l], net.v_weights[l], grads.weights[l]);
    update(net.biases[l], net.m_biases[l], net.v_biases[l], grads.biases[l]);
  }
}

bool net_finite(const MlpNet& net) {
  const int L = net.spec.num_layers();
  for (int l = 0; l < L; ++l) {
    if (!net.weights[l].allFinite() || !net.biases[l].allFinite()) return false;
  }
  return true;
}

}  // namespace quadsac

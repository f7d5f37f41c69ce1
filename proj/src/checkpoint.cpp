#include "quadsac/checkpoint.hpp"

#include <fstream>
#include <stdexcept>

namespace quadsac {

namespace {

constexpr const char* kFormatName = "quadsac-checkpoint";
constexpr int kFormatVersion = 1;

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  // Row-major flat list; shape comes from layer_sizes.
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) arr.push_back(m(r, c));
  }
  return arr;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, Eigen::Index rows,
                                 Eigen::Index cols, const std::string& what) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows * cols) {
    throw std::runtime_error("checkpoint: bad shape for " + what);
  }
  Eigen::MatrixXd m(rows, cols);
  Eigen::Index k = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j[k++].get<double>();
  }
  return m;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j, Eigen::Index size,
                                 const std::string& what) {
  return matrix_from_json(j, size, 1, what);
}

nlohmann::json sac_config_to_json(const SacConfig& c) {
  return nlohmann::json{{"gamma", c.gamma},
                        {"batch_size", c.batch_size},
                        {"alpha", c.alpha},
                        {"tau", c.tau},
                        {"updates_per_epoch", c.updates_per_epoch},
                        {"env_steps_per_epoch", c.env_steps_per_epoch},
                        {"action_scale", c.action_scale},
                        {"log_std_min", c.log_std_min},
                        {"log_std_max", c.log_std_max}};
}

SacConfig sac_config_from_json(const nlohmann::json& j) {
  SacConfig c;
  c.gamma = j.at("gamma").get<double>();
  c.batch_size = j.at("batch_size").get<int>();
  c.alpha = j.at("alpha").get<double>();
  c.tau = j.at("tau").get<double>();
  c.updates_per_epoch = j.at("updates_per_epoch").get<int>();
  c.env_steps_per_epoch = j.at("env_steps_per_epoch").get<int>();
  c.action_scale = j.at("action_scale").get<double>();
  c.log_std_min = j.at("log_std_min").get<double>();
  c.log_std_max = j.at("log_std_max").get<double>();
  return c;
}

nlohmann::json adam_config_to_json(const AdamConfig& c) {
  return nlohmann::json{{"learning_rate", c.learning_rate},
                        {"beta1", c.beta1},
                        {"beta2", c.beta2},
                        {"epsilon", c.epsilon}};
}

AdamConfig adam_config_from_json(const nlohmann::json& j) {
  AdamConfig c;
  c.learning_rate = j.at("learning_rate").get<double>();
  c.beta1 = j.at("beta1").get<double>();
  c.beta2 = j.at("beta2").get<double>();
  c.epsilon = j.at("epsilon").get<double>();
  return c;
}

}  // namespace

nlohmann::json net_to_json(const MlpNet& net) {
  nlohmann::json j;
  j["layer_sizes"] = net.spec.layer_sizes;
  j["hidden_activation"] = net.spec.hidden_activation == Activation::tanh ? "tanh" : "relu";
  j["step_count"] = net.step_count;
  auto dump = [](const auto& mats) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& m : mats) arr.push_back(matrix_to_json(m));
    return arr;
  };
  j["weights"] = dump(net.weights);
  j["biases"] = dump(net.biases);
  j["m_weights"] = dump(net.m_weights);
  j["v_weights"] = dump(net.v_weights);
  j["m_biases"] = dump(net.m_biases);
  j["v_biases"] = dump(net.v_biases);
  return j;
}

MlpNet net_from_json(const nlohmann::json& j) {
  MlpNet net;
  net.spec.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
  const std::string act = j.at("hidden_activation").get<std::string>();
  if (act == "tanh") {
    net.spec.hidden_activation = Activation::tanh;
  } else if (act == "relu") {
    net.spec.hidden_activation = Activation::relu;
  } else {
    throw std::runtime_error("checkpoint: unknown activation '" + act + "'");
  }
  net.spec.validate();
  net.step_count = j.at("step_count").get<std::int64_t>();
  const int L = net.spec.num_layers();
  auto layer_array = [&](const char* key) -> const nlohmann::json& {
    const nlohmann::json& arr = j.at(key);
    if (!arr.is_array() || static_cast<int>(arr.size()) != L) {
      throw std::runtime_error(std::string("checkpoint: bad layer count for ") + key);
    }
    return arr;
  };
  const auto& w = layer_array("weights");
  const auto& b = layer_array("biases");
  const auto& mw = layer_array("m_weights");
  const auto& vw = layer_array("v_weights");
  const auto& mb = layer_array("m_biases");
  const auto& vb = layer_array("v_biases");
  for (int l = 0; l < L; ++l) {
    const Eigen::Index rows = net.spec.layer_sizes[l + 1];
    const Eigen::Index cols = net.spec.layer_sizes[l];
    const std::string tag = "layer " + std::to_string(l);
    net.weights.push_back(matrix_from_json(w[l], rows, cols, "weights " + tag));
    net.biases.push_back(vector_from_json(b[l], rows, "biases " + tag));
    net.m_weights.push_back(matrix_from_json(mw[l], rows, cols, "m_weights " + tag));
    net.v_weights.push_back(matrix_from_json(vw[l], rows, cols, "v_weights " + tag));
    net.m_biases.push_back(vector_from_json(mb[l], rows, "m_biases " + tag));
    net.v_biases.push_back(vector_from_json(vb[l], rows, "v_biases " + tag));
  }
  return net;
}

void save_checkpoint(const std::string& path, const SacAgent& agent,
                     const std::string& rng_state, std::int64_t env_steps) {
  nlohmann::json j;
  j["format"] = kFormatName;
  j["version"] = kFormatVersion;
  j["obs_dim"] = agent.obs_dim;
  j["act_dim"] = agent.act_dim;
  j["config"] = sac_config_to_json(agent.config);
  j["adam"] = adam_config_to_json(agent.adam);
  j["rng_state"] = rng_state;
  j["env_steps"] = env_steps;
  j["nets"] = nlohmann::json{{"policy", net_to_json(agent.policy)},
                             {"q1", net_to_json(agent.q1)},
                             {"q2", net_to_json(agent.q2)},
                             {"value", net_to_json(agent.value)},
                             {"target_value", net_to_json(agent.target_value)}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("checkpoint: cannot open for writing: " + path);
  out << j.dump(1, '\t') << '\n';
  out.flush();
  if (!out) throw std::runtime_error("checkpoint: write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("checkpoint: parse error in " + path + ": " + e.what());
  }
  if (j.value("format", "") != kFormatName) {
    throw std::runtime_error("checkpoint: unrecognized format in " + path);
  }
  if (j.at("version").get<int>() != kFormatVersion) {
    throw std::runtime_error("checkpoint: unsupported version in " + path);
  }
  Checkpoint ck;
  ck.agent.obs_dim = j.at("obs_dim").get<int>();
  ck.agent.act_dim = j.at("act_dim").get<int>();
  ck.agent.config = sac_config_from_json(j.at("config"));
  ck.agent.adam = adam_config_from_json(j.at("adam"));
  ck.rng_state = j.at("rng_state").get<std::string>();
  ck.env_steps = j.at("env_steps").get<std::int64_t>();
  const auto& nets = j.at("nets");
  ck.agent.policy = net_from_json(nets.at("policy"));
  ck.agent.q1 = net_from_json(nets.at("q1"));
  ck.agent.q2 = net_from_json(nets.at("q2"));
  ck.agent.value = net_from_json(nets.at("value"));
  ck.agent.target_value = net_from_json(nets.at("target_value"));
  const auto check = [&](const MlpNet& net, int in, int out, const char* name) {
    if (net.spec.layer_sizes.front() != in || net.spec.layer_sizes.back() != out) {
      throw std::runtime_error(std::string("checkpoint: ") + name +
                               " shape inconsistent with obs_dim/act_dim in " + path);
    }
  };
  check(ck.agent.policy, ck.agent.obs_dim, 2 * ck.agent.act_dim, "policy");
  check(ck.agent.q1, ck.agent.obs_dim + ck.agent.act_dim, 1, "q1");
  check(ck.agent.q2, ck.agent.obs_dim + ck.agent.act_dim, 1, "q2");
  check(ck.agent.value, ck.agent.obs_dim, 1, "value");
  check(ck.agent.target_value, ck.agent.obs_dim, 1, "target_value");
  return ck;
}

}  // namespace quadsac

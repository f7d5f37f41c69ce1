#include "quadsac/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "quadsac/format.hpp"

namespace quadsac {

EpisodeConfig EnvSettings::episode_config(int max_steps) const {
  EpisodeConfig ec;
  ec.control_dt = control_dt;
  ec.max_steps = max_steps;
  ec.termination_radius = termination_radius;
  ec.target_position = target_position;
  ec.target_attitude.setZero();
  return ec;
}

void ExperimentConfig::validate() const {
  quad.validate();
  env.episode_config(env.max_steps_train).validate();
  env.episode_config(env.max_steps_eval).validate();
  env.rewards.validate();
  env.init.validate();
  env.path.validate();
  sac.core.validate();
  sac.adam.validate();
  if (sac.buffer_capacity <= 0) throw ConfigError("buffer_capacity must be > 0");
  if (sac.buffer_capacity < sac.core.batch_size) {
    throw ConfigError("batch_size must not exceed buffer_capacity");
  }
  auto check_hidden = [](const std::vector<int>& h, const char* name) {
    if (h.empty()) throw ConfigError(std::string(name) + " must have at least one layer");
    for (int w : h) {
      if (w < 1) throw ConfigError(std::string(name) + " widths must be >= 1");
    }
  };
  check_hidden(sac.policy_hidden, "policy_hidden");
  check_hidden(sac.critic_hidden, "critic_hidden");
  if (train.total_env_steps < 0) throw ConfigError("total_env_steps must be >= 0");
  if (train.eval_interval <= 0) throw ConfigError("eval_interval must be > 0");
  if (train.eval_episodes < 0) throw ConfigError("eval_episodes must be >= 0");
  if (train.warmup_steps < 0) throw ConfigError("warmup_steps must be >= 0");
  if (train.checkpoint_interval <= 0) throw ConfigError("checkpoint_interval must be > 0");
  if (train.out_dir.empty()) throw ConfigError("out_dir must not be empty");
}

ExperimentConfig default_experiment_config() { return ExperimentConfig{}; }

namespace {

struct TomlValue {
  enum class Kind { string, boolean, number, array };
  Kind kind = Kind::number;
  std::string str;
  bool b = false;
  double num = 0.0;
  bool num_is_int = false;
  std::int64_t inum = 0;
  std::vector<double> arr;
  std::vector<bool> arr_is_int;
};

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

class Parser {
 public:
  Parser(const std::string& text, std::string source_name)
      : text_(text), source_(std::move(source_name)) {}

  ExperimentConfig run() {
    std::istringstream stream(text_);
    std::string raw;
    int line = 0;
    while (std::getline(stream, raw)) {
      line += 1;
      const std::string s = trim(strip_comment(raw, line));
      if (s.empty()) continue;
      if (s.front() == '[') {
        parse_section_header(s, line);
        continue;
      }
      parse_key_value(s, line);
    }
    try {
      cfg_.validate();
    } catch (const std::exception& e) {
      throw ConfigError(source_ + ": " + e.what());
    }
    return cfg_;
  }

 private:
  [[noreturn]] void fail(int line, const std::string& msg) const {
    throw ConfigError(source_ + ":" + std::to_string(line) + ": " + msg);
  }

  std::string strip_comment(const std::string& s, int line) const {
    bool in_string = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const char c = s[i];
      if (in_string) {
        if (c == '\\') {
          i += 1;  // skip the escaped character
        } else if (c == '"') {
          in_string = false;
        }
      } else if (c == '"') {
        in_string = true;
      } else if (c == '#') {
        return s.substr(0, i);
      }
    }
    if (in_string) fail(line, "unterminated string");
    return s;
  }

  void parse_section_header(const std::string& s, int line) {
    if (s.back() != ']') fail(line, "malformed section header");
    const std::string name = trim(s.substr(1, s.size() - 2));
    if (name != "quad" && name != "env" && name != "sac" && name != "train") {
      fail(line, "unknown section [" + name + "]");
    }
    section_ = name;
  }

  void parse_key_value(const std::string& s, int line) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected key = value");
    const std::string key = trim(s.substr(0, eq));
    const std::string value_text = trim(s.substr(eq + 1));
    if (key.empty()) fail(line, "empty key");
    if (value_text.empty()) fail(line, "missing value for '" + key + "'");
    if (section_.empty()) fail(line, "key '" + key + "' outside any section");
    const std::string qualified = section_ + "." + key;
    if (!seen_.insert(qualified).second) fail(line, "duplicate key '" + qualified + "'");
    apply(key, parse_value(value_text, line), line);
  }

  TomlValue parse_value(const std::string& s, int line) const {
    TomlValue v;
    if (s.front() == '"') {
      v.kind = TomlValue::Kind::string;
      std::size_t i = 1;
      for (; i < s.size(); ++i) {
        const char c = s[i];
        if (c == '\\') {
          if (i + 1 >= s.size()) fail(line, "dangling escape in string");
          const char e = s[i + 1];
          if (e == '"' || e == '\\') {
            v.str.push_back(e);
            i += 1;
          } else {
            fail(line, std::string("unsupported escape '\\") + e + "'");
          }
        } else if (c == '"') {
          break;
        } else {
          v.str.push_back(c);
        }
      }
      if (i >= s.size()) fail(line, "unterminated string");
      if (!trim(s.substr(i + 1)).empty()) fail(line, "trailing characters after string");
      return v;
    }
    if (s == "true" || s == "false") {
      v.kind = TomlValue::Kind::boolean;
      v.b = (s == "true");
      return v;
    }
    if (s.front() == '[') {
      if (s.back() != ']') fail(line, "unterminated array");
      v.kind = TomlValue::Kind::array;
      const std::string inner = trim(s.substr(1, s.size() - 2));
      if (inner.empty()) return v;
      std::size_t pos = 0;
      while (pos <= inner.size()) {
        const auto comma = inner.find(',', pos);
        const std::string elem =
            trim(comma == std::string::npos ? inner.substr(pos) : inner.substr(pos, comma - pos));
        if (elem.empty()) fail(line, "empty array element");
        const TomlValue ev = parse_value(elem, line);
        if (ev.kind != TomlValue::Kind::number) fail(line, "arrays may only hold numbers");
        v.arr.push_back(ev.num);
        v.arr_is_int.push_back(ev.num_is_int);
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
      return v;
    }
    // Number: integer unless it carries a fraction, exponent, or inf/nan.
    v.kind = TomlValue::Kind::number;
    const bool is_float = s.find_first_of(".eE") != std::string::npos ||
                          s.find("inf") != std::string::npos ||
                          s.find("nan") != std::string::npos;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (*first == '+') first += 1;  // from_chars rejects a leading plus
    if (is_float) {
      const auto res = std::from_chars(first, last, v.num);
      if (res.ec != std::errc() || res.ptr != last) fail(line, "malformed number '" + s + "'");
      v.num_is_int = false;
    } else {
      const auto res = std::from_chars(first, last, v.inum);
      if (res.ec != std::errc() || res.ptr != last) fail(line, "malformed number '" + s + "'");
      v.num = static_cast<double>(v.inum);
      v.num_is_int = true;
    }
    return v;
  }

  double as_double(const TomlValue& v, const std::string& key, int line) const {
    if (v.kind != TomlValue::Kind::number) fail(line, "'" + key + "' must be a number");
    return v.num;
  }

  std::int64_t as_int(const TomlValue& v, const std::string& key, int line) const {
    if (v.kind != TomlValue::Kind::number || !v.num_is_int) {
      fail(line, "'" + key + "' must be an integer");
    }
    return v.inum;
  }

  bool as_bool(const TomlValue& v, const std::string& key, int line) const {
    if (v.kind != TomlValue::Kind::boolean) fail(line, "'" + key + "' must be true or false");
    return v.b;
  }

  std::string as_string(const TomlValue& v, const std::string& key, int line) const {
    if (v.kind != TomlValue::Kind::string) fail(line, "'" + key + "' must be a quoted string");
    return v.str;
  }

  std::vector<double> as_double_array(const TomlValue& v, const std::string& key,
                                      int line) const {
    if (v.kind != TomlValue::Kind::array) fail(line, "'" + key + "' must be an array");
    return v.arr;
  }

  Eigen::Vector3d as_vector3(const TomlValue& v, const std::string& key, int line) const {
    const auto a = as_double_array(v, key, line);
    if (a.size() != 3) fail(line, "'" + key + "' must have exactly 3 elements");
    return {a[0], a[1], a[2]};
  }

  std::vector<int> as_int_array(const TomlValue& v, const std::string& key, int line) const {
    if (v.kind != TomlValue::Kind::array) fail(line, "'" + key + "' must be an array");
    std::vector<int> out;
    out.reserve(v.arr.size());
    for (std::size_t i = 0; i < v.arr.size(); ++i) {
      if (!v.arr_is_int[i]) fail(line, "'" + key + "' must hold integers");
      out.push_back(static_cast<int>(v.arr[i]));
    }
    return out;
  }

  void apply(const std::string& key, const TomlValue& v, int line) {
    if (section_ == "quad") {
      apply_quad(key, v, line);
    } else if (section_ == "env") {
      apply_env(key, v, line);
    } else if (section_ == "sac") {
      apply_sac(key, v, line);
    } else {
      apply_train(key, v, line);
    }
  }

  void apply_quad(const std::string& key, const TomlValue& v, int line) {
    QuadParams& q = cfg_.quad;
    if (key == "mass") {
      q.mass = as_double(v, key, line);
    } else if (key == "arm_length") {
      q.arm_length = as_double(v, key, line);
    } else if (key == "gravity") {
      q.gravity = as_double(v, key, line);
    } else if (key == "inertia_diag") {
      q.inertia_diag = as_vector3(v, key, line);
    } else if (key == "thrust_coeffs") {
      const auto a = as_double_array(v, key, line);
      if (a.size() != 3) fail(line, "'thrust_coeffs' must be [a2, a1, a0]");
      q.thrust_coeffs = {a[0], a[1], a[2]};
    } else if (key == "yaw_torque_coeff") {
      q.yaw_torque_coeff = as_double(v, key, line);
    } else if (key == "linear_drag_coeff") {
      q.linear_drag_coeff = as_double(v, key, line);
    } else if (key == "angular_drag_coeff") {
      q.angular_drag_coeff = as_double(v, key, line);
    } else if (key == "physics_substeps") {
      q.physics_substeps = static_cast<int>(as_int(v, key, line));
    } else if (key == "clamp_thrust_at_zero") {
      q.clamp_thrust_at_zero = as_bool(v, key, line);
    } else {
      fail(line, "unknown key '" + key + "' in [quad]");
    }
  }

  void apply_env(const std::string& key, const TomlValue& v, int line) {
    EnvSettings& e = cfg_.env;
    if (key == "control_dt") {
      e.control_dt = as_double(v, key, line);
    } else if (key == "max_steps_train") {
      e.max_steps_train = static_cast<int>(as_int(v, key, line));
    } else if (key == "max_steps_eval") {
      e.max_steps_eval = static_cast<int>(as_int(v, key, line));
    } else if (key == "termination_radius") {
      e.termination_radius = as_double(v, key, line);
    } else if (key == "target_position") {
      e.target_position = as_vector3(v, key, line);
    } else if (key == "alive_bonus") {
      e.rewards.alive_bonus = as_double(v, key, line);
    } else if (key == "pos_coeff") {
      e.rewards.pos_coeff = as_double(v, key, line);
    } else if (key == "roll_rate_coeff") {
      e.rewards.roll_rate_coeff = as_double(v, key, line);
    } else if (key == "pitch_rate_coeff") {
      e.rewards.pitch_rate_coeff = as_double(v, key, line);
    } else if (key == "yaw_rate_coeff") {
      e.rewards.yaw_rate_coeff = as_double(v, key, line);
    } else if (key == "xy_set") {
      e.init.xy_set = as_double_array(v, key, line);
    } else if (key == "z_set") {
      e.init.z_set = as_double_array(v, key, line);
    } else if (key == "angle_set_deg") {
      e.init.angle_set_deg = as_double_array(v, key, line);
    } else if (key == "path_kind") {
      try {
        e.path.kind = path_kind_from_string(as_string(v, key, line));
      } catch (const std::invalid_argument& ex) {
        fail(line, ex.what());
      }
    } else if (key == "path_speed") {
      e.path.speed = as_double(v, key, line);
    } else if (key == "square_side") {
      e.path.square_side = as_double(v, key, line);
    } else if (key == "sin_amplitude") {
      e.path.sin_amplitude = as_double(v, key, line);
    } else if (key == "sin_wavelength") {
      e.path.sin_wavelength = as_double(v, key, line);
    } else {
      fail(line, "unknown key '" + key + "' in [env]");
    }
  }

  void apply_sac(const std::string& key, const TomlValue& v, int line) {
    SacSettings& s = cfg_.sac;
    if (key == "gamma") {
      s.core.gamma = as_double(v, key, line);
    } else if (key == "batch_size") {
      s.core.batch_size = static_cast<int>(as_int(v, key, line));
    } else if (key == "alpha") {
      s.core.alpha = as_double(v, key, line);
    } else if (key == "tau") {
      s.core.tau = as_double(v, key, line);
    } else if (key == "updates_per_epoch") {
      s.core.updates_per_epoch = static_cast<int>(as_int(v, key, line));
    } else if (key == "env_steps_per_epoch") {
      s.core.env_steps_per_epoch = static_cast<int>(as_int(v, key, line));
    } else if (key == "action_scale") {
      s.core.action_scale = as_double(v, key, line);
    } else if (key == "log_std_min") {
      s.core.log_std_min = as_double(v, key, line);
    } else if (key == "log_std_max") {
      s.core.log_std_max = as_double(v, key, line);
    } else if (key == "buffer_capacity") {
      s.buffer_capacity = as_int(v, key, line);
    } else if (key == "learning_rate") {
      s.adam.learning_rate = as_double(v, key, line);
    } else if (key == "adam_beta1") {
      s.adam.beta1 = as_double(v, key, line);
    } else if (key == "adam_beta2") {
      s.adam.beta2 = as_double(v, key, line);
    } else if (key == "adam_epsilon") {
      s.adam.epsilon = as_double(v, key, line);
    } else if (key == "policy_hidden") {
      s.policy_hidden = as_int_array(v, key, line);
    } else if (key == "critic_hidden") {
      s.critic_hidden = as_int_array(v, key, line);
    } else {
      fail(line, "unknown key '" + key + "' in [sac]");
    }
  }

  void apply_train(const std::string& key, const TomlValue& v, int line) {
    TrainSettings& t = cfg_.train;
    if (key == "total_env_steps") {
      t.total_env_steps = as_int(v, key, line);
    } else if (key == "eval_interval") {
      t.eval_interval = as_int(v, key, line);
    } else if (key == "eval_episodes") {
      t.eval_episodes = static_cast<int>(as_int(v, key, line));
    } else if (key == "warmup_steps") {
      t.warmup_steps = as_int(v, key, line);
    } else if (key == "checkpoint_interval") {
      t.checkpoint_interval = as_int(v, key, line);
    } else if (key == "seed") {
      const std::int64_t s = as_int(v, key, line);
      if (s < 0) fail(line, "'seed' must be non-negative");
      t.seed = static_cast<std::uint64_t>(s);
    } else if (key == "out_dir") {
      t.out_dir = as_string(v, key, line);
    } else {
      fail(line, "unknown key '" + key + "' in [train]");
    }
  }

  std::string text_;
  std::string source_;
  ExperimentConfig cfg_ = default_experiment_config();
  std::string section_;
  std::set<std::string> seen_;
};

std::string toml_array(const std::vector<double>& values) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += format_double(values[i]);
  }
  out += "]";
  return out;
}

std::string toml_int_array(const std::vector<int>& values) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(values[i]);
  }
  out += "]";
  return out;
}

std::string toml_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out += "\"";
  return out;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& source_name) {
  return Parser(text, source_name).run();
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

std::string config_to_toml(const ExperimentConfig& c) {
  std::ostringstream out;
  const auto d = [](double v) { return format_double(v); };
  out << "[quad]\n";
  out << "mass = " << d(c.quad.mass) << "  # kg\n";
  out << "arm_length = " << d(c.quad.arm_length) << "  # m, center to rotor\n";
  out << "gravity = " << d(c.quad.gravity) << "  # m/s^2\n";
  out << "inertia_diag = " << toml_array({c.quad.inertia_diag.x(), c.quad.inertia_diag.y(),
                                          c.quad.inertia_diag.z()})
      << "  # kg m^2\n";
  out << "thrust_coeffs = " << toml_array({c.quad.thrust_coeffs.a2, c.quad.thrust_coeffs.a1,
                                           c.quad.thrust_coeffs.a0})
      << "  # N per pwm^2, pwm, 1\n";
  out << "yaw_torque_coeff = " << d(c.quad.yaw_torque_coeff) << "  # N m per N of thrust\n";
  out << "linear_drag_coeff = " << d(c.quad.linear_drag_coeff) << "  # N per m/s\n";
  out << "angular_drag_coeff = " << d(c.quad.angular_drag_coeff) << "  # N m per rad/s\n";
  out << "physics_substeps = " << c.quad.physics_substeps << "\n";
  out << "clamp_thrust_at_zero = " << (c.quad.clamp_thrust_at_zero ? "true" : "false") << "\n";
  out << "\n[env]\n";
  out << "control_dt = " << d(c.env.control_dt) << "  # s per agent step\n";
  out << "max_steps_train = " << c.env.max_steps_train << "\n";
  out << "max_steps_eval = " << c.env.max_steps_eval << "\n";
  out << "termination_radius = " << d(c.env.termination_radius) << "  # m\n";
  out << "target_position = " << toml_array({c.env.target_position.x(),
                                             c.env.target_position.y(),
                                             c.env.target_position.z()})
      << "  # m\n";
  out << "alive_bonus = " << d(c.env.rewards.alive_bonus) << "\n";
  out << "pos_coeff = " << d(c.env.rewards.pos_coeff) << "  # per m of position error\n";
  out << "roll_rate_coeff = " << d(c.env.rewards.roll_rate_coeff) << "  # per rad/s\n";
  out << "pitch_rate_coeff = " << d(c.env.rewards.pitch_rate_coeff) << "  # per rad/s\n";
  out << "yaw_rate_coeff = " << d(c.env.rewards.yaw_rate_coeff) << "  # per rad/s\n";
  out << "xy_set = " << toml_array(c.env.init.xy_set) << "  # m\n";
  out << "z_set = " << toml_array(c.env.init.z_set) << "  # m\n";
  out << "angle_set_deg = " << toml_array(c.env.init.angle_set_deg) << "\n";
  out << "path_kind = " << toml_string(to_string(c.env.path.kind)) << "\n";
  out << "path_speed = " << d(c.env.path.speed) << "  # m/s\n";
  out << "square_side = " << d(c.env.path.square_side) << "  # m\n";
  out << "sin_amplitude = " << d(c.env.path.sin_amplitude) << "  # m\n";
  out << "sin_wavelength = " << d(c.env.path.sin_wavelength) << "  # m\n";
  out << "\n[sac]\n";
  out << "gamma = " << d(c.sac.core.gamma) << "\n";
  out << "batch_size = " << c.sac.core.batch_size << "\n";
  out << "alpha = " << d(c.sac.core.alpha) << "  # entropy temperature\n";
  out << "tau = " << d(c.sac.core.tau) << "  # target smoothing\n";
  out << "updates_per_epoch = " << c.sac.core.updates_per_epoch << "\n";
  out << "env_steps_per_epoch = " << c.sac.core.env_steps_per_epoch << "\n";
  out << "action_scale = " << d(c.sac.core.action_scale) << "  # pwm\n";
  out << "log_std_min = " << d(c.sac.core.log_std_min) << "\n";
  out << "log_std_max = " << d(c.sac.core.log_std_max) << "\n";
  out << "buffer_capacity = " << c.sac.buffer_capacity << "\n";
  out << "learning_rate = " << d(c.sac.adam.learning_rate) << "\n";
  out << "adam_beta1 = " << d(c.sac.adam.beta1) << "\n";
  out << "adam_beta2 = " << d(c.sac.adam.beta2) << "\n";
  out << "adam_epsilon = " << d(c.sac.adam.epsilon) << "\n";
  out << "policy_hidden = " << toml_int_array(c.sac.policy_hidden) << "\n";
  out << "critic_hidden = " << toml_int_array(c.sac.critic_hidden) << "\n";
  out << "\n[train]\n";
  out << "total_env_steps = " << c.train.total_env_steps << "\n";
  out << "eval_interval = " << c.train.eval_interval << "\n";
  out << "eval_episodes = " << c.train.eval_episodes << "\n";
  out << "warmup_steps = " << c.train.warmup_steps << "  # uniform-random prefill\n";
  out << "checkpoint_interval = " << c.train.checkpoint_interval << "\n";
  out << "seed = " << c.train.seed << "\n";
  out << "out_dir = " << toml_string(c.train.out_dir) << "\n";
  return out.str();
}

}  // namespace quadsac

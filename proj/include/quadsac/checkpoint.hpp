#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "quadsac/neural.hpp"
#include "quadsac/sac.hpp"

namespace quadsac {

// JSON container with explicit shapes; doubles are emitted with
// shortest-round-trip formatting, so save/load is bit-exact.
nlohmann::json net_to_json(const MlpNet& net);
MlpNet net_from_json(const nlohmann::json& j);

struct Checkpoint {
  SacAgent agent;
  std::string rng_state;      // serialized training RNG; empty outside training
  std::int64_t env_steps = 0; // environment steps taken when saved
};

void save_checkpoint(const std::string& path, const SacAgent& agent,
                     const std::string& rng_state = "", std::int64_t env_steps = 0);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace quadsac

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sqlconf/bank.hpp"
#include "sqlconf/embedding.hpp"

namespace sqlconf::llm {

struct Prompt {
  std::string template_id;
  std::string rendered_text;
  std::map<std::string, std::string> placeholders;
};

// Throws TemplateError for an unknown template or an unresolved placeholder
// (the message names the missing placeholder).
Prompt render_prompt(const std::string& template_id,
                     const std::map<std::string, std::string>& placeholders);

const std::map<std::string, std::string>& prompt_templates();

struct CallParams {
  double temperature = 0.0;
  int attempt = 0;  // re-ask nonce; perturbs the simulator stream
};

struct Completion {
  std::string text;
  std::string backend;  // "remote" or "simulated"
  std::optional<int> prompt_tokens;
  std::optional<int> completion_tokens;
};

class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  virtual Completion complete(const Prompt& prompt,
                              const CallParams& params) = 0;
  virtual std::string name() const = 0;
};

// ---------------------------------------------------------------------------
// Remote backend: chat-completion style JSON over HTTP(S).
// ---------------------------------------------------------------------------

struct RemoteConfig {
  std::string endpoint;  // base URL, e.g. https://host:443
  std::string api_key;
  std::string model;
  int timeout_ms = 30000;
  int max_attempts = 3;
  int initial_backoff_ms = 250;
};

// Reads SQLCONF_LLM_ENDPOINT, SQLCONF_LLM_API_KEY, SQLCONF_LLM_MODEL.
RemoteConfig remote_config_from_env();

class RemoteBackend : public LlmBackend {
 public:
  explicit RemoteBackend(RemoteConfig config) : config_(std::move(config)) {}

  // One logical call; retries transport errors and 5xx with exponential
  // backoff, up to max_attempts. Throws TransportError / BackendError.
  Completion complete(const Prompt& prompt, const CallParams& params) override;
  std::string name() const override { return "remote"; }

 private:
  RemoteConfig config_;
};

// ---------------------------------------------------------------------------
// Simulated backend: pure function of (seed, prompt, params).
// ---------------------------------------------------------------------------

struct SimulatorConfig {
  std::uint64_t seed = 0;
  double corruption_steepness = 12.0;
  double corruption_midpoint = 0.85;
  double overconfidence_center = 0.93;
  double overconfidence_spread = 0.05;
  // Test hook: when set, overrides the logistic corruption probability.
  std::optional<double> forced_corruption;

  void check() const;  // throws ContractError on out-of-range fields
};

class SimulatedBackend : public LlmBackend {
 public:
  explicit SimulatedBackend(SimulatorConfig config);

  Completion complete(const Prompt& prompt, const CallParams& params) override;
  std::string name() const override { return "simulated"; }

  // Emits the ground-truth SQL with probability
  // 1 - sigmoid(steepness * (midpoint - mean retrieved similarity)), otherwise
  // a corrupted variant (perturbed literal, dropped aggregate, or swapped
  // column). Deterministic in (seed, case identity).
  Completion simulate_generation(
      const bank::EvalCase& eval_case,
      const std::vector<embed::SimilarityHit>& retrieved) const;

  const SimulatorConfig& config() const { return config_; }

 private:
  SimulatorConfig config_;
};

// Deterministic domain-lexicon judge: token-set equality after synonym
// normalization. The lexicon deliberately keeps "quantity" and "volume"
// distinct.
bool lexicon_equivalent(const std::string& a, const std::string& b);

}  // namespace sqlconf::llm

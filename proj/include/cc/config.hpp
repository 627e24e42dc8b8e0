#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "cc/adversary.hpp"
#include "cc/simnet.hpp"
#include "cc/verify.hpp"

namespace cc {

/// Malformed config text or flag set; what() includes the config line number
/// when the error came from a file.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One experiment: protocol instance, input assignment, adversary policy,
/// and the checks to run. Parsed from flat key=value text or CLI flags.
struct ScenarioConfig {
  Protocol protocol = Protocol::crash_cc;
  int n = 0;
  int f = 0;
  int refinement = 1;
  int value_count = 2;
  bool centered = true;

  std::vector<Value> inputs;   // explicit; empty means draw random per run
  std::string adversary = "fixed";  // fixed | random_crash | byz_silent |
                                    // byz_split | byz_flood | worst_case
  std::uint64_t seed = 1;
  double crash_prob = 1.0;               // random_crash
  SimTime epsilon{1, 8};                 // worst_case
  SimTime delay{1};                      // fixed
  std::vector<SimTime> delay_menu;  // random_crash / byz_*; empty = default
  std::vector<int> faulty;          // fixed (silent set) and explore mode

  std::vector<std::string> checks = {"all"};
  std::string mode = "run";  // run | explore (regress dispatches on this)
  int repeat = 1;
  long state_budget = 10'000'000;  // explore
  bool allow_underresilient = false;

  /// Failure model implied by the protocol.
  FailureModel failure_model() const;
  TaskSpec task_spec() const;

  /// Structural validation plus the protocol/resilience pairing. An
  /// under-resilient pairing throws unless allow_underresilient is set, in
  /// which case it is reported through *underresilient for labeling.
  void validate(bool* underresilient = nullptr) const;
};

/// Parses the flat key=value format (one pair per line; '#' comments;
/// repeatable keys: check, input, delay_menu). Throws ConfigError with the
/// offending line number.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);

/// Instantiates the configured adversary; `seed` overrides config.seed so
/// fuzz campaigns can reuse one config across seeds.
std::unique_ptr<Adversary> make_adversary(const ScenarioConfig& cfg,
                                          std::uint64_t seed);

struct ScenarioResult {
  ExecutionTrace trace;
  std::vector<Verdict> verdicts;
  bool underresilient = false;

  bool all_passed() const;
};

/// Runs one simulation under the configured adversary (with the given seed)
/// and evaluates the configured checks. Empty cfg.inputs draws a uniform
/// assignment from the seed.
ScenarioResult run_scenario(const ScenarioConfig& cfg, std::uint64_t seed);

}  // namespace cc

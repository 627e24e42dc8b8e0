#include "cc/config.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

namespace cc {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void bad(int line, const std::string& msg) {
  throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

int parse_int(int line, const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    int x = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (const std::exception&) {
    bad(line, key + " expects an integer, got '" + v + "'");
  }
}

bool parse_bool(int line, const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  bad(line, key + " expects true/false, got '" + v + "'");
}

SimTime parse_time(int line, const std::string& key, const std::string& v) {
  auto t = parse_simtime(v);
  if (!t) bad(line, key + " expects a rational like 3/4, got '" + v + "'");
  return *t;
}

}  // namespace

FailureModel ScenarioConfig::failure_model() const {
  switch (protocol) {
    case Protocol::crash_cc:
    case Protocol::oneround_crash:
      return FailureModel::crash;
    case Protocol::trim_cc:
    case Protocol::echo_cc:
    case Protocol::oneround_byz:
      return FailureModel::malicious;
  }
  return FailureModel::crash;
}

TaskSpec ScenarioConfig::task_spec() const {
  return TaskSpec{value_count, refinement, centered, n, f, failure_model()};
}

void ScenarioConfig::validate(bool* underresilient) const {
  if (underresilient) *underresilient = false;
  TaskSpec spec = task_spec();
  spec.validate();
  if (!inputs.empty()) {
    if (static_cast<int>(inputs.size()) != n)
      throw ConfigError("inputs: expected " + std::to_string(n) +
                        " values, got " + std::to_string(inputs.size()));
    for (Value v : inputs)
      if (v < 0 || v >= value_count)
        throw ConfigError("inputs: value " + std::to_string(v) +
                          " outside [0, " + std::to_string(value_count) + ")");
  }
  if (static_cast<int>(faulty.size()) > f)
    throw ConfigError("faulty set larger than f");
  for (int p : faulty)
    if (p < 0 || p >= n) throw ConfigError("faulty id out of range");
  if (repeat < 1) throw ConfigError("repeat must be >= 1");
  if (state_budget < 1) throw ConfigError("state_budget must be >= 1");
  for (const std::string& c : checks) {
    if (c == "all") continue;
    auto names = checker_names();
    if (std::find(names.begin(), names.end(), c) == names.end())
      throw ConfigError("unknown check '" + c + "'");
  }
  const bool crash_model = failure_model() == FailureModel::crash;
  const bool crash_adv = adversary == "fixed" || adversary == "random_crash";
  const bool byz_adv = adversary == "fixed" || adversary == "byz_silent" ||
                       adversary == "byz_split" || adversary == "byz_flood" ||
                       adversary == "worst_case";
  if (crash_model ? !crash_adv : !byz_adv)
    throw ConfigError("adversary '" + adversary +
                      "' does not match the failure model of " +
                      protocol_name(protocol));
  if (adversary == "worst_case" && protocol != Protocol::echo_cc)
    throw ConfigError("worst_case is a scripted echo_cc scenario");
  if (n < min_processes(protocol, f)) {
    std::string msg = std::string(protocol_name(protocol)) + " needs n >= " +
                      std::to_string(min_processes(protocol, f)) +
                      " for f = " + std::to_string(f) + " (got n = " +
                      std::to_string(n) + ")";
    if (!allow_underresilient) throw ConfigError(msg);
    if (underresilient) *underresilient = true;
  }
}

ScenarioConfig parse_config(const std::string& text) {
  ScenarioConfig cfg;
  cfg.checks.clear();
  std::stringstream ss(text);
  std::string raw;
  int line = 0;
  while (std::getline(ss, raw)) {
    ++line;
    std::string s = trim(raw);
    if (size_t h = s.find('#'); h != std::string::npos) s = trim(s.substr(0, h));
    if (s.empty()) continue;
    size_t eq = s.find('=');
    if (eq == std::string::npos) bad(line, "expected key=value, got '" + s + "'");
    std::string key = trim(s.substr(0, eq));
    std::string val = trim(s.substr(eq + 1));
    if (key == "protocol") {
      auto p = protocol_from_name(val);
      if (!p) bad(line, "unknown protocol '" + val + "'");
      cfg.protocol = *p;
    } else if (key == "n") {
      cfg.n = parse_int(line, key, val);
    } else if (key == "f") {
      cfg.f = parse_int(line, key, val);
    } else if (key == "R") {
      cfg.refinement = parse_int(line, key, val);
    } else if (key == "value_count") {
      cfg.value_count = parse_int(line, key, val);
    } else if (key == "centered") {
      cfg.centered = parse_bool(line, key, val);
    } else if (key == "inputs") {
      cfg.inputs.clear();
      for (const std::string& part : split(val, ','))
        cfg.inputs.push_back(parse_int(line, key, trim(part)));
    } else if (key == "input") {
      cfg.inputs.push_back(parse_int(line, key, val));
    } else if (key == "adversary") {
      cfg.adversary = val;
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(
          std::stoull(val));
    } else if (key == "crash_prob") {
      cfg.crash_prob = std::stod(val);
    } else if (key == "epsilon") {
      cfg.epsilon = parse_time(line, key, val);
    } else if (key == "delay") {
      cfg.delay = parse_time(line, key, val);
    } else if (key == "delay_menu") {
      cfg.delay_menu.push_back(parse_time(line, key, val));
    } else if (key == "faulty") {
      cfg.faulty.push_back(parse_int(line, key, val));
    } else if (key == "check") {
      cfg.checks.push_back(val);
    } else if (key == "mode") {
      if (val != "run" && val != "explore")
        bad(line, "mode must be run or explore");
      cfg.mode = val;
    } else if (key == "repeat") {
      cfg.repeat = parse_int(line, key, val);
    } else if (key == "state_budget") {
      cfg.state_budget = parse_int(line, key, val);
    } else if (key == "allow_underresilient") {
      cfg.allow_underresilient = parse_bool(line, key, val);
    } else {
      bad(line, "unknown key '" + key + "'");
    }
  }
  if (cfg.checks.empty()) cfg.checks.push_back("all");
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::unique_ptr<Adversary> make_adversary(const ScenarioConfig& cfg,
                                          std::uint64_t seed) {
  if (cfg.adversary == "fixed") return fixed_delay(cfg.delay, cfg.faulty);
  if (cfg.adversary == "random_crash") {
    if (cfg.delay_menu.empty()) return random_crash(seed, cfg.crash_prob);
    return random_crash(seed, cfg.crash_prob, cfg.delay_menu);
  }
  auto byz = [&](ByzStrategy s) {
    return cfg.delay_menu.empty() ? byz_equivocator(seed, s)
                                  : byz_equivocator(seed, s, cfg.delay_menu);
  };
  if (cfg.adversary == "byz_silent") return byz(ByzStrategy::silent);
  if (cfg.adversary == "byz_split") return byz(ByzStrategy::split);
  if (cfg.adversary == "byz_flood") return byz(ByzStrategy::flood);
  if (cfg.adversary == "worst_case") return worst_case_script(cfg.epsilon, cfg.f);
  throw ConfigError("unknown adversary '" + cfg.adversary + "'");
}

bool ScenarioResult::all_passed() const {
  return std::all_of(verdicts.begin(), verdicts.end(),
                     [](const Verdict& v) { return v.passed(); });
}

ScenarioResult run_scenario(const ScenarioConfig& cfg, std::uint64_t seed) {
  ScenarioResult result;
  cfg.validate(&result.underresilient);
  std::vector<Value> inputs = cfg.inputs;
  if (inputs.empty() && cfg.adversary == "worst_case") {
    inputs = worst_case_inputs(cfg.f);
  } else if (inputs.empty()) {
    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + 1);
    std::uniform_int_distribution<Value> dist(0, cfg.value_count - 1);
    inputs.resize(cfg.n);
    for (Value& v : inputs) v = dist(rng);
  }
  auto adversary = make_adversary(cfg, seed);
  result.trace = run(cfg.task_spec(), cfg.protocol, inputs, *adversary);
  std::vector<std::string> names;
  for (const std::string& c : cfg.checks) {
    if (c == "all") {
      for (const std::string& nm : checker_names()) names.push_back(nm);
    } else {
      names.push_back(c);
    }
  }
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  for (const std::string& nm : names)
    result.verdicts.push_back(run_checker(nm, result.trace));
  return result;
}

}  // namespace cc

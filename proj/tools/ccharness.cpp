// Command-line harness: single runs, fuzz campaigns, binding exploration,
// and the pinned regression suite.

#include <CLI11.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "cc/config.hpp"
#include "cc/explore.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFail = 1;
constexpr int kExitConfigError = 2;

struct CommonFlags {
  std::string config_file;
  std::string protocol;
  int n = -1, f = -1, refinement = -1, value_count = -1;
  int centered = -1;
  std::string inputs;
  std::string adversary;
  std::uint64_t seed = 0;
  bool seed_set = false;
  double crash_prob = -1;
  std::string epsilon, delay;
  std::vector<std::string> delay_menu;
  std::vector<int> faulty;
  std::vector<std::string> checks;
  int repeat = -1;
  long state_budget = -1;
  bool allow_underresilient = false;
};

void add_common(CLI::App* cmd, CommonFlags& fl) {
  cmd->add_option("--config", fl.config_file, "key=value config file");
  cmd->add_option("--protocol", fl.protocol,
                  "crash_cc|trim_cc|echo_cc|oneround_crash|oneround_byz");
  cmd->add_option("--n", fl.n, "process count");
  cmd->add_option("--f", fl.f, "fault budget");
  cmd->add_option("--R", fl.refinement, "refinement (1 or 2)");
  cmd->add_option("--value-count", fl.value_count, "size of the value set");
  cmd->add_option("--centered", fl.centered, "1 centered graph, 0 centerless");
  cmd->add_option("--inputs", fl.inputs, "comma-separated input values");
  cmd->add_option("--adversary", fl.adversary,
                  "fixed|random_crash|byz_silent|byz_split|byz_flood|worst_case");
  cmd->add_option("--seed", fl.seed, "RNG seed")->trigger_on_parse();
  cmd->add_option("--crash-prob", fl.crash_prob, "random_crash crash probability");
  cmd->add_option("--epsilon", fl.epsilon, "worst_case epsilon (rational)");
  cmd->add_option("--delay", fl.delay, "fixed adversary delay (rational)");
  cmd->add_option("--delay-menu", fl.delay_menu, "delay menu entry (repeatable)");
  cmd->add_option("--faulty", fl.faulty, "faulty process id (repeatable)");
  cmd->add_option("--check", fl.checks, "checker name or 'all' (repeatable)");
  cmd->add_option("--repeat", fl.repeat, "fuzz run count");
  cmd->add_option("--state-budget", fl.state_budget, "explore state budget");
  cmd->add_flag("--allow-underresilient", fl.allow_underresilient,
                "proceed (flagged) when n violates the protocol resilience");
}

cc::SimTime parse_time_flag(const std::string& name, const std::string& v) {
  auto t = cc::parse_simtime(v);
  if (!t) throw cc::ConfigError(name + " expects a rational like 1/8");
  return *t;
}

cc::ScenarioConfig build_config(const CLI::App* cmd, const CommonFlags& fl) {
  cc::ScenarioConfig cfg;
  if (!fl.config_file.empty()) cfg = cc::load_config(fl.config_file);
  auto given = [&](const std::string& flag) { return cmd->count(flag) > 0; };
  if (given("--protocol")) {
    auto p = cc::protocol_from_name(fl.protocol);
    if (!p) throw cc::ConfigError("unknown protocol '" + fl.protocol + "'");
    cfg.protocol = *p;
  }
  if (given("--n")) cfg.n = fl.n;
  if (given("--f")) cfg.f = fl.f;
  if (given("--R")) cfg.refinement = fl.refinement;
  if (given("--value-count")) cfg.value_count = fl.value_count;
  if (given("--centered")) cfg.centered = fl.centered != 0;
  if (given("--inputs")) {
    cfg.inputs.clear();
    std::stringstream ss(fl.inputs);
    std::string part;
    while (std::getline(ss, part, ','))
      cfg.inputs.push_back(std::atoi(part.c_str()));
  }
  if (given("--adversary")) cfg.adversary = fl.adversary;
  if (given("--seed")) cfg.seed = fl.seed;
  if (given("--crash-prob")) cfg.crash_prob = fl.crash_prob;
  if (given("--epsilon")) cfg.epsilon = parse_time_flag("--epsilon", fl.epsilon);
  if (given("--delay")) cfg.delay = parse_time_flag("--delay", fl.delay);
  if (given("--delay-menu")) {
    cfg.delay_menu.clear();
    for (const std::string& d : fl.delay_menu)
      cfg.delay_menu.push_back(parse_time_flag("--delay-menu", d));
  }
  if (given("--faulty")) cfg.faulty = fl.faulty;
  if (given("--check")) cfg.checks = fl.checks;
  if (given("--repeat")) cfg.repeat = fl.repeat;
  if (given("--state-budget")) cfg.state_budget = fl.state_budget;
  if (fl.allow_underresilient) cfg.allow_underresilient = true;
  return cfg;
}

int worker_count() {
  if (const char* env = std::getenv("CC_WORKERS")) {
    int w = std::atoi(env);
    if (w >= 1) return w;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::string inputs_key(const std::vector<cc::Value>& in) {
  std::string k;
  for (cc::Value v : in) k += std::to_string(v) + ",";
  return k;
}

// ---------------------------------------------------------------------------

int cmd_run(const cc::ScenarioConfig& cfg, const std::string& trace_out) {
  cc::ScenarioResult res = cc::run_scenario(cfg, cfg.seed);
  std::string trace_text = cc::serialize_trace(res.trace);
  if (trace_out.empty()) {
    std::cout << trace_text;
  } else {
    std::ofstream out(trace_out);
    if (!out) throw cc::ConfigError("cannot open trace file: " + trace_out);
    out << trace_text;
  }
  if (res.underresilient)
    std::cout << "note=underresilient (experiment, not a regression)\n";
  for (const cc::Verdict& v : res.verdicts)
    std::cout << cc::serialize_verdict(v) << "\n";
  return res.all_passed() ? kExitPass : kExitCheckFail;
}

int cmd_fuzz(const cc::ScenarioConfig& cfg) {
  if (cfg.repeat < 1) throw cc::ConfigError("fuzz needs repeat >= 1");
  std::vector<cc::ScenarioResult> results(cfg.repeat);
  std::atomic<int> next{0};
  const int workers = std::min(worker_count(), cfg.repeat);
  auto work = [&] {
    for (int i = next.fetch_add(1); i < cfg.repeat; i = next.fetch_add(1))
      results[i] = cc::run_scenario(cfg, cfg.seed + static_cast<std::uint64_t>(i));
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (std::thread& t : pool) t.join();

  long failures = 0;
  std::string first_witness;
  for (int i = 0; i < cfg.repeat; ++i) {
    for (const cc::Verdict& v : results[i].verdicts) {
      if (v.passed()) continue;
      ++failures;
      if (first_witness.empty())
        first_witness = "seed=" + std::to_string(cfg.seed + i) + " " +
                        cc::serialize_verdict(v);
    }
  }
  // Binding across runs: traces sharing an input assignment must agree on
  // the single non-bot branch.
  std::map<std::string, std::vector<cc::ExecutionTrace>> by_inputs;
  for (const cc::ScenarioResult& r : results)
    by_inputs[inputs_key(r.trace.inputs)].push_back(r.trace);
  for (const auto& [key, traces] : by_inputs) {
    cc::Verdict v = cc::check_binding_oracle(traces);
    if (!v.passed()) {
      ++failures;
      if (first_witness.empty())
        first_witness = "inputs=" + key + " " + cc::serialize_verdict(v);
    }
  }
  std::cout << "runs=" << cfg.repeat << " input_groups=" << by_inputs.size()
            << " failures=" << failures;
  if (!first_witness.empty()) std::cout << " first_witness=[" << first_witness << "]";
  std::cout << "\n";
  return failures == 0 ? kExitPass : kExitCheckFail;
}

int cmd_explore(const cc::ScenarioConfig& cfg) {
  bool underresilient = false;
  cfg.validate(&underresilient);
  if (cfg.inputs.empty())
    throw cc::ConfigError("explore needs an explicit input assignment");
  cc::ExploreResult res = cc::binding_explorer(cfg.task_spec(), cfg.protocol,
                                               cfg.inputs, cfg.faulty,
                                               cfg.state_budget);
  const char* result = res.status == cc::ExploreResult::Status::pass ? "pass"
                       : res.status == cc::ExploreResult::Status::fail
                           ? "fail"
                           : "inconclusive";
  std::cout << "prop=binding_explorer result=" << result
            << " states=" << res.states_visited << " witness=" << res.witness
            << "\n";
  return res.passed() ? kExitPass : kExitCheckFail;
}

int cmd_regress(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir))
    throw cc::ConfigError("scenario directory not found: " + dir);
  std::vector<fs::path> configs;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".cfg") configs.push_back(e.path());
  std::sort(configs.begin(), configs.end());
  if (configs.empty()) throw cc::ConfigError("no .cfg scenarios in " + dir);

  int drift = 0;
  for (const fs::path& cfg_path : configs) {
    cc::ScenarioConfig cfg = cc::load_config(cfg_path.string());
    std::ostringstream got;
    if (cfg.mode == "explore") {
      cc::ExploreResult res = cc::binding_explorer(
          cfg.task_spec(), cfg.protocol, cfg.inputs, cfg.faulty,
          cfg.state_budget);
      got << "prop=binding_explorer result="
          << (res.status == cc::ExploreResult::Status::pass ? "pass"
              : res.status == cc::ExploreResult::Status::fail ? "fail"
                                                              : "inconclusive")
          << "\n";
    } else {
      cc::ScenarioResult res = cc::run_scenario(cfg, cfg.seed);
      for (const cc::Verdict& v : res.verdicts)
        got << cc::serialize_verdict(v) << "\n";
      got << "metric=scaled_time value="
          << cc::to_string(cc::scaled_decision_time(res.trace)) << "\n";
      got << "metric=correct_messages value="
          << cc::message_totals(res.trace).correct_total << "\n";
    }
    fs::path exp_path = cfg_path;
    exp_path.replace_extension(".expected");
    std::ifstream exp_in(exp_path);
    if (!exp_in) throw cc::ConfigError("missing expectations: " + exp_path.string());
    std::stringstream exp;
    exp << exp_in.rdbuf();
    if (exp.str() == got.str()) {
      std::cout << "scenario=" << cfg_path.stem().string() << " result=pass\n";
    } else {
      ++drift;
      std::cout << "scenario=" << cfg_path.stem().string()
                << " result=drift\n--- expected ---\n"
                << exp.str() << "--- got ---\n"
                << got.str();
    }
  }
  std::cout << "scenarios=" << configs.size() << " drifted=" << drift << "\n";
  return drift == 0 ? kExitPass : kExitCheckFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"connected-consensus protocol harness"};
  app.require_subcommand(1);

  CommonFlags run_fl, fuzz_fl, explore_fl;
  std::string trace_out, scenario_dir = "scenarios";

  CLI::App* run_cmd = app.add_subcommand("run", "one simulation + checks");
  add_common(run_cmd, run_fl);
  run_cmd->add_option("--trace-out", trace_out, "write the trace to a file");

  CLI::App* fuzz_cmd = app.add_subcommand("fuzz", "seeded fuzz campaign");
  add_common(fuzz_cmd, fuzz_fl);

  CLI::App* explore_cmd =
      app.add_subcommand("explore", "exhaustive binding certification");
  add_common(explore_cmd, explore_fl);

  CLI::App* regress_cmd =
      app.add_subcommand("regress", "pinned scenario suite");
  regress_cmd->add_option("--dir", scenario_dir, "scenario directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return cmd_run(build_config(run_cmd, run_fl), trace_out);
    if (fuzz_cmd->parsed()) return cmd_fuzz(build_config(fuzz_cmd, fuzz_fl));
    if (explore_cmd->parsed())
      return cmd_explore(build_config(explore_cmd, explore_fl));
    if (regress_cmd->parsed()) return cmd_regress(scenario_dir);
  } catch (const cc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFail;
  }
  return kExitConfigError;
}

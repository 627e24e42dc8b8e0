#pragma once

#include <span>
#include <string>
#include <vector>

#include "cc/simnet.hpp"

namespace cc {

enum class CheckResult { pass, fail, inconclusive };

struct Verdict {
  std::string property;
  CheckResult result = CheckResult::pass;
  std::string witness;  // offending excerpt; nonempty whenever result is fail

  bool passed() const { return result == CheckResult::pass; }
};

std::string serialize_verdict(const Verdict& v);

/// Every correct process decided exactly once, on a vertex of the graph.
Verdict check_termination(const ExecutionTrace& trace);

/// All correct decisions lie in the minimal subtree of the input leaves.
/// Under crash failures I includes every process's input; under malicious
/// failures only correct inputs count.
Verdict check_validity(const ExecutionTrace& trace);

/// All pairs of correct decisions are at spider distance <= 1.
Verdict check_agreement(const ExecutionTrace& trace);

/// Across traces sharing one input assignment, the non-bot branch values in
/// correct decisions form a set of size <= 1; for the input-determined
/// protocols the value must match the counting oracle (>= n-f inputs for
/// crash_cc, >= n-2f for oneround_crash).
Verdict check_binding_oracle(std::span<const ExecutionTrace> traces);

/// Fig.-2 style bound for the trace's protocol and R (crash/trim: R;
/// echo: 5 or 7; one-round: 1), or an explicit bound.
SimTime time_bound(Protocol p, int refinement);
Verdict check_time_bound(const ExecutionTrace& trace);
Verdict check_time_bound(const ExecutionTrace& trace, const SimTime& bound);

/// Correct-sent totals within c*n*R (input-based) or c*n*(|V|+5)
/// (echo_cc), where c is the number of correct processes in the trace.
Verdict check_message_bound(const ExecutionTrace& trace);

/// Post-hoc conformance with the execution model: one wakeup per live
/// process at time 0 before its deliveries, nondecreasing per-process event
/// times, nonnegative delays, no liveness violation.
Verdict check_model_conformance(const ExecutionTrace& trace);

/// Named checker lookup for CLI `--check` flags; "all" expands to every
/// single-trace checker.
std::vector<std::string> checker_names();
Verdict run_checker(const std::string& name, const ExecutionTrace& trace);

}  // namespace cc

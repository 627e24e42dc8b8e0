#include "cc/verify.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "cc/spider.hpp"

namespace cc {

std::string serialize_verdict(const Verdict& v) {
  const char* r = v.result == CheckResult::pass          ? "pass"
                  : v.result == CheckResult::fail        ? "fail"
                                                         : "inconclusive";
  return "prop=" + v.property + " result=" + r + " witness=" + v.witness;
}

namespace {

Verdict pass(std::string name) { return Verdict{std::move(name)}; }

Verdict fail(std::string name, std::string witness) {
  return Verdict{std::move(name), CheckResult::fail, std::move(witness)};
}

}  // namespace

Verdict check_termination(const ExecutionTrace& trace) {
  const std::string name = "termination";
  for (int p = 0; p < trace.spec.n; ++p) {
    if (!trace.is_correct(p)) continue;
    if (!trace.decisions[p]) return fail(name, "undecided proc=" + std::to_string(p));
    if (!trace.spec.valid_vertex(*trace.decisions[p]))
      return fail(name, "proc=" + std::to_string(p) + " decided " +
                            to_string(*trace.decisions[p]) +
                            " which is not a graph vertex");
  }
  // Decision-once is structural (machines expose at most one decision), but
  // guard against trace corruption anyway.
  std::vector<int> count(trace.spec.n, 0);
  for (const TraceEvent& ev : trace.events)
    if (ev.decision) ++count[ev.process];
  for (int p = 0; p < trace.spec.n; ++p)
    if (count[p] > 1)
      return fail(name, "proc=" + std::to_string(p) + " decided twice");
  return pass(name);
}

Verdict check_validity(const ExecutionTrace& trace) {
  const std::string name = "validity";
  std::set<Value> leaves;
  for (int p = 0; p < trace.spec.n; ++p) {
    // Crash-faulty processes are honest; their inputs belong to I.
    if (trace.spec.failure_model == FailureModel::malicious &&
        !trace.is_correct(p))
      continue;
    leaves.insert(trace.inputs[p]);
  }
  const auto subtree = minimal_subtree(trace.spec, leaves);
  for (int p = 0; p < trace.spec.n; ++p) {
    if (!trace.is_correct(p) || !trace.decisions[p]) continue;
    if (!contains(subtree, *trace.decisions[p]))
      return fail(name, "proc=" + std::to_string(p) + " decided " +
                            to_string(*trace.decisions[p]) +
                            " outside the input subtree");
  }
  return pass(name);
}

Verdict check_agreement(const ExecutionTrace& trace) {
  const std::string name = "agreement";
  for (int p = 0; p < trace.spec.n; ++p) {
    if (!trace.is_correct(p) || !trace.decisions[p]) continue;
    for (int q = p + 1; q < trace.spec.n; ++q) {
      if (!trace.is_correct(q) || !trace.decisions[q]) continue;
      int d = distance(*trace.decisions[p], *trace.decisions[q], trace.spec);
      if (d > 1)
        return fail(name, "procs " + std::to_string(p) + "," +
                              std::to_string(q) + " decided " +
                              to_string(*trace.decisions[p]) + " vs " +
                              to_string(*trace.decisions[q]) + " at distance " +
                              std::to_string(d));
    }
  }
  return pass(name);
}

Verdict check_binding_oracle(std::span<const ExecutionTrace> traces) {
  const std::string name = "binding_oracle";
  if (traces.empty()) return pass(name);
  const ExecutionTrace& first = traces.front();
  std::set<Value> branch_values;
  for (const ExecutionTrace& t : traces) {
    if (t.inputs != first.inputs || t.protocol != first.protocol)
      return fail(name, "trace set mixes input assignments or protocols");
    for (int p = 0; p < t.spec.n; ++p) {
      if (!t.is_correct(p) || !t.decisions[p]) continue;
      if (!t.decisions[p]->value.is_bottom())
        branch_values.insert(t.decisions[p]->value.value());
    }
  }
  if (branch_values.size() > 1) {
    std::string w = "branches {";
    for (Value v : branch_values) w += std::to_string(v) + ",";
    return fail(name, w + "} across one input assignment");
  }
  // Counting oracle for the protocols whose locked branch is input-determined
  // with an explicit threshold.
  int threshold = 0;
  if (first.protocol == Protocol::crash_cc)
    threshold = first.spec.n - first.spec.f;
  else if (first.protocol == Protocol::oneround_crash)
    threshold = first.spec.n - 2 * first.spec.f;
  if (threshold > 0 && !branch_values.empty()) {
    Value v = *branch_values.begin();
    int count = 0;
    for (Value in : first.inputs) count += (in == v);
    if (count < threshold)
      return fail(name, "branch " + std::to_string(v) + " has only " +
                            std::to_string(count) + " inputs, oracle needs " +
                            std::to_string(threshold));
  }
  return pass(name);
}

SimTime time_bound(Protocol p, int refinement) {
  switch (p) {
    case Protocol::crash_cc:
    case Protocol::trim_cc:
      return SimTime(refinement);
    case Protocol::echo_cc:
      return SimTime(refinement == 1 ? 5 : 7);
    case Protocol::oneround_crash:
    case Protocol::oneround_byz:
      return SimTime(1);
  }
  throw std::logic_error("unknown protocol");
}

Verdict check_time_bound(const ExecutionTrace& trace) {
  return check_time_bound(trace,
                          time_bound(trace.protocol, trace.spec.refinement));
}

Verdict check_time_bound(const ExecutionTrace& trace, const SimTime& bound) {
  const std::string name = "time_bound";
  for (int p = 0; p < trace.spec.n; ++p)
    if (trace.is_correct(p) && !trace.decisions[p])
      return fail(name, "undecided proc=" + std::to_string(p));
  SimTime scaled = scaled_decision_time(trace);
  if (scaled > bound)
    return fail(name, "scaled time " + to_string(scaled) + " exceeds " +
                          to_string(bound));
  return pass(name);
}

Verdict check_message_bound(const ExecutionTrace& trace) {
  const std::string name = "message_bound";
  const TaskSpec& s = trace.spec;
  long per_process = trace.protocol == Protocol::echo_cc
                         ? s.value_count + 5
                         : s.refinement;
  long correct = s.n - static_cast<long>(trace.faulty.size());
  long budget = correct * s.n * per_process;
  long total = message_totals(trace).correct_total;
  if (total > budget)
    return fail(name, "correct-sent total " + std::to_string(total) +
                          " exceeds budget " + std::to_string(budget));
  return pass(name);
}

Verdict check_model_conformance(const ExecutionTrace& trace) {
  const std::string name = "model_conformance";
  if (trace.liveness_violation)
    return fail(name, "event budget exhausted (liveness violation)");
  std::vector<int> wakeups(trace.spec.n, 0);
  std::vector<bool> saw_any(trace.spec.n, false);
  std::vector<SimTime> last_time(trace.spec.n, SimTime(0));
  SimTime global(0);
  for (const TraceEvent& ev : trace.events) {
    if (ev.time < global)
      return fail(name, "global event times decrease at t=" + to_string(ev.time));
    global = ev.time;
    if (ev.time < last_time[ev.process])
      return fail(name, "per-process times decrease at proc=" +
                            std::to_string(ev.process));
    last_time[ev.process] = ev.time;
    if (std::holds_alternative<Wakeup>(ev.event)) {
      if (saw_any[ev.process])
        return fail(name, "wakeup is not the first event at proc=" +
                              std::to_string(ev.process));
      if (ev.time != SimTime(0))
        return fail(name, "wakeup after time 0 at proc=" +
                              std::to_string(ev.process));
      ++wakeups[ev.process];
    } else {
      if (!wakeups[ev.process])
        return fail(name, "delivery before wakeup at proc=" +
                              std::to_string(ev.process));
      if (ev.send_time > ev.time)
        return fail(name, "negative delay at proc=" + std::to_string(ev.process));
    }
    saw_any[ev.process] = true;
  }
  for (int p = 0; p < trace.spec.n; ++p) {
    bool has_machine = trace.is_correct(p) ||
                       trace.spec.failure_model == FailureModel::crash;
    if (has_machine && wakeups[p] != 1)
      return fail(name, "proc=" + std::to_string(p) + " has " +
                            std::to_string(wakeups[p]) + " wakeups");
  }
  return pass(name);
}

std::vector<std::string> checker_names() {
  return {"termination", "validity", "agreement", "time_bound",
          "message_bound", "model_conformance"};
}

Verdict run_checker(const std::string& name, const ExecutionTrace& trace) {
  if (name == "termination") return check_termination(trace);
  if (name == "validity") return check_validity(trace);
  if (name == "agreement") return check_agreement(trace);
  if (name == "time_bound") return check_time_bound(trace);
  if (name == "message_bound") return check_message_bound(trace);
  if (name == "model_conformance") return check_model_conformance(trace);
  throw std::invalid_argument("unknown checker: " + name);
}

}  // namespace cc

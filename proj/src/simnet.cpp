#include "cc/simnet.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

namespace cc {

std::string to_string(const SimTime& t) {
  if (t.denominator() == 1) return std::to_string(t.numerator());
  return std::to_string(t.numerator()) + "/" + std::to_string(t.denominator());
}

std::optional<SimTime> parse_simtime(const std::string& s) {
  try {
    auto slash = s.find('/');
    if (slash == std::string::npos) return SimTime(std::stoll(s));
    long long num = std::stoll(s.substr(0, slash));
    long long den = std::stoll(s.substr(slash + 1));
    if (den == 0) return std::nullopt;
    return SimTime(num, den);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

bool ExecutionTrace::is_correct(int p) const {
  return !std::binary_search(faulty.begin(), faulty.end(), p);
}

SimTime ExecutionTrace::last_correct_decision_time() const {
  SimTime last(0);
  for (int p = 0; p < spec.n; ++p) {
    if (!is_correct(p)) continue;
    if (!decisions[p]) throw std::logic_error("correct process undecided");
    last = std::max(last, decision_times[p]);
  }
  return last;
}

namespace {

struct Pending {
  SimTime deliver_time{0};
  int dest = 0;
  Message msg;
  SimTime send_time{0};
  bool faulty_sender = false;
  long seq = 0;  // final determinism fallback, never reached for distinct msgs

  // Deterministic tie-break: (time, destination, sender, kind, value).
  friend bool operator<(const Pending& a, const Pending& b) {
    auto ka = std::tie(a.deliver_time, a.dest, a.msg.sender, a.msg.kind,
                       a.msg.value, a.seq);
    auto kb = std::tie(b.deliver_time, b.dest, b.msg.sender, b.msg.kind,
                       b.msg.value, b.seq);
    return ka < kb;
  }
};

}  // namespace

ExecutionTrace run(const TaskSpec& spec, Protocol protocol,
                   const std::vector<Value>& inputs, Adversary& adversary,
                   long event_budget_per_process) {
  spec.validate();
  if (static_cast<int>(inputs.size()) != spec.n)
    throw std::invalid_argument("need one input per process");
  if (event_budget_per_process < 0)
    event_budget_per_process = 10L * spec.n * (spec.value_count + 6);

  adversary.begin(spec, protocol, inputs);
  std::vector<int> faulty = adversary.faulty();
  std::sort(faulty.begin(), faulty.end());
  if (static_cast<int>(faulty.size()) > spec.f)
    throw std::invalid_argument("adversary assigned more than f faults");
  for (int p : faulty)
    if (p < 0 || p >= spec.n) throw std::invalid_argument("bad faulty id");

  ExecutionTrace trace;
  trace.spec = spec;
  trace.protocol = protocol;
  trace.inputs = inputs;
  trace.faulty = faulty;
  trace.decisions.assign(spec.n, std::nullopt);
  trace.decision_times.assign(spec.n, SimTime(0));

  const bool malicious = spec.failure_model == FailureModel::malicious;
  auto is_faulty = [&](int p) {
    return std::binary_search(faulty.begin(), faulty.end(), p);
  };

  // Malicious-faulty processes have no machine; their behavior is whatever
  // the adversary injects. Crash-faulty processes run the real machine with
  // an adversary-chosen send cut.
  std::vector<std::optional<Machine>> machines(spec.n);
  for (int p = 0; p < spec.n; ++p)
    if (!(malicious && is_faulty(p)))
      machines[p] = make_machine(protocol, spec, p, inputs[p]);

  std::set<Pending> queue;
  long seq = 0;
  std::vector<long> send_ordinal(spec.n, 0);
  std::vector<long> events_processed(spec.n, 0);

  auto emit = [&](int sender, const SimTime& now, const StepOutput& out,
                  TraceEvent& ev) {
    for (const Message& m : out.broadcasts) {
      for (int dest = 0; dest < spec.n; ++dest) {
        long ordinal = send_ordinal[sender]++;
        if (!malicious && is_faulty(sender) &&
            adversary.crash_drop(sender, ordinal))
          continue;
        SimTime d = adversary.delay(m, dest, now);
        if (d <= SimTime(0))
          throw std::invalid_argument("adversary chose a non-positive delay");
        ev.sent.push_back(Send{dest, m});
        queue.insert(Pending{now + d, dest, m, now, is_faulty(sender), seq++});
      }
    }
    if (out.decision) {
      ev.decision = out.decision;
      trace.decisions[sender] = out.decision;
      trace.decision_times[sender] = now;
    }
  };

  // Every live process wakes up exactly once, at time 0.
  for (int p = 0; p < spec.n; ++p) {
    if (!machines[p]) continue;
    TraceEvent ev;
    ev.time = SimTime(0);
    ev.process = p;
    ev.event = Wakeup{};
    StepOutput out = step(*machines[p], Wakeup{});
    emit(p, SimTime(0), out, ev);
    trace.events.push_back(std::move(ev));
  }

  for (const Injection& inj : adversary.injections()) {
    if (!is_faulty(inj.message.sender))
      throw std::invalid_argument("injection from a non-faulty sender");
    if (!malicious)
      throw std::invalid_argument("injections require the malicious model");
    if (inj.deliver_time < inj.send_time || inj.deliver_time <= SimTime(0))
      throw std::invalid_argument("bad injection timing");
    if (inj.destination < 0 || inj.destination >= spec.n)
      throw std::invalid_argument("bad injection destination");
    queue.insert(Pending{inj.deliver_time, inj.destination, inj.message,
                         inj.send_time, true, seq++});
  }

  while (!queue.empty()) {
    Pending next = *queue.begin();
    queue.erase(queue.begin());
    if (!machines[next.dest]) continue;  // malicious-faulty sink
    if (++events_processed[next.dest] > event_budget_per_process) {
      trace.liveness_violation = true;
      break;
    }
    TraceEvent ev;
    ev.time = next.deliver_time;
    ev.process = next.dest;
    ev.event = next.msg;
    ev.send_time = next.send_time;
    StepOutput out = step(*machines[next.dest], next.msg);
    emit(next.dest, next.deliver_time, out, ev);
    trace.events.push_back(std::move(ev));
  }

  return trace;
}

SimTime scaled_decision_time(const ExecutionTrace& trace) {
  SimTime last = trace.last_correct_decision_time();
  SimTime max_delay(0);
  for (const TraceEvent& ev : trace.events) {
    if (!std::holds_alternative<Message>(ev.event)) continue;
    if (ev.time > last) continue;
    const Message& m = std::get<Message>(ev.event);
    // Crash-faulty senders emit genuine timed messages until they crash, so
    // their deliveries count toward the delay bound; malicious senders only
    // produce fabricated injections with meaningless send times.
    bool honest_sender =
        trace.is_correct(m.sender) ||
        trace.spec.failure_model == FailureModel::crash;
    if (honest_sender && trace.is_correct(ev.process))
      max_delay = std::max(max_delay, ev.time - ev.send_time);
  }
  if (max_delay == SimTime(0)) return last;
  return last / max_delay;
}

MessageTotals message_totals(const ExecutionTrace& trace) {
  MessageTotals totals;
  for (const TraceEvent& ev : trace.events) {
    for (const Send& s : ev.sent) {
      const Message& m = s.message;
      int k = static_cast<int>(m.kind);
      if (trace.is_correct(m.sender)) {
        ++totals.correct_by_kind[k];
        ++totals.correct_total;
      } else {
        ++totals.faulty_by_kind[k];
        ++totals.faulty_total;
      }
    }
  }
  return totals;
}

std::string serialize_trace(const ExecutionTrace& trace) {
  std::ostringstream os;
  for (const TraceEvent& ev : trace.events) {
    os << "t=" << to_string(ev.time) << " proc=" << ev.process << " ev=";
    if (std::holds_alternative<Wakeup>(ev.event)) {
      os << "WAKEUP";
    } else {
      const Message& m = std::get<Message>(ev.event);
      os << "DELIVER " << kind_name(m.kind) << " " << to_string(m.value) << " "
         << m.sender;
    }
    for (const Send& s : ev.sent) {
      os << " send " << s.destination << " " << kind_name(s.message.kind)
         << " " << to_string(s.message.value);
    }
    if (ev.decision)
      os << " decide " << to_string(ev.decision->value) << " "
         << ev.decision->grade;
    os << "\n";
  }
  return os.str();
}

}  // namespace cc

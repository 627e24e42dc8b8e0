#pragma once

#include <boost/rational.hpp>
#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cc/protocol.hpp"
#include "cc/types.hpp"

namespace cc {

/// Exact rational simulation time. Adversary schedules use times like
/// 2 - eps/4, so floating point is out.
using SimTime = boost::rational<long long>;

std::string to_string(const SimTime& t);
std::optional<SimTime> parse_simtime(const std::string& s);  // "num/den" or "num"

struct Injection {
  Message message;     // sender is the faulty process
  int destination = 0;
  SimTime send_time{0};
  SimTime deliver_time{0};
};

/// An adversary policy: chooses the faulty set, per-message delays, crash
/// cut points, and (malicious model) injected messages. Policies are
/// deterministic given their construction parameters.
class Adversary {
 public:
  virtual ~Adversary() = default;

  /// Called once per run before any event; resets internal state.
  virtual void begin(const TaskSpec& spec, Protocol protocol,
                     const std::vector<Value>& inputs) = 0;
  /// Faulty process ids, size <= f. Stable after begin().
  virtual const std::vector<int>& faulty() const = 0;
  /// Positive delay for a message sent by a live machine at send_time.
  virtual SimTime delay(const Message& m, int destination, SimTime send_time) = 0;
  /// Crash model only: true if the sender (crash-faulty) has passed its cut
  /// for this point-to-point send. send_ordinal counts the sender's
  /// individual sends over its lifetime, so a cut can fall mid-broadcast.
  virtual bool crash_drop(int sender, long send_ordinal) {
    (void)sender, (void)send_ordinal;
    return false;
  }
  /// Malicious model only: messages fabricated by the faulty processes.
  virtual std::vector<Injection> injections() { return {}; }
};

struct Send {
  int destination = 0;
  Message message;
};

struct TraceEvent {
  SimTime time{0};
  int process = 0;
  Event event;
  SimTime send_time{0};  // delivery events only
  std::vector<Send> sent;
  std::optional<Vertex> decision;
};

/// Timed, totally ordered event log of one simulated execution.
struct ExecutionTrace {
  TaskSpec spec;
  Protocol protocol = Protocol::crash_cc;
  std::vector<Value> inputs;
  std::vector<int> faulty;  // sorted
  std::vector<TraceEvent> events;
  std::vector<std::optional<Vertex>> decisions;  // per process
  std::vector<SimTime> decision_times;           // valid where decided
  bool liveness_violation = false;

  bool is_correct(int p) const;
  /// Latest decision time over correct processes; requires all decided.
  SimTime last_correct_decision_time() const;
};

/// Drives all machines under the adversary's schedule until every pending
/// message is delivered. Ties in delivery time break lexicographically by
/// (time, destination, sender, kind, value).
ExecutionTrace run(const TaskSpec& spec, Protocol protocol,
                   const std::vector<Value>& inputs, Adversary& adversary,
                   long event_budget_per_process = -1);

/// (latest correct decision time - latest correct wakeup time) divided by
/// the maximum delivery delay, over messages delivered to correct processes
/// in the prefix ending at the last correct decision, from senders whose
/// timing is genuine (all senders under the crash model, correct senders
/// under the malicious model). Wakeups are at time 0.
SimTime scaled_decision_time(const ExecutionTrace& trace);

struct MessageTotals {
  std::array<long, kMsgKindCount> correct_by_kind{};
  std::array<long, kMsgKindCount> faulty_by_kind{};
  long correct_total = 0;
  long faulty_total = 0;
};

/// Exact counts of point-to-point sends recorded in the trace, keyed by
/// sender correctness and kind.
MessageTotals message_totals(const ExecutionTrace& trace);

/// Line-oriented trace serialization, one event per line:
///   t=<num>/<den> proc=<id> ev=<WAKEUP|DELIVER kind value sender>
///     [send dest kind value]* [decide value grade]
std::string serialize_trace(const ExecutionTrace& trace);

}  // namespace cc

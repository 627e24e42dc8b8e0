#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cc/types.hpp"

namespace cc {

enum class MsgKind : int {
  Input = 0,
  Branch = 1,
  Echo = 2,
  Echo2 = 3,
  Echo3 = 4,
  Echo4 = 5,
  Echo5 = 6,
};
constexpr int kMsgKindCount = 7;

const char* kind_name(MsgKind k);
std::optional<MsgKind> kind_from_name(const std::string& name);

struct Message {
  MsgKind kind;
  BranchValue value;
  int sender = -1;

  friend constexpr auto operator<=>(const Message&, const Message&) = default;
};

struct Wakeup {
  friend constexpr auto operator<=>(const Wakeup&, const Wakeup&) = default;
};

/// A process experiences a spontaneous wakeup or the receipt of a message.
using Event = std::variant<Wakeup, Message>;

/// Result of one transition. All protocol sends are broadcasts to every
/// process (including the sender); the simulator expands the destinations.
struct StepOutput {
  std::vector<Message> broadcasts;
  std::optional<Vertex> decision;
};

enum class Protocol { crash_cc, trim_cc, echo_cc, oneround_crash, oneround_byz };

const char* protocol_name(Protocol p);
std::optional<Protocol> protocol_from_name(const std::string& name);

/// Smallest n tolerating f faults for the given protocol, e.g. 2f+1 for
/// crash_cc. The machines themselves do not enforce this; deliberate
/// under-resilient experiments are configured at the harness level.
int min_processes(Protocol p, int f);

/// True for the protocols whose message alphabet is INPUT/BRANCH.
bool input_based(Protocol p);

// ---------------------------------------------------------------------------
// Algorithm for crash failures, n > 2f: exchange inputs, pick a branch if the
// first n-f received values are unanimous, and for R = 2 refine it with a
// second round of branch values.
class CrashCC {
 public:
  CrashCC(const TaskSpec& spec, int id, Value input);
  virtual ~CrashCC() = default;
  StepOutput on_event(const Event& ev);

  bool decided() const { return decided_; }
  Vertex decision() const { return decision_; }
  Value input() const { return input_; }
  /// True once no future event can change this machine's decision or make
  /// it broadcast; deciding absorbs all further deliveries here.
  bool inert() const { return decided_; }
  friend bool operator==(const CrashCC&, const CrashCC&) = default;
  void encode(std::string& out) const;

 protected:
  // Branch choice from the first n-f input values; overridden by the
  // trimmed-mean variant.
  virtual BranchValue choose_branch() const;
  virtual Vertex round2_decision() const;

  TaskSpec spec_;
  int id_;
  Value input_;
  bool woken_ = false;
  bool decided_ = false;
  Vertex decision_{};
  std::optional<BranchValue> branch_;
  std::vector<char> seen_input_, seen_branch_;  // per-sender dedup
  std::vector<Value> first_inputs_;             // first n-f, arrival order
  std::vector<BranchValue> first_branches_;     // first n-f, arrival order

 private:
  StepOutput maybe_progress();
};

/// Algorithm for malicious failures, n > 5f: as CrashCC but the branch is
/// chosen from the input multiset after dropping the f smallest and f
/// largest values, and the round-2 thresholds are f+1 / n-2f.
class TrimCC : public CrashCC {
 public:
  using CrashCC::CrashCC;
  friend bool operator==(const TrimCC&, const TrimCC&) = default;

 protected:
  BranchValue choose_branch() const override;
  Vertex round2_decision() const override;
};

// ---------------------------------------------------------------------------
// Algorithm for malicious failures, n > 3f, via five levels of echo
// messages. The transition re-evaluates all guards to fixpoint after every
// delivery, each firing at most once per its sent/decided flag.
class EchoCC {
 public:
  EchoCC(const TaskSpec& spec, int id, Value input);
  StepOutput on_event(const Event& ev);

  bool decided() const { return decided_; }
  Vertex decision() const { return decision_; }
  Value input() const { return input_; }
  /// True once decided with every one-shot broadcast already sent: further
  /// deliveries only bump counters that no guard can act on again.
  bool inert() const;

  // Read-only views of the guard state, used by the binding explorer's
  // reachability analysis. Levels: 0 = ECHO .. 4 = ECHO5; slot value_count
  // is bot.
  int echo_count(int level, int slot) const { return num_echo_[level][slot]; }
  bool echo_sent(int slot) const { return sent_echo_[slot] != 0; }
  bool level_sent(int i) const { return sent_echo_i_[i]; }  // 0..3 = ECHO2..5
  bool is_approved(int slot) const { return approved_[slot] != 0; }

  friend bool operator==(const EchoCC&, const EchoCC&) = default;
  void encode(std::string& out) const;

 private:
  void run_guards(StepOutput& out);
  int slot(BranchValue v) const { return v.is_bottom() ? spec_.value_count : v.value(); }
  BranchValue unslot(int s) const {
    return s == spec_.value_count ? BranchValue::bottom() : BranchValue(s);
  }
  int sum(const std::vector<int>& a) const;

  TaskSpec spec_;
  int id_;
  Value input_;
  bool woken_ = false;
  bool decided_ = false;
  Vertex decision_{};
  std::vector<char> approved_;              // over V u {bot}
  std::vector<int> num_echo_[5];            // [level-1][slot]
  std::vector<char> sent_echo_;             // per value, level 1
  bool sent_echo_i_[4] = {false, false, false, false};  // levels 2..5
  std::vector<char> seen_echo_;             // (sender, value) dedup, level 1
  std::vector<char> seen_echo_i_;           // (sender, level) dedup, levels 2..5
};

// ---------------------------------------------------------------------------
// One-round variants for R = 2: higher resilience buys a decision straight
// from the first n-f inputs with no second round.
class OneRoundCrash {
 public:
  OneRoundCrash(const TaskSpec& spec, int id, Value input);
  virtual ~OneRoundCrash() = default;
  StepOutput on_event(const Event& ev);

  bool decided() const { return decided_; }
  Vertex decision() const { return decision_; }
  Value input() const { return input_; }
  bool inert() const { return decided_; }
  friend bool operator==(const OneRoundCrash&, const OneRoundCrash&) = default;
  void encode(std::string& out) const;

 protected:
  virtual Vertex decide_from_inputs() const;

  TaskSpec spec_;
  int id_;
  Value input_;
  bool woken_ = false;
  bool decided_ = false;
  Vertex decision_{};
  std::vector<char> seen_input_;
  std::vector<Value> first_inputs_;
};

class OneRoundByz : public OneRoundCrash {
 public:
  using OneRoundCrash::OneRoundCrash;
  friend bool operator==(const OneRoundByz&, const OneRoundByz&) = default;

 protected:
  Vertex decide_from_inputs() const override;
};

using Machine =
    std::variant<CrashCC, TrimCC, EchoCC, OneRoundCrash, OneRoundByz>;

Machine make_machine(Protocol p, const TaskSpec& spec, int id, Value input);
StepOutput step(Machine& m, const Event& ev);
bool machine_decided(const Machine& m);
/// The decided vertex; meaningful only when machine_decided(m) is true.
Vertex machine_decision(const Machine& m);
bool machine_inert(const Machine& m);
/// Compact state encoding for hashing/memoization in the explorer.
std::string machine_key(const Machine& m);

}  // namespace cc

#include "cc/protocol.hpp"

#include <algorithm>
#include <stdexcept>

namespace cc {

const char* kind_name(MsgKind k) {
  switch (k) {
    case MsgKind::Input: return "INPUT";
    case MsgKind::Branch: return "BRANCH";
    case MsgKind::Echo: return "ECHO";
    case MsgKind::Echo2: return "ECHO2";
    case MsgKind::Echo3: return "ECHO3";
    case MsgKind::Echo4: return "ECHO4";
    case MsgKind::Echo5: return "ECHO5";
  }
  return "?";
}

std::optional<MsgKind> kind_from_name(const std::string& name) {
  for (int i = 0; i < kMsgKindCount; ++i)
    if (name == kind_name(static_cast<MsgKind>(i)))
      return static_cast<MsgKind>(i);
  return std::nullopt;
}

const char* protocol_name(Protocol p) {
  switch (p) {
    case Protocol::crash_cc: return "crash_cc";
    case Protocol::trim_cc: return "trim_cc";
    case Protocol::echo_cc: return "echo_cc";
    case Protocol::oneround_crash: return "oneround_crash";
    case Protocol::oneround_byz: return "oneround_byz";
  }
  return "?";
}

std::optional<Protocol> protocol_from_name(const std::string& name) {
  for (Protocol p : {Protocol::crash_cc, Protocol::trim_cc, Protocol::echo_cc,
                     Protocol::oneround_crash, Protocol::oneround_byz})
    if (name == protocol_name(p)) return p;
  return std::nullopt;
}

int min_processes(Protocol p, int f) {
  switch (p) {
    case Protocol::crash_cc: return 2 * f + 1;
    case Protocol::trim_cc: return 5 * f + 1;
    case Protocol::echo_cc: return 3 * f + 1;
    case Protocol::oneround_crash: return 4 * f + 1;
    case Protocol::oneround_byz: return 12 * f + 1;
  }
  return 0;
}

bool input_based(Protocol p) { return p != Protocol::echo_cc; }

namespace {

void check_value(const TaskSpec& spec, Value v) {
  if (v < 0 || v >= spec.value_count)
    throw std::invalid_argument("input value out of range");
}

[[noreturn]] void foreign_kind(MsgKind k) {
  throw std::invalid_argument(std::string("message kind foreign to protocol: ") +
                              kind_name(k));
}

void encode_flags(std::string& out, const std::vector<char>& v) {
  for (char c : v) out.push_back(c ? '1' : '0');
  out.push_back('|');
}

void encode_ints(std::string& out, const std::vector<int>& v) {
  for (int x : v) {
    out += std::to_string(x);
    out.push_back(',');
  }
  out.push_back('|');
}

}  // namespace

// ---------------------------------------------------------------------------
// CrashCC / TrimCC

CrashCC::CrashCC(const TaskSpec& spec, int id, Value input)
    : spec_(spec), id_(id), input_(input),
      seen_input_(spec.n, 0), seen_branch_(spec.n, 0) {
  spec_.validate();
  check_value(spec_, input);
}

BranchValue CrashCC::choose_branch() const {
  // Branch v iff all of the first n-f values equal v.
  for (Value v : first_inputs_)
    if (v != first_inputs_.front()) return BranchValue::bottom();
  return BranchValue(first_inputs_.front());
}

Vertex CrashCC::round2_decision() const {
  if (branch_->is_bottom()) {
    // Decide (v,1) if any branch message carried a value. Several distinct
    // values cannot occur under crash failures; smallest wins regardless.
    Value best = -1;
    for (BranchValue b : first_branches_)
      if (!b.is_bottom() && (best < 0 || b.value() < best)) best = b.value();
    return best >= 0 ? branch_vertex(best, 1) : center_vertex();
  }
  for (BranchValue b : first_branches_)
    if (b != *branch_) return branch_vertex(branch_->value(), 1);
  return branch_vertex(branch_->value(), 2);
}

StepOutput CrashCC::maybe_progress() {
  StepOutput out;
  const int quorum = spec_.n - spec_.f;
  if (branch_ || static_cast<int>(first_inputs_.size()) < quorum) {
    // Round 2 completion (R = 2 only): need our branch and n-f branch values.
    if (branch_ && spec_.refinement == 2 && !decided_ &&
        static_cast<int>(first_branches_.size()) >= quorum) {
      decided_ = true;
      decision_ = round2_decision();
      out.decision = decision_;
    }
    return out;
  }
  branch_ = choose_branch();
  if (spec_.refinement == 1) {
    decided_ = true;
    decision_ = branch_->is_bottom() ? center_vertex()
                                     : branch_vertex(branch_->value(), 1);
    out.decision = decision_;
    return out;
  }
  out.broadcasts.push_back(Message{MsgKind::Branch, *branch_, id_});
  // Branch messages may already be queued up from faster peers.
  if (!decided_ && static_cast<int>(first_branches_.size()) >= quorum) {
    decided_ = true;
    decision_ = round2_decision();
    out.decision = decision_;
  }
  return out;
}

StepOutput CrashCC::on_event(const Event& ev) {
  if (std::holds_alternative<Wakeup>(ev)) {
    if (woken_) throw std::invalid_argument("second wakeup");
    woken_ = true;
    StepOutput out;
    out.broadcasts.push_back(Message{MsgKind::Input, BranchValue(input_), id_});
    return out;
  }
  const Message& m = std::get<Message>(ev);
  if (m.sender < 0 || m.sender >= spec_.n)
    throw std::invalid_argument("bad sender id");
  if (decided_) return {};
  const int quorum = spec_.n - spec_.f;
  switch (m.kind) {
    case MsgKind::Input:
      if (m.value.is_bottom())
        throw std::invalid_argument("INPUT cannot carry bot");
      check_value(spec_, m.value.value());
      if (seen_input_[m.sender]) return {};
      seen_input_[m.sender] = 1;
      if (static_cast<int>(first_inputs_.size()) < quorum)
        first_inputs_.push_back(m.value.value());
      break;
    case MsgKind::Branch:
      if (!m.value.is_bottom()) check_value(spec_, m.value.value());
      if (seen_branch_[m.sender]) return {};
      seen_branch_[m.sender] = 1;
      if (static_cast<int>(first_branches_.size()) < quorum)
        first_branches_.push_back(m.value);
      break;
    default:
      foreign_kind(m.kind);
  }
  return maybe_progress();
}

void CrashCC::encode(std::string& out) const {
  out += std::to_string(id_);
  out.push_back(':');
  out += std::to_string(input_);
  out.push_back(woken_ ? 'w' : '.');
  out.push_back(decided_ ? 'd' : '.');
  out += branch_ ? std::to_string(branch_->raw()) : std::string("n");
  out.push_back('|');
  encode_flags(out, seen_input_);
  encode_flags(out, seen_branch_);
  for (Value v : first_inputs_) out += std::to_string(v) + ",";
  out.push_back('|');
  for (BranchValue b : first_branches_) out += std::to_string(b.raw()) + ",";
  out.push_back('|');
}

BranchValue TrimCC::choose_branch() const {
  // Drop the f smallest and f largest of the first n-f values.
  std::vector<Value> w = first_inputs_;
  std::sort(w.begin(), w.end());
  const int lo = spec_.f, hi = static_cast<int>(w.size()) - spec_.f;
  if (lo >= hi) return BranchValue::bottom();
  for (int i = lo; i < hi; ++i)
    if (w[i] != w[lo]) return BranchValue::bottom();
  return BranchValue(w[lo]);
}

Vertex TrimCC::round2_decision() const {
  std::vector<int> count(spec_.value_count, 0);
  for (BranchValue b : first_branches_)
    if (!b.is_bottom()) ++count[b.value()];
  if (branch_->is_bottom()) {
    for (Value v = 0; v < spec_.value_count; ++v)
      if (count[v] >= spec_.f + 1) return branch_vertex(v, 1);
    return center_vertex();
  }
  for (Value v = 0; v < spec_.value_count; ++v)
    if (count[v] >= spec_.n - 2 * spec_.f) return branch_vertex(v, 2);
  return branch_vertex(branch_->value(), 1);
}

// ---------------------------------------------------------------------------
// EchoCC

EchoCC::EchoCC(const TaskSpec& spec, int id, Value input)
    : spec_(spec), id_(id), input_(input),
      approved_(spec.value_count + 1, 0),
      sent_echo_(spec.value_count + 1, 0),
      seen_echo_(static_cast<size_t>(spec.n) * (spec.value_count + 1), 0),
      seen_echo_i_(static_cast<size_t>(spec.n) * 4, 0) {
  spec_.validate();
  check_value(spec_, input);
  for (auto& a : num_echo_) a.assign(spec.value_count + 1, 0);
}

bool EchoCC::inert() const {
  if (!decided_) return false;
  for (char s : sent_echo_)
    if (!s) return false;
  if (!sent_echo_i_[0] || !sent_echo_i_[1]) return false;
  if (spec_.refinement == 2 && (!sent_echo_i_[2] || !sent_echo_i_[3]))
    return false;
  return true;
}

int EchoCC::sum(const std::vector<int>& a) const {
  int s = 0;
  for (int x : a) s += x;
  return s;
}

void EchoCC::run_guards(StepOutput& out) {
  const int n = spec_.n, f = spec_.f, vc = spec_.value_count;
  const int quorum = n - f;
  auto broadcast = [&](MsgKind k, BranchValue v) {
    out.broadcasts.push_back(Message{k, v, id_});
  };
  auto gate = [&] {  // shared precondition of the bot-flavored arms
    int approved_count = 0;
    for (char a : approved_) approved_count += a;
    return approved_count > 1 || approved_[vc];
  };
  bool progress = true;
  while (progress) {
    progress = false;
    // G1: amplify any value with f+1 echoes behind it.
    for (int s = 0; s <= vc; ++s) {
      if (num_echo_[0][s] >= f + 1 && !sent_echo_[s]) {
        sent_echo_[s] = 1;
        broadcast(MsgKind::Echo, unslot(s));
        progress = true;
      }
    }
    // G2: f+1 senders that never echoed the most common value witness two
    // correct inputs. Senders are counted once each, not once per value, so
    // a single equivocator spraying every value cannot fake the witness and
    // defeat validity on unanimous correct inputs.
    if (!sent_echo_[vc]) {
      int senders = 0;
      for (int q = 0; q < n; ++q) {
        const char* row = &seen_echo_[static_cast<size_t>(q) * (vc + 1)];
        for (int s = 0; s <= vc; ++s)
          if (row[s]) {
            ++senders;
            break;
          }
      }
      int top = *std::max_element(num_echo_[0].begin(), num_echo_[0].end());
      if (senders - top >= f + 1) {
        sent_echo_[vc] = 1;
        broadcast(MsgKind::Echo, BranchValue::bottom());
        progress = true;
      }
    }
    // G3: approve on n-f echoes; first approval carries the single ECHO2.
    for (int s = 0; s <= vc; ++s) {
      if (num_echo_[0][s] >= quorum && !approved_[s]) {
        approved_[s] = 1;
        if (!sent_echo_i_[0]) {
          sent_echo_i_[0] = true;
          broadcast(MsgKind::Echo2, unslot(s));
        }
        progress = true;
      }
    }
    // G4 / G5: the single ECHO3, for bot on a split approved set or for the
    // value behind n-f ECHO2s.
    if (!sent_echo_i_[1]) {
      int approved_count = 0;
      for (char a : approved_) approved_count += a;
      if (approved_count > 1) {
        sent_echo_i_[1] = true;
        broadcast(MsgKind::Echo3, BranchValue::bottom());
        progress = true;
      } else {
        for (int s = 0; s <= vc && !sent_echo_i_[1]; ++s) {
          if (num_echo_[1][s] >= quorum) {
            sent_echo_i_[1] = true;
            broadcast(MsgKind::Echo3, unslot(s));
            progress = true;
          }
        }
      }
    }
    // G6: level-3 completion; decides for R = 1, sends ECHO4 for R = 2.
    {
      std::optional<Vertex> level3;
      if (sum(num_echo_[2]) >= quorum && gate()) {
        level3 = center_vertex();
      } else {
        for (int s = 0; s < vc && !level3; ++s)
          if (num_echo_[2][s] >= quorum) level3 = branch_vertex(s, 1);
        if (!level3 && num_echo_[2][vc] >= quorum) level3 = center_vertex();
      }
      if (level3) {
        if (spec_.refinement == 1) {
          if (!decided_) {
            decided_ = true;
            decision_ = *level3;
            out.decision = decision_;
            progress = true;
          }
        } else if (!sent_echo_i_[2]) {
          sent_echo_i_[2] = true;
          broadcast(MsgKind::Echo4, level3->value);
          progress = true;
        }
      }
    }
    // G7: the single ECHO5; value arm first, then the bot arm.
    if (!sent_echo_i_[3]) {
      std::optional<BranchValue> e5;
      for (int s = 0; s <= vc && !e5; ++s)
        if (num_echo_[3][s] >= quorum) e5 = unslot(s);
      if (!e5 && sum(num_echo_[3]) >= quorum && gate())
        e5 = BranchValue::bottom();
      if (e5) {
        sent_echo_i_[3] = true;
        broadcast(MsgKind::Echo5, *e5);
        progress = true;
      }
    }
    // G8: R = 2 decision from ECHO5 (and ECHO4 support for the middle arm).
    if (spec_.refinement == 2 && !decided_) {
      std::optional<Vertex> dec;
      for (int s = 0; s < vc && !dec; ++s)
        if (num_echo_[4][s] >= quorum) dec = branch_vertex(s, 2);
      if (!dec && sum(num_echo_[4]) >= quorum && gate()) {
        for (int w = 0; w < vc && !dec; ++w)
          if (num_echo_[4][w] >= 1 && num_echo_[3][w] >= f + 1)
            dec = branch_vertex(w, 1);
      }
      if (!dec && num_echo_[4][vc] >= quorum) dec = center_vertex();
      if (dec) {
        decided_ = true;
        decision_ = *dec;
        out.decision = decision_;
        progress = true;
      }
    }
  }
}

StepOutput EchoCC::on_event(const Event& ev) {
  StepOutput out;
  if (std::holds_alternative<Wakeup>(ev)) {
    if (woken_) throw std::invalid_argument("second wakeup");
    woken_ = true;
    sent_echo_[input_] = 1;
    out.broadcasts.push_back(Message{MsgKind::Echo, BranchValue(input_), id_});
    return out;
  }
  const Message& m = std::get<Message>(ev);
  if (m.sender < 0 || m.sender >= spec_.n)
    throw std::invalid_argument("bad sender id");
  if (!m.value.is_bottom()) check_value(spec_, m.value.value());
  const int vc = spec_.value_count;
  const int s = slot(m.value);
  switch (m.kind) {
    case MsgKind::Echo: {
      size_t k = static_cast<size_t>(m.sender) * (vc + 1) + s;
      if (seen_echo_[k]) return out;  // duplicate, dropped
      seen_echo_[k] = 1;
      ++num_echo_[0][s];
      break;
    }
    case MsgKind::Echo2:
    case MsgKind::Echo3:
    case MsgKind::Echo4:
    case MsgKind::Echo5: {
      int level = static_cast<int>(m.kind) - static_cast<int>(MsgKind::Echo2);
      size_t k = static_cast<size_t>(m.sender) * 4 + level;
      if (seen_echo_i_[k]) return out;
      seen_echo_i_[k] = 1;
      ++num_echo_[level + 1][s];
      break;
    }
    default:
      foreign_kind(m.kind);
  }
  run_guards(out);
  return out;
}

void EchoCC::encode(std::string& out) const {
  out += std::to_string(id_);
  out.push_back(':');
  out += std::to_string(input_);
  out.push_back(woken_ ? 'w' : '.');
  out.push_back(decided_ ? 'd' : '.');
  if (decided_) out += to_string(decision_);
  encode_flags(out, approved_);
  for (const auto& a : num_echo_) encode_ints(out, a);
  encode_flags(out, sent_echo_);
  for (bool b : sent_echo_i_) out.push_back(b ? '1' : '0');
  out.push_back('|');
  encode_flags(out, seen_echo_);
  encode_flags(out, seen_echo_i_);
}

// ---------------------------------------------------------------------------
// One-round variants

OneRoundCrash::OneRoundCrash(const TaskSpec& spec, int id, Value input)
    : spec_(spec), id_(id), input_(input), seen_input_(spec.n, 0) {
  spec_.validate();
  check_value(spec_, input);
  if (spec.refinement != 2)
    throw std::invalid_argument("one-round algorithms are defined for R = 2");
}

Vertex OneRoundCrash::decide_from_inputs() const {
  std::vector<int> count(spec_.value_count, 0);
  for (Value v : first_inputs_) ++count[v];
  const int total = static_cast<int>(first_inputs_.size());
  for (Value v = 0; v < spec_.value_count; ++v) {
    if (count[v] == total) return branch_vertex(v, 2);
    if (count[v] >= spec_.n - 2 * spec_.f) return branch_vertex(v, 1);
  }
  return center_vertex();
}

Vertex OneRoundByz::decide_from_inputs() const {
  std::vector<Value> w = first_inputs_;
  std::sort(w.begin(), w.end());
  std::vector<int> count(spec_.value_count, 0);
  int total = 0;
  for (int i = spec_.f; i < static_cast<int>(w.size()) - spec_.f; ++i) {
    ++count[w[i]];
    ++total;
  }
  for (Value v = 0; v < spec_.value_count; ++v) {
    if (count[v] == total && total > 0) return branch_vertex(v, 2);
    if (count[v] >= spec_.n - 6 * spec_.f) return branch_vertex(v, 1);
  }
  return center_vertex();
}

StepOutput OneRoundCrash::on_event(const Event& ev) {
  if (std::holds_alternative<Wakeup>(ev)) {
    if (woken_) throw std::invalid_argument("second wakeup");
    woken_ = true;
    StepOutput out;
    out.broadcasts.push_back(Message{MsgKind::Input, BranchValue(input_), id_});
    return out;
  }
  const Message& m = std::get<Message>(ev);
  if (m.sender < 0 || m.sender >= spec_.n)
    throw std::invalid_argument("bad sender id");
  if (m.kind != MsgKind::Input) foreign_kind(m.kind);
  if (m.value.is_bottom())
    throw std::invalid_argument("INPUT cannot carry bot");
  check_value(spec_, m.value.value());
  if (decided_ || seen_input_[m.sender]) return {};
  seen_input_[m.sender] = 1;
  first_inputs_.push_back(m.value.value());
  StepOutput out;
  if (static_cast<int>(first_inputs_.size()) == spec_.n - spec_.f) {
    decided_ = true;
    decision_ = decide_from_inputs();
    out.decision = decision_;
  }
  return out;
}

void OneRoundCrash::encode(std::string& out) const {
  out += std::to_string(id_);
  out.push_back(':');
  out += std::to_string(input_);
  out.push_back(woken_ ? 'w' : '.');
  out.push_back(decided_ ? 'd' : '.');
  encode_flags(out, seen_input_);
  for (Value v : first_inputs_) out += std::to_string(v) + ",";
  out.push_back('|');
}

// ---------------------------------------------------------------------------

Machine make_machine(Protocol p, const TaskSpec& spec, int id, Value input) {
  switch (p) {
    case Protocol::crash_cc: return CrashCC(spec, id, input);
    case Protocol::trim_cc: return TrimCC(spec, id, input);
    case Protocol::echo_cc: return EchoCC(spec, id, input);
    case Protocol::oneround_crash: return OneRoundCrash(spec, id, input);
    case Protocol::oneround_byz: return OneRoundByz(spec, id, input);
  }
  throw std::logic_error("unknown protocol");
}

StepOutput step(Machine& m, const Event& ev) {
  return std::visit([&](auto& mm) { return mm.on_event(ev); }, m);
}

bool machine_decided(const Machine& m) {
  return std::visit([](const auto& mm) { return mm.decided(); }, m);
}

Vertex machine_decision(const Machine& m) {
  return std::visit([](const auto& mm) { return mm.decision(); }, m);
}

bool machine_inert(const Machine& m) {
  return std::visit([](const auto& mm) { return mm.inert(); }, m);
}

std::string machine_key(const Machine& m) {
  std::string out;
  out += std::to_string(m.index());
  out.push_back('#');
  std::visit([&](const auto& mm) { mm.encode(out); }, m);
  return out;
}

}  // namespace cc

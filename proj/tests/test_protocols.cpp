#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cc/protocol.hpp"

using namespace cc;

namespace {

TaskSpec make_spec(int values, int refinement, int n, int f,
                   FailureModel model) {
  TaskSpec s;
  s.value_count = values;
  s.refinement = refinement;
  s.centered = true;
  s.n = n;
  s.f = f;
  s.failure_model = model;
  return s;
}

Event input_msg(Value v, int sender) {
  return Message{MsgKind::Input, BranchValue(v), sender};
}
Event branch_msg(BranchValue v, int sender) {
  return Message{MsgKind::Branch, v, sender};
}
Event echo_msg(MsgKind kind, BranchValue v, int sender) {
  return Message{kind, v, sender};
}

}  // namespace

TEST_CASE("protocol metadata") {
  CHECK(min_processes(Protocol::crash_cc, 1) == 3);
  CHECK(min_processes(Protocol::trim_cc, 1) == 6);
  CHECK(min_processes(Protocol::echo_cc, 1) == 4);
  CHECK(min_processes(Protocol::oneround_crash, 2) == 9);
  CHECK(min_processes(Protocol::oneround_byz, 1) == 13);
  CHECK(input_based(Protocol::crash_cc));
  CHECK(input_based(Protocol::oneround_byz));
  CHECK_FALSE(input_based(Protocol::echo_cc));
  CHECK(protocol_from_name("trim_cc") == Protocol::trim_cc);
  CHECK_FALSE(protocol_from_name("nonsense").has_value());
  CHECK(kind_from_name("ECHO5") == MsgKind::Echo5);
}

TEST_CASE("crash_cc R=1: unanimous quorum decides the branch") {
  auto spec = make_spec(2, 1, 3, 1, FailureModel::crash);
  CrashCC m(spec, 0, 0);
  auto out = m.on_event(Wakeup{});
  REQUIRE(out.broadcasts.size() == 1);
  CHECK(out.broadcasts[0] == Message{MsgKind::Input, BranchValue(0), 0});

  CHECK_FALSE(m.on_event(input_msg(0, 0)).decision.has_value());
  auto fin = m.on_event(input_msg(0, 1));
  REQUIRE(fin.decision.has_value());
  CHECK(*fin.decision == branch_vertex(0, 1));
  CHECK(m.decided());
  CHECK(m.inert());
}

TEST_CASE("crash_cc R=1: mixed quorum decides the center") {
  auto spec = make_spec(2, 1, 3, 1, FailureModel::crash);
  CrashCC m(spec, 0, 0);
  m.on_event(Wakeup{});
  m.on_event(input_msg(0, 0));
  auto fin = m.on_event(input_msg(1, 2));
  REQUIRE(fin.decision.has_value());
  CHECK(*fin.decision == center_vertex());
}

TEST_CASE("crash_cc ignores duplicate messages from one sender") {
  auto spec = make_spec(2, 1, 3, 1, FailureModel::crash);
  CrashCC m(spec, 0, 0);
  m.on_event(Wakeup{});
  m.on_event(input_msg(0, 1));
  CHECK_FALSE(m.on_event(input_msg(0, 1)).decision.has_value());
  CHECK_FALSE(m.decided());
  auto fin = m.on_event(input_msg(0, 2));
  CHECK(fin.decision == branch_vertex(0, 1));
}

TEST_CASE("crash_cc R=2: bot branch adopts a seen branch value at grade 1") {
  auto spec = make_spec(2, 2, 5, 2, FailureModel::crash);
  CrashCC m(spec, 0, 0);
  m.on_event(Wakeup{});
  m.on_event(input_msg(0, 0));
  m.on_event(input_msg(0, 1));
  auto out = m.on_event(input_msg(1, 2));  // quorum 3 mixed -> branch bot
  REQUIRE(out.broadcasts.size() == 1);
  CHECK(out.broadcasts[0] == Message{MsgKind::Branch, BranchValue::bottom(), 0});
  m.on_event(branch_msg(BranchValue::bottom(), 0));
  m.on_event(branch_msg(BranchValue::bottom(), 1));
  auto fin = m.on_event(branch_msg(BranchValue(1), 3));
  REQUIRE(fin.decision.has_value());
  CHECK(*fin.decision == branch_vertex(1, 1));
}

TEST_CASE("crash_cc R=2: grade 2 on unanimous branches, grade 1 otherwise") {
  auto spec = make_spec(2, 2, 5, 2, FailureModel::crash);
  auto run_round2 = [&](std::vector<BranchValue> branches) {
    CrashCC m(spec, 0, 0);
    m.on_event(Wakeup{});
    for (int s = 0; s < 3; ++s) m.on_event(input_msg(0, s));  // branch = 0
    std::optional<Vertex> dec;
    int s = 0;
    for (BranchValue b : branches) {
      auto out = m.on_event(branch_msg(b, s++));
      if (out.decision) dec = out.decision;
    }
    return dec;
  };
  CHECK(run_round2({BranchValue(0), BranchValue(0), BranchValue(0)}) ==
        branch_vertex(0, 2));
  CHECK(run_round2({BranchValue(0), BranchValue::bottom(), BranchValue(0)}) ==
        branch_vertex(0, 1));
}

TEST_CASE("crash_cc rejects malformed events") {
  auto spec = make_spec(2, 1, 3, 1, FailureModel::crash);
  CHECK_THROWS(CrashCC(spec, 0, 5));  // input out of range
  CrashCC m(spec, 0, 0);
  m.on_event(Wakeup{});
  CHECK_THROWS(m.on_event(Wakeup{}));  // second wakeup
  CHECK_THROWS(m.on_event(input_msg(0, 7)));  // bad sender
  CHECK_THROWS(m.on_event(Message{MsgKind::Input, BranchValue::bottom(), 1}));
  CHECK_THROWS(m.on_event(echo_msg(MsgKind::Echo, BranchValue(0), 1)));
}

TEST_CASE("trim_cc R=1: trimmed multiset picks the branch") {
  auto spec = make_spec(8, 1, 6, 1, FailureModel::malicious);
  auto run = [&](std::vector<Value> inputs) {
    TrimCC m(spec, 0, inputs[0]);
    m.on_event(Wakeup{});
    std::optional<Vertex> dec;
    for (int s = 0; s < 5; ++s) {
      auto out = m.on_event(input_msg(inputs[s], s));
      if (out.decision) dec = out.decision;
    }
    REQUIRE(dec.has_value());
    return *dec;
  };
  // {0,0,0,1,1}: after dropping one min and one max, {0,0,1} is mixed.
  CHECK(run({0, 0, 0, 1, 1}) == center_vertex());
  // {2,2,2,2,7}: after trimming, {2,2,2} is unanimous.
  CHECK(run({2, 2, 2, 2, 7}) == branch_vertex(2, 1));
}

TEST_CASE("trim_cc R=2: f+1 branch echoes rescue a bot branch") {
  auto spec = make_spec(2, 2, 6, 1, FailureModel::malicious);
  TrimCC m(spec, 0, 0);
  m.on_event(Wakeup{});
  std::vector<Value> inputs = {0, 0, 0, 1, 1};
  for (int s = 0; s < 5; ++s) m.on_event(input_msg(inputs[s], s));
  // Branch is bot; two BRANCH(1) copies reach f+1 = 2.
  m.on_event(branch_msg(BranchValue::bottom(), 0));
  m.on_event(branch_msg(BranchValue::bottom(), 1));
  m.on_event(branch_msg(BranchValue::bottom(), 2));
  m.on_event(branch_msg(BranchValue(1), 3));
  auto fin = m.on_event(branch_msg(BranchValue(1), 4));
  REQUIRE(fin.decision.has_value());
  CHECK(*fin.decision == branch_vertex(1, 1));
}

TEST_CASE("trim_cc R=2: n-2f matching branches give grade 2") {
  auto spec = make_spec(2, 2, 6, 1, FailureModel::malicious);
  TrimCC m(spec, 0, 0);
  m.on_event(Wakeup{});
  for (int s = 0; s < 5; ++s) m.on_event(input_msg(0, s));  // branch 0
  std::optional<Vertex> dec;
  for (int s = 0; s < 5; ++s) {
    auto b = s < 4 ? BranchValue(0) : BranchValue::bottom();
    auto out = m.on_event(branch_msg(b, s));
    if (out.decision) dec = out.decision;
  }
  CHECK(dec == branch_vertex(0, 2));  // count(0) = 4 = n-2f
}

TEST_CASE("echo_cc amplifies a value echoed by f+1 processes") {
  auto spec = make_spec(2, 1, 4, 1, FailureModel::malicious);
  EchoCC m(spec, 0, 0);
  m.on_event(Wakeup{});
  CHECK(m.on_event(echo_msg(MsgKind::Echo, BranchValue(1), 1)).broadcasts.empty());
  auto out = m.on_event(echo_msg(MsgKind::Echo, BranchValue(1), 2));
  REQUIRE(out.broadcasts.size() == 1);
  CHECK(out.broadcasts[0] == Message{MsgKind::Echo, BranchValue(1), 0});
  CHECK(m.echo_sent(1));
}

TEST_CASE("echo_cc echoes bot once f+1 senders disagree with the majority") {
  auto spec = make_spec(3, 1, 4, 1, FailureModel::malicious);
  EchoCC m(spec, 0, 0);
  m.on_event(Wakeup{});
  m.on_event(echo_msg(MsgKind::Echo, BranchValue(0), 0));
  m.on_event(echo_msg(MsgKind::Echo, BranchValue(1), 1));
  // Counts {1,1,1}: sum - max = 2 >= f+1, so ECHO(bot) goes out.
  auto out = m.on_event(echo_msg(MsgKind::Echo, BranchValue(2), 2));
  bool sent_bot = false;
  for (const auto& b : out.broadcasts)
    if (b.kind == MsgKind::Echo && b.value.is_bottom()) sent_bot = true;
  CHECK(sent_bot);
}

TEST_CASE("echo_cc counts a spraying sender once toward the bot witness") {
  // Still {1,1,1} counts, but two of the echoes come from the same sender:
  // one equivocator must not fake evidence of two correct inputs.
  auto spec = make_spec(3, 1, 4, 1, FailureModel::malicious);
  EchoCC m(spec, 0, 0);
  m.on_event(Wakeup{});
  m.on_event(echo_msg(MsgKind::Echo, BranchValue(0), 0));
  m.on_event(echo_msg(MsgKind::Echo, BranchValue(1), 3));
  auto out = m.on_event(echo_msg(MsgKind::Echo, BranchValue(2), 3));
  for (const auto& b : out.broadcasts)
    CHECK(!(b.kind == MsgKind::Echo && b.value.is_bottom()));
  CHECK(!m.echo_sent(spec.value_count));
}

TEST_CASE("echo_cc R=1 full ladder on a unanimous value") {
  auto spec = make_spec(2, 1, 4, 1, FailureModel::malicious);
  EchoCC m(spec, 0, 0);
  m.on_event(Wakeup{});
  // Quorum of ECHO(0) approves 0 and emits ECHO2(0).
  m.on_event(echo_msg(MsgKind::Echo, BranchValue(0), 0));
  m.on_event(echo_msg(MsgKind::Echo, BranchValue(0), 1));
  auto out = m.on_event(echo_msg(MsgKind::Echo, BranchValue(0), 2));
  REQUIRE(out.broadcasts.size() == 1);
  CHECK(out.broadcasts[0] == Message{MsgKind::Echo2, BranchValue(0), 0});
  CHECK(m.is_approved(0));
  CHECK_FALSE(m.is_approved(1));
  // Quorum of ECHO2(0) emits ECHO3(0).
  m.on_event(echo_msg(MsgKind::Echo2, BranchValue(0), 0));
  m.on_event(echo_msg(MsgKind::Echo2, BranchValue(0), 1));
  out = m.on_event(echo_msg(MsgKind::Echo2, BranchValue(0), 2));
  REQUIRE(out.broadcasts.size() == 1);
  CHECK(out.broadcasts[0] == Message{MsgKind::Echo3, BranchValue(0), 0});
  // Quorum of ECHO3(0) decides (0,1) under R = 1.
  m.on_event(echo_msg(MsgKind::Echo3, BranchValue(0), 0));
  m.on_event(echo_msg(MsgKind::Echo3, BranchValue(0), 1));
  out = m.on_event(echo_msg(MsgKind::Echo3, BranchValue(0), 2));
  REQUIRE(out.decision.has_value());
  CHECK(*out.decision == branch_vertex(0, 1));
}

TEST_CASE("echo_cc R=2 decides (v,2) on a quorum of ECHO5(v)") {
  auto spec = make_spec(2, 2, 4, 1, FailureModel::malicious);
  EchoCC m(spec, 0, 0);
  m.on_event(Wakeup{});
  m.on_event(echo_msg(MsgKind::Echo5, BranchValue(1), 0));
  m.on_event(echo_msg(MsgKind::Echo5, BranchValue(1), 1));
  auto out = m.on_event(echo_msg(MsgKind::Echo5, BranchValue(1), 2));
  REQUIRE(out.decision.has_value());
  CHECK(*out.decision == branch_vertex(1, 2));
}

TEST_CASE("echo_cc counts each (sender, value) echo once") {
  auto spec = make_spec(2, 1, 4, 1, FailureModel::malicious);
  EchoCC m(spec, 0, 0);
  m.on_event(Wakeup{});
  m.on_event(echo_msg(MsgKind::Echo, BranchValue(1), 1));
  m.on_event(echo_msg(MsgKind::Echo, BranchValue(1), 1));
  CHECK(m.echo_count(0, 1) == 1);
  m.on_event(echo_msg(MsgKind::Echo2, BranchValue(1), 1));
  m.on_event(echo_msg(MsgKind::Echo2, BranchValue(0), 1));  // same level, dup
  CHECK(m.echo_count(1, 1) == 1);
  CHECK(m.echo_count(1, 0) == 0);
}

TEST_CASE("oneround_crash decision table") {
  auto spec = make_spec(4, 2, 9, 2, FailureModel::crash);
  auto run = [&](std::vector<Value> inputs) {
    OneRoundCrash m(spec, 0, inputs[0]);
    m.on_event(Wakeup{});
    std::optional<Vertex> dec;
    for (int s = 0; s < static_cast<int>(inputs.size()); ++s) {
      auto out = m.on_event(input_msg(inputs[s], s));
      if (out.decision) dec = out.decision;
    }
    REQUIRE(dec.has_value());
    return *dec;
  };
  CHECK(run({3, 3, 3, 3, 3, 3, 3}) == branch_vertex(3, 2));  // unanimous
  CHECK(run({0, 0, 0, 0, 0, 1, 1}) == branch_vertex(0, 1));  // 5 >= n-2f
  CHECK(run({0, 0, 0, 0, 1, 1, 1}) == center_vertex());      // 4 < n-2f
}

TEST_CASE("oneround_byz decision table") {
  auto spec = make_spec(10, 2, 14, 1, FailureModel::malicious);
  auto run = [&](std::vector<Value> inputs) {
    OneRoundByz m(spec, 0, inputs[0]);
    m.on_event(Wakeup{});
    std::optional<Vertex> dec;
    for (int s = 0; s < static_cast<int>(inputs.size()); ++s) {
      auto out = m.on_event(input_msg(inputs[s], s));
      if (out.decision) dec = out.decision;
    }
    REQUIRE(dec.has_value());
    return *dec;
  };
  CHECK(run(std::vector<Value>(13, 5)) == branch_vertex(5, 2));
  // 13 values {0 x9, 1 x3, 9}; trimming one from each end leaves
  // {0 x8, 1 x3}, and 8 >= n-6f = 8.
  std::vector<Value> mixed(9, 0);
  mixed.insert(mixed.end(), {1, 1, 1, 9});
  CHECK(run(mixed) == branch_vertex(0, 1));
  // {0 x7, 1 x6}: trimmed counts 6 and 5, both below 8.
  std::vector<Value> close(7, 0);
  close.insert(close.end(), 6, 1);
  CHECK(run(close) == center_vertex());
}

TEST_CASE("one-round machines require R = 2") {
  auto spec = make_spec(2, 1, 9, 2, FailureModel::crash);
  CHECK_THROWS(OneRoundCrash(spec, 0, 0));
}

TEST_CASE("machines are deterministic state functions of their event log") {
  auto spec = make_spec(2, 2, 5, 2, FailureModel::crash);
  CrashCC a(spec, 1, 1), b(spec, 1, 1);
  std::vector<Event> log = {Wakeup{}, input_msg(1, 0), input_msg(1, 2),
                            input_msg(0, 3), branch_msg(BranchValue(1), 0)};
  for (const auto& ev : log) {
    a.on_event(ev);
    b.on_event(ev);
  }
  CHECK(a == b);
  std::string ea, eb;
  a.encode(ea);
  b.encode(eb);
  CHECK(ea == eb);
}

TEST_CASE("decided machines absorb further events silently") {
  auto spec = make_spec(2, 1, 3, 1, FailureModel::crash);
  CrashCC m(spec, 0, 0);
  m.on_event(Wakeup{});
  m.on_event(input_msg(0, 0));
  m.on_event(input_msg(0, 1));
  REQUIRE(m.decided());
  auto out = m.on_event(input_msg(1, 2));
  CHECK(out.broadcasts.empty());
  CHECK_FALSE(out.decision.has_value());
  CHECK(m.decision() == branch_vertex(0, 1));
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cc/explore.hpp"

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

}  // namespace

TEST_CASE("crash_cc n=3 f=1: binding holds for every assignment and cut") {
  auto spec = make_spec(2, 1, 3, 1, FailureModel::crash);
  for (int bits = 0; bits < 8; ++bits) {
    std::vector<Value> inputs = {(bits >> 0) & 1, (bits >> 1) & 1,
                                 (bits >> 2) & 1};
    for (std::vector<int> faulty : {std::vector<int>{}, {0}, {1}, {2}}) {
      auto r = binding_explorer(spec, Protocol::crash_cc, inputs, faulty);
      int first_faulty = faulty.empty() ? -1 : faulty[0];
      CAPTURE(bits);
      CAPTURE(first_faulty);
      CHECK(r.passed());
      CHECK(r.states_visited > 0);
    }
  }
}

TEST_CASE("crash_cc with three distinct values can never leave the center") {
  auto spec = make_spec(3, 1, 3, 1, FailureModel::crash);
  auto r = binding_explorer(spec, Protocol::crash_cc, {0, 1, 2}, {1});
  CHECK(r.passed());
}

TEST_CASE("crash_cc R=2 explorer covers the branch round") {
  auto spec = make_spec(2, 2, 3, 1, FailureModel::crash);
  auto r = binding_explorer(spec, Protocol::crash_cc, {0, 0, 1}, {});
  CHECK(r.passed());
}

TEST_CASE("oneround_crash explorer certifies every small assignment") {
  auto spec = make_spec(2, 2, 3, 0, FailureModel::crash);
  for (int bits = 0; bits < 8; ++bits) {
    std::vector<Value> inputs = {(bits >> 0) & 1, (bits >> 1) & 1,
                                 (bits >> 2) & 1};
    auto r = binding_explorer(spec, Protocol::oneround_crash, inputs, {});
    CAPTURE(bits);
    CHECK(r.passed());
  }
}

TEST_CASE("echo_cc fault-free instances certify binding") {
  auto spec = make_spec(2, 1, 3, 0, FailureModel::malicious);
  CHECK(binding_explorer(spec, Protocol::echo_cc, {0, 0, 0}, {}).passed());
  CHECK(binding_explorer(spec, Protocol::echo_cc, {0, 0, 1}, {}).passed());
  CHECK(binding_explorer(spec, Protocol::echo_cc, {0, 1, 1}, {}).passed());
}

TEST_CASE("echo_cc with a malicious process certifies binding") {
  auto spec = make_spec(2, 1, 4, 1, FailureModel::malicious);
  auto r = binding_explorer(spec, Protocol::echo_cc, {0, 0, 0, 0}, {3});
  CHECK(r.passed());
}

TEST_CASE("a tiny state budget reports inconclusive, not a verdict") {
  auto spec = make_spec(2, 1, 3, 1, FailureModel::crash);
  auto r = binding_explorer(spec, Protocol::crash_cc, {0, 0, 1}, {2}, 3);
  CHECK(r.status == ExploreResult::Status::inconclusive);
  CHECK_FALSE(r.passed());
  CHECK(r.states_visited >= 3);
}

TEST_CASE("explorer validates its arguments") {
  auto spec = make_spec(2, 1, 3, 1, FailureModel::crash);
  CHECK_THROWS(binding_explorer(spec, Protocol::crash_cc, {0, 0}, {}));
}

TEST_CASE("explorer results are reproducible") {
  auto spec = make_spec(2, 1, 3, 1, FailureModel::crash);
  auto a = binding_explorer(spec, Protocol::crash_cc, {0, 1, 0}, {0});
  auto b = binding_explorer(spec, Protocol::crash_cc, {0, 1, 0}, {0});
  CHECK(a.status == b.status);
  CHECK(a.states_visited == b.states_visited);
}

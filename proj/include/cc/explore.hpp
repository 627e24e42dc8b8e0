#pragma once

#include <string>
#include <vector>

#include "cc/protocol.hpp"
#include "cc/types.hpp"

namespace cc {

struct ExploreResult {
  enum class Status { pass, fail, inconclusive };
  Status status = Status::pass;
  long states_visited = 0;
  std::string witness;

  bool passed() const { return status == Status::pass; }
};

/// Exhaustively explores delivery interleavings (and, under the malicious
/// model, every bounded faulty-message menu choice) for one input
/// assignment, and certifies Binding: in every execution prefix ending with
/// the first correct decision, the correct decisions reachable in all
/// extensions lie on a single branch.
///
/// Crash model: faulty processes run the protocol but each of their
/// point-to-point sends, and each delivery to them, may be omitted (a
/// superset of crash cuts, so a pass certificate still covers every crash
/// schedule). Malicious model: faulty processes send any message from
/// {all kinds} x (V u {bot}), at most one per (sender, kind, destination)
/// and per (sender, kind, value, destination) for ECHO.
///
/// Timing is ignored; Binding quantifies over extensions, not clocks.
/// Exceeding the state budget yields inconclusive, never pass.
ExploreResult binding_explorer(const TaskSpec& spec, Protocol protocol,
                               const std::vector<Value>& inputs,
                               const std::vector<int>& faulty,
                               long state_budget = 10'000'000);

}  // namespace cc

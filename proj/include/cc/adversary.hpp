#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "cc/simnet.hpp"

namespace cc {

/// Crash adversary: picks up to f processes to crash at seeded random cut
/// points (mid-broadcast subsets included) and draws i.i.d. delays from a
/// finite rational menu.
std::unique_ptr<Adversary> random_crash(
    std::uint64_t seed, double crash_prob,
    std::vector<SimTime> delay_menu = {SimTime(1, 4), SimTime(1, 2),
                                       SimTime(1)});

enum class ByzStrategy { silent, split, flood };

const char* strategy_name(ByzStrategy s);

/// Malicious adversary: the last f processes are faulty and behave per the
/// strategy (silent, equivocating value split, or full flood up to the
/// dedup limits). Correct-message delays are drawn from the menu.
std::unique_ptr<Adversary> byz_equivocator(
    std::uint64_t seed, ByzStrategy strategy,
    std::vector<SimTime> delay_menu = {SimTime(1, 2), SimTime(1)});

/// Scripted worst-case schedule for echo_cc at n = 3f+1, V = {0,1}:
/// the faulty set feeds ECHO(1) to one correct block just before time 2 and
/// to a single pivot just after, stretching the last correct decision to
/// 5 - epsilon (R = 1) or 7 - epsilon (R = 2). Requires f >= 2 and the input
/// assignment from worst_case_inputs(f).
std::unique_ptr<Adversary> worst_case_script(SimTime epsilon, int f);

/// Input assignment the scripted schedule is built for: all zeros except a
/// single 1 at process 2f, with n = 3f+1.
std::vector<Value> worst_case_inputs(int f);

/// Fixed-delay adversary with an optional silent faulty set; handy for
/// failure-free timing runs.
std::unique_ptr<Adversary> fixed_delay(SimTime delay = SimTime(1),
                                       std::vector<int> silent_faulty = {});

}  // namespace cc

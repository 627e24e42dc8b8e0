#include "cc/explore.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <optional>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace cc {

namespace {

struct Key {
  std::uint64_t a, b;
  friend bool operator==(const Key&, const Key&) = default;
};

struct KeyHash {
  size_t operator()(const Key& k) const { return k.a ^ (k.b * 0x9e3779b97f4a7c15ULL); }
};

Key fingerprint(const std::string& s) {
  std::uint64_t a = 0xcbf29ce484222325ULL, b = 0x84222325cbf29ce4ULL;
  for (unsigned char c : s) {
    a = (a ^ c) * 0x100000001b3ULL;
    b = (b ^ c) * 0x100000001b5ULL;
  }
  return Key{a, b};
}

struct budget_exhausted {};
struct violation_found {
  std::string witness;
};

// ---------------------------------------------------------------------------
// Interleaving explorer: used for the input-based protocols, whose machines
// have small multiset state. Explores every delivery order of in-flight
// point-to-point copies; under the crash model each copy touching a faulty
// process may additionally be dropped, and under the malicious model the
// faulty set may inject any unused menu option at any point.
// ---------------------------------------------------------------------------
struct InFlight {
  int dest;
  Message msg;
  friend auto operator<=>(const InFlight&, const InFlight&) = default;
};

struct MenuGroup {
  int sender;
  int dest;
  MsgKind kind;
  std::vector<BranchValue> values;
};

class InterleavingExplorer {
 public:
  InterleavingExplorer(const TaskSpec& spec, Protocol protocol,
                       const std::vector<Value>& inputs,
                       std::vector<int> faulty, long budget)
      : spec_(spec), protocol_(protocol), faulty_(std::move(faulty)),
        budget_(budget) {
    spec_.validate();
    std::sort(faulty_.begin(), faulty_.end());
    if (static_cast<int>(faulty_.size()) > spec_.f)
      throw std::invalid_argument("more than f faulty processes");
    malicious_ = spec_.failure_model == FailureModel::malicious;
    for (int p = 0; p < spec_.n; ++p) {
      if (malicious_ && is_faulty(p)) {
        machine_index_.push_back(-1);
      } else {
        machine_index_.push_back(static_cast<int>(initial_.size()));
        initial_.push_back(make_machine(protocol_, spec_, p, inputs[p]));
      }
    }
    if (malicious_) build_menu();
  }

  ExploreResult run() {
    // Wakeups commute (they only add broadcasts), so apply them up front.
    std::vector<Machine> machines = initial_;
    std::set<InFlight> inflight;
    for (int p = 0; p < spec_.n; ++p) {
      if (machine_index_[p] < 0) continue;
      StepOutput out = step(machines[machine_index_[p]], Wakeup{});
      enqueue(machines, inflight, out);
    }
    ExploreResult result;
    try {
      explore(machines, inflight, std::vector<char>(menu_.size(), 0));
      result.status = ExploreResult::Status::pass;
    } catch (const budget_exhausted&) {
      result.status = ExploreResult::Status::inconclusive;
      result.witness = "state budget exhausted";
    } catch (const violation_found& v) {
      result.status = ExploreResult::Status::fail;
      result.witness = v.witness;
    }
    result.states_visited = static_cast<long>(memo_.size());
    return result;
  }

 private:
  bool is_faulty(int p) const {
    return std::binary_search(faulty_.begin(), faulty_.end(), p);
  }

  bool droppable(const InFlight& item) const {
    // Crash model: sends by a faulty process may be cut, and deliveries to a
    // faulty process need not happen.
    return !malicious_ && (is_faulty(item.msg.sender) || is_faulty(item.dest));
  }

  void build_menu() {
    std::vector<BranchValue> all;
    for (Value v = 0; v < spec_.value_count; ++v) all.push_back(BranchValue(v));
    all.push_back(BranchValue::bottom());
    std::vector<BranchValue> values_only(all.begin(), all.end() - 1);
    for (int s : faulty_) {
      for (int d = 0; d < spec_.n; ++d) {
        if (machine_index_[d] < 0) continue;
        menu_.push_back(MenuGroup{s, d, MsgKind::Input, values_only});
        if (spec_.refinement == 2 &&
            (protocol_ == Protocol::crash_cc || protocol_ == Protocol::trim_cc))
          menu_.push_back(MenuGroup{s, d, MsgKind::Branch, all});
      }
    }
  }

  // Expands broadcasts into per-destination copies. Inert destinations
  // absorb deliveries without any observable effect, so their copies are
  // elided rather than left to multiply states.
  std::vector<InFlight> make_copies(const std::vector<Machine>& machines,
                                    const StepOutput& out) const {
    std::vector<InFlight> copies;
    for (const Message& m : out.broadcasts)
      for (int d = 0; d < spec_.n; ++d) {
        if (machine_index_[d] < 0) continue;
        if (machine_inert(machines[machine_index_[d]])) continue;
        copies.push_back(InFlight{d, m});
      }
    return copies;
  }

  void enqueue(const std::vector<Machine>& machines,
               std::set<InFlight>& inflight, const StepOutput& out) {
    for (const InFlight& c : make_copies(machines, out)) inflight.insert(c);
  }

  // Drops in-flight copies whose destination became inert after they were
  // sent; delivering them is a forced no-op, so the states are equivalent.
  void normalize(const std::vector<Machine>& machines,
                 std::set<InFlight>& inflight) const {
    for (auto it = inflight.begin(); it != inflight.end();) {
      if (machine_inert(machines[machine_index_[it->dest]]))
        it = inflight.erase(it);
      else
        ++it;
    }
  }

  std::string encode(const std::vector<Machine>& machines,
                     const std::set<InFlight>& inflight,
                     const std::vector<char>& menu_used) const {
    std::string s;
    for (const Machine& m : machines) s += machine_key(m);
    s.push_back('!');
    for (const InFlight& item : inflight) {
      s += std::to_string(item.dest);
      s.push_back(',');
      s += std::to_string(static_cast<int>(item.msg.kind));
      s.push_back(',');
      s += std::to_string(item.msg.value.raw());
      s.push_back(',');
      s += std::to_string(item.msg.sender);
      s.push_back(';');
    }
    s.push_back('!');
    for (size_t g = 0; g < menu_used.size(); ++g)
      s.push_back(menu_used[g] ||
                          machine_inert(machines[machine_index_[menu_[g].dest]])
                      ? '1'
                      : '0');
    return s;
  }

  std::uint32_t decided_mask(const std::vector<Machine>& machines, bool* any,
                             bool* all) const {
    std::uint32_t mask = 0;
    *any = false;
    *all = true;
    for (int p = 0; p < spec_.n; ++p) {
      int idx = machine_index_[p];
      if (idx < 0 || (!malicious_ && is_faulty(p))) continue;  // correct only
      const Machine& m = machines[idx];
      if (!machine_decided(m)) {
        *all = false;
        continue;
      }
      *any = true;
      Vertex d = machine_decision(m);
      if (!d.value.is_bottom()) mask |= 1u << d.value.value();
    }
    return mask;
  }

  std::uint32_t explore(const std::vector<Machine>& machines,
                        std::set<InFlight> inflight,
                        const std::vector<char>& menu_used) {
    normalize(machines, inflight);
    Key key = fingerprint(encode(machines, inflight, menu_used));
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    if (static_cast<long>(memo_.size()) >= budget_) throw budget_exhausted{};
    memo_.emplace(key, 0);  // reserve; cycles are impossible (resources shrink)

    bool any_decided = false;
    bool all_decided = true;
    std::uint32_t mask = decided_mask(machines, &any_decided, &all_decided);

    if (!all_decided) {
      // Any pending copy may be delivered next; the crash model may also
      // drop copies touching the faulty set, and the malicious model may
      // spend an unused menu option, delivered on the spot (delivering it
      // later is covered by spending it at that later state instead).
      for (auto it = inflight.begin(); it != inflight.end(); ++it) {
        {
          std::vector<Machine> next_m = machines;
          std::set<InFlight> next_f = inflight;
          next_f.erase(*it);
          StepOutput out = step(next_m[machine_index_[it->dest]], it->msg);
          enqueue(next_m, next_f, out);
          mask |= explore(next_m, std::move(next_f), menu_used);
        }
        if (droppable(*it)) {
          std::set<InFlight> next_f = inflight;
          next_f.erase(*it);
          mask |= explore(machines, std::move(next_f), menu_used);
        }
      }
      for (size_t g = 0; g < menu_.size(); ++g) {
        if (menu_used[g]) continue;
        if (machine_inert(machines[machine_index_[menu_[g].dest]])) continue;
        std::vector<char> next_u = menu_used;
        next_u[g] = 1;
        for (BranchValue v : menu_[g].values) {
          Message msg{menu_[g].kind, v, menu_[g].sender};
          std::vector<Machine> next_m = machines;
          std::set<InFlight> next_f = inflight;
          StepOutput out = step(next_m[machine_index_[menu_[g].dest]], msg);
          enqueue(next_m, next_f, out);
          mask |= explore(next_m, std::move(next_f), next_u);
        }
      }
    }
    // Once every correct process has decided the mask is final; decisions
    // are one-shot, so no extension changes it.

    if (any_decided && std::popcount(mask) > 1)
      throw violation_found{"multiple branches reachable after a decision; mask=" +
                            std::to_string(mask)};
    memo_[key] = mask;
    return mask;
  }

  TaskSpec spec_;
  Protocol protocol_;
  std::vector<int> faulty_;
  long budget_;
  bool malicious_ = false;
  std::vector<int> machine_index_;  // proc id -> machines index or -1
  std::vector<Machine> initial_;
  std::vector<MenuGroup> menu_;
  std::unordered_map<Key, std::uint32_t, KeyHash> memo_;
};

// ---------------------------------------------------------------------------
// Abstract explorer for the echo protocol. Exploring raw delivery orders is
// hopeless here (the interleaving space runs well past 10^7 states even for
// n = 4), but the machine is almost entirely multiset-determined:
//
//  * Receipt counters only ever grow, and every guard condition is a
//    monotone threshold on them, so whether a one-shot guard fires depends
//    only on the received multiset -- except for the one-shot *choices*
//    (the ECHO2 value, the ECHO3 value, the ECHO4/ECHO5 values, and the
//    decision), which are resolved by whichever threshold crosses first.
//  * Message identity is irrelevant: each correct sender emits a given
//    (kind, value) at most once and menu options are unique, so a
//    destination's receipt count for (kind, value) can be anything up to the
//    current number of senders that have emitted it ("supply").
//  * Counters at levels >= 1 are read only against fixed thresholds, so
//    sub-threshold values are unobservable: a machine sitting below a
//    threshold can absorb the copies needed to cross whenever the supply
//    allows. Only the crossings themselves are state.
//
// The abstract state per machine is therefore: exact level-0 counters capped
// at the quorum (capping is sound since every counter threshold is at most
// the quorum), per-slot threshold *tiers* for levels 1-4, per-level
// sum-threshold bits, the resolved one-shot choices, and the decision.
// Transitions advance one counter/tier/sum/menu item at a time, gated by
// current supply, then re-run the guard fixpoint.
//
// The one guard that is not a per-slot threshold is the two-inputs witness:
// a machine echoes bot once the number of *distinct senders* it has heard
// echoes from exceeds the most common echo value by f+1. Sender identities
// are not part of the counter abstraction, so each machine additionally
// carries a bot-echo flag (`bot`). While the witness is live, every level-0
// absorb branches on whether it fires: firing requires some per-sender
// receipt attribution of the counter vector (within which senders have
// emitted which values; faulty deliveries are recovered exactly from the
// spent menu entries) whose distinct-sender count crosses the threshold,
// and staying quiet requires one that does not. Attributions are checked
// per state rather than per delivery history, so the witness handling is a
// sound over-approximation: every real execution is covered (a `pass`
// verdict certifies binding), with slack only in which re-attributions are
// considered reachable. Once no future receipt pattern can fire the witness
// (possible senders minus the largest counter falls below f+1, or bot was
// sent), the branching stops. All other guards remain a bisimulation of the
// interleaving semantics restricted to what they can observe.
// ---------------------------------------------------------------------------
class EchoExplorer {
  static constexpr int kMaxSlots = 8;

  struct AbsMachine {
    int input = 0;
    std::array<int8_t, kMaxSlots> c0{};           // level-0 counts, capped
    std::array<std::array<int8_t, kMaxSlots>, 4> tier{};  // levels 1..4
    std::array<char, 4> sum{};                    // sum-threshold bits, levels 1..4
    std::array<int8_t, 4> one{-1, -1, -1, -1};    // ECHO2..ECHO5 chosen slot
    int8_t dec = -1;                              // slot, S-1 = center, -1 = none
    char bot = 0;     // ECHO(bot) emitted (amplified or two-inputs witness)
  };

  // One slot the faulty set may fill at most once; -1 = unused, else the
  // injected value slot.
  struct AbsGroup {
    int sender;       // faulty ordinal
    int dest;         // machine index
    int level;        // 0..4
    std::vector<int> values;
  };

 public:
  EchoExplorer(const TaskSpec& spec, const std::vector<Value>& inputs,
               std::vector<int> faulty, long budget)
      : spec_(spec), faulty_(std::move(faulty)), budget_(budget),
        S_(spec.value_count + 1), q_(spec.n - spec.f), f1_(spec.f + 1) {
    spec_.validate();
    if (spec_.failure_model != FailureModel::malicious)
      throw std::invalid_argument("echo explorer expects the malicious model");
    if (S_ > kMaxSlots) throw std::invalid_argument("too many values");
    std::sort(faulty_.begin(), faulty_.end());
    if (static_cast<int>(faulty_.size()) > spec_.f)
      throw std::invalid_argument("more than f faulty processes");
    for (int p = 0; p < spec_.n; ++p) {
      if (std::binary_search(faulty_.begin(), faulty_.end(), p)) continue;
      AbsMachine m;
      m.input = static_cast<int>(inputs[p]);
      ms_.push_back(m);
    }
    // Thresholds read from each level's counters (ascending): level 1 and 2
    // at the quorum; level 3 at f+1 (decision support) and the quorum;
    // level 4 at one (decision witness) and the quorum.
    thr_[0] = {q_};
    thr_[1] = {q_};
    thr_[2] = {f1_, q_};
    thr_[3] = {1, q_};
    const int top_level = spec_.refinement == 2 ? 4 : 2;
    std::vector<int> all_values;
    for (int s = 0; s < S_; ++s) all_values.push_back(s);
    for (size_t fi = 0; fi < faulty_.size(); ++fi) {
      for (size_t d = 0; d < ms_.size(); ++d) {
        for (int s = 0; s < S_; ++s)
          groups_.push_back(
              AbsGroup{static_cast<int>(fi), static_cast<int>(d), 0, {s}});
        for (int l = 1; l <= top_level; ++l)
          groups_.push_back(
              AbsGroup{static_cast<int>(fi), static_cast<int>(d), l, all_values});
      }
    }
    npot_ = static_cast<int>(ms_.size() + faulty_.size());
  }

  ExploreResult run() {
    ExploreResult result;
    try {
      explore(ms_, std::vector<int8_t>(groups_.size(), -1));
      result.status = ExploreResult::Status::pass;
    } catch (const budget_exhausted&) {
      result.status = ExploreResult::Status::inconclusive;
      result.witness = "state budget exhausted";
    } catch (const violation_found& v) {
      result.status = ExploreResult::Status::fail;
      result.witness = v.witness;
    }
    result.states_visited = static_cast<long>(memo_.size());
    return result;
  }

 private:
  // ---- derived per-machine predicates -------------------------------------
  int maxc0(const AbsMachine& m) const {
    int top = 0;
    for (int s = 0; s < S_; ++s) top = std::max<int>(top, m.c0[s]);
    return top;
  }

  // Whether the two-inputs witness can still fire: every future firing needs
  // distinct senders (at most npot_) to exceed the largest counter (which
  // never shrinks) by f+1. While dead, the sender count is unobservable.
  bool g2_active(const AbsMachine& m) const {
    return !m.bot && npot_ - maxc0(m) >= f1_;
  }

  bool sent0(const AbsMachine& m, int s) const {
    if (s == S_ - 1) return m.bot != 0;          // witness or amplified bot
    return s == m.input || m.c0[s] >= f1_;       // wakeup / amplification
  }

  // Distinct faulty senders with a delivered level-0 injection at `dest`.
  int faulty_rows(const std::vector<int8_t>& used, int dest) const {
    unsigned mask = 0;
    for (size_t g = 0; g < groups_.size(); ++g)
      if (used[g] >= 0 && groups_[g].level == 0 && groups_[g].dest == dest)
        mask |= 1u << groups_[g].sender;
    return std::popcount(mask);
  }

  // Correct-sender level-0 counts: receipts minus delivered injections.
  void correct_counts(const std::vector<int8_t>& used, int dest,
                      const AbsMachine& m, int* cc) const {
    for (int s = 0; s < S_; ++s) cc[s] = m.c0[s];
    for (size_t g = 0; g < groups_.size(); ++g)
      if (used[g] >= 0 && groups_[g].level == 0 && groups_[g].dest == dest)
        --cc[used[g]];
  }

  // Can some per-sender receipt assignment give the correct-sender counts
  // `cc` using exactly `rows` distinct correct senders, with each slot's
  // receipts drawn from machines that have emitted it?
  bool attrib_feasible(const std::vector<AbsMachine>& ms, const int* cc,
                       int rows) const {
    const int M = static_cast<int>(ms.size());
    auto rec = [&](auto&& self, int s, unsigned uni) -> bool {
      if (std::popcount(uni) > rows) return false;
      if (s == S_) return std::popcount(uni) == rows;
      unsigned em = 0;
      for (int j = 0; j < M; ++j)
        if (sent0(ms[j], s)) em |= 1u << j;
      if (std::popcount(em) < cc[s]) return false;
      if (cc[s] == 0) return self(self, s + 1, uni);
      for (unsigned sub = em;; sub = (sub - 1) & em) {
        if (std::popcount(sub) == cc[s] && self(self, s + 1, uni | sub))
          return true;
        if (sub == 0) break;
      }
      return false;
    };
    return rec(rec, 0, 0u);
  }

  // For a machine whose two-inputs witness is still live, decide which
  // resolutions the next level-0 receipt admits: an attribution whose
  // sender count stays below the firing threshold (`quiet`), and one that
  // crosses it (`fire`).
  void witness_branches(const std::vector<AbsMachine>& ms, const int* cc,
                        int frows, int maxcol, bool* quiet, bool* fire) const {
    *quiet = *fire = false;
    const int M = static_cast<int>(ms.size());
    const int threshold = f1_ + maxcol - frows;
    for (int r = 0; r <= M && !(*quiet && *fire); ++r) {
      if (!attrib_feasible(ms, cc, r)) continue;
      (r >= threshold ? *fire : *quiet) = true;
    }
  }

  bool approved(const AbsMachine& m, int s) const { return m.c0[s] >= q_; }

  int approved_count(const AbsMachine& m) const {
    int c = 0;
    for (int s = 0; s < S_; ++s) c += approved(m, s);
    return c;
  }

  bool gate(const AbsMachine& m) const {
    return approved_count(m) > 1 || approved(m, S_ - 1);
  }

  int nthr(int lvl) const { return static_cast<int>(thr_[lvl - 1].size()); }
  int tier_min(int lvl, int k) const { return k == 0 ? 0 : thr_[lvl - 1][k - 1]; }
  int tier_max(int lvl, int k) const {
    return k == nthr(lvl) ? q_ : thr_[lvl - 1][k] - 1;
  }
  bool crossed(const AbsMachine& m, int lvl, int s, int threshold) const {
    int k = m.tier[lvl - 1][s];
    return k > 0 && thr_[lvl - 1][k - 1] >= threshold;
  }

  // Which levels a machine still reads. Sound to freeze and mask a level
  // once nothing downstream of it can fire again.
  bool relevant(const AbsMachine& m, int lvl) const {
    const bool r2 = spec_.refinement == 2;
    switch (lvl) {
      case 0: {
        if (m.dec < 0 || m.one[0] < 0 || m.one[1] < 0) return true;
        if (r2 && (m.one[2] < 0 || m.one[3] < 0)) return true;
        for (int s = 0; s < S_; ++s)
          if (!sent0(m, s)) return true;  // could still add supply
        return false;
      }
      case 1: return m.one[1] < 0;
      case 2: return r2 ? m.one[2] < 0 : m.dec < 0;
      case 3: return r2 && (m.one[3] < 0 || m.dec < 0);
      case 4: return r2 && m.dec < 0;
      default: return false;
    }
  }

  bool inert(const AbsMachine& m) const { return !relevant(m, 0); }

  // ---- supply: how many distinct senders have emitted (level, slot) -------
  int supply(const std::vector<AbsMachine>& ms, const std::vector<int8_t>& used,
             int dest, int lvl, int s) const {
    int c = 0;
    for (const AbsMachine& m : ms)
      c += lvl == 0 ? sent0(m, s) : (m.one[lvl - 1] == s);
    for (size_t g = 0; g < groups_.size(); ++g)
      if (used[g] == s && groups_[g].dest == dest && groups_[g].level == lvl)
        ++c;
    return c;
  }

  // ---- guard fixpoint ------------------------------------------------------
  // The two-inputs witness is resolved by the absorb transitions; here only
  // its amplification arm (f+1 bot echoes) is derived.
  void fixpoint(AbsMachine& m) const {
    const bool r2 = spec_.refinement == 2;
    const int vc = S_ - 1;
    bool again = true;
    while (again) {
      again = false;
      if (!m.bot && m.c0[vc] >= f1_) {
        m.bot = 1;
        again = true;
      }
      // Approval carries the single ECHO2 (first slot to reach the quorum).
      if (m.one[0] < 0) {
        for (int s = 0; s < S_; ++s)
          if (approved(m, s)) {
            m.one[0] = static_cast<int8_t>(s);
            again = true;
            break;
          }
      }
      // The single ECHO3: bot on a split approved set, else the first
      // level-1 quorum.
      if (m.one[1] < 0) {
        if (approved_count(m) > 1) {
          m.one[1] = static_cast<int8_t>(vc);
          again = true;
        } else {
          for (int s = 0; s < S_; ++s)
            if (crossed(m, 1, s, q_)) {
              m.one[1] = static_cast<int8_t>(s);
              again = true;
              break;
            }
        }
      }
      // Level-3 completion: the R = 1 decision, or the single ECHO4.
      {
        int pick = -1;
        if (m.sum[1] && gate(m)) {
          pick = vc;
        } else {
          for (int s = 0; s < vc && pick < 0; ++s)
            if (crossed(m, 2, s, q_)) pick = s;
          if (pick < 0 && crossed(m, 2, vc, q_)) pick = vc;
        }
        if (pick >= 0) {
          if (!r2) {
            if (m.dec < 0) {
              m.dec = static_cast<int8_t>(pick);
              again = true;
            }
          } else if (m.one[2] < 0) {
            m.one[2] = static_cast<int8_t>(pick);
            again = true;
          }
        }
      }
      if (r2) {
        // The single ECHO5; value arm first, then the bot arm.
        if (m.one[3] < 0) {
          int pick = -1;
          for (int s = 0; s < S_ && pick < 0; ++s)
            if (crossed(m, 3, s, q_)) pick = s;
          if (pick < 0 && m.sum[2] && gate(m)) pick = vc;
          if (pick >= 0) {
            m.one[3] = static_cast<int8_t>(pick);
            again = true;
          }
        }
        // R = 2 decision from ECHO5 counts (with ECHO4 support in the
        // middle arm).
        if (m.dec < 0) {
          int pick = -1;
          for (int s = 0; s < vc && pick < 0; ++s)
            if (crossed(m, 4, s, q_)) pick = s;
          if (pick < 0 && m.sum[3] && gate(m)) {
            for (int w = 0; w < vc && pick < 0; ++w)
              if (crossed(m, 4, w, 1) && crossed(m, 3, w, f1_)) pick = w;
          }
          if (pick < 0 && crossed(m, 4, vc, q_)) pick = vc;
          if (pick >= 0) {
            m.dec = static_cast<int8_t>(pick);
            again = true;
          }
        }
      }
    }
  }

  // A tier advance can force the sum bit: once the tier floors alone reach
  // the quorum, every consistent concrete counter vector sums past it.
  void force_sum(AbsMachine& m, int lvl) const {
    if (m.sum[lvl - 1]) return;
    int floor_total = 0;
    for (int s = 0; s < S_; ++s) floor_total += tier_min(lvl, m.tier[lvl - 1][s]);
    if (floor_total >= q_) m.sum[lvl - 1] = 1;
  }

  // First unused menu option able to deliver (level, slot) to `dest`.
  int unused_group(const std::vector<int8_t>& used, int dest, int lvl,
                   int s) const {
    for (size_t g = 0; g < groups_.size(); ++g) {
      if (used[g] >= 0 || groups_[g].dest != dest || groups_[g].level != lvl)
        continue;
      if (std::find(groups_[g].values.begin(), groups_[g].values.end(), s) !=
          groups_[g].values.end())
        return static_cast<int>(g);
    }
    return -1;
  }

  // Whether one more injected copy of (level, slot) at `dest` could ever be
  // observed. Monotone in the state, so a useless option stays useless.
  bool useful(const std::vector<AbsMachine>& ms, int dest, int lvl, int s) const {
    const AbsMachine& m = ms[dest];
    if (!relevant(m, lvl)) return false;
    if (lvl == 0) return m.c0[s] < q_;
    return m.tier[lvl - 1][s] < nthr(lvl);
  }

  std::string encode(const std::vector<AbsMachine>& ms,
                     const std::vector<int8_t>& used) const {
    std::string out;
    for (const AbsMachine& m : ms) {
      if (inert(m)) {
        // Only its emissions (all sent) and choices remain observable.
        out.push_back('I');
      } else {
        for (int s = 0; s < S_; ++s) out.push_back(char('0' + m.c0[s]));
        out.push_back(m.bot ? 'B' : 'b');
        for (int l = 1; l <= 4; ++l) {
          if (!relevant(m, l)) {
            out.push_back('.');
            continue;
          }
          for (int s = 0; s < S_; ++s)
            out.push_back(char('0' + m.tier[l - 1][s]));
          out.push_back(m.sum[l - 1] ? '+' : '-');
        }
      }
      for (int i = 0; i < 4; ++i) out.push_back(char('a' + m.one[i] + 1));
      out.push_back(char('a' + m.dec + 1));
      out.push_back('|');
    }
    for (size_t g = 0; g < groups_.size(); ++g) {
      // Options that can never be observed again are all alike. A spent
      // level-0 option stays observable while its destination's two-inputs
      // witness is live: it pads the sender count and the counter split.
      if (used[g] >= 0)
        out.push_back(useful(ms, groups_[g].dest, groups_[g].level, used[g]) ||
                              (groups_[g].level == 0 &&
                               g2_active(ms[groups_[g].dest]))
                          ? char('a' + used[g])
                          : 'x');
      else {
        bool live = false;
        for (int v : groups_[g].values)
          live = live || useful(ms, groups_[g].dest, groups_[g].level, v);
        out.push_back(live ? '.' : 'x');
      }
    }
    return out;
  }

  std::uint32_t decided_mask(const std::vector<AbsMachine>& ms, bool* any,
                             bool* all) const {
    std::uint32_t mask = 0;
    *any = false;
    *all = true;
    for (const AbsMachine& m : ms) {
      if (m.dec < 0) {
        *all = false;
        continue;
      }
      *any = true;
      if (m.dec < S_ - 1) mask |= 1u << m.dec;
    }
    return mask;
  }

  // Over-approximates the branch values any machine could ever decide from
  // this state. Everything the guards read is monotone, so pushing every
  // counter to the most it could ever receive -- a fixpoint over potential
  // supplies, with unresolved one-shot choices widened to their whole
  // candidate sets -- bounds all futures. (Sum-minus-max is bounded by the
  // potential total minus the current maximum, since the maximum never
  // shrinks.)
  std::uint32_t potential(const std::vector<AbsMachine>& ms,
                          const std::vector<int8_t>& used) const {
    const int M = static_cast<int>(ms.size());
    const int vc = S_ - 1;
    const bool r2 = spec_.refinement == 2;
    auto avail = [&](int d, int l, int s) {
      int c = 0;
      for (size_t g = 0; g < groups_.size(); ++g) {
        if (groups_[g].dest != d || groups_[g].level != l) continue;
        if (used[g] == s)
          ++c;
        else if (used[g] < 0 &&
                 std::find(groups_[g].values.begin(), groups_[g].values.end(),
                           s) != groups_[g].values.end())
          ++c;
      }
      return c;
    };
    std::vector<std::array<int, kMaxSlots>> pc0(M);
    for (int i = 0; i < M; ++i)
      for (int s = 0; s < S_; ++s) pc0[i][s] = ms[i].c0[s];
    auto psent0 = [&](int i, int s) {
      if (s == vc)
        return ms[i].bot != 0 || pc0[i][s] >= f1_ || g2_active(ms[i]);
      return s == ms[i].input || pc0[i][s] >= f1_;
    };
    for (bool changed = true; changed;) {
      changed = false;
      for (int i = 0; i < M; ++i)
        for (int s = 0; s < S_; ++s) {
          int sup = avail(i, 0, s);
          for (int j = 0; j < M; ++j) sup += psent0(j, s);
          int v = std::max(pc0[i][s], std::min(sup, q_));
          if (v != pc0[i][s]) {
            pc0[i][s] = v;
            changed = true;
          }
        }
    }
    auto papproved = [&](int i, int s) { return pc0[i][s] >= q_; };
    std::vector<char> pgate(M);
    for (int i = 0; i < M; ++i) {
      int c = 0;
      for (int s = 0; s < S_; ++s) c += papproved(i, s);
      pgate[i] = c > 1 || papproved(i, vc);
    }
    // One-shot choice sets and threshold predicates, layer by layer.
    auto widen = [&](int i, int lvl, auto&& candidates) -> std::uint32_t {
      if (ms[i].one[lvl] >= 0) return 1u << ms[i].one[lvl];
      return candidates();
    };
    std::vector<std::uint32_t> pone1(M);
    for (int i = 0; i < M; ++i)
      pone1[i] = widen(i, 0, [&] {
        std::uint32_t b = 0;
        for (int s = 0; s < S_; ++s)
          if (papproved(i, s)) b |= 1u << s;
        return b;
      });
    auto layer_sup = [&](const std::vector<std::uint32_t>& pone, int lvl,
                         int i, int s) {
      int sup = avail(i, lvl, s);
      for (int j = 0; j < M; ++j) sup += (pone[j] >> s) & 1;
      return sup;
    };
    auto pcross = [&](const std::vector<std::uint32_t>& pone, int lvl, int i,
                      int s, int t) {
      return crossed(ms[i], lvl, s, t) || layer_sup(pone, lvl, i, s) >= t;
    };
    auto psum = [&](const std::vector<std::uint32_t>& pone, int lvl, int i) {
      if (ms[i].sum[lvl - 1]) return true;
      int ceiling = 0;
      for (int s = 0; s < S_; ++s)
        ceiling += std::min(q_, layer_sup(pone, lvl, i, s));
      return ceiling >= q_;
    };
    std::vector<std::uint32_t> pone2(M);
    for (int i = 0; i < M; ++i)
      pone2[i] = widen(i, 1, [&] {
        int c = 0;
        for (int s = 0; s < S_; ++s) c += papproved(i, s);
        std::uint32_t b = c > 1 ? 1u << vc : 0;
        for (int s = 0; s < S_; ++s)
          if (pcross(pone1, 1, i, s, q_)) b |= 1u << s;
        return b;
      });
    std::uint32_t branches = 0;
    if (!r2) {
      for (int i = 0; i < M; ++i) {
        if (ms[i].dec >= 0) {
          if (ms[i].dec < vc) branches |= 1u << ms[i].dec;
          continue;
        }
        for (int s = 0; s < vc; ++s)
          if (pcross(pone2, 2, i, s, q_)) branches |= 1u << s;
      }
      return branches;
    }
    std::vector<std::uint32_t> pone3(M), pone4(M);
    for (int i = 0; i < M; ++i)
      pone3[i] = widen(i, 2, [&] {
        std::uint32_t b = psum(pone2, 2, i) && pgate[i] ? 1u << vc : 0;
        for (int s = 0; s < S_; ++s)
          if (pcross(pone2, 2, i, s, q_)) b |= 1u << s;
        return b;
      });
    for (int i = 0; i < M; ++i)
      pone4[i] = widen(i, 3, [&] {
        std::uint32_t b = psum(pone3, 3, i) && pgate[i] ? 1u << vc : 0;
        for (int s = 0; s < S_; ++s)
          if (pcross(pone3, 3, i, s, q_)) b |= 1u << s;
        return b;
      });
    for (int i = 0; i < M; ++i) {
      if (ms[i].dec >= 0) {
        if (ms[i].dec < vc) branches |= 1u << ms[i].dec;
        continue;
      }
      for (int s = 0; s < vc; ++s)
        if (pcross(pone4, 4, i, s, q_)) branches |= 1u << s;
      if (psum(pone4, 4, i) && pgate[i])
        for (int w = 0; w < vc; ++w)
          if (pcross(pone4, 4, i, w, 1) && pcross(pone3, 3, i, w, f1_))
            branches |= 1u << w;
    }
    return branches;
  }

  std::uint32_t explore(const std::vector<AbsMachine>& ms,
                        const std::vector<int8_t>& used) {
    Key key = fingerprint(encode(ms, used));
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    if (static_cast<long>(memo_.size()) >= budget_) throw budget_exhausted{};
    memo_.emplace(key, 0);  // reserve; the state lattice is a DAG

    bool any_decided = false;
    bool all_decided = true;
    std::uint32_t mask = decided_mask(ms, &any_decided, &all_decided);

    // No extension can decide a branch outside the potential set; if that
    // leaves at most one branch (or, once someone decided, nothing beyond
    // the already-decided branches), the subtree cannot add a violation.
    bool prune = false;
    if (!all_decided) {
      std::uint32_t pot = potential(ms, used);
      prune = any_decided ? (pot | mask) == mask
                          : std::popcount(pot | mask) <= 1;
    }

    if (!all_decided && !prune) {
      // Menu options are spent only at the advance whose feasibility check
      // needs them: supply is read nowhere else, so injecting earlier and
      // letting the copy sit unabsorbed reaches no additional behavior, and
      // fusing the injection with its consumption keeps "pending supply"
      // out of the state. (One option closes a gap of one; f = 1 in every
      // explorable echo instance, so larger gaps cannot arise.)
      const int M = static_cast<int>(ms_.size());
      for (int i = 0; i < M; ++i) {
        const AbsMachine& m = ms[i];
        const int frows = faulty_rows(used, i);
        const bool active = g2_active(m);
        // Absorb one more level-0 echo into a live counter.
        for (int s = 0; s < S_; ++s) {
          if (m.c0[s] >= q_ || !relevant(m, 0)) continue;
          int sup = supply(ms, used, i, 0, s);
          if (m.c0[s] < sup) {
            // A correct sender's copy; while the witness is live, branch on
            // whether the crossing it may cause happens.
            bool quiet = true, fire = false;
            if (active) {
              int cc[kMaxSlots];
              correct_counts(used, i, m, cc);
              ++cc[s];
              witness_branches(ms, cc, frows,
                               std::max(maxc0(m), m.c0[s] + 1), &quiet, &fire);
            }
            for (int b = 0; b <= 1; ++b) {
              if (!(b ? fire : quiet)) continue;
              std::vector<AbsMachine> next = ms;
              next[i].c0[s]++;
              if (b) next[i].bot = 1;
              fixpoint(next[i]);
              mask |= explore(next, used);
            }
          } else if (int g = unused_group(used, i, 0, s); g >= 0) {
            // A faulty injection: the counter and the spent-entry split move
            // together, but the added faulty row may itself fire the witness.
            std::vector<int8_t> next_u = used;
            next_u[g] = static_cast<int8_t>(s);
            bool quiet = true, fire = false;
            if (active) {
              int cc[kMaxSlots];
              correct_counts(used, i, m, cc);
              witness_branches(ms, cc, faulty_rows(next_u, i),
                               std::max(maxc0(m), m.c0[s] + 1), &quiet, &fire);
            }
            for (int b = 0; b <= 1; ++b) {
              if (!(b ? fire : quiet)) continue;
              std::vector<AbsMachine> next = ms;
              next[i].c0[s]++;
              if (b) next[i].bot = 1;
              fixpoint(next[i]);
              mask |= explore(next, next_u);
            }
          }
        }
        // Cross the next threshold of a higher-level counter.
        for (int l = 1; l <= 4; ++l) {
          if (!relevant(m, l)) continue;
          for (int s = 0; s < S_; ++s) {
            int k = m.tier[l - 1][s];
            if (k >= nthr(l)) continue;
            int sup = supply(ms, used, i, l, s);
            int g = -1;
            if (sup < thr_[l - 1][k]) {
              if (sup + 1 < thr_[l - 1][k]) continue;
              g = unused_group(used, i, l, s);
              if (g < 0) continue;
            }
            std::vector<AbsMachine> next = ms;
            std::vector<int8_t> next_u = used;
            if (g >= 0) next_u[g] = static_cast<int8_t>(s);
            next[i].tier[l - 1][s]++;
            force_sum(next[i], l);
            fixpoint(next[i]);
            mask |= explore(next, next_u);
          }
          // Reach the sum threshold without any single slot crossing: the
          // spread ceiling (tier ceilings capped by supply) must cover it.
          if (!m.sum[l - 1]) {
            int ceiling = 0;
            for (int s = 0; s < S_; ++s)
              ceiling += std::min(tier_max(l, m.tier[l - 1][s]),
                                  supply(ms, used, i, l, s));
            if (ceiling >= q_) {
              std::vector<AbsMachine> next = ms;
              next[i].sum[l - 1] = 1;
              fixpoint(next[i]);
              mask |= explore(next, used);
            } else if (ceiling + 1 >= q_) {
              for (int s = 0; s < S_; ++s) {
                int sup = supply(ms, used, i, l, s);
                if (sup >= tier_max(l, m.tier[l - 1][s])) continue;
                int g = unused_group(used, i, l, s);
                if (g < 0) continue;
                std::vector<AbsMachine> next = ms;
                std::vector<int8_t> next_u = used;
                next_u[g] = static_cast<int8_t>(s);
                next[i].sum[l - 1] = 1;
                fixpoint(next[i]);
                mask |= explore(next, next_u);
              }
            }
          }
        }
      }
    }

    if (any_decided && std::popcount(mask) > 1)
      throw violation_found{"multiple branches reachable after a decision; mask=" +
                            std::to_string(mask)};
    memo_[key] = mask;
    return mask;
  }

  TaskSpec spec_;
  std::vector<int> faulty_;
  long budget_;
  int S_, q_, f1_, npot_ = 0;
  std::array<std::vector<int>, 4> thr_;
  std::vector<AbsMachine> ms_;
  std::vector<AbsGroup> groups_;
  std::unordered_map<Key, std::uint32_t, KeyHash> memo_;
};

}  // namespace

ExploreResult binding_explorer(const TaskSpec& spec, Protocol protocol,
                               const std::vector<Value>& inputs,
                               const std::vector<int>& faulty,
                               long state_budget) {
  if (static_cast<int>(inputs.size()) != spec.n)
    throw std::invalid_argument("inputs size must equal n");
  if (protocol == Protocol::echo_cc)
    return EchoExplorer(spec, inputs, faulty, state_budget).run();
  return InterleavingExplorer(spec, protocol, inputs, faulty, state_budget).run();
}

}  // namespace cc

#include "cc/adversary.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace cc {

const char* strategy_name(ByzStrategy s) {
  switch (s) {
    case ByzStrategy::silent: return "silent";
    case ByzStrategy::split: return "split";
    case ByzStrategy::flood: return "flood";
  }
  return "?";
}

namespace {

class RandomCrash : public Adversary {
 public:
  RandomCrash(std::uint64_t seed, double crash_prob,
              std::vector<SimTime> menu)
      : seed_(seed), crash_prob_(crash_prob), menu_(std::move(menu)) {
    if (menu_.empty()) throw std::invalid_argument("empty delay menu");
  }

  void begin(const TaskSpec& spec, Protocol protocol,
             const std::vector<Value>& inputs) override {
    (void)inputs;
    if (spec.failure_model != FailureModel::crash)
      throw std::invalid_argument("random_crash needs the crash model");
    rng_.seed(seed_);
    faulty_.clear();
    cuts_.assign(spec.n, -1);
    std::vector<int> ids(spec.n);
    for (int i = 0; i < spec.n; ++i) ids[i] = i;
    std::shuffle(ids.begin(), ids.end(), rng_);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    // Total sends a process can ever make: one broadcast per sent-flag.
    long max_sends =
        static_cast<long>(protocol == Protocol::echo_cc ? spec.value_count + 5
                                                        : spec.refinement) *
        spec.n;
    for (int i = 0; i < spec.f; ++i) {
      if (coin(rng_) >= crash_prob_) continue;
      int p = ids[i];
      faulty_.push_back(p);
      cuts_[p] =
          std::uniform_int_distribution<long>(0, max_sends)(rng_);
    }
  }

  const std::vector<int>& faulty() const override { return faulty_; }

  SimTime delay(const Message&, int, SimTime) override {
    return menu_[std::uniform_int_distribution<size_t>(0, menu_.size() - 1)(
        rng_)];
  }

  bool crash_drop(int sender, long send_ordinal) override {
    return cuts_[sender] >= 0 && send_ordinal >= cuts_[sender];
  }

 private:
  std::uint64_t seed_;
  double crash_prob_;
  std::vector<SimTime> menu_;
  std::mt19937_64 rng_;
  std::vector<int> faulty_;
  std::vector<long> cuts_;
};

class ByzEquivocator : public Adversary {
 public:
  ByzEquivocator(std::uint64_t seed, ByzStrategy strategy,
                 std::vector<SimTime> menu)
      : seed_(seed), strategy_(strategy), menu_(std::move(menu)) {
    if (menu_.empty()) throw std::invalid_argument("empty delay menu");
  }

  void begin(const TaskSpec& spec, Protocol protocol,
             const std::vector<Value>& inputs) override {
    (void)inputs;
    if (spec.failure_model != FailureModel::malicious)
      throw std::invalid_argument("byz_equivocator needs the malicious model");
    rng_.seed(seed_);
    spec_ = spec;
    protocol_ = protocol;
    faulty_.clear();
    for (int p = spec.n - spec.f; p < spec.n; ++p) faulty_.push_back(p);
  }

  const std::vector<int>& faulty() const override { return faulty_; }

  SimTime delay(const Message&, int, SimTime) override { return draw(); }

  std::vector<Injection> injections() override {
    std::vector<Injection> out;
    if (strategy_ == ByzStrategy::silent) return out;
    const int vc = spec_.value_count;
    auto add = [&](int sender, int dest, MsgKind kind, BranchValue v) {
      SimTime dt = draw();
      out.push_back(Injection{Message{kind, v, sender}, dest, SimTime(0), dt});
    };
    std::vector<int> correct;
    for (int p = 0; p < spec_.n; ++p)
      if (!std::binary_search(faulty_.begin(), faulty_.end(), p))
        correct.push_back(p);
    const Value lo = 0, hi = vc - 1;
    for (int sender : faulty_) {
      if (strategy_ == ByzStrategy::split) {
        // Half the correct set sees one value, half the other, per level.
        for (size_t i = 0; i < correct.size(); ++i) {
          BranchValue v((i < correct.size() / 2) ? lo : hi);
          if (input_based(protocol_)) {
            add(sender, correct[i], MsgKind::Input, v);
            if (protocol_ == Protocol::crash_cc || protocol_ == Protocol::trim_cc)
              if (spec_.refinement == 2)
                add(sender, correct[i], MsgKind::Branch, v);
          } else {
            add(sender, correct[i], MsgKind::Echo, v);
            add(sender, correct[i], MsgKind::Echo2, v);
            add(sender, correct[i], MsgKind::Echo3, v);
          }
        }
      } else {  // flood: everything the dedup ledger admits
        for (size_t i = 0; i < correct.size(); ++i) {
          int dest = correct[i];
          if (input_based(protocol_)) {
            add(sender, dest, MsgKind::Input,
                BranchValue(static_cast<Value>((sender + i) % vc)));
            if ((protocol_ == Protocol::crash_cc ||
                 protocol_ == Protocol::trim_cc) &&
                spec_.refinement == 2) {
              int r = static_cast<int>((sender + i) % (vc + 1));
              add(sender, dest, MsgKind::Branch,
                  r == vc ? BranchValue::bottom() : BranchValue(r));
            }
          } else {
            for (Value v = 0; v < vc; ++v)
              add(sender, dest, MsgKind::Echo, BranchValue(v));
            add(sender, dest, MsgKind::Echo, BranchValue::bottom());
            for (MsgKind k : {MsgKind::Echo2, MsgKind::Echo3, MsgKind::Echo4,
                              MsgKind::Echo5}) {
              int r = static_cast<int>((sender + i + static_cast<int>(k)) %
                                       (vc + 1));
              add(sender, dest, k,
                  r == vc ? BranchValue::bottom() : BranchValue(r));
            }
          }
        }
      }
    }
    return out;
  }

 private:
  SimTime draw() {
    return menu_[std::uniform_int_distribution<size_t>(0, menu_.size() - 1)(
        rng_)];
  }

  std::uint64_t seed_;
  ByzStrategy strategy_;
  std::vector<SimTime> menu_;
  std::mt19937_64 rng_;
  TaskSpec spec_;
  Protocol protocol_ = Protocol::crash_cc;
  std::vector<int> faulty_;
};

// Partition for the scripted schedule: A = [0, f-1), pivot = f-1,
// B = [f, 2f), straggler = 2f, faulty = [2f+1, 3f].
class WorstCaseScript : public Adversary {
 public:
  WorstCaseScript(SimTime epsilon, int f) : eps_(epsilon), f_(f) {
    if (f < 2) throw std::invalid_argument("schedule needs f >= 2");
    if (eps_ <= SimTime(0) || eps_ >= SimTime(1))
      throw std::invalid_argument("epsilon must be in (0,1)");
  }

  void begin(const TaskSpec& spec, Protocol protocol,
             const std::vector<Value>& inputs) override {
    if (protocol != Protocol::echo_cc)
      throw std::invalid_argument("schedule targets echo_cc");
    if (spec.n != 3 * f_ + 1 || spec.f != f_)
      throw std::invalid_argument("schedule needs n = 3f+1");
    if (spec.value_count != 2)
      throw std::invalid_argument("schedule needs V = {0,1}");
    if (inputs != worst_case_inputs(f_))
      throw std::invalid_argument("schedule needs the worst_case_inputs assignment");
    faulty_.clear();
    for (int p = 2 * f_ + 1; p <= 3 * f_; ++p) faulty_.push_back(p);
  }

  const std::vector<int>& faulty() const override { return faulty_; }

  SimTime delay(const Message& m, int dest, SimTime) override {
    bool echo_one = m.kind == MsgKind::Echo && !m.value.is_bottom() &&
                    m.value.value() == 1;
    bool sender_in_b = m.sender >= f_ && m.sender < 2 * f_;
    if (echo_one && sender_in_b)  // B's amplification wave
      return dest == f_ - 1 ? eps_ / 2 : SimTime(1);
    if (echo_one && m.sender == f_ - 1)  // pivot's amplification
      return SimTime(1) - eps_ / 2;
    return SimTime(1);
  }

  std::vector<Injection> injections() override {
    std::vector<Injection> out;
    const int pivot = f_ - 1;
    for (int s : faulty_) {
      Message m{MsgKind::Echo, BranchValue(1), s};
      for (int b = f_; b < 2 * f_; ++b)
        out.push_back(Injection{m, b, SimTime(1), SimTime(2) - eps_});
      out.push_back(Injection{m, pivot, SimTime(1), SimTime(2) - eps_ / 4});
    }
    return out;
  }

 private:
  SimTime eps_;
  int f_;
  std::vector<int> faulty_;
};

class FixedDelay : public Adversary {
 public:
  FixedDelay(SimTime d, std::vector<int> silent) : delay_(d), faulty_(std::move(silent)) {
    std::sort(faulty_.begin(), faulty_.end());
  }
  void begin(const TaskSpec&, Protocol, const std::vector<Value>&) override {}
  const std::vector<int>& faulty() const override { return faulty_; }
  SimTime delay(const Message&, int, SimTime) override { return delay_; }
  bool crash_drop(int, long) override { return true; }  // silent from time 0

 private:
  SimTime delay_;
  std::vector<int> faulty_;
};

}  // namespace

std::unique_ptr<Adversary> random_crash(std::uint64_t seed, double crash_prob,
                                        std::vector<SimTime> delay_menu) {
  return std::make_unique<RandomCrash>(seed, crash_prob, std::move(delay_menu));
}

std::unique_ptr<Adversary> byz_equivocator(std::uint64_t seed,
                                           ByzStrategy strategy,
                                           std::vector<SimTime> delay_menu) {
  return std::make_unique<ByzEquivocator>(seed, strategy,
                                          std::move(delay_menu));
}

std::unique_ptr<Adversary> worst_case_script(SimTime epsilon, int f) {
  return std::make_unique<WorstCaseScript>(epsilon, f);
}

std::vector<Value> worst_case_inputs(int f) {
  std::vector<Value> in(3 * f + 1, 0);
  in[2 * f] = 1;
  return in;
}

std::unique_ptr<Adversary> fixed_delay(SimTime delay,
                                       std::vector<int> silent_faulty) {
  return std::make_unique<FixedDelay>(delay, std::move(silent_faulty));
}

}  // namespace cc

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "ska/bitstring.hpp"
#include "ska/schedule.hpp"
#include "ska/vm.hpp"

namespace ska {

class no_program : public std::runtime_error {
public:
  no_program() : std::runtime_error("min_program: no program within L_max produces the target") {}
};

struct ComplexityResult {
  enum class Status { Finite, Infinite };
  Status status = Status::Infinite;
  int value = -1;  // witness length when Finite
  std::optional<Program> witness;
  int level = 0;
  std::string condition_digest;

  bool finite() const { return status == Status::Finite; }
};

struct OracleOptions {
  int n_max = 12;              // desk-scale cap on |x| for complexity queries
  uint64_t step_budget = ~0ull;  // total VM steps across the oracle's lifetime
  bool verify_witnesses = false; // re-execute every witness (test mode)
};

// Exhaustive-search oracle for space-bounded complexity on the pinned VM.
// For each (condition, space) pair the oracle enumerates programs in canonical
// order, length by length, recording the first program that produces each
// output; queries then read off exact minima. Results are memoized; Infinite
// and a truncated search are never conflated (the latter throws).
class Oracle {
public:
  explicit Oracle(SpaceSchedule schedule, OracleOptions opts = {})
      : schedule_(schedule), opts_(opts) {
    schedule_.validate();
  }

  const SpaceSchedule& schedule() const { return schedule_; }
  uint64_t steps_spent() const { return steps_spent_; }

  static int default_l_max(size_t n) { return int(n) + c_literal + 2; }

  ComplexityResult complexity(const BitString& x, const std::vector<BitString>& condition_parts,
                              int level, int l_max = -1) {
    if (int(x.size()) > opts_.n_max)
      throw std::invalid_argument("Oracle::complexity: |x| exceeds n_max");
    if (l_max < 0) l_max = default_l_max(x.size());
    BitString cond = encode_condition(condition_parts);
    CondMemo& memo = memo_for(cond, level);
    uint64_t target = x.index();
    ComplexityResult r;
    r.level = level;
    r.condition_digest = digest(cond);
    for (int len = 0; len <= l_max; ++len) {
      if (memo.scanned_len < len) scan_length(memo, len);
      auto it = memo.first_prog.find(target);
      if (it != memo.first_prog.end()) {
        Program w = program_at(it->second);
        r.status = ComplexityResult::Status::Finite;
        r.value = int(w.code.size());
        if (opts_.verify_witnesses) {
          RunOutcome o = run_program(w, cond, VmLimits{schedule_.space_at(level),
                                                       kStepCapConfigBound});
          if (!o.halted() || o.output != x)
            throw std::logic_error("Oracle: witness failed re-execution");
        }
        r.witness = std::move(w);
        return r;
      }
    }
    r.status = ComplexityResult::Status::Infinite;
    return r;
  }

  std::vector<ComplexityResult> complexity_batch(const std::vector<BitString>& targets,
                                                 const std::vector<BitString>& condition_parts,
                                                 int level, int l_max) {
    BitString cond = encode_condition(condition_parts);
    CondMemo& memo = memo_for(cond, level);
    std::string cd = digest(cond);
    std::vector<ComplexityResult> out(targets.size());
    std::vector<size_t> open;
    for (size_t i = 0; i < targets.size(); ++i) {
      out[i].level = level;
      out[i].condition_digest = cd;
      open.push_back(i);
    }
    for (int len = 0; len <= l_max && !open.empty(); ++len) {
      if (memo.scanned_len < len) scan_length(memo, len);
      std::vector<size_t> still;
      for (size_t i : open) {
        auto it = memo.first_prog.find(targets[i].index());
        if (it != memo.first_prog.end()) {
          out[i].status = ComplexityResult::Status::Finite;
          out[i].witness = program_at(it->second);
          out[i].value = int(out[i].witness->code.size());
        } else {
          still.push_back(i);
        }
      }
      open.swap(still);
    }
    return out;
  }

  // Exactly { u in {0,1}^n : C(u | condition) <= bound }, canonically ordered.
  std::vector<BitString> candidate_set(int bound, const std::vector<BitString>& condition_parts,
                                       int level, int n) {
    std::vector<BitString> out;
    if (bound < 0) return out;
    if (n > 20) throw std::invalid_argument("Oracle::candidate_set: n too large");
    BitString cond = encode_condition(condition_parts);
    CondMemo& memo = memo_for(cond, level);
    if (memo.scanned_len < bound) scan_length_upto(memo, bound);
    uint64_t base = (uint64_t(1) << n) - 1;  // index of 0^n
    for (uint64_t i = 0; i < (uint64_t(1) << n); ++i) {
      auto it = memo.first_prog.find(base + i);
      if (it != memo.first_prog.end() &&
          int(program_at(it->second).code.size()) <= bound)
        out.push_back(BitString::from_index(base + i));
    }
    return out;
  }

  Program min_program(const BitString& x, const std::vector<BitString>& condition_parts,
                      int level, int l_max = -1) {
    ComplexityResult r = complexity(x, condition_parts, level, l_max);
    if (!r.finite()) throw no_program();
    return *r.witness;
  }

  // k* = min { k in 0..n : C^(level n-k)(x | y, n, k+c) <= k+c }. Existence is
  // forced by the literal-print bound once c >= c_literal.
  int k_star(const BitString& x, const BitString& y, int c) {
    int n = int(x.size());
    if (schedule_.i_max < n)
      throw std::invalid_argument("Oracle::k_star: schedule does not cover level n");
    for (int k = 0; k <= n; ++k) {
      std::vector<BitString> parts{y, BitString::from_index(uint64_t(n)),
                                   BitString::from_index(uint64_t(k + c))};
      ComplexityResult r = complexity(x, parts, n - k, k + c);
      if (r.finite() && r.value <= k + c) return k;
    }
    throw std::logic_error("Oracle::k_star: no k <= n satisfies the bound (c too small?)");
  }

  // One line per query, for cross-run regression dumps.
  void dump_record(std::ostream& os, const BitString& x,
                   const std::vector<BitString>& condition_parts, int level,
                   const ComplexityResult& r) const {
    os << "x=" << x.str() << " cond=" << r.condition_digest << " level=" << level
       << " value=" << (r.finite() ? std::to_string(r.value) : std::string("inf"))
       << " witness=" << (r.witness ? r.witness->code.str() : std::string("-")) << "\n";
    (void)condition_parts;
  }

private:
  struct CondMemo {
    BitString cond;
    uint32_t space = 0;
    int scanned_len = -1;
    std::unordered_map<uint64_t, uint32_t> first_prog;  // output index -> program index
  };

  CondMemo& memo_for(const BitString& cond, int level) {
    uint32_t space = schedule_.space_at(level);
    std::string key = std::to_string(space) + "|" + cond.str();
    auto it = memos_.find(key);
    if (it == memos_.end()) {
      CondMemo m;
      m.cond = cond;
      m.space = space;
      it = memos_.emplace(std::move(key), std::move(m)).first;
    }
    return it->second;
  }

  void scan_length_upto(CondMemo& memo, int len) {
    for (int l = memo.scanned_len + 1; l <= len; ++l) scan_length(memo, l);
  }

  // Runs every program of exactly this length, recording first producers.
  void scan_length(CondMemo& memo, int len) {
    if (memo.scanned_len >= len) return;
    if (memo.scanned_len < len - 1) scan_length_upto(memo, len - 1);
    const uint64_t first = (uint64_t(1) << len) - 1;
    const uint64_t count = uint64_t(1) << len;
    std::span<const uint8_t> cond(memo.cond.bits());
    VmLimits limits{memo.space, kStepCapConfigBound};
    for (uint64_t i = 0; i < count; ++i) {
      detail::program_bits_at(first + i, prog_buf_);
      RunOutcome o = detail::run_raw(std::span<const uint8_t>(prog_buf_), cond, limits, scratch_);
      steps_spent_ += o.steps_used;
      if (steps_spent_ > opts_.step_budget) throw budget_exceeded();
      if (o.kind == RunOutcome::Kind::Halted && o.output.size() <= 61)
        memo.first_prog.emplace(o.output.index(), uint32_t(first + i));
    }
    memo.scanned_len = len;
  }

  SpaceSchedule schedule_;
  OracleOptions opts_;
  std::unordered_map<std::string, CondMemo> memos_;
  std::vector<uint8_t> prog_buf_;
  detail::VmScratch scratch_;
  uint64_t steps_spent_ = 0;
};

}  // namespace ska

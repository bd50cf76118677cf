#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "ska/bitstring.hpp"

// The pinned universal interpreter. Three tapes: a read-only condition tape,
// a metered binary work tape, and a write-only output tape. The instruction
// set is frozen and versioned in docs/isa.md; every complexity value in the
// project is relative to this machine.
//
// ISA v1, 3-bit opcodes read MSB-first:
//   000 HALT   halt, accept current output
//   001 OUT0   append 0 to output
//   010 OUT1   append 1 to output
//   011 CPART  decode one length-prefixed record at the condition head,
//              append its payload, advance the head past the record
//   100 LIT    append the rest of the program verbatim, halt
//   101 MARK   write 1 at the work head, move the work head right
//   110 kkk    JB: jump back 3*(k+1) bits from the start of this instruction
//   111 g(o)   SEEK: advance the condition head by o bits (Elias gamma operand)
//
// Reaching the exact end of the program is an implicit HALT. A trailing
// partial opcode or operand, a JB target before bit 0, a SEEK past the end of
// the condition, or a malformed CPART record is the Invalid outcome. MARK
// beyond the space limit is SpaceExceeded.
namespace ska {

// Cost constants of the pinned machine.
inline constexpr int c_literal = 3;  // C^S(x) <= |x| + c_literal via LIT
inline constexpr int c_copy = 3;     // C^S(x | x) <= c_copy via CPART
inline constexpr int c_empty = 0;    // the empty program prints ""

inline constexpr size_t kMaxProgramBits = 4096;
inline constexpr uint64_t kStepCapConfigBound = std::numeric_limits<uint64_t>::max();

struct Program {
  BitString code;
};

struct VmLimits {
  uint32_t space_cells = 64;
  // Either an explicit cap or kStepCapConfigBound, which resolves to
  // configuration_bound(...) for the program/condition at hand.
  uint64_t step_cap = kStepCapConfigBound;
};

// Upper bound on the number of steps of any halting run with this program
// length, condition length and space limit. Argument: the only run-state the
// dynamics depend on is (pc, ci, wi) -- no opcode reads the work tape, and ci
// and wi never decrease. Between two increments of ci or wi, only pc changes,
// so some pc value (of at most L+1) repeats within L+2 steps, and a repeat of
// (pc, ci, wi) in a deterministic machine means the run never halts. There are
// at most cond_len + space + 1 increments, hence the bound below.
inline uint64_t configuration_bound(size_t program_bits, size_t condition_bits,
                                    uint32_t space_cells) {
  return (uint64_t(program_bits) + 2) *
         (uint64_t(condition_bits) + uint64_t(space_cells) + 2);
}

struct RunOutcome {
  enum class Kind { Halted, SpaceExceeded, StepExceeded, Invalid };
  Kind kind = Kind::Invalid;
  BitString output;  // meaningful only when kind == Halted
  uint32_t cells_used = 0;
  uint64_t steps_used = 0;

  bool halted() const { return kind == Kind::Halted; }
};

namespace detail {

// Reusable scratch state so enumeration loops do not allocate per run.
struct VmScratch {
  std::vector<uint8_t> out;
  std::vector<int64_t> stamp_ci;   // per pc: condition-head position at last visit
  std::vector<uint32_t> stamp_wi;  // per pc: work-head position at last visit
};

// Core interpreter. Returns the outcome; output bits are left in scratch.out
// when the run halts. A revisit of (pc, ci) certifies the run as non-halting:
// the segment in between replays forever, so the run either space-exceeds (if
// the work head advanced during the segment; we keep executing to find the
// true outcome under the given limits) or never terminates (reported as
// StepExceeded at the full step cap).
inline RunOutcome run_raw(std::span<const uint8_t> prog, std::span<const uint8_t> cond,
                          const VmLimits& limits, VmScratch& scratch) {
  const size_t L = prog.size();
  const size_t CL = cond.size();
  const uint64_t cap = limits.step_cap == kStepCapConfigBound
                           ? configuration_bound(L, CL, limits.space_cells)
                           : limits.step_cap;

  scratch.out.clear();
  if (scratch.stamp_ci.size() < L + 1) {
    scratch.stamp_ci.assign(L + 1, -1);
    scratch.stamp_wi.assign(L + 1, 0);
  } else {
    std::fill(scratch.stamp_ci.begin(), scratch.stamp_ci.begin() + L + 1, int64_t(-1));
  }

  size_t pc = 0, ci = 0;
  uint32_t wi = 0;
  uint64_t steps = 0;
  bool certified_nonhalt = false;

  RunOutcome r;
  auto finish = [&](RunOutcome::Kind k) {
    r.kind = k;
    r.cells_used = wi;
    r.steps_used = steps;
    if (k == RunOutcome::Kind::Halted) r.output = BitString(scratch.out);
    return r;
  };

  for (;;) {
    if (pc == L) return finish(RunOutcome::Kind::Halted);
    if (steps + 1 > cap) {
      r.steps_used = cap;
      r.kind = RunOutcome::Kind::StepExceeded;
      r.cells_used = wi;
      return r;
    }
    if (!certified_nonhalt) {
      if (scratch.stamp_ci[pc] == int64_t(ci)) {
        if (scratch.stamp_wi[pc] == wi) {
          // exact configuration repeat: pure loop, runs to the step cap
          r.kind = RunOutcome::Kind::StepExceeded;
          r.steps_used = cap;
          r.cells_used = wi;
          return r;
        }
        // work head advances every iteration; keep going until the space
        // limit cuts the run off
        certified_nonhalt = true;
      } else {
        scratch.stamp_ci[pc] = int64_t(ci);
        scratch.stamp_wi[pc] = wi;
      }
    }
    ++steps;
    if (pc + 3 > L) return finish(RunOutcome::Kind::Invalid);
    const unsigned op = unsigned(prog[pc]) << 2 | unsigned(prog[pc + 1]) << 1 | prog[pc + 2];
    const size_t instr_start = pc;
    pc += 3;
    switch (op) {
      case 0:  // HALT
        return finish(RunOutcome::Kind::Halted);
      case 1:  // OUT0
        scratch.out.push_back(0);
        break;
      case 2:  // OUT1
        scratch.out.push_back(1);
        break;
      case 3: {  // CPART
        size_t p = ci;
        uint64_t lp;
        if (!gamma_decode(cond.data(), CL, p, lp) || lp == 0)
          return finish(RunOutcome::Kind::Invalid);
        size_t len = size_t(lp - 1);
        if (p + len > CL) return finish(RunOutcome::Kind::Invalid);
        scratch.out.insert(scratch.out.end(), cond.begin() + p, cond.begin() + p + len);
        ci = p + len;
        break;
      }
      case 4:  // LIT
        scratch.out.insert(scratch.out.end(), prog.begin() + pc, prog.end());
        pc = L;
        return finish(RunOutcome::Kind::Halted);
      case 5:  // MARK
        if (wi >= limits.space_cells) {
          r.kind = RunOutcome::Kind::SpaceExceeded;
          r.cells_used = limits.space_cells;
          r.steps_used = steps;
          return r;
        }
        ++wi;
        break;
      case 6: {  // JB
        if (pc + 3 > L) return finish(RunOutcome::Kind::Invalid);
        unsigned k = unsigned(prog[pc]) << 2 | unsigned(prog[pc + 1]) << 1 | prog[pc + 2];
        pc += 3;
        size_t back = 3 * (size_t(k) + 1);
        if (back > instr_start) return finish(RunOutcome::Kind::Invalid);
        pc = instr_start - back;
        break;
      }
      case 7: {  // SEEK
        uint64_t o;
        if (!gamma_decode(prog.data(), L, pc, o)) return finish(RunOutcome::Kind::Invalid);
        if (ci + o > CL) return finish(RunOutcome::Kind::Invalid);
        ci += size_t(o);
        break;
      }
    }
  }
}

}  // namespace detail

// Deterministic, space-metered execution of a program against a condition
// tape. Never throws for machine-level failures; those are ordinary outcomes.
inline RunOutcome run_program(const Program& program, const BitString& condition,
                              const VmLimits& limits) {
  if (program.code.size() > kMaxProgramBits)
    throw std::invalid_argument("run_program: program too long");
  detail::VmScratch scratch;
  return detail::run_raw(std::span<const uint8_t>(program.code.bits()),
                         std::span<const uint8_t>(condition.bits()), limits, scratch);
}

// Number of programs of length 0..max_length: 2^(max_length+1) - 1.
inline uint64_t program_count(int max_length) {
  return (uint64_t(1) << (max_length + 1)) - 1;
}

// The i-th program in canonical (length-then-lex) order; shares the canonical
// index bijection with BitString.
inline Program program_at(uint64_t i) { return Program{BitString::from_index(i)}; }

namespace detail {

// Allocation-free variant of program_at for enumeration loops.
inline void program_bits_at(uint64_t i, std::vector<uint8_t>& buf) {
  int len = 0;
  uint64_t base = 0;
  while (i >= base + (uint64_t(1) << len)) {
    base += uint64_t(1) << len;
    ++len;
  }
  uint64_t offset = i - base;
  buf.resize(len);
  for (int j = 0; j < len; ++j) buf[j] = uint8_t((offset >> (len - 1 - j)) & 1);
}

}  // namespace detail

// Emits every program of length 0..max_length exactly once in canonical order.
template <typename Fn>
void enumerate_programs(int max_length, Fn&& fn) {
  if (max_length < 0) return;
  const uint64_t total = program_count(max_length);
  for (uint64_t i = 0; i < total; ++i) fn(program_at(i));
}

}  // namespace ska

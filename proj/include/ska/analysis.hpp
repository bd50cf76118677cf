#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "ska/complexity.hpp"
#include "ska/extractor.hpp"
#include "ska/gf2.hpp"
#include "ska/protocol.hpp"
#include "ska/rng.hpp"

namespace ska {

// Documented slack allowances for the measured inequalities. Every check also
// reports the minimal slack that would make it hold, so these constants gate
// pass/fail without hiding the measurement.
namespace slack {
inline constexpr int kKeyLength = 8;       // |z| >= I(x:y) - slack
inline constexpr int kDeficiency = 4;      // deficiency <= shallow_gap + slack
inline constexpr int kReconstruction = 8;  // C^(1)(x) <= |p| + |z| + slack
inline constexpr int kTranscript = 128;    // |transcript| <= 2 C(x|y) + slack
inline constexpr int kUpperBound = 16;     // |z| <= C(x) - C^(3)(x|y) + D + D1 + slack
inline constexpr int kClaim = 4;           // C^(0)(x|v,H) >= C^(2)(x|v) - slack
// per-message overhead allowance of the canonical transcript framing
inline constexpr int kFramingPerMessage = 16;
}  // namespace slack

struct InequalityCheck {
  bool holds = false;
  int min_slack = 0;  // smallest slack that makes the inequality true
};

struct RunMetrics {
  int key_length = 0;
  int mutual_info = 0;    // C^(0)(x) - C^(0)(x|y)
  int deficiency = 0;     // |z| - C^(0)(z | transcript)
  int shallow_gap = 0;    // C^(low)(x) - C^(high)(x)
  int transcript_bits = 0;
  std::map<std::string, InequalityCheck> inequality_flags;
};

// Exact adversary-side measurement of one protocol run against the canonical
// transcript serialization.
inline RunMetrics measure_run(const ProtocolResult& result, const BitString& x,
                              const BitString& y, Oracle& oracle) {
  const SpaceSchedule& sched = oracle.schedule();
  RunMetrics m;
  const BitString& z = result.z_alice;
  const BitString T = result.transcript.serialize();

  const int cx0 = oracle.complexity(x, {}, 0).value;
  const int cxy0 = oracle.complexity(x, {y}, 0).value;
  const int cz_t0 = oracle.complexity(z, {T}, 0).value;
  const int lo = std::max(sched.i_min, -1);
  const int hi = std::min(sched.i_max, 1);
  const int shallow = oracle.complexity(x, {}, lo).value - oracle.complexity(x, {}, hi).value;

  m.key_length = int(z.size());
  m.mutual_info = cx0 - cxy0;
  m.deficiency = int(z.size()) - cz_t0;
  m.shallow_gap = shallow;
  m.transcript_bits = int(T.size());

  auto flag = [&](const std::string& name, int min_slack, int allowed) {
    m.inequality_flags[name] = InequalityCheck{min_slack <= allowed, min_slack};
  };
  flag("key_length_bound", m.mutual_info - m.key_length, slack::kKeyLength);
  flag("deficiency_bound", m.deficiency - m.shallow_gap, slack::kDeficiency);
  flag("reconstruction", oracle.complexity(x, {}, 1).value - int(result.p.size()) -
                             int(z.size()),
       slack::kReconstruction);
  // reconciliation payload: the condition string p plus Bob's control bits;
  // the round-0 parameter broadcast (matrix / modulus) is excluded, matching
  // a model where public parameters are shared out of band
  const int recon_bits =
      int(result.p.size()) + int(result.transcript.bob_control_string().size());
  flag("transcript_bound", recon_bits - 2 * cxy0, slack::kTranscript);
  {
    const int cxy3 = oracle.complexity(x, {y}, std::min(sched.i_max, 3)).value;
    const int cz_t2 = oracle.complexity(z, {T}, std::min(sched.i_max, 2)).value;
    const int delta1 = cz_t0 - cz_t2;
    flag("upper_bound", int(z.size()) - (cx0 - cxy3 + m.deficiency + delta1),
         slack::kUpperBound);
  }
  return m;
}

struct ClaimCheckResult {
  uint64_t trials = 0;
  uint64_t passes = 0;
  double pass_rate = 0.0;
};

// Empirical version of the random-conditioning claim: for random H,
// C^(0)(x | v, H) >= C^(2)(x | v) - slack should hold with probability 1-eps.
inline ClaimCheckResult conditioning_claim_check(uint64_t trials, const BitString& x,
                                                 const BitString& v, Oracle& oracle,
                                                 uint32_t h_rows, uint32_t h_cols,
                                                 uint64_t master_seed) {
  ClaimCheckResult r;
  r.trials = trials;
  const int rhs = oracle.complexity(x, {v}, std::min(oracle.schedule().i_max, 2)).value;
  for (uint64_t i = 0; i < trials; ++i) {
    Rng rng(derive_seed(master_seed, Stream::Matrix, i));
    Gf2Matrix H = sample_gf2_matrix(h_rows, h_cols, rng);
    const int lhs = oracle.complexity(x, {v, H.serialize()}, 0).value;
    if (lhs >= rhs - slack::kClaim) ++r.passes;
  }
  r.pass_rate = trials ? double(r.passes) / double(trials) : 1.0;
  return r;
}

struct ExperimentConfig {
  char variant = 'A';
  int n = 6;
  double epsilon = 0.2;
  SpaceSchedule schedule;
  uint64_t trials = 200;
  uint64_t master_seed = 1;
  int c_param = 3;                          // variant B
  std::optional<ExtractorTable> extractor;  // variant B
  enum class YMode { Equal, FlipK, Random } y_mode = YMode::FlipK;
  int y_flips = 2;
  int workers = 1;
  int n_max = 12;
  uint64_t step_budget = ~0ull;

  static const char* y_mode_name(YMode m) {
    switch (m) {
      case YMode::Equal: return "equal";
      case YMode::FlipK: return "flip_k";
      default: return "random";
    }
  }
};

struct RunRecord {
  uint64_t index = 0;
  bool ok = false;
  std::string error;
  bool agreed = false;
  int rounds_used = 0;
  int key_length = 0;
  std::string transcript_digest;
  std::optional<RunMetrics> metrics;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<RunRecord> runs;

  uint64_t agreed_count = 0;
  uint64_t error_count = 0;
  double agreement_rate = 0.0;
  double mean_deficiency = 0.0;  // over agreed runs
  std::map<int, uint64_t> deficiency_distribution;
  std::map<std::string, std::map<int, uint64_t>> slack_histograms;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["config"] = {
        {"variant", std::string(1, config.variant)},
        {"n", config.n},
        {"epsilon", config.epsilon},
        {"trials", config.trials},
        {"master_seed", config.master_seed},
        {"c", config.c_param},
        {"y_mode", ExperimentConfig::y_mode_name(config.y_mode)},
        {"y_flips", config.y_flips},
        {"schedule",
         {{"base_space", config.schedule.base_space},
          {"ratio_num", config.schedule.ratio_num},
          {"ratio_den", config.schedule.ratio_den},
          {"i_min", config.schedule.i_min},
          {"i_max", config.schedule.i_max},
          {"cap", config.schedule.cap}}},
        {"extractor", config.extractor ? config.extractor->content_digest() : ""},
    };
    j["aggregates"] = {
        {"runs", runs.size()},
        {"agreed", agreed_count},
        {"errors", error_count},
        {"agreement_rate", agreement_rate},
        {"mean_deficiency", mean_deficiency},
    };
    {
      nlohmann::ordered_json dist = nlohmann::ordered_json::object();
      for (const auto& [v, c] : deficiency_distribution) dist[std::to_string(v)] = c;
      j["aggregates"]["deficiency_distribution"] = dist;
      nlohmann::ordered_json hists = nlohmann::ordered_json::object();
      for (const auto& [name, h] : slack_histograms) {
        nlohmann::ordered_json hj = nlohmann::ordered_json::object();
        for (const auto& [v, c] : h) hj[std::to_string(v)] = c;
        hists[name] = hj;
      }
      j["aggregates"]["slack_histograms"] = hists;
    }
    j["runs"] = nlohmann::ordered_json::array();
    for (const auto& r : runs) {
      nlohmann::ordered_json rj = {
          {"index", r.index},       {"ok", r.ok},
          {"error", r.error},       {"agreed", r.agreed},
          {"rounds", r.rounds_used}, {"key_length", r.key_length},
          {"transcript", r.transcript_digest},
      };
      if (r.metrics) {
        const RunMetrics& m = *r.metrics;
        nlohmann::ordered_json mj = {
            {"key_length", m.key_length},       {"mutual_info", m.mutual_info},
            {"deficiency", m.deficiency},       {"shallow_gap", m.shallow_gap},
            {"transcript_bits", m.transcript_bits},
        };
        nlohmann::ordered_json fj = nlohmann::ordered_json::object();
        for (const auto& [name, f] : m.inequality_flags)
          fj[name] = {{"holds", f.holds}, {"min_slack", f.min_slack}};
        mj["inequality_flags"] = fj;
        rj["metrics"] = mj;
      }
      j["runs"].push_back(rj);
    }
    return j;
  }

  std::string digest() const { return sha256_hex(to_json().dump()); }

  std::string to_csv() const {
    std::string out =
        "index,ok,agreed,rounds,key_length,mutual_info,deficiency,shallow_gap,"
        "transcript_bits,error\n";
    for (const auto& r : runs) {
      out += std::to_string(r.index) + "," + (r.ok ? "1" : "0") + "," +
             (r.agreed ? "1" : "0") + "," + std::to_string(r.rounds_used) + "," +
             std::to_string(r.key_length) + ",";
      if (r.metrics) {
        out += std::to_string(r.metrics->mutual_info) + "," +
               std::to_string(r.metrics->deficiency) + "," +
               std::to_string(r.metrics->shallow_gap) + "," +
               std::to_string(r.metrics->transcript_bits);
      } else {
        out += ",,,";
      }
      out += "," + r.error + "\n";
    }
    return out;
  }
};

namespace detail {

inline void experiment_inputs(const ExperimentConfig& cfg, uint64_t i, BitString& x,
                              BitString& y) {
  Rng rng(derive_seed(cfg.master_seed, Stream::Input, i));
  x = rng.bits(size_t(cfg.n));
  switch (cfg.y_mode) {
    case ExperimentConfig::YMode::Equal:
      y = x;
      break;
    case ExperimentConfig::YMode::FlipK: {
      y = x;
      // y_flips distinct positions
      std::vector<uint8_t> bits = y.bits();
      std::vector<size_t> idx(size_t(cfg.n));
      for (size_t p = 0; p < idx.size(); ++p) idx[p] = p;
      for (int f = 0; f < cfg.y_flips && size_t(f) < idx.size(); ++f) {
        size_t j = size_t(f) + size_t(rng.below(uint64_t(idx.size() - size_t(f))));
        std::swap(idx[size_t(f)], idx[j]);
        bits[idx[size_t(f)]] ^= 1;
      }
      y = BitString(bits);
      break;
    }
    case ExperimentConfig::YMode::Random:
      y = rng.bits(size_t(cfg.n));
      break;
  }
}

inline RunRecord experiment_run(const ExperimentConfig& cfg, uint64_t i, Oracle& oracle) {
  RunRecord rec;
  rec.index = i;
  BitString x, y;
  experiment_inputs(cfg, i, x, y);
  uint64_t run_seed = derive_seed(cfg.master_seed, Stream::Run, i);
  try {
    ProtocolResult pr =
        cfg.variant == 'A'
            ? run_protocol_A(x, y, oracle, cfg.epsilon, run_seed)
            : run_protocol_B(x, y, oracle, cfg.epsilon, *cfg.extractor, cfg.c_param, run_seed);
    rec.ok = true;
    rec.agreed = pr.agreed;
    rec.rounds_used = pr.rounds_used;
    rec.key_length = int(pr.z_alice.size());
    rec.transcript_digest = pr.transcript.content_digest();
    rec.metrics = measure_run(pr, x, y, oracle);
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error = e.what();
  }
  return rec;
}

}  // namespace detail

// Deterministic sweep: trial i draws its inputs and protocol randomness from
// seeds derived from (master_seed, i) alone, so results are independent of
// worker count and execution order.
inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  if (cfg.variant == 'B' && !cfg.extractor)
    throw std::invalid_argument("run_experiment: variant B needs an extractor table");
  ExperimentReport rep;
  rep.config = cfg;
  rep.runs.resize(cfg.trials);

  auto worker = [&](int w) {
    SpaceSchedule sched = cfg.schedule;
    if (cfg.variant == 'B' && sched.i_max < cfg.n) sched.i_max = cfg.n;
    Oracle oracle(sched, OracleOptions{cfg.n_max, cfg.step_budget, false});
    for (uint64_t i = uint64_t(w); i < cfg.trials; i += uint64_t(std::max(1, cfg.workers)))
      rep.runs[i] = detail::experiment_run(cfg, i, oracle);
  };
  if (cfg.workers <= 1) {
    worker(0);
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < cfg.workers; ++w) threads.emplace_back(worker, w);
    for (auto& t : threads) t.join();
  }

  uint64_t agreed = 0, errors = 0;
  double def_sum = 0;
  uint64_t def_n = 0;
  for (const auto& r : rep.runs) {
    if (!r.ok) {
      ++errors;
      continue;
    }
    if (r.agreed) ++agreed;
    if (r.metrics) {
      ++rep.deficiency_distribution[r.metrics->deficiency];
      if (r.agreed) {
        def_sum += r.metrics->deficiency;
        ++def_n;
      }
      for (const auto& [name, f] : r.metrics->inequality_flags)
        ++rep.slack_histograms[name][f.min_slack];
    }
  }
  rep.agreed_count = agreed;
  rep.error_count = errors;
  rep.agreement_rate = cfg.trials ? double(agreed) / double(cfg.trials) : 0.0;
  rep.mean_deficiency = def_n ? def_sum / double(def_n) : 0.0;
  return rep;
}

}  // namespace ska

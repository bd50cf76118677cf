#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ska/analysis.hpp"
#include "ska/config.hpp"
#include "ska/protocol.hpp"

namespace {

// exit codes
constexpr int kOk = 0;
constexpr int kInfinite = 1;
constexpr int kUsage = 2;
constexpr int kBudget = 3;
constexpr int kIo = 4;

struct ScheduleOpts {
  ska::SpaceSchedule sched;

  void attach(CLI::App* app) {
    app->add_option("--base-space", sched.base_space, "schedule base space (cells)");
    app->add_option("--ratio-num", sched.ratio_num, "schedule ratio numerator");
    app->add_option("--ratio-den", sched.ratio_den, "schedule ratio denominator");
    app->add_option("--i-min", sched.i_min, "lowest schedule level");
    app->add_option("--i-max", sched.i_max, "highest schedule level");
  }
};

int cmd_oracle(const std::string& x_str, const std::vector<std::string>& cond_strs, int level,
               int l_max, const ScheduleOpts& so, uint64_t step_budget, bool dump) {
  ska::BitString x = ska::BitString::parse(x_str);
  std::vector<ska::BitString> parts;
  for (const auto& c : cond_strs) parts.push_back(ska::BitString::parse(c));
  ska::OracleOptions opts;
  opts.step_budget = step_budget;
  opts.n_max = std::max(12, int(x.size()));
  ska::Oracle oracle(so.sched, opts);
  ska::ComplexityResult r = oracle.complexity(x, parts, level, l_max);
  if (dump) oracle.dump_record(std::cout, x, parts, level, r);
  if (!r.finite()) {
    std::cout << "inf\n";
    return kInfinite;
  }
  std::cout << r.value << " " << r.witness->code.str() << "\n";
  return kOk;
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& overrides,
            const std::string& out_json, const std::string& out_csv) {
  std::map<std::string, std::string> kv;
  if (!config_path.empty()) kv = ska::load_config_file(config_path);
  for (const auto& o : overrides) {
    auto eq = o.find('=');
    if (eq == std::string::npos) throw ska::bad_config("--set expects key=value, got " + o);
    kv[o.substr(0, eq)] = o.substr(eq + 1);
  }
  ska::LoadedConfig lc = ska::config_to_experiment(kv);
  if (lc.experiment.variant == 'B') {
    if (lc.extractor_path.empty())
      throw ska::bad_config("variant B needs extractor=<path>");
    std::ifstream es(lc.extractor_path);
    if (!es) throw std::ios_base::failure("cannot open " + lc.extractor_path);
    lc.experiment.extractor = ska::ExtractorTable::load(es);
  }
  ska::ExperimentReport rep = ska::run_experiment(lc.experiment);
  if (!out_json.empty()) {
    std::ofstream os(out_json);
    if (!os) throw std::ios_base::failure("cannot write " + out_json);
    os << rep.to_json().dump(2) << "\n";
  }
  if (!out_csv.empty()) {
    std::ofstream os(out_csv);
    if (!os) throw std::ios_base::failure("cannot write " + out_csv);
    os << rep.to_csv();
  }
  std::cout << "runs=" << rep.runs.size() << " agreed=" << rep.agreed_count
            << " errors=" << rep.error_count << " agreement_rate=" << rep.agreement_rate
            << "\n";
  std::cout << "digest=" << rep.digest() << "\n";
  return kOk;
}

int cmd_extractor_build(uint32_t n, uint32_t d, uint32_t m, double eps, uint64_t seed,
                        int certify, const std::string& out) {
  ska::ExtractorTable E = ska::build_prefix_extractor(n, d, m, eps, seed, certify);
  std::ofstream os(out);
  if (!os) throw std::ios_base::failure("cannot write " + out);
  E.save(os);
  std::cout << "digest=" << E.content_digest() << " certified=" << E.prefix_certified_upto
            << "\n";
  return kOk;
}

int cmd_extractor_verify(const std::string& file, uint32_t k, double eps,
                         const std::string& mode, uint64_t samples, uint64_t seed) {
  std::ifstream is(file);
  if (!is) throw std::ios_base::failure("cannot open " + file);
  ska::ExtractorTable E = ska::ExtractorTable::load(is);
  ska::ExtractorTable P = k < E.m ? ska::prefix_table(E, k) : E;
  auto vmode = mode == "sampled" ? ska::VerifyResult::Mode::Sampled
                                 : ska::VerifyResult::Mode::Exhaustive;
  ska::VerifyResult r = ska::verify_extractor(P, k, eps, vmode, seed, samples);
  std::cout << (vmode == ska::VerifyResult::Mode::Exhaustive ? "exhaustive" : "sampled")
            << " sources=" << r.sources_checked << " worst_deviation=" << r.worst_deviation
            << " pass=" << (r.pass ? "yes" : "no") << "\n";
  return r.pass || vmode == ska::VerifyResult::Mode::Sampled ? kOk : kInfinite;
}

int cmd_replay(const std::string& file) {
  std::ifstream is(file);
  if (!is) throw std::ios_base::failure("cannot open " + file);
  std::map<std::string, std::string> header;
  ska::Transcript t = ska::load_transcript(is, &header);
  for (const auto& [k, v] : header) std::cout << "# " << k << "=" << v << "\n";
  for (const auto& m : ska::channel_replay(t)) {
    std::cout << "round=" << m.round << " "
              << (m.sender == ska::Sender::Alice ? "alice" : "bob") << " "
              << m.payload.str() << "\n";
  }
  std::cout << "digest=" << t.content_digest() << "\n";
  return kOk;
}

int cmd_report(const std::string& file) {
  std::ifstream is(file);
  if (!is) throw std::ios_base::failure("cannot open " + file);
  nlohmann::json j = nlohmann::json::parse(is);
  const auto& a = j.at("aggregates");
  std::cout << "runs=" << a.at("runs") << " agreed=" << a.at("agreed")
            << " errors=" << a.at("errors")
            << " agreement_rate=" << double(a.at("agreement_rate"))
            << " mean_deficiency=" << double(a.at("mean_deficiency")) << "\n";
  for (const auto& [name, hist] : a.at("slack_histograms").items()) {
    int worst = INT_MIN;
    for (const auto& [slack, cnt] : hist.items()) worst = std::max(worst, std::stoi(slack));
    std::cout << name << ": max_min_slack=" << worst << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"secret-key agreement toolkit"};
  app.require_subcommand(1);

  // oracle
  auto* oracle = app.add_subcommand("oracle", "exact complexity query");
  std::string x_str;
  std::vector<std::string> cond_strs;
  int level = 0, l_max = -1;
  uint64_t step_budget = ~0ull;
  bool dump = false;
  ScheduleOpts oso;
  oracle->add_option("--x", x_str, "target bit string")->required();
  oracle->add_option("--cond", cond_strs, "condition part (repeatable)");
  oracle->add_option("--level", level, "schedule level");
  oracle->add_option("--l-max", l_max, "search length bound (-1 = default)");
  oracle->add_option("--step-budget", step_budget, "total VM step budget");
  oracle->add_flag("--dump", dump, "print a regression dump line");
  oso.attach(oracle);

  // run
  auto* run = app.add_subcommand("run", "protocol experiment sweep");
  std::string config_path, out_json, out_csv;
  std::vector<std::string> overrides;
  run->add_option("--config", config_path, "key=value config file");
  run->add_option("--set", overrides, "override key=value (repeatable)");
  run->add_option("--json", out_json, "write the full report here");
  run->add_option("--csv", out_csv, "write the per-run CSV here");

  // extractor build / verify
  auto* ext = app.add_subcommand("extractor", "extractor tables");
  ext->require_subcommand(1);
  auto* build = ext->add_subcommand("build", "search + certify a prefix extractor");
  uint32_t en = 4, ed = 3, em = 4, ek = 1;
  double eeps = 0.45;
  uint64_t eseed = 1, esamples = 10000;
  int ecertify = 4;
  std::string efile, emode = "exhaustive";
  build->add_option("--n", en, "left-node bits");
  build->add_option("--d", ed, "seed bits");
  build->add_option("--m", em, "output bits");
  build->add_option("--eps", eeps, "extractor error");
  build->add_option("--seed", eseed, "search seed");
  build->add_option("--certify", ecertify, "certify prefixes 1..k");
  build->add_option("--out", efile, "output file")->required();
  auto* verify = ext->add_subcommand("verify", "verify the k-bit prefix map");
  verify->add_option("--file", efile, "extractor file")->required();
  verify->add_option("--k", ek, "prefix length / min-entropy")->required();
  verify->add_option("--eps", eeps, "extractor error");
  verify->add_option("--mode", emode, "exhaustive|sampled")
      ->check(CLI::IsMember({"exhaustive", "sampled"}));
  verify->add_option("--samples", esamples, "sources for sampled mode");
  verify->add_option("--seed", eseed, "sampling seed");

  // replay / report
  auto* replay = app.add_subcommand("replay", "decode a transcript file");
  std::string rfile;
  replay->add_option("--file", rfile, "transcript file")->required();
  auto* report = app.add_subcommand("report", "summarize a report JSON");
  std::string repfile;
  report->add_option("--file", repfile, "report file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (oracle->parsed())
      return cmd_oracle(x_str, cond_strs, level, l_max, oso, step_budget, dump);
    if (run->parsed()) return cmd_run(config_path, overrides, out_json, out_csv);
    if (ext->parsed()) {
      if (build->parsed())
        return cmd_extractor_build(en, ed, em, eeps, eseed, ecertify, efile);
      return cmd_extractor_verify(efile, ek, eeps, emode, esamples, eseed);
    }
    if (replay->parsed()) return cmd_replay(rfile);
    if (report->parsed()) return cmd_report(repfile);
  } catch (const ska::budget_exceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBudget;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const ska::bad_config& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "bbbvote/errors.hpp"
#include "bbbvote/group.hpp"
#include "bbbvote/harness.hpp"
#include "bbbvote/transcript.hpp"

using namespace bbbvote;

namespace {

std::string join(const Counts& c) {
  std::string out = "(";
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(c[i]);
  }
  return out + ")";
}

int cmd_gen_params(const std::string& backend, const std::string& profile, unsigned n,
                   unsigned k, const std::string& out) {
  const auto params = derive_params(parse_backend(backend), parse_profile(profile), n, k);
  const std::string doc = params_document(*params);
  if (out.empty()) {
    std::cout << doc << "\n";
  } else {
    std::ofstream(out) << doc << "\n";
    std::cout << "wrote " << out << "\n";
  }
  return 0;
}

int cmd_run_scenario(const std::string& file, const std::string& out, unsigned workers) {
  Scenario s = load_scenario(file);
  if (workers > 0) s.workers = workers;
  const RunReport r = run_scenario(s, out.empty() ? std::nullopt : std::optional(out));
  std::cout << "scenario " << r.scenario << ": " << r.outcome;
  if (r.tally) std::cout << " tally " << join(*r.tally) << " over " << r.counted_votes << " votes";
  std::cout << ", " << r.faulty_rounds.size() << " fault round(s)\n";
  for (std::size_t i = 0; i < r.faulty_rounds.size(); ++i) {
    std::cout << "  round " << i + 1 << " faulty:";
    for (const auto& id : r.faulty_rounds[i]) std::cout << " " << id;
    std::cout << "\n";
  }
  if (r.settlement) {
    std::cout << "  settlement:";
    for (const auto& [id, amount] : r.settlement->payouts) std::cout << " " << id << "=" << amount;
    std::cout << " remainder=" << r.settlement->remainder << "\n";
  }
  if (!r.report_path.empty()) {
    std::cout << "  report " << r.report_path << "\n  transcript " << r.transcript_path << "\n";
  }
  const bool ok = r.expected_infeasible ? r.outcome == "tally-infeasible" : r.outcome == "closed";
  return ok ? 0 : 1;
}

int cmd_bench(const BenchOptions& opts, const std::string& out) {
  const auto cells = bench_tally(opts);
  const std::string doc = bench_json(opts, cells);
  if (!out.empty()) std::ofstream(out) << doc << "\n";
  std::cout << doc << "\n";
  for (const auto& c : cells) {
    if (!c.recovered) return 1;
  }
  return 0;
}

int cmd_verify(const std::string& file) {
  const TranscriptCheck check = verify_transcript(file);
  if (check.accepted) {
    std::cout << "accept: " << check.records << " transactions, final phase "
              << to_string(check.final_phase);
    if (check.result) std::cout << ", tally " << join(*check.result);
    std::cout << "\n";
    return 0;
  }
  std::cout << "reject at record " << check.bad_record.value_or(0) << ": " << check.reason << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-tallying boardroom voting with fault recovery"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen-params", "Derive and print group parameters");
  std::string gen_backend = "ec", gen_profile = "production", gen_out;
  unsigned gen_n = 3, gen_k = 2;
  gen->add_option("--backend", gen_backend, "ec or ia");
  gen->add_option("--profile", gen_profile, "test-small, production or production-2048");
  gen->add_option("--n", gen_n, "participants");
  gen->add_option("--k", gen_k, "choices");
  gen->add_option("--out", gen_out, "output file");

  auto* run = app.add_subcommand("run-scenario", "Run a scenario file end to end");
  std::string run_file, run_out;
  unsigned run_workers = 0;
  run->add_option("file", run_file)->required()->check(CLI::ExistingFile);
  run->add_option("--out", run_out, "directory for the report and transcript");
  run->add_option("--workers", run_workers, "tally search workers (overrides the scenario)");

  auto* bench = app.add_subcommand("bench-tally", "Time exhaustive tally search over a grid");
  BenchOptions bopts;
  std::vector<std::uint32_t> n_list;
  std::vector<unsigned> k_list;
  std::string bench_backend = "ec", bench_profile = "production", bench_out;
  bench->add_option("--n,--n-list", n_list, "voter counts n'")->delimiter(',');
  bench->add_option("--k,--k-list", k_list, "choice counts")->delimiter(',');
  bench->add_option("--workers", bopts.workers, "parallel workers")->check(CLI::PositiveNumber);
  bench->add_option("--backend", bench_backend, "ec or ia");
  bench->add_option("--profile", bench_profile, "security profile");
  bench->add_option("--seed", bopts.seed, "seed for planted counts");
  bench->add_option("--out", bench_out, "write the JSON report here too");

  auto* verify = app.add_subcommand("verify-transcript", "Replay and check a transcript");
  std::string verify_file;
  verify->add_option("file", verify_file)->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return cmd_gen_params(gen_backend, gen_profile, gen_n, gen_k, gen_out);
    if (*run) return cmd_run_scenario(run_file, run_out, run_workers);
    if (*bench) {
      if (!n_list.empty()) bopts.n_list = n_list;
      if (!k_list.empty()) bopts.k_list = k_list;
      bopts.backend = parse_backend(bench_backend);
      bopts.profile = parse_profile(bench_profile);
      return cmd_bench(bopts, bench_out);
    }
    if (*verify) return cmd_verify(verify_file);
  } catch (const Error& e) {
    std::cerr << "error [" << error_code_name(e.code()) << "]: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

#include <doctest.h>

#include <map>

#include "bbbvote/errors.hpp"
#include "bbbvote/harness.hpp"
#include "bbbvote/transcript.hpp"

using namespace bbbvote;

namespace {

const std::string kDir = BBBVOTE_SCENARIO_DIR;

std::string parse_error(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

Counts histogram(const Scenario& s, const std::vector<unsigned>& skip) {
  Counts c(s.k, 0);
  for (const auto& [p, choice] : s.choices) {
    if (std::find(skip.begin(), skip.end(), p) == skip.end()) c[choice - 1]++;
  }
  return c;
}

const char* kBase = R"([params]
backend = ec
profile = test-small
n = 4
k = 2
seed = 3
[choices]
P1 = 1
P2 = 2
P3 = 2
P4 = 1
)";

}  // namespace

TEST_CASE("bundled fig4 scenario loads") {
  const Scenario s = load_scenario(kDir + "/fig4.scenario");
  CHECK(s.name == "fig4");
  CHECK(s.n == 6);
  CHECK(s.k == 2);
  CHECK(s.voting_stalls == std::vector<unsigned>{3});
  CHECK(s.repair_stalls.at(1) == std::vector<unsigned>{5});
  CHECK_FALSE(s.expected_infeasible);
}

TEST_CASE("scenario diagnostics carry line numbers") {
  CHECK(parse_error(std::string(kBase) + "P5 = 0\n").find("line 12") != std::string::npos);
  CHECK(parse_error(std::string(kBase) + "[choices]\nP1 = 0\n") != "");
  const std::string zero = R"([params]
n = 3
k = 2
[choices]
P1 = 0
)";
  CHECK(parse_error(zero).find("line 5: choices are numbered from 1") != std::string::npos);
  CHECK(parse_error("[params]\nn = 3\nk = 2\n[choices]\nP1 = 3\nP2 = 1\nP3 = 1\n")
            .find("line 5: choice out of range") != std::string::npos);
  CHECK(parse_error("[params]\nbogus = 1\n").find("line 2") != std::string::npos);
  CHECK(parse_error("[nope]\n").find("line 1: unknown section") != std::string::npos);
  CHECK(parse_error(std::string(kBase) + "[stalls]\nvoting = P2\n")
            .find("stalls in voting but has a choice") != std::string::npos);
  CHECK(parse_error(std::string(kBase) + "[stalls]\nrepair.1 = P2\n")
            .find("never opens") != std::string::npos);
  CHECK(parse_error("[params]\nn = 3\nk = 2\n[choices]\nP1 = 1\nP2 = 1\n")
            .find("P3 has no choice") != std::string::npos);
  CHECK(parse_error("[params]\nbackend = xx\n").find("line 2: unknown backend") !=
        std::string::npos);
}

TEST_CASE("stalls leaving fewer than three voters are flagged") {
  const std::string text = R"([params]
n = 4
k = 2
[choices]
P1 = 1
P2 = 1
[stalls]
voting = P3, P4
)";
  const Scenario s = parse_scenario(text);
  CHECK(s.expected_infeasible);
  const RunReport r = run_scenario(s);
  CHECK(r.outcome == "tally-infeasible");
  CHECK_FALSE(r.tally.has_value());
}

TEST_CASE("honest run counts the script") {
  const std::string text = R"([params]
backend = ec
profile = production
n = 6
k = 3
seed = 9
[choices]
P1 = 1
P2 = 1
P3 = 2
P4 = 2
P5 = 3
P6 = 1
)";
  const Scenario s = parse_scenario(text, "six");
  const RunReport r = run_scenario(s);
  CHECK(r.outcome == "closed");
  REQUIRE(r.tally.has_value());
  CHECK(*r.tally == Counts{3, 2, 1});
  CHECK(*r.tally == histogram(s, {}));
  CHECK(r.faulty_rounds.empty());
  CHECK(r.phase_costs.count("VOTING") == 1);
  CHECK(verify_transcript_text(r.transcript).accepted);
}

TEST_CASE("fig4 runs on both backends") {
  Scenario s = load_scenario(kDir + "/fig4.scenario");
  for (auto backend : {BackendKind::kEC, BackendKind::kIA}) {
    s.backend = backend;
    const RunReport r = run_scenario(s);
    CHECK(r.outcome == "closed");
    REQUIRE(r.tally.has_value());
    CHECK(*r.tally == Counts{2, 2});
    CHECK(*r.tally == histogram(s, {3, 5}));
    CHECK(r.counted_votes == 4);
    REQUIRE(r.faulty_rounds.size() == 2);
    CHECK(r.faulty_rounds[0] == std::vector<std::string>{"P3"});
    CHECK(r.faulty_rounds[1] == std::vector<std::string>{"P5"});
    // Four repairers in round one, the same four in round two.
    int repairs = 0;
    for (const auto& t : r.transactions) {
      if (t.action == "repair_vote") repairs++;
    }
    CHECK(repairs == 8);
    std::map<std::string, std::uint64_t> pay(r.settlement->payouts.begin(),
                                             r.settlement->payouts.end());
    CHECK(pay["P3"] == 0);
    CHECK(pay["P5"] == 0);
    CHECK(pay["P1"] == 15);
  }
}

TEST_CASE("same seed gives byte-identical transcripts") {
  Scenario s = load_scenario(kDir + "/fig4.scenario");
  const RunReport a = run_scenario(s);
  const RunReport b = run_scenario(s);
  CHECK(a.transcript == b.transcript);
  s.seed += 1;
  const RunReport c = run_scenario(s);
  CHECK(a.transcript != c.transcript);
  CHECK(*c.tally == *a.tally);
}

TEST_CASE("run_scenario writes report and transcript") {
  const std::string dir = "harness_out";
  const RunReport r = run_scenario(load_scenario(kDir + "/dummy.scenario"), dir);
  CHECK(*r.tally == Counts{1, 2});
  CHECK(*r.raw_tally == Counts{2, 2});
  CHECK(verify_transcript(r.transcript_path).accepted);
  CHECK_FALSE(report_json(r).empty());
}

TEST_CASE("small bench cell") {
  BenchOptions opts;
  opts.n_list = {10};
  opts.k_list = {2, 3};
  opts.workers = 2;
  const auto cells = bench_tally(opts);
  REQUIRE(cells.size() == 2);
  for (const auto& c : cells) {
    CHECK(c.recovered);
    CHECK(c.single.iterations == c.space);
    CHECK(c.parallel.iterations == c.space);
  }
  CHECK(cells[0].space < cells[1].space);
}

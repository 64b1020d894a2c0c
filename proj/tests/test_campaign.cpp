#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mldiff/campaign/config.hpp"
#include "mldiff/campaign/report.hpp"
#include "mldiff/campaign/runner.hpp"

using namespace mldiff;
using namespace mldiff::campaign;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string misbehaving = std::string(MLDIFF_FIXTURES_DIR) + "/adapters/misbehaving_adapter.sh";

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / "mldiff-test-campaign" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ComparisonRecord rec(const std::string& pair, const std::string& ds, const std::string& part, std::size_t delta,
                     double p_chi2, std::optional<std::size_t> delta_score = {}, std::optional<double> p_ks = {}) {
  ComparisonRecord r;
  r.pair_id = pair;
  r.group = "G";
  r.dataset = ds;
  r.partition = part;
  r.outcome.n = 100;
  r.outcome.delta = delta;
  r.outcome.p_chi2 = p_chi2;
  r.outcome.delta_score = delta_score;
  r.outcome.p_ks = p_ks;
  r.scores_compared = delta_score.has_value();
  r.verdict = evaluate_partition(r.outcome, {});
  return r;
}

ComparisonRecord errored(const std::string& pair, const std::string& ds, const std::string& part) {
  auto r = rec(pair, ds, part, 0, 1.0);
  r.errored = true;
  r.error = "adapter: exit status 3";
  r.verdict = {Check::not_applicable, Check::not_applicable, Check::not_applicable, Check::not_applicable};
  return r;
}

// 3 pairs x 2 datasets x 2 partitions; expected counts worked out by hand.
std::vector<ComparisonRecord> twelve_records() {
  return {
      rec("p1", "d1", "train", 0, 1.0, 0u, 1.0),       //
      rec("p1", "d1", "test", 3, 0.5, 5u, 0.3),        // class dev, score dev
      rec("p1", "d2", "train", 10, 0.01, 20u, 0.001),  // class dev+sig, score dev+sig
      rec("p1", "d2", "test", 0, 1.0, 2u, 0.9),        // score dev
      rec("p2", "d1", "train", 1, 0.8),                // class dev
      rec("p2", "d1", "test", 0, 1.0),                 //
      rec("p2", "d2", "train", 40, 0.004),             // class dev+sig
      rec("p2", "d2", "test", 2, 0.7),                 // class dev
      errored("p3", "d1", "train"),                    //
      errored("p3", "d1", "test"),                     //
      rec("p3", "d2", "train", 0, 1.0, 100u, 1e-9),    // score dev+sig
      rec("p3", "d2", "test", 1, 0.9, 99u, 1e-8),      // class dev, score dev+sig
  };
}

CampaignReport twelve_report() {
  CampaignReport r;
  r.records = twelve_records();
  r.aggregates = aggregate(r.records, 0.05);
  r.split_seed = 3;
  return r;
}

json dummy_campaign(std::size_t pairs) {
  json j;
  const char* variants[] = {"dummy-prior", "dummy-hard"};
  for (std::size_t i = 0; i < pairs; ++i) j["pairs"].push_back({variants[i % 2], variants[(i / 2) % 2]});
  j["datasets"] = {"uniform:n=200,m=10,seed=1", "random:n=200,m=10,seed=2", "bc", "wine"};
  j["split_seed"] = 1;
  return j;
}

}  // namespace

TEST(Aggregate, HandCountedFixture) {
  const auto a = aggregate(twelve_records(), 0.05);
  EXPECT_EQ(a.total_comparisons, 12u);
  EXPECT_EQ(a.executed, 10u);
  EXPECT_EQ(a.errored, 2u);
  EXPECT_EQ(a.class_deviation_count, 6u);
  EXPECT_EQ(a.class_significant_count, 2u);
  EXPECT_EQ(a.score_comparable_count, 6u);
  EXPECT_EQ(a.score_deviation_count, 5u);
  EXPECT_EQ(a.score_significant_count, 3u);
  EXPECT_DOUBLE_EQ(a.class_deviation_pct, 60.0);
  EXPECT_DOUBLE_EQ(a.class_significant_pct, 20.0);
  EXPECT_DOUBLE_EQ(a.score_deviation_pct, 500.0 / 6.0);
  EXPECT_DOUBLE_EQ(a.score_significant_pct, 50.0);
}

TEST(Aggregate, ConsistencyCheckCatchesTampering) {
  auto r = twelve_report();
  EXPECT_NO_THROW(check_consistency(r));
  r.aggregates.class_deviation_count = 7;
  EXPECT_THROW(check_consistency(r), InvalidArgument);
  r = twelve_report();
  r.aggregates.score_significant_pct = 51.0;
  EXPECT_THROW(check_consistency(r), InvalidArgument);
}

TEST(Report, JsonRoundTrip) {
  auto r = twelve_report();
  r.replicate_summaries.push_back({"p1", "d1", 100, 0.05, 0.04, 0.5, 0.25});
  const auto text = to_json(r).dump();
  const auto back = report_from_json(json::parse(text));
  EXPECT_EQ(back, r);
  EXPECT_EQ(to_json(back).dump(), text);
  EXPECT_THROW(report_from_json(json::parse(R"({"records": 3})")), ParseError);
}

TEST(Report, CsvHasOneRowPerRecord) {
  const auto r = twelve_report();
  std::istringstream in(to_csv(r));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line,
            "pair_id,dataset,partition,n,delta,delta_rate,delta_score,delta_score_rate,p_ks,p_chi2,exact_classes,"
            "exact_scores,dist_scores,dist_classes,errored");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 12u);
  EXPECT_EQ(csv_quote("a vs b"), "a vs b");
  EXPECT_EQ(csv_quote("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_quote("say \"x\""), "\"say \"\"x\"\"\"");
}

TEST(Report, MarkdownMentionsAggregatesAndErrors) {
  const auto md = to_markdown(twelve_report());
  EXPECT_NE(md.find("60.0%"), std::string::npos);
  EXPECT_NE(md.find("83.3%"), std::string::npos);
  EXPECT_NE(md.find("exit status 3"), std::string::npos);
}

TEST(Report, WriteFormats) {
  const auto dir = scratch("write");
  const auto r = twelve_report();
  EXPECT_TRUE(write_report(r, dir / "none", {}).empty());
  EXPECT_FALSE(fs::exists(dir / "none" / "report.json"));
  const auto paths = write_report(r, dir / "all", {"json", "csv", "markdown"});
  ASSERT_EQ(paths.size(), 3u);
  for (const auto& p : paths) EXPECT_TRUE(fs::exists(p));
  EXPECT_EQ(report_from_json(json::parse(std::ifstream(dir / "all" / "report.json"))), r);
  EXPECT_THROW(write_report(r, dir / "all", {"xml"}), InvalidArgument);

  std::ofstream(dir / "file") << "x";
  try {
    write_report(r, dir / "file" / "sub", {"json"});
    FAIL() << "expected an I/O error";
  } catch (const IoError& ex) {
    EXPECT_NE(std::string(ex.what()).find("file/sub"), std::string::npos);
  }
}

TEST(Config, ParsesParticipantsAndDatasets) {
  const auto j = json::parse(R"({
    "pairs": [
      ["gnb-a", "gnb-b"],
      {"a": {"variant": "rf", "params": {"n_trees": 10}, "seed": 1, "id": "rf1"},
       "b": {"variant": "rf", "params": {"n_trees": "10"}, "seed": 2}, "id": "forest"},
      ["gnb-a", "gnb-b"]
    ],
    "datasets": ["uniform:n=100,m=4,seed=3", {"kind": "random", "n": 50, "m": 2, "seed": 9, "name": "tiny"}, "bc"],
    "split_seed": 17,
    "engine": {"alpha": 0.01, "score_tolerance": 0.01},
    "replicates": 5
  })");
  const auto cfg = parse_campaign(j);
  ASSERT_EQ(cfg.pairs.size(), 3u);
  EXPECT_EQ(cfg.pairs[0].id, "gnb-a vs gnb-b");
  EXPECT_EQ(cfg.pairs[2].id, "gnb-a vs gnb-b#2");
  EXPECT_EQ(cfg.pairs[1].id, "forest");
  EXPECT_EQ(cfg.pairs[1].a.id, "rf1");
  EXPECT_EQ(cfg.pairs[1].b.spec->hyperparameters.get_int("n_trees"), 10);
  EXPECT_EQ(*cfg.pairs[1].b.spec->train_seed, 2u);
  EXPECT_EQ(cfg.datasets[1].name, "tiny");
  EXPECT_EQ(cfg.datasets[0].name, "uniform(n=100,m=4,seed=3)");
  EXPECT_EQ(cfg.split_seed, 17u);
  EXPECT_EQ(cfg.engine.alpha, 0.01);
  EXPECT_EQ(*cfg.replicates, 5u);
}

TEST(Config, ValidationErrors) {
  EXPECT_THROW(parse_campaign(json::parse(R"({"pairs": [], "datasets": ["bc"]})")), InvalidArgument);
  EXPECT_THROW(parse_campaign(json::parse(R"({"pairs": [["gnb-a","gnb-b"]], "datasets": []})")), InvalidArgument);
  EXPECT_THROW(parse_campaign(json::parse(R"({"pairs": [["gnb-a"]], "datasets": ["bc"]})")), InvalidArgument);
  EXPECT_THROW(parse_campaign(json::parse(R"({"pairs": [["svm","gnb-b"]], "datasets": ["bc"]})")), InvalidArgument);
  EXPECT_THROW(parse_campaign(json::parse(R"({"pairs": [["gnb-a","gnb-b"]], "datasets": ["bc"],
                                              "engine": {"alpha": 2}})")),
               InvalidArgument);
  EXPECT_THROW(parse_campaign(json::parse(R"({"datasets": ["bc"]})")), InvalidArgument);
  EXPECT_THROW(load_campaign("/nonexistent/campaign.json"), IoError);
}

TEST(RunCampaign, SelfPairHasNoDeviations) {
  const auto cfg = parse_campaign(json::parse(R"({"pairs": [["knn-a","knn-a"]], "datasets": ["wine"]})"));
  const auto r = run_campaign(cfg);
  EXPECT_EQ(r.aggregates.total_comparisons, 2u);
  EXPECT_EQ(r.aggregates.class_deviation_count, 0u);
  EXPECT_EQ(r.aggregates.class_significant_count, 0u);
  EXPECT_EQ(r.aggregates.score_deviation_count, 0u);
  EXPECT_EQ(r.records[0].partition, "test");  // sorted: test < train
}

TEST(RunCampaign, EightySevenPairsOnFourDatasets) {
  const auto cfg = parse_campaign(dummy_campaign(87));
  const auto r = run_campaign(cfg, {4});
  EXPECT_EQ(r.aggregates.total_comparisons, 696u);
  EXPECT_EQ(r.records.size(), 696u);
  std::istringstream csv(to_csv(r));
  std::size_t lines = 0;
  for (std::string line; std::getline(csv, line);) ++lines;
  EXPECT_EQ(lines, 697u);
  // prior vs hard pairs deviate on every score; class predictions always agree
  EXPECT_EQ(r.aggregates.class_deviation_count, 0u);
  EXPECT_GT(r.aggregates.score_deviation_count, 0u);
  EXPECT_EQ(report_from_json(json::parse(to_json(r).dump())), r);
}

TEST(RunCampaign, AdapterFailureIsRecordedNotFatal) {
  json j;
  j["pairs"] = json::array({json::array({"gnb-a", "gnb-b"}),
                            {{"a", "gnb-a"},
                             {"b", {{"adapter", {{"executable", misbehaving}, {"args", {"--mode", "fail"}}}}}},
                             {"id", "broken"}},
                            {{"a", "gnb-a"},
                             {"b", {{"adapter", {{"executable", misbehaving}, {"args", {"--mode", "truncate"}}}}}},
                             {"id", "short"}}});
  j["datasets"] = {"uniform:n=40,m=3,seed=1"};
  const auto r = run_campaign(parse_campaign(j), {2, scratch("work")});
  EXPECT_EQ(r.aggregates.total_comparisons, 6u);
  EXPECT_EQ(r.aggregates.errored, 4u);
  EXPECT_EQ(r.aggregates.executed, 2u);
  for (const auto& rec : r.records) {
    EXPECT_EQ(rec.errored, rec.pair_id != "gnb-a vs gnb-b") << rec.pair_id;
    if (rec.errored) EXPECT_EQ(rec.verdict.exact_classes, Check::not_applicable);
  }
  EXPECT_NE(to_markdown(r).find("broken"), std::string::npos);
}

TEST(RunCampaign, ExternalReferenceAdapterAgreesWithInProcess) {
  json j;
  j["pairs"] = json::array({{{"a", "knn-a:k=3"},
                             {"b", {{"adapter", {{"executable", MLDIFF_REFERENCE_ADAPTER},
                                                 {"args", {"--variant", "knn-a:k=3"}}}},
                                    {"family", "KNN"},
                                    {"target", "sklearn"},
                                    {"canonical", {{"k", 3}}}}}}});
  j["datasets"] = {"bc"};
  const auto r = run_campaign(parse_campaign(j), {1, scratch("ref")});
  for (const auto& rec : r.records) {
    EXPECT_FALSE(rec.errored) << rec.error;
    EXPECT_EQ(rec.outcome.delta, 0u);
    EXPECT_EQ(*rec.outcome.delta_score, 0u);
    EXPECT_EQ(rec.group, "KNN");
  }
}

TEST(RunCampaign, IndependentOfJobsAndPairOrder) {
  auto j = json::parse(R"({
    "pairs": [["gnb-a","gnb-b"], ["knn-a","knn-b"], ["lr-gd","lr-irls"], ["dummy-prior","dummy-hard"],
              ["rf:n_trees=10,seed=1","rf:n_trees=10,seed=2"]],
    "datasets": ["uniform:n=200,m=10,seed=4", "wine"], "split_seed": 5})");
  const auto cfg = parse_campaign(j);
  const auto base = to_json(run_campaign(cfg, {1})).dump();
  for (std::size_t jobs : {4u, 8u}) EXPECT_EQ(to_json(run_campaign(cfg, {jobs})).dump(), base);
  std::reverse(j["pairs"].begin(), j["pairs"].end());
  EXPECT_EQ(to_json(run_campaign(parse_campaign(j), {3})).dump(), base);
}

TEST(RunCampaign, ReplicateSummaries) {
  const auto cfg = parse_campaign(json::parse(R"({"pairs": [["gnb-a","gnb-a"]],
      "datasets": ["uniform:n=100,m=5,seed=0"], "replicates": 4})"));
  const auto r = run_campaign(cfg);
  ASSERT_EQ(r.replicate_summaries.size(), 1u);
  EXPECT_EQ(r.replicate_summaries[0].replicates, 4u);
  EXPECT_EQ(r.replicate_summaries[0].class_significant_test, 0.0);
}

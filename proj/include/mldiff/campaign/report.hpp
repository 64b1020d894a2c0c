#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "mldiff/csv.hpp"
#include "mldiff/diffengine.hpp"
#include "mldiff/error.hpp"

namespace mldiff::campaign {

/// One (pair, dataset, partition) comparison.
struct ComparisonRecord {
  std::string pair_id;
  std::string group;  // family label used by the per-group summary
  std::string dataset;
  std::string partition;  // "train" or "test"
  PartitionOutcome outcome;
  PartitionVerdict verdict;
  bool scores_compared = false;
  bool errored = false;
  std::string error;

  double delta_rate() const { return outcome.n ? static_cast<double>(outcome.delta) / static_cast<double>(outcome.n) : 0.0; }
  std::optional<double> delta_score_rate() const {
    if (!outcome.delta_score || !outcome.n) return std::nullopt;
    return static_cast<double>(*outcome.delta_score) / static_cast<double>(outcome.n);
  }

  friend bool operator==(const ComparisonRecord&, const ComparisonRecord&) = default;
};

inline bool record_less(const ComparisonRecord& x, const ComparisonRecord& y) {
  return std::tie(x.pair_id, x.dataset, x.partition) < std::tie(y.pair_id, y.dataset, y.partition);
}

/// Aggregates in the paper's sense. Errored comparisons count toward
/// total_comparisons but are excluded from every denominator.
struct Aggregates {
  std::size_t total_comparisons = 0;
  std::size_t executed = 0;
  std::size_t errored = 0;
  std::size_t class_deviation_count = 0;
  std::size_t class_significant_count = 0;
  std::size_t score_comparable_count = 0;
  std::size_t score_deviation_count = 0;
  std::size_t score_significant_count = 0;
  double class_deviation_pct = 0.0;
  double class_significant_pct = 0.0;
  double score_deviation_pct = 0.0;
  double score_significant_pct = 0.0;

  friend bool operator==(const Aggregates&, const Aggregates&) = default;
};

struct ReplicateRecord {
  std::string pair_id;
  std::string dataset;
  std::size_t replicates = 0;
  double class_significant_train = 0.0;
  double class_significant_test = 0.0;
  double score_significant_train = 0.0;
  double score_significant_test = 0.0;

  friend bool operator==(const ReplicateRecord&, const ReplicateRecord&) = default;
};

struct CampaignReport {
  Aggregates aggregates;
  std::vector<ComparisonRecord> records;
  std::vector<ReplicateRecord> replicate_summaries;
  EngineConfig engine;
  std::uint64_t split_seed = 0;

  friend bool operator==(const CampaignReport&, const CampaignReport&) = default;
};

inline double percent(std::size_t k, std::size_t n) {
  return n ? 100.0 * static_cast<double>(k) / static_cast<double>(n) : 0.0;
}

inline Aggregates aggregate(const std::vector<ComparisonRecord>& records, double alpha) {
  Aggregates a;
  a.total_comparisons = records.size();
  for (const auto& r : records) {
    if (r.errored) {
      ++a.errored;
      continue;
    }
    ++a.executed;
    a.class_deviation_count += r.outcome.delta > 0;
    a.class_significant_count += r.outcome.p_chi2 < alpha;
    if (r.scores_compared && r.outcome.delta_score) {
      ++a.score_comparable_count;
      a.score_deviation_count += *r.outcome.delta_score > 0;
      a.score_significant_count += r.outcome.p_ks.value_or(1.0) < alpha;
    }
  }
  a.class_deviation_pct = percent(a.class_deviation_count, a.executed);
  a.class_significant_pct = percent(a.class_significant_count, a.executed);
  a.score_deviation_pct = percent(a.score_deviation_count, a.score_comparable_count);
  a.score_significant_pct = percent(a.score_significant_count, a.score_comparable_count);
  return a;
}

/// Recounts the aggregates from the records and throws on any mismatch.
inline void check_consistency(const CampaignReport& r) {
  const auto recount = aggregate(r.records, r.engine.alpha);
  const auto& a = r.aggregates;
  const bool counts_ok =
      std::tie(a.total_comparisons, a.executed, a.errored, a.class_deviation_count, a.class_significant_count,
               a.score_comparable_count, a.score_deviation_count, a.score_significant_count) ==
      std::tie(recount.total_comparisons, recount.executed, recount.errored, recount.class_deviation_count,
               recount.class_significant_count, recount.score_comparable_count, recount.score_deviation_count,
               recount.score_significant_count);
  const bool pct_ok = std::abs(a.class_deviation_pct - recount.class_deviation_pct) < 0.05 &&
                      std::abs(a.class_significant_pct - recount.class_significant_pct) < 0.05 &&
                      std::abs(a.score_deviation_pct - recount.score_deviation_pct) < 0.05 &&
                      std::abs(a.score_significant_pct - recount.score_significant_pct) < 0.05;
  if (!counts_ok || !pct_ok) throw InvalidArgument("report aggregates disagree with a recount of the records");
  if (a.executed + a.errored != a.total_comparisons) throw InvalidArgument("executed + errored != total");
}

// ---- JSON ----------------------------------------------------------------

namespace detail {

using nlohmann::json;

inline json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
inline json opt(const std::optional<std::size_t>& v) { return v ? json(*v) : json(nullptr); }

inline Check parse_check(const std::string& s) {
  if (s == "pass") return Check::pass;
  if (s == "fail") return Check::fail;
  if (s == "n/a") return Check::not_applicable;
  throw ParseError("unknown check value '" + s + "'");
}

}  // namespace detail

inline nlohmann::json to_json(const ComparisonRecord& r) {
  using detail::opt;
  const auto& o = r.outcome;
  nlohmann::json j = {
      {"pair_id", r.pair_id},
      {"group", r.group},
      {"dataset", r.dataset},
      {"partition", r.partition},
      {"n", o.n},
      {"delta", o.delta},
      {"delta_rate", r.delta_rate()},
      {"delta_score", opt(o.delta_score)},
      {"delta_score_rate", opt(r.delta_score_rate())},
      {"p_ks", opt(o.p_ks)},
      {"ks_statistic", opt(o.ks_statistic)},
      {"p_chi2", o.p_chi2},
      {"chi2_statistic", o.chi2_statistic},
      {"chi2_degenerate", o.chi2_degenerate},
      {"scores_compared", r.scores_compared},
      {"verdict",
       {{"exact_classes", to_string(r.verdict.exact_classes)},
        {"exact_scores", to_string(r.verdict.exact_scores)},
        {"dist_scores", to_string(r.verdict.dist_scores)},
        {"dist_classes", to_string(r.verdict.dist_classes)}}},
      {"errored", r.errored},
  };
  if (r.errored) j["error"] = r.error;
  return j;
}

inline ComparisonRecord record_from_json(const nlohmann::json& j) {
  ComparisonRecord r;
  r.pair_id = j.at("pair_id").get<std::string>();
  r.group = j.value("group", std::string{});
  r.dataset = j.at("dataset").get<std::string>();
  r.partition = j.at("partition").get<std::string>();
  auto& o = r.outcome;
  o.n = j.at("n").get<std::size_t>();
  o.delta = j.at("delta").get<std::size_t>();
  if (!j.at("delta_score").is_null()) o.delta_score = j["delta_score"].get<std::size_t>();
  if (!j.at("p_ks").is_null()) o.p_ks = j["p_ks"].get<double>();
  if (!j.at("ks_statistic").is_null()) o.ks_statistic = j["ks_statistic"].get<double>();
  o.p_chi2 = j.at("p_chi2").get<double>();
  o.chi2_statistic = j.at("chi2_statistic").get<double>();
  o.chi2_degenerate = j.at("chi2_degenerate").get<bool>();
  r.scores_compared = j.at("scores_compared").get<bool>();
  const auto& v = j.at("verdict");
  r.verdict.exact_classes = detail::parse_check(v.at("exact_classes").get<std::string>());
  r.verdict.exact_scores = detail::parse_check(v.at("exact_scores").get<std::string>());
  r.verdict.dist_scores = detail::parse_check(v.at("dist_scores").get<std::string>());
  r.verdict.dist_classes = detail::parse_check(v.at("dist_classes").get<std::string>());
  r.errored = j.at("errored").get<bool>();
  r.error = j.value("error", std::string{});
  return r;
}

inline nlohmann::json to_json(const CampaignReport& r) {
  const auto& a = r.aggregates;
  nlohmann::json records = nlohmann::json::array();
  nlohmann::json errors = nlohmann::json::array();
  for (const auto& rec : r.records) {
    records.push_back(to_json(rec));
    if (rec.errored) {
      errors.push_back({{"pair_id", rec.pair_id}, {"dataset", rec.dataset}, {"partition", rec.partition},
                        {"error", rec.error}});
    }
  }
  nlohmann::json reps = nlohmann::json::array();
  for (const auto& s : r.replicate_summaries) {
    reps.push_back({{"pair_id", s.pair_id},
                    {"dataset", s.dataset},
                    {"replicates", s.replicates},
                    {"class_significant_train", s.class_significant_train},
                    {"class_significant_test", s.class_significant_test},
                    {"score_significant_train", s.score_significant_train},
                    {"score_significant_test", s.score_significant_test}});
  }
  const char* ks = r.engine.ks_method == stats::KsMethod::exact        ? "exact"
                   : r.engine.ks_method == stats::KsMethod::asymptotic ? "asymptotic"
                                                                        : "automatic";
  return {
      {"engine",
       {{"score_tolerance", r.engine.score_tolerance},
        {"alpha", r.engine.alpha},
        {"yates_correction", r.engine.yates_correction},
        {"ks_method", ks}}},
      {"split_seed", r.split_seed},
      {"aggregates",
       {{"total_comparisons", a.total_comparisons},
        {"executed", a.executed},
        {"errored", a.errored},
        {"class_deviation_count", a.class_deviation_count},
        {"class_deviation_pct", a.class_deviation_pct},
        {"class_significant_count", a.class_significant_count},
        {"class_significant_pct", a.class_significant_pct},
        {"score_comparable_count", a.score_comparable_count},
        {"score_deviation_count", a.score_deviation_count},
        {"score_deviation_pct", a.score_deviation_pct},
        {"score_significant_count", a.score_significant_count},
        {"score_significant_pct", a.score_significant_pct}}},
      {"records", records},
      {"errors", errors},
      {"replicate_summaries", reps},
  };
}

inline CampaignReport report_from_json(const nlohmann::json& j) {
  try {
    CampaignReport r;
    const auto& e = j.at("engine");
    r.engine.score_tolerance = e.at("score_tolerance").get<double>();
    r.engine.alpha = e.at("alpha").get<double>();
    r.engine.yates_correction = e.at("yates_correction").get<bool>();
    const auto ks = e.at("ks_method").get<std::string>();
    r.engine.ks_method = ks == "exact"        ? stats::KsMethod::exact
                         : ks == "asymptotic" ? stats::KsMethod::asymptotic
                                              : stats::KsMethod::automatic;
    r.split_seed = j.at("split_seed").get<std::uint64_t>();
    const auto& a = j.at("aggregates");
    auto& g = r.aggregates;
    g.total_comparisons = a.at("total_comparisons").get<std::size_t>();
    g.executed = a.at("executed").get<std::size_t>();
    g.errored = a.at("errored").get<std::size_t>();
    g.class_deviation_count = a.at("class_deviation_count").get<std::size_t>();
    g.class_deviation_pct = a.at("class_deviation_pct").get<double>();
    g.class_significant_count = a.at("class_significant_count").get<std::size_t>();
    g.class_significant_pct = a.at("class_significant_pct").get<double>();
    g.score_comparable_count = a.at("score_comparable_count").get<std::size_t>();
    g.score_deviation_count = a.at("score_deviation_count").get<std::size_t>();
    g.score_deviation_pct = a.at("score_deviation_pct").get<double>();
    g.score_significant_count = a.at("score_significant_count").get<std::size_t>();
    g.score_significant_pct = a.at("score_significant_pct").get<double>();
    for (const auto& rec : j.at("records")) r.records.push_back(record_from_json(rec));
    for (const auto& s : j.value("replicate_summaries", nlohmann::json::array())) {
      r.replicate_summaries.push_back({s.at("pair_id").get<std::string>(), s.at("dataset").get<std::string>(),
                                       s.at("replicates").get<std::size_t>(),
                                       s.at("class_significant_train").get<double>(),
                                       s.at("class_significant_test").get<double>(),
                                       s.at("score_significant_train").get<double>(),
                                       s.at("score_significant_test").get<double>()});
    }
    return r;
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("report: ") + ex.what());
  }
}

// ---- CSV / markdown -------------------------------------------------------

inline const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols{"pair_id",     "dataset",          "partition",    "n",
                                             "delta",       "delta_rate",       "delta_score",  "delta_score_rate",
                                             "p_ks",        "p_chi2",           "exact_classes", "exact_scores",
                                             "dist_scores", "dist_classes",     "errored"};
  return cols;
}

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

inline std::string to_csv(const CampaignReport& r) {
  std::ostringstream out;
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  auto num = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  for (const auto& rec : r.records) {
    const auto& o = rec.outcome;
    out << csv_quote(rec.pair_id) << ',' << csv_quote(rec.dataset) << ',' << rec.partition << ',' << o.n << ','
        << o.delta << ',' << format_double(rec.delta_rate()) << ','
        << (o.delta_score ? std::to_string(*o.delta_score) : "") << ',' << num(rec.delta_score_rate()) << ','
        << num(o.p_ks) << ',' << format_double(o.p_chi2) << ',' << to_string(rec.verdict.exact_classes) << ','
        << to_string(rec.verdict.exact_scores) << ',' << to_string(rec.verdict.dist_scores) << ','
        << to_string(rec.verdict.dist_classes) << ',' << (rec.errored ? "true" : "false") << '\n';
  }
  return out.str();
}

inline std::string fixed1(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

inline std::string to_markdown(const CampaignReport& r) {
  const auto& a = r.aggregates;
  std::ostringstream md;
  md << "# Differential testing campaign\n\n";
  md << "alpha = " << format_double(r.engine.alpha) << ", score tolerance = " << format_double(r.engine.score_tolerance)
     << ", split seed = " << r.split_seed << "\n\n";
  md << "## Comparisons\n\n";
  md << "- " << a.total_comparisons << " comparisons (" << a.executed << " executed, " << a.errored << " errored).\n";
  md << "- Classes differ in " << a.class_deviation_count << " comparisons (" << fixed1(a.class_deviation_pct)
     << "%); " << a.class_significant_count << " (" << fixed1(a.class_significant_pct) << "%) are significant.\n";
  md << "- Scores are comparable in " << a.score_comparable_count << " comparisons; they differ in "
     << a.score_deviation_count << " (" << fixed1(a.score_deviation_pct) << "%), " << a.score_significant_count
     << " (" << fixed1(a.score_significant_pct) << "%) significantly.\n\n";

  // A pair deviates if any of its executed comparisons deviates.
  struct Rollup {
    std::string group;
    std::size_t executed = 0, class_dev = 0, class_sig = 0, comparable = 0, score_dev = 0, score_sig = 0;
  };
  std::map<std::string, Rollup> pairs;
  for (const auto& rec : r.records) {
    auto& p = pairs[rec.pair_id];
    p.group = rec.group;
    if (rec.errored) continue;
    ++p.executed;
    p.class_dev += rec.outcome.delta > 0;
    p.class_sig += rec.outcome.p_chi2 < r.engine.alpha;
    if (rec.scores_compared) {
      ++p.comparable;
      p.score_dev += rec.outcome.delta_score.value_or(0) > 0;
      p.score_sig += rec.outcome.p_ks.value_or(1.0) < r.engine.alpha;
    }
  }
  std::size_t n_pairs = 0, dev = 0, sig = 0, spairs = 0, sdev = 0, ssig = 0;
  for (const auto& [id, p] : pairs) {
    if (!p.executed) continue;
    ++n_pairs;
    dev += p.class_dev > 0;
    sig += p.class_sig > 0;
    if (p.comparable) {
      ++spairs;
      sdev += p.score_dev > 0;
      ssig += p.score_sig > 0;
    }
  }
  md << "## Pairs\n\n";
  md << "- " << n_pairs << " pairs executed; classes differ for " << dev << " (" << fixed1(percent(dev, n_pairs))
     << "%), significantly for " << sig << " (" << fixed1(percent(sig, n_pairs)) << "%).\n";
  md << "- " << spairs << " pairs with scores; scores differ for " << sdev << " (" << fixed1(percent(sdev, spairs))
     << "%), significantly for " << ssig << " (" << fixed1(percent(ssig, spairs)) << "%).\n\n";

  md << "## Per group\n\n";
  md << "| Group | Pair | Class dev. | Class sig. | Score dev. | Score sig. |\n";
  md << "|---|---|---|---|---|---|\n";
  std::vector<std::pair<std::string, std::string>> order;
  for (const auto& [id, p] : pairs) order.emplace_back(p.group, id);
  std::sort(order.begin(), order.end());
  for (const auto& [group, id] : order) {
    const auto& p = pairs[id];
    auto frac = [](std::size_t k, std::size_t n) {
      return n ? std::to_string(k) + "/" + std::to_string(n) : std::string("-");
    };
    md << "| " << group << " | " << id << " | " << frac(p.class_dev, p.executed) << " | "
       << frac(p.class_sig, p.executed) << " | " << frac(p.score_dev, p.comparable) << " | "
       << frac(p.score_sig, p.comparable) << " |\n";
  }
  if (a.errored) {
    md << "\n## Errored comparisons\n\n";
    for (const auto& rec : r.records) {
      if (rec.errored) md << "- " << rec.pair_id << " / " << rec.dataset << " / " << rec.partition << ": " << rec.error << "\n";
    }
  }
  if (!r.replicate_summaries.empty()) {
    md << "\n## Repeated samples\n\n| Pair | Dataset | Replicates | Class sig. (train) | Class sig. (test) |\n";
    md << "|---|---|---|---|---|\n";
    for (const auto& s : r.replicate_summaries) {
      md << "| " << s.pair_id << " | " << s.dataset << " | " << s.replicates << " | "
         << fixed1(100 * s.class_significant_train) << "% | " << fixed1(100 * s.class_significant_test) << "% |\n";
    }
  }
  return md.str();
}

/// Writes the selected formats ("json", "csv", "markdown") into `dir`.
inline std::vector<std::filesystem::path> write_report(const CampaignReport& r, const std::filesystem::path& dir,
                                                       const std::set<std::string>& formats) {
  std::vector<std::filesystem::path> written;
  if (formats.empty()) return written;
  for (const auto& f : formats) {
    if (f != "json" && f != "csv" && f != "markdown") throw InvalidArgument("unknown report format '" + f + "'");
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create report directory '" + dir.string() + "': " + ec.message());
  auto emit = [&](const std::string& name, const std::string& text) {
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    written.push_back(path);
  };
  if (formats.count("json")) emit("report.json", to_json(r).dump(2) + "\n");
  if (formats.count("csv")) emit("comparisons.csv", to_csv(r));
  if (formats.count("markdown")) emit("summary.md", to_markdown(r));
  return written;
}

}  // namespace mldiff::campaign

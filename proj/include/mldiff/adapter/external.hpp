#pragma once

// File-based protocol for external classifier executables:
//
//   <exe> --train train.csv --test test.csv --params params.json
//         --out-train pred_train.csv --out-test pred_test.csv [extra_args...]
//
// Predictions CSV: header index,class,score_0,score_1 (score columns omitted
// when the adapter reports no scores), one row per partition row.

#include <fcntl.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "mldiff/adapter/registry.hpp"
#include "mldiff/csv.hpp"
#include "mldiff/dataset.hpp"
#include "mldiff/diffengine.hpp"
#include "mldiff/error.hpp"

namespace mldiff::adapter {

struct AdapterSpec {
  std::filesystem::path executable;
  std::vector<std::string> extra_args;
  bool scores_available = true;
  double timeout_seconds = 60.0;
  bool keep_workdir = false;

  void validate() const {
    if (!(timeout_seconds > 0)) throw InvalidArgument("adapter timeout must be > 0");
    if (executable.empty()) throw InvalidArgument("adapter executable is empty");
  }
};

/// What the adapter is asked to train: the canonical config plus its rendering.
struct AdapterParams {
  std::string family;
  CanonicalConfig canonical;
  FrameworkParamSet rendered;
};

struct ExternalPredictions {
  PartitionPredictions train;
  PartitionPredictions test;
  std::string diagnostics;  // captured stdout + stderr
};

inline nlohmann::json to_json(const ConfigValue& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  if (const auto* d = std::get_if<double>(&v)) return *d;
  return std::get<std::string>(v);
}

inline nlohmann::json params_json(const AdapterParams& p) {
  nlohmann::json canonical = nlohmann::json::object();
  for (const auto& [k, v] : p.canonical.values()) canonical[k] = to_json(v);
  nlohmann::json list = nlohmann::json::array();
  for (const auto& [name, value] : p.rendered.params) list.push_back({{"name", name}, {"value", value}});
  return {{"family", p.family},
          {"canonical", canonical},
          {"rendered", {{"framework", p.rendered.framework}, {"algorithm", p.rendered.algorithm}, {"params", list}}}};
}

/// Scratch root for adapter work directories; MLDIFF_WORKDIR overrides.
inline std::filesystem::path default_work_root() {
  if (const char* env = std::getenv("MLDIFF_WORKDIR"); env && *env) return env;
  return std::filesystem::temp_directory_path() / "mldiff";
}

namespace detail {

inline std::filesystem::path make_unique_dir(const std::filesystem::path& root) {
  std::error_code ec;
  std::filesystem::create_directories(root, ec);
  if (ec) throw IoError("cannot create work root '" + root.string() + "': " + ec.message());
  std::string templ = (root / "run-XXXXXX").string();
  if (!::mkdtemp(templ.data())) {
    throw IoError("cannot create work directory under '" + root.string() + "': " + std::strerror(errno));
  }
  return templ;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string tail(const std::string& s, std::size_t max = 4000) {
  return s.size() <= max ? s : "..." + s.substr(s.size() - max);
}

struct ProcessResult {
  bool timed_out = false;
  int exit_status = 0;   // valid when exited
  int signal = 0;        // non-zero when killed by a signal
  std::string output;    // stdout followed by stderr
};

/// Runs argv[0] with its stdout/stderr redirected into `dir`; kills the whole
/// process group once `timeout_seconds` elapse.
inline ProcessResult run_process(const std::vector<std::string>& argv, const std::filesystem::path& dir,
                                 double timeout_seconds) {
  const auto out_path = dir / "stdout.txt";
  const auto err_path = dir / "stderr.txt";
  std::vector<char*> cargs;
  for (const auto& a : argv) cargs.push_back(const_cast<char*>(a.c_str()));
  cargs.push_back(nullptr);

  const pid_t pid = ::fork();
  if (pid < 0) throw AdapterError(AdapterError::Kind::launch, std::string("fork failed: ") + std::strerror(errno));
  if (pid == 0) {
    ::setpgid(0, 0);
    const int out = ::open(out_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    const int err = ::open(err_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (out >= 0) ::dup2(out, 1);
    if (err >= 0) ::dup2(err, 2);
    ::execv(cargs[0], cargs.data());
    const char msg[] = "exec failed\n";
    [[maybe_unused]] auto w = ::write(2, msg, sizeof msg - 1);
    ::_exit(127);
  }
  ::setpgid(pid, pid);

  ProcessResult result;
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_seconds);
  int status = 0;
  for (auto sleep = std::chrono::microseconds(200);; sleep = std::min(sleep * 2, std::chrono::microseconds(20000))) {
    const pid_t r = ::waitpid(pid, &status, WNOHANG);
    if (r == pid) break;
    if (r < 0 && errno != EINTR) throw AdapterError(AdapterError::Kind::launch, "waitpid failed");
    if (std::chrono::steady_clock::now() >= deadline) {
      ::kill(-pid, SIGKILL);
      ::kill(pid, SIGKILL);
      ::waitpid(pid, &status, 0);
      result.timed_out = true;
      break;
    }
    std::this_thread::sleep_for(sleep);
  }
  if (!result.timed_out) {
    if (WIFEXITED(status)) result.exit_status = WEXITSTATUS(status);
    if (WIFSIGNALED(status)) result.signal = WTERMSIG(status);
  }
  result.output = read_file(out_path);
  const auto err = read_file(err_path);
  if (!err.empty()) result.output += (result.output.empty() ? "" : "\n") + err;
  return result;
}

}  // namespace detail

/// Parses and validates a predictions file for a partition of `n` rows.
inline PartitionPredictions read_predictions(const std::filesystem::path& path, std::size_t n, bool with_scores) {
  auto fail = [&](const std::string& what) {
    return AdapterError(AdapterError::Kind::malformed, path.filename().string() + ": " + what);
  };
  csv::Table table;
  try {
    table = csv::read_table(path);
  } catch (const std::exception& ex) {
    throw fail(ex.what());
  }
  std::vector<std::string> expected{"index", "class"};
  if (with_scores) expected.insert(expected.end(), {"score_0", "score_1"});
  if (table.header != expected) throw fail("unexpected header");
  if (table.rows.size() != n) {
    throw fail("expected " + std::to_string(n) + " rows, got " + std::to_string(table.rows.size()));
  }
  PartitionPredictions out;
  out.classes.assign(n, -1);
  std::vector<Scores> scores(n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto& row = table.rows[r];
    const auto line = "line " + std::to_string(table.line_numbers[r]);
    std::size_t idx = 0;
    auto res = std::from_chars(row[0].data(), row[0].data() + row[0].size(), idx);
    if (res.ec != std::errc{} || res.ptr != row[0].data() + row[0].size() || idx >= n) {
      throw fail(line + ": bad index '" + row[0] + "'");
    }
    if (out.classes[idx] != -1) throw fail(line + ": duplicate index " + row[0]);
    if (row[1] != "0" && row[1] != "1") throw fail(line + ": class outside {0,1}: '" + row[1] + "'");
    out.classes[idx] = row[1] == "1" ? 1 : 0;
    if (with_scores) {
      for (std::size_t c = 0; c < 2; ++c) {
        double v = 0;
        if (!csv::parse_double(row[2 + c], v) || std::isnan(v)) {
          throw fail(line + ": score_" + std::to_string(c) + " is not a number: '" + row[2 + c] + "'");
        }
        if (v < -1e-6 || v > 1 + 1e-6) throw fail(line + ": score_" + std::to_string(c) + " outside [0,1]");
        scores[idx][c] = std::clamp(v, 0.0, 1.0);
      }
    }
  }
  if (with_scores) out.scores = std::move(scores);
  return out;
}

/// Writes predictions in the protocol format (shortest round-trip decimals).
inline void write_predictions(const std::filesystem::path& path, const PartitionPredictions& p) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << (p.scores ? "index,class,score_0,score_1\n" : "index,class\n");
  for (std::size_t i = 0; i < p.classes.size(); ++i) {
    out << i << ',' << p.classes[i];
    if (p.scores) out << ',' << format_double((*p.scores)[i][0]) << ',' << format_double((*p.scores)[i][1]);
    out << '\n';
  }
  if (!out) throw IoError("error while writing '" + path.string() + "'");
}

/// Runs one external adapter on a split. Each call works in a fresh
/// directory under `work_root`, so concurrent calls never collide.
inline ExternalPredictions run_external(const AdapterSpec& a, const SplitDataset& data, const AdapterParams& params,
                                        const std::filesystem::path& work_root = default_work_root()) {
  a.validate();
  if (!std::filesystem::exists(a.executable)) {
    throw AdapterError(AdapterError::Kind::launch, "adapter executable not found: " + a.executable.string());
  }
  const auto dir = detail::make_unique_dir(work_root);
  struct Cleanup {
    std::filesystem::path dir;
    bool keep;
    ~Cleanup() {
      std::error_code ec;
      if (!keep) std::filesystem::remove_all(dir, ec);
    }
  } cleanup{dir, a.keep_workdir};

  write_dataset_csv(dir / "train.csv", data.train);
  write_dataset_csv(dir / "test.csv", data.test);
  {
    std::ofstream out(dir / "params.json");
    out << params_json(params).dump(2) << '\n';
    if (!out) throw IoError("cannot write params.json in '" + dir.string() + "'");
  }
  std::vector<std::string> argv{a.executable.string(),
                                "--train", (dir / "train.csv").string(),
                                "--test", (dir / "test.csv").string(),
                                "--params", (dir / "params.json").string(),
                                "--out-train", (dir / "pred_train.csv").string(),
                                "--out-test", (dir / "pred_test.csv").string()};
  argv.insert(argv.end(), a.extra_args.begin(), a.extra_args.end());

  const auto proc = detail::run_process(argv, dir, a.timeout_seconds);
  const auto name = a.executable.filename().string();
  if (proc.timed_out) {
    throw AdapterError(AdapterError::Kind::timeout,
                       name + ": timed out after " + format_double(a.timeout_seconds) + " s", detail::tail(proc.output));
  }
  if (proc.signal != 0) {
    throw AdapterError(AdapterError::Kind::exit_status, name + ": killed by signal " + std::to_string(proc.signal),
                       detail::tail(proc.output));
  }
  if (proc.exit_status != 0) {
    throw AdapterError(AdapterError::Kind::exit_status, name + ": exit status " + std::to_string(proc.exit_status),
                       detail::tail(proc.output));
  }
  ExternalPredictions out;
  out.diagnostics = detail::tail(proc.output);
  try {
    out.train = read_predictions(dir / "pred_train.csv", data.train.rows(), a.scores_available);
    out.test = read_predictions(dir / "pred_test.csv", data.test.rows(), a.scores_available);
  } catch (const AdapterError& ex) {
    throw AdapterError(ex.kind(), name + ": " + ex.what(), out.diagnostics);
  }
  return out;
}

}  // namespace mldiff::adapter

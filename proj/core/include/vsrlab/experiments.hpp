#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vsrlab/evolution.hpp"

namespace vsr {

// Parses flat "key=value" text ('#' starts a comment). Unknown keys are
// rejected by the callers that consume specific keys.
std::map<std::string, std::string> parse_key_values(const std::string& text);

// A batch of evolution runs: every (strategy, task) combination is repeated
// `repetitions` times with seeds seed_base + repetition index.
struct CampaignConfig {
  std::vector<StrategyId> strategies;
  std::vector<TaskId> tasks;
  int repetitions = 1;
  std::uint64_t seed_base = 0;
  EvoConfig base;  // strategy/task/seed/run_dir are overwritten per run
  std::filesystem::path out_root;
  bool force = false;  // rerun runs that already look complete
};

std::filesystem::path run_directory(const CampaignConfig& campaign,
                                    StrategyId strategy, TaskId task, int rep);

// True when the run directory holds a full summary and a best record.
bool run_completed(const std::filesystem::path& run_dir, int n_gen);

// Executes the campaign, skipping completed runs unless force is set; writes
// <out_root>/qstar.csv (strategy, task, repetition, q_star). Failures are
// reported on stderr and counted in the return value; the campaign continues.
int cmd_evolve(const CampaignConfig& campaign);

struct RelearnOptions {
  std::filesystem::path run_dir;
  int n_final = 500;
  std::optional<TaskId> task_override;  // set: transfer to another task
  std::uint64_t seed = 1;
  std::filesystem::path out_csv;  // default: <run_dir>/relearn_<task>.csv
  EvoConfig base;                 // sim / task / BO settings to reuse
  bool force = false;
};

// Re-learns a brain for the run's best body from one random starting
// candidate, optionally on another task; appends one row to the relearn
// table. Throws MissingRun when the run directory lacks a best record.
std::filesystem::path cmd_relearn(const RelearnOptions& options);

struct CurveOptions {
  std::string body_text;
  std::vector<std::string> modes;  // subset of {"nobo", "il", "sl"}
  int budget = 100;
  int seeds = 5;
  std::uint64_t seed_base = 0;
  int n0 = 8;  // SL warm-start size
  EvoConfig base;
  std::filesystem::path out_csv;
  bool force = false;
};

// Best-so-far learning curves on a fixed body. The SL mode warm-starts from
// the n0 best of the corresponding IL run's first 50 samples.
std::filesystem::path cmd_learning_curve(const CurveOptions& options);

struct AnalyzeOptions {
  std::filesystem::path campaign_dir;
  bool force = false;
};

// Emits per-run best-body descriptors (descriptors.csv) and per-generation
// diversity curves (diversity_curves.csv) into the campaign directory.
void cmd_analyze(const AnalyzeOptions& options);

struct StatsOptions {
  std::filesystem::path qstar_csv;
  std::string task;  // rows are filtered to this task
  double alpha = 0.05;
  std::filesystem::path out_csv;
  bool force = false;
};

// Pairwise Mann-Whitney comparison of strategies on one task with
// Benjamini-Hochberg correction; one CSV row per strategy pair.
std::filesystem::path cmd_stats(const StatsOptions& options);

}  // namespace vsr

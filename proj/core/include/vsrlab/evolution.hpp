#pragma once

#include <atomic>
#include <filesystem>
#include <limits>
#include <optional>
#include <vector>

#include "vsrlab/bayesopt.hpp"
#include "vsrlab/strategies.hpp"
#include "vsrlab/tasks.hpp"

namespace vsr {

// One learned robot: its body, the sample archive produced by its learning
// run, and the resulting quality (the best observed value). IL individuals
// additionally carry a genotype parameter vector.
struct Individual {
  BodyGrid body;
  std::optional<Eigen::VectorXd> genotype;  // IL mode only
  SampleArchive learned;
  double quality = -std::numeric_limits<double>::infinity();
  std::optional<int> parent;
  bool failed = false;
  // Episode seed that produced the best sample; re-running it reproduces
  // quality exactly on the static tasks.
  std::uint64_t best_episode_seed = 0;
};

struct EvoConfig {
  int n_pop = 200;
  int n_gen = 50;
  int n_tour = 4;
  double sigma_mut = 0.1;
  StrategyId strategy = StrategyId::BestMany;
  TaskId task = TaskId::Simple;
  BOConfig bo;
  SimConfig sim;
  TaskParams task_params;
  std::uint64_t seed = 0;
  int jobs = 1;  // worker threads for within-generation evaluation
  // Run directory for config copy, checkpoints, summaries. Empty: in-memory
  // only (no persistence, no resume).
  std::filesystem::path run_dir;

  void validate() const;
};

struct GenerationSummary {
  int gen = 0;
  double best_q = 0.0;
  double mean_q = 0.0;
  double diversity = 0.0;
};

struct RunRecord {
  std::vector<std::vector<Individual>> generations;
  std::vector<GenerationSummary> summary;
  Individual best;  // best-ever across all generations
  int best_gen = -1;
  long episodes = 0;  // instrumented episode counter

  double best_quality() const { return best.quality; }
};

// Draws n_tour distinct individuals uniformly and returns the index of the
// highest-quality one (lowest index on ties).
int tournament_select(std::span<const Individual> pop, int n_tour, Rng& rng);

// Learns a brain for one body: bo_learn for every strategy except NoBO,
// which uses random_learn. The objective simulates one episode per
// evaluation, seeded from (eval_seed_base, evaluation index). Failures mark
// the individual failed with quality -inf instead of propagating.
Individual evaluate_individual(const BodyGrid& body,
                               std::optional<Eigen::VectorXd> genotype,
                               const std::vector<InitCandidate>& candidates,
                               const EvoConfig& cfg,
                               std::uint64_t eval_seed_base,
                               std::atomic<long>& episode_counter);

// The full generational run: random initialization, tournament selection +
// mutation, per-body learning with strategy-selected candidates, full
// replacement, best-ever tracking. Checkpoints after every generation when a
// run directory is set, and resumes from the last checkpoint if one exists.
RunRecord evolve(const EvoConfig& cfg);

// Run-directory layout helpers shared with the CLI.
std::filesystem::path checkpoint_path(const std::filesystem::path& run_dir,
                                      int gen);
void save_generation(const std::filesystem::path& run_dir, int gen,
                     const std::vector<Individual>& pop);
std::vector<Individual> load_generation(const std::filesystem::path& run_dir,
                                        int gen);  // throws MissingRun
void save_best(const std::filesystem::path& run_dir, const Individual& best,
               int best_gen);
// (body, theta, quality, gen, best_episode_seed)
struct BestRecord {
  BodyGrid body;
  Eigen::VectorXd theta;
  double quality = 0.0;
  int gen = -1;
  std::uint64_t episode_seed = 0;
};
BestRecord load_best(const std::filesystem::path& run_dir);  // throws MissingRun

}  // namespace vsr

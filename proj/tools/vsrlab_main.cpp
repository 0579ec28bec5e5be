// vsrlab: evolve voxel soft robots, re-learn brains, compare learning
// strategies, and analyze campaign outputs.
//
// Subcommands: evolve | relearn | transfer | curve | analyze | stats.
// Every subcommand accepts --config FILE (flat key=value lines); command-line
// flags override file values. Exit code 0 only if everything succeeded.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "vsrlab/csv.hpp"
#include "vsrlab/experiments.hpp"

using namespace vsr;
namespace fs = std::filesystem;

namespace {

struct CommonOpts {
  int n_pop = 200;
  int n_gen = 50;
  int n_tour = 4;
  double sigma_mut = 0.1;
  int n0 = 8;
  int n_final = 50;
  double ucb_beta = 3.0;
  double bound_lower = -2.0;
  double bound_upper = 2.0;
  double length_scale = 10.0;
  int restarts = 8;
  int max_opt_iterations = 100;
  int episode_steps = 500;
  int jobs = 1;
  std::string task = "simple";
  // Task geometry.
  double step_rise = 0.3, step_run = 3.0;
  double box_w = 2.0, box_h = 1.0;
  double drop_height = 3.0, gap_max = 2.0;
};

void add_common_options(CLI::App* cmd, CommonOpts& o) {
  cmd->set_config("--config", "",
                  "Flat key=value config file; flags override");
  cmd->add_option("--n-pop", o.n_pop, "Population size");
  cmd->add_option("--n-gen", o.n_gen, "Generations");
  cmd->add_option("--n-tour", o.n_tour, "Tournament size");
  cmd->add_option("--sigma-mut", o.sigma_mut, "Genotype mutation std (IL)");
  cmd->add_option("--n0", o.n0, "Initial learning candidates");
  cmd->add_option("--n-final", o.n_final, "Learning evaluation budget");
  cmd->add_option("--ucb-beta", o.ucb_beta, "Acquisition exploration weight");
  cmd->add_option("--bound-lower", o.bound_lower, "Search bound, lower");
  cmd->add_option("--bound-upper", o.bound_upper, "Search bound, upper");
  cmd->add_option("--length-scale", o.length_scale, "Matern 5/2 length scale");
  cmd->add_option("--restarts", o.restarts, "Acquisition restarts");
  cmd->add_option("--max-opt-iterations", o.max_opt_iterations,
                  "Quasi-Newton iteration cap");
  cmd->add_option("--episode-steps", o.episode_steps,
                  "Control steps per episode");
  cmd->add_option("--jobs", o.jobs, "Worker threads per run");
  cmd->add_option("--task", o.task, "Task: simple|steps|carry|catch");
  cmd->add_option("--step-rise", o.step_rise, "Steps terrain rise");
  cmd->add_option("--step-run", o.step_run, "Steps terrain run");
  cmd->add_option("--box-w", o.box_w, "Payload width");
  cmd->add_option("--box-h", o.box_h, "Payload height");
  cmd->add_option("--drop-height", o.drop_height, "Catch drop height");
  cmd->add_option("--gap-max", o.gap_max, "Catch max |x-gap|");
}

EvoConfig to_evo_config(const CommonOpts& o) {
  EvoConfig cfg;
  cfg.n_pop = o.n_pop;
  cfg.n_gen = o.n_gen;
  cfg.n_tour = o.n_tour;
  cfg.sigma_mut = o.sigma_mut;
  cfg.task = task_from_name(o.task);
  cfg.bo.n0 = o.n0;
  cfg.bo.n_final = o.n_final;
  cfg.bo.ucb_beta = o.ucb_beta;
  cfg.bo.lower = o.bound_lower;
  cfg.bo.upper = o.bound_upper;
  cfg.bo.length_scale = o.length_scale;
  cfg.bo.restarts = o.restarts;
  cfg.bo.max_opt_iterations = o.max_opt_iterations;
  cfg.task_params.episode_steps = o.episode_steps;
  cfg.task_params.step_rise = o.step_rise;
  cfg.task_params.step_run = o.step_run;
  cfg.task_params.box_w = o.box_w;
  cfg.task_params.box_h = o.box_h;
  cfg.task_params.drop_height = o.drop_height;
  cfg.task_params.gap_max = o.gap_max;
  cfg.jobs = o.jobs;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Body-brain co-optimization of 2-D voxel soft robots"};
  app.require_subcommand(1);

  CommonOpts common;
  std::string out_root = "runs";
  bool force = false;

  // evolve: run a campaign of evolution runs.
  auto* evolve_cmd = app.add_subcommand(
      "evolve", "Run evolution campaigns (strategy x task x repetitions)");
  std::vector<std::string> strategies = {"best-n"};
  std::vector<std::string> tasks_list;
  int repetitions = 1;
  std::uint64_t seed_base = 1;
  add_common_options(evolve_cmd, common);
  evolve_cmd->add_option("--strategy", strategies,
                         "Strategies: il|nobo|parent|best-1|best-n|similar-1|"
                         "similar-n|random-1|random-n");
  evolve_cmd->add_option("--tasks", tasks_list,
                         "Tasks for the campaign (default: --task)");
  evolve_cmd->add_option("--reps", repetitions, "Repetitions per combination");
  evolve_cmd->add_option("--seed-base", seed_base,
                         "Run seed = seed-base + repetition index");
  evolve_cmd->add_option("--out", out_root, "Output root directory")
      ->envname("VSRLAB_OUT");
  evolve_cmd->add_flag("--force", force, "Redo completed runs");

  // relearn / transfer.
  auto* relearn_cmd = app.add_subcommand(
      "relearn", "Re-learn a brain for a finished run's best body");
  std::string run_dir_str;
  int n_final_relearn = 500;
  std::string dest_task;
  std::uint64_t relearn_seed = 1;
  std::string relearn_out;
  add_common_options(relearn_cmd, common);
  relearn_cmd->add_option("--run", run_dir_str, "Run directory")->required();
  relearn_cmd->add_option("--budget", n_final_relearn,
                          "Re-learning evaluation budget");
  relearn_cmd->add_option("--dest-task", dest_task,
                          "Destination task (default: the run's own)");
  relearn_cmd->add_option("--seed", relearn_seed, "Re-learning seed");
  relearn_cmd->add_option("--out-csv", relearn_out, "Output CSV path");
  relearn_cmd->add_flag("--force", force, "Overwrite an existing table");

  auto* transfer_cmd = app.add_subcommand(
      "transfer", "Alias of relearn with a destination task override");
  std::string transfer_run, transfer_task, transfer_out;
  int transfer_budget = 500;
  std::uint64_t transfer_seed = 1;
  add_common_options(transfer_cmd, common);
  transfer_cmd->add_option("--run", transfer_run, "Run directory")->required();
  transfer_cmd->add_option("--dest-task", transfer_task, "Destination task")
      ->required();
  transfer_cmd->add_option("--budget", transfer_budget,
                           "Re-learning evaluation budget");
  transfer_cmd->add_option("--seed", transfer_seed, "Re-learning seed");
  transfer_cmd->add_option("--out-csv", transfer_out, "Output CSV path");
  transfer_cmd->add_flag("--force", force, "Overwrite an existing table");

  // curve: fixed-body learning curves.
  auto* curve_cmd = app.add_subcommand(
      "curve", "Best-so-far learning curves on a fixed body");
  std::string body_text;
  std::vector<std::string> modes = {"nobo", "il", "sl"};
  int budget = 100;
  int curve_seeds = 5;
  std::uint64_t curve_seed_base = 1;
  std::string curve_out = "curve.csv";
  add_common_options(curve_cmd, common);
  curve_cmd->add_option("--body", body_text, "Body text form")->required();
  curve_cmd->add_option("--mode", modes, "Modes: nobo|il|sl");
  curve_cmd->add_option("--budget", budget, "Learning iterations");
  curve_cmd->add_option("--seeds", curve_seeds, "Number of seeds");
  curve_cmd->add_option("--seed-base", curve_seed_base, "First seed");
  curve_cmd->add_option("--out-csv", curve_out, "Output CSV path");
  curve_cmd->add_flag("--force", force, "Overwrite an existing table");

  // analyze: campaign descriptors + diversity curves.
  auto* analyze_cmd = app.add_subcommand(
      "analyze", "Emit best-body descriptors and diversity curves");
  std::string campaign_dir;
  analyze_cmd->add_option("--campaign", campaign_dir, "Campaign directory")
      ->required();
  analyze_cmd->add_flag("--force", force, "Rebuild existing tables");

  // stats: pairwise significance matrix.
  auto* stats_cmd = app.add_subcommand(
      "stats", "Pairwise Mann-Whitney comparison with BH correction");
  std::string qstar_csv, stats_task = "simple", stats_out;
  double alpha = 0.05;
  stats_cmd->add_option("--qstar", qstar_csv, "Campaign q* table")->required();
  stats_cmd->add_option("--task", stats_task, "Task to compare on");
  stats_cmd->add_option("--alpha", alpha, "Significance level");
  stats_cmd->add_option("--out-csv", stats_out, "Output CSV path");
  stats_cmd->add_flag("--force", force, "Overwrite an existing table");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(evolve_cmd)) {
      CampaignConfig campaign;
      for (const auto& s : strategies)
        campaign.strategies.push_back(strategy_from_name(s));
      if (tasks_list.empty()) tasks_list = {common.task};
      for (const auto& t : tasks_list)
        campaign.tasks.push_back(task_from_name(t));
      campaign.repetitions = repetitions;
      campaign.seed_base = seed_base;
      campaign.base = to_evo_config(common);
      campaign.base.validate();
      campaign.out_root = out_root;
      campaign.force = force;
      const int failures = cmd_evolve(campaign);
      if (failures > 0) {
        std::cerr << failures << " run(s) failed\n";
        return 1;
      }
      std::cout << "campaign table: "
                << (campaign.out_root / "qstar.csv").string() << '\n';
      return 0;
    }
    if (app.got_subcommand(relearn_cmd) || app.got_subcommand(transfer_cmd)) {
      const bool is_transfer = app.got_subcommand(transfer_cmd);
      RelearnOptions opt;
      opt.run_dir = is_transfer ? transfer_run : run_dir_str;
      opt.n_final = is_transfer ? transfer_budget : n_final_relearn;
      opt.seed = is_transfer ? transfer_seed : relearn_seed;
      opt.base = to_evo_config(common);
      opt.force = force;
      const std::string& dest = is_transfer ? transfer_task : dest_task;
      if (!dest.empty()) opt.task_override = task_from_name(dest);
      const std::string& out = is_transfer ? transfer_out : relearn_out;
      if (!out.empty()) opt.out_csv = out;
      std::cout << "relearn table: " << cmd_relearn(opt).string() << '\n';
      return 0;
    }
    if (app.got_subcommand(curve_cmd)) {
      CurveOptions opt;
      opt.body_text = body_text;
      opt.modes = modes;
      opt.budget = budget;
      opt.seeds = curve_seeds;
      opt.seed_base = curve_seed_base;
      opt.n0 = common.n0;
      opt.base = to_evo_config(common);
      opt.out_csv = curve_out;
      opt.force = force;
      std::cout << "curve table: " << cmd_learning_curve(opt).string() << '\n';
      return 0;
    }
    if (app.got_subcommand(analyze_cmd)) {
      cmd_analyze({campaign_dir, force});
      std::cout << "analysis tables written under " << campaign_dir << '\n';
      return 0;
    }
    if (app.got_subcommand(stats_cmd)) {
      StatsOptions opt;
      opt.qstar_csv = qstar_csv;
      opt.task = stats_task;
      opt.alpha = alpha;
      if (!stats_out.empty()) opt.out_csv = stats_out;
      opt.force = force;
      std::cout << "stats table: " << cmd_stats(opt).string() << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

#include "vsrlab/experiments.hpp"

#include <algorithm>
#include <iostream>
#include <numeric>

#include "vsrlab/csv.hpp"
#include "vsrlab/error.hpp"
#include "vsrlab/stats.hpp"

namespace vsr {

namespace fs = std::filesystem;

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> out;
  std::size_t start = 0;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    start = end + 1;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("config line is not key=value: '" + line + "'");
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

fs::path run_directory(const CampaignConfig& campaign, StrategyId strategy,
                       TaskId task, int rep) {
  return campaign.out_root / (strategy_name(strategy) + "_" + task_name(task) +
                              "_r" + std::to_string(rep));
}

bool run_completed(const fs::path& run_dir, int n_gen) {
  if (!fs::exists(run_dir / "best.jsonl")) return false;
  if (!fs::exists(run_dir / "summary.csv")) return false;
  try {
    const CsvTable summary = load_csv(run_dir / "summary.csv");
    return static_cast<int>(summary.rows.size()) == n_gen;
  } catch (const Error&) {
    return false;
  }
}

int cmd_evolve(const CampaignConfig& campaign) {
  fs::create_directories(campaign.out_root);
  CsvTable qstar;
  qstar.header = {"strategy", "task", "repetition", "q_star"};

  int failures = 0;
  for (StrategyId strategy : campaign.strategies) {
    for (TaskId task : campaign.tasks) {
      for (int rep = 0; rep < campaign.repetitions; ++rep) {
        const fs::path run_dir = run_directory(campaign, strategy, task, rep);
        EvoConfig cfg = campaign.base;
        cfg.strategy = strategy;
        cfg.task = task;
        cfg.seed = campaign.seed_base + static_cast<std::uint64_t>(rep);
        cfg.run_dir = run_dir;

        if (campaign.force && fs::exists(run_dir)) fs::remove_all(run_dir);

        try {
          if (!run_completed(run_dir, cfg.n_gen)) evolve(cfg);
          const BestRecord best = load_best(run_dir);
          qstar.rows.push_back({strategy_name(strategy), task_name(task),
                                std::to_string(rep),
                                format_double(best.quality)});
        } catch (const std::exception& e) {
          std::cerr << "run failed (" << run_dir.string() << "): " << e.what()
                    << '\n';
          ++failures;
        }
      }
    }
  }
  save_csv(qstar, campaign.out_root / "qstar.csv");
  return failures;
}

namespace {

// Episode-per-evaluation objective for a fixed body on a fixed task.
Objective episode_objective(const BodyGrid& body, TaskId task,
                            const EvoConfig& base, std::uint64_t seed,
                            std::string_view stream_name) {
  auto counter = std::make_shared<int>(0);
  return [body, task, base, seed, name = std::string(stream_name),
          counter](const Eigen::VectorXd& theta) {
    const std::uint64_t episode_seed = mix_seed(seed, name, (*counter)++);
    return run_episode(body, theta, task, episode_seed, base.sim,
                       base.task_params)
        .quality;
  };
}

std::string source_task_of(const fs::path& run_dir) {
  const auto kv = parse_key_values(read_text_file(run_dir / "config.copy"));
  const auto it = kv.find("task");
  if (it == kv.end())
    throw MissingRun("config.copy lacks a task key: " + run_dir.string());
  return it->second;
}

}  // namespace

fs::path cmd_relearn(const RelearnOptions& options) {
  const BestRecord best = load_best(options.run_dir);
  const std::string source_task = source_task_of(options.run_dir);
  const TaskId dest_task = options.task_override
                               ? *options.task_override
                               : task_from_name(source_task);

  fs::path out_csv = options.out_csv;
  if (out_csv.empty())
    out_csv = options.run_dir / ("relearn_" + task_name(dest_task) + ".csv");
  if (fs::exists(out_csv) && !options.force) return out_csv;

  BOConfig bo = options.base.bo;
  bo.n0 = 1;
  bo.n_final = options.n_final;

  Rng init_rng = make_stream(options.seed, "relearn-init");
  const ControllerSpec spec;
  std::vector<Eigen::VectorXd> init = {random_params(spec, init_rng)};

  Rng learn_rng = make_stream(options.seed, "relearn");
  const SampleArchive archive =
      bo_learn(episode_objective(best.body, dest_task, options.base,
                                 options.seed, "relearn-ep"),
               init, bo, learn_rng);

  CsvTable table;
  table.header = {"run",      "source_task", "dest_task",
                  "n_final",  "q_original",  "q_relearned"};
  table.rows.push_back({options.run_dir.filename().string(), source_task,
                        task_name(dest_task), std::to_string(options.n_final),
                        format_double(best.quality),
                        format_double(archive.best().y)});
  save_csv(table, out_csv);
  return out_csv;
}

fs::path cmd_learning_curve(const CurveOptions& options) {
  const BodyGrid body = BodyGrid::from_text(options.body_text);
  for (const std::string& mode : options.modes)
    if (mode != "nobo" && mode != "il" && mode != "sl")
      throw ParseError("unknown learning mode: " + mode);
  if (fs::exists(options.out_csv) && !options.force) return options.out_csv;

  const bool want_nobo =
      std::count(options.modes.begin(), options.modes.end(), "nobo") > 0;
  const bool want_il =
      std::count(options.modes.begin(), options.modes.end(), "il") > 0;
  const bool want_sl =
      std::count(options.modes.begin(), options.modes.end(), "sl") > 0;

  BOConfig bo = options.base.bo;
  bo.n_final = options.budget;

  CsvTable table;
  table.header = {"mode", "seed", "iteration", "best_q"};
  const ControllerSpec spec;
  const int dim = spec.param_count();

  auto emit = [&](const std::string& mode, int seed_index,
                  const SampleArchive& archive) {
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < archive.size(); ++i) {
      best = std::max(best, archive[i].y);
      table.rows.push_back({mode, std::to_string(seed_index),
                            std::to_string(i + 1), format_double(best)});
    }
  };

  for (int s = 0; s < options.seeds; ++s) {
    const std::uint64_t seed = options.seed_base + static_cast<std::uint64_t>(s);

    if (want_nobo) {
      Rng rng = make_stream(seed, "curve-nobo");
      emit("nobo", s,
           random_learn(episode_objective(body, options.base.task,
                                          options.base, seed, "nobo-ep"),
                        dim, bo, rng));
    }

    SampleArchive il_archive;
    if (want_il || want_sl) {
      Rng init_rng = make_stream(seed, "curve-il-init");
      std::vector<Eigen::VectorXd> init = {random_params(spec, init_rng)};
      Rng rng = make_stream(seed, "curve-il");
      il_archive = bo_learn(episode_objective(body, options.base.task,
                                              options.base, seed, "il-ep"),
                            init, bo, rng);
      if (want_il) emit("il", s, il_archive);
    }

    if (want_sl) {
      // Warm start: the n0 best of the IL run's first 50 samples.
      const int window = std::min(50, il_archive.size());
      std::vector<int> order(window);
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
        return il_archive[i].y > il_archive[j].y;
      });
      std::vector<Eigen::VectorXd> init;
      for (int i = 0; i < std::min(options.n0, window); ++i)
        init.push_back(il_archive[order[i]].x);

      BOConfig sl_bo = bo;
      sl_bo.n0 = std::max(options.n0, 1);
      Rng rng = make_stream(seed, "curve-sl");
      emit("sl", s,
           bo_learn(episode_objective(body, options.base.task, options.base,
                                      seed, "sl-ep"),
                    init, sl_bo, rng));
    }
  }

  save_csv(table, options.out_csv);
  return options.out_csv;
}

void cmd_analyze(const AnalyzeOptions& options) {
  if (!fs::is_directory(options.campaign_dir))
    throw MissingRun("no such campaign directory: " +
                     options.campaign_dir.string());

  const fs::path descriptors_csv = options.campaign_dir / "descriptors.csv";
  const fs::path diversity_csv =
      options.campaign_dir / "diversity_curves.csv";
  if (!options.force && fs::exists(descriptors_csv) &&
      fs::exists(diversity_csv))
    return;

  std::vector<fs::path> run_dirs;
  for (const auto& entry : fs::directory_iterator(options.campaign_dir))
    if (entry.is_directory() && fs::exists(entry.path() / "config.copy"))
      run_dirs.push_back(entry.path());
  std::sort(run_dirs.begin(), run_dirs.end());
  if (run_dirs.empty())
    throw MissingRun("campaign directory holds no runs: " +
                     options.campaign_dir.string());

  CsvTable desc;
  desc.header = {"run",    "strategy",    "task",       "repetition",
                 "q_star", "active_rate", "compactness"};
  CsvTable div;
  div.header = {"run", "strategy", "task", "repetition", "gen", "diversity"};

  for (const fs::path& run_dir : run_dirs) {
    const auto kv = parse_key_values(read_text_file(run_dir / "config.copy"));
    const std::string strategy = kv.count("strategy") ? kv.at("strategy") : "?";
    const std::string task = kv.count("task") ? kv.at("task") : "?";
    const std::string name = run_dir.filename().string();
    std::string rep = "0";
    if (const auto pos = name.rfind("_r"); pos != std::string::npos)
      rep = name.substr(pos + 2);

    const BestRecord best = load_best(run_dir);
    const BodyDescriptor d = descriptors(best.body);
    desc.rows.push_back({name, strategy, task, rep,
                         format_double(best.quality),
                         format_double(d.active_rate),
                         format_double(d.compactness)});

    const CsvTable run_div = load_csv(run_dir / "diversity.csv");
    const int gen_col = run_div.column("gen");
    const int div_col = run_div.column("diversity");
    for (const auto& row : run_div.rows)
      div.rows.push_back({name, strategy, task, rep, row[gen_col],
                          row[div_col]});
  }

  save_csv(desc, descriptors_csv);
  save_csv(div, diversity_csv);
}

fs::path cmd_stats(const StatsOptions& options) {
  const CsvTable qstar = load_csv(options.qstar_csv);
  const int strategy_col = qstar.column("strategy");
  const int task_col = qstar.column("task");
  const int q_col = qstar.column("q_star");

  // Group q* values by strategy, in first-appearance order.
  std::vector<std::pair<std::string, std::vector<double>>> groups;
  for (const auto& row : qstar.rows) {
    if (row[task_col] != options.task) continue;
    const std::string& strategy = row[strategy_col];
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const auto& g) { return g.first == strategy; });
    if (it == groups.end()) {
      groups.push_back({strategy, {}});
      it = groups.end() - 1;
    }
    it->second.push_back(parse_double(row[q_col]));
  }
  if (groups.size() < 2)
    throw MissingRun("stats needs at least two strategies for task '" +
                     options.task + "'");

  fs::path out_csv = options.out_csv;
  if (out_csv.empty())
    out_csv = options.qstar_csv.parent_path() /
              ("stats_" + options.task + ".csv");
  if (fs::exists(out_csv) && !options.force) return out_csv;

  const StatsResult result = pairwise_comparison(groups, options.alpha);
  CsvTable table;
  table.header = {"strategy_a", "strategy_b", "p_raw", "p_adjusted",
                  "significant"};
  const int g = static_cast<int>(result.labels.size());
  for (int i = 0; i < g; ++i)
    for (int j = i + 1; j < g; ++j)
      table.rows.push_back({result.labels[i], result.labels[j],
                            format_double(result.p_raw[i][j]),
                            format_double(result.p_adjusted[i][j]),
                            result.significant[i][j] ? "1" : "0"});
  save_csv(table, out_csv);
  return out_csv;
}

}  // namespace vsr

#include "vsrlab/evolution.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "vsrlab/csv.hpp"
#include "vsrlab/error.hpp"

namespace vsr {

namespace fs = std::filesystem;
using nlohmann::json;

void EvoConfig::validate() const {
  if (n_pop < 1 || n_gen < 1) throw Error("EvoConfig: counts must be >= 1");
  if (n_tour < 1 || n_tour > n_pop)
    throw Error("EvoConfig: need 1 <= n_tour <= n_pop");
  if (sigma_mut < 0.0) throw Error("EvoConfig: sigma_mut must be >= 0");
  if (jobs < 1) throw Error("EvoConfig: jobs must be >= 1");
  bo.validate();
  sim.validate();
}

int tournament_select(std::span<const Individual> pop, int n_tour, Rng& rng) {
  const int n = static_cast<int>(pop.size());
  if (n_tour > n) throw Error("tournament_select: n_tour exceeds population");

  // Partial Fisher-Yates: n_tour distinct indices, uniform over subsets.
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < n_tour; ++i)
    std::swap(idx[i], idx[uniform_int(rng, i, n - 1)]);

  int winner = idx[0];
  for (int i = 1; i < n_tour; ++i) {
    const int c = idx[i];
    if (pop[c].quality > pop[winner].quality ||
        (pop[c].quality == pop[winner].quality && c < winner))
      winner = c;
  }
  return winner;
}

Individual evaluate_individual(const BodyGrid& body,
                               std::optional<Eigen::VectorXd> genotype,
                               const std::vector<InitCandidate>& candidates,
                               const EvoConfig& cfg,
                               std::uint64_t eval_seed_base,
                               std::atomic<long>& episode_counter) {
  Individual ind;
  ind.body = body;
  ind.genotype = std::move(genotype);

  int eval_index = 0;
  const Objective objective = [&](const Eigen::VectorXd& theta) {
    const std::uint64_t episode_seed =
        mix_seed(eval_seed_base, "ep", eval_index);
    ++eval_index;
    const EpisodeResult r = run_episode(body, theta, cfg.task, episode_seed,
                                        cfg.sim, cfg.task_params);
    ++episode_counter;
    return r.quality;
  };

  Rng learn_rng = make_stream(eval_seed_base, "learn");
  try {
    if (cfg.strategy == StrategyId::NoBO) {
      const int dim = ControllerSpec{}.param_count();
      ind.learned = random_learn(objective, dim, cfg.bo, learn_rng);
    } else {
      std::vector<Eigen::VectorXd> init;
      init.reserve(candidates.size());
      for (const InitCandidate& c : candidates) init.push_back(c.theta);
      ind.learned = bo_learn(objective, init, cfg.bo, learn_rng);
    }
    ind.quality = ind.learned.best().y;
    ind.best_episode_seed =
        mix_seed(eval_seed_base, "ep", ind.learned.best_index());
  } catch (const LearningFailure& e) {
    ind.failed = true;
    ind.learned = e.partial;
    ind.quality = -std::numeric_limits<double>::infinity();
  } catch (const std::exception&) {
    ind.failed = true;
    ind.quality = -std::numeric_limits<double>::infinity();
  }
  return ind;
}

namespace {

json individual_to_json(const Individual& ind, int index) {
  json j;
  j["index"] = index;
  if (ind.parent)
    j["parent"] = *ind.parent;
  else
    j["parent"] = nullptr;
  j["body"] = ind.body.to_text();
  j["q"] = ind.quality;
  j["failed"] = ind.failed;
  j["best_episode_seed"] = ind.best_episode_seed;
  if (ind.genotype)
    j["genotype"] = std::vector<double>(
        ind.genotype->data(), ind.genotype->data() + ind.genotype->size());
  json archive = json::array();
  for (int i = 0; i < ind.learned.size(); ++i) {
    const Sample& s = ind.learned[i];
    archive.push_back({{"index", i},
                       {"y", s.y},
                       {"theta", std::vector<double>(
                                     s.x.data(), s.x.data() + s.x.size())}});
  }
  j["archive"] = std::move(archive);
  return j;
}

Individual individual_from_json(const json& j) {
  Individual ind;
  ind.body = BodyGrid::from_text(j.at("body").get<std::string>());
  if (!j.at("parent").is_null()) ind.parent = j.at("parent").get<int>();
  ind.quality = j.at("q").get<double>();
  ind.failed = j.at("failed").get<bool>();
  ind.best_episode_seed = j.at("best_episode_seed").get<std::uint64_t>();
  if (j.contains("genotype")) {
    const auto& g = j.at("genotype");
    Eigen::VectorXd theta(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) theta[i] = g[i];
    ind.genotype = std::move(theta);
  }
  for (const auto& s : j.at("archive")) {
    const auto& t = s.at("theta");
    Eigen::VectorXd x(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) x[i] = t[i];
    ind.learned.add({std::move(x), s.at("y").get<double>()});
  }
  return ind;
}

// Key=value snapshot of everything that determines a run's outputs (jobs and
// run_dir excluded: they do not affect results). Also used as the
// resume-compatibility check, by exact content equality.
std::string config_text(const EvoConfig& cfg) {
  std::ostringstream out;
  out << "strategy=" << strategy_name(cfg.strategy) << '\n'
      << "task=" << task_name(cfg.task) << '\n'
      << "n_pop=" << cfg.n_pop << '\n'
      << "n_gen=" << cfg.n_gen << '\n'
      << "n_tour=" << cfg.n_tour << '\n'
      << "sigma_mut=" << format_double(cfg.sigma_mut) << '\n'
      << "seed=" << cfg.seed << '\n'
      << "n0=" << cfg.bo.n0 << '\n'
      << "n_final=" << cfg.bo.n_final << '\n'
      << "ucb_beta=" << format_double(cfg.bo.ucb_beta) << '\n'
      << "bound_lower=" << format_double(cfg.bo.lower) << '\n'
      << "bound_upper=" << format_double(cfg.bo.upper) << '\n'
      << "length_scale=" << format_double(cfg.bo.length_scale) << '\n'
      << "restarts=" << cfg.bo.restarts << '\n'
      << "max_opt_iterations=" << cfg.bo.max_opt_iterations << '\n'
      << "episode_steps=" << cfg.task_params.episode_steps << '\n'
      << "step_rise=" << format_double(cfg.task_params.step_rise) << '\n'
      << "step_run=" << format_double(cfg.task_params.step_run) << '\n'
      << "box_w=" << format_double(cfg.task_params.box_w) << '\n'
      << "box_h=" << format_double(cfg.task_params.box_h) << '\n'
      << "drop_height=" << format_double(cfg.task_params.drop_height) << '\n'
      << "gap_max=" << format_double(cfg.task_params.gap_max) << '\n'
      << "dt=" << format_double(cfg.sim.dt) << '\n'
      << "substeps=" << cfg.sim.substeps << '\n'
      << "steps_per_second=" << cfg.sim.steps_per_second << '\n'
      << "gravity=" << format_double(cfg.sim.gravity) << '\n'
      << "stiffness_soft=" << format_double(cfg.sim.stiffness_soft) << '\n'
      << "stiffness_rigid=" << format_double(cfg.sim.stiffness_rigid) << '\n'
      << "spring_damping=" << format_double(cfg.sim.spring_damping) << '\n'
      << "contact_stiffness=" << format_double(cfg.sim.contact_stiffness)
      << '\n'
      << "contact_damping=" << format_double(cfg.sim.contact_damping) << '\n'
      << "friction=" << format_double(cfg.sim.friction) << '\n';
  return out.str();
}

struct OffspringPlan {
  BodyGrid body;
  std::optional<Eigen::VectorXd> genotype;
  std::optional<int> parent;
};

}  // namespace

fs::path checkpoint_path(const fs::path& run_dir, int gen) {
  return run_dir / "checkpoints" / ("gen_" + std::to_string(gen) + ".jsonl");
}

void save_generation(const fs::path& run_dir, int gen,
                     const std::vector<Individual>& pop) {
  std::string content;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    content += individual_to_json(pop[i], static_cast<int>(i)).dump();
    content += '\n';
  }
  write_text_file_atomic(checkpoint_path(run_dir, gen), content);
}

std::vector<Individual> load_generation(const fs::path& run_dir, int gen) {
  const fs::path path = checkpoint_path(run_dir, gen);
  if (!fs::exists(path))
    throw MissingRun("missing checkpoint: " + path.string());
  std::ifstream in(path);
  std::vector<Individual> pop;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    pop.push_back(individual_from_json(json::parse(line)));
  }
  return pop;
}

void save_best(const fs::path& run_dir, const Individual& best, int best_gen) {
  json j;
  j["gen"] = best_gen;
  j["q"] = best.quality;
  j["body"] = best.body.to_text();
  j["episode_seed"] = best.best_episode_seed;
  const Eigen::VectorXd& theta = best.learned.best().x;
  j["theta"] = std::vector<double>(theta.data(), theta.data() + theta.size());
  write_text_file_atomic(run_dir / "best.jsonl", j.dump() + "\n");
}

BestRecord load_best(const fs::path& run_dir) {
  const fs::path path = run_dir / "best.jsonl";
  if (!fs::exists(path))
    throw MissingRun("missing best.jsonl in " + run_dir.string());
  const json j = json::parse(read_text_file(path));
  BestRecord rec;
  rec.body = BodyGrid::from_text(j.at("body").get<std::string>());
  rec.quality = j.at("q").get<double>();
  rec.gen = j.at("gen").get<int>();
  rec.episode_seed = j.at("episode_seed").get<std::uint64_t>();
  const auto& t = j.at("theta");
  rec.theta.resize(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) rec.theta[i] = t[i];
  return rec;
}

namespace {

void write_summaries(const fs::path& run_dir,
                     const std::vector<GenerationSummary>& summary) {
  CsvTable s;
  s.header = {"gen", "best_q", "mean_q", "diversity"};
  CsvTable d;
  d.header = {"gen", "diversity"};
  for (const auto& row : summary) {
    s.rows.push_back({std::to_string(row.gen), format_double(row.best_q),
                      format_double(row.mean_q), format_double(row.diversity)});
    d.rows.push_back({std::to_string(row.gen), format_double(row.diversity)});
  }
  save_csv(s, run_dir / "summary.csv");
  save_csv(d, run_dir / "diversity.csv");
}

GenerationSummary summarize(int gen, const std::vector<Individual>& pop) {
  GenerationSummary s;
  s.gen = gen;
  s.best_q = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (const Individual& ind : pop) {
    s.best_q = std::max(s.best_q, ind.quality);
    sum += ind.quality;
  }
  s.mean_q = sum / pop.size();
  if (pop.size() >= 2) {
    std::vector<BodyGrid> bodies;
    bodies.reserve(pop.size());
    for (const Individual& ind : pop) bodies.push_back(ind.body);
    s.diversity = population_diversity(bodies);
  }
  return s;
}

// Runs fn(j) for j in [0, count) on cfg.jobs threads. Results must be
// written into pre-sized slots; determinism comes from per-index seeding.
void parallel_for(int count, int jobs, const std::function<void(int)>& fn) {
  if (jobs <= 1) {
    for (int j = 0; j < count; ++j) fn(j);
    return;
  }
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int j = next.fetch_add(1); j < count; j = next.fetch_add(1)) fn(j);
  };
  std::vector<std::thread> threads;
  const int n_threads = std::min(jobs, count);
  threads.reserve(n_threads - 1);
  for (int t = 0; t < n_threads - 1; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
}

}  // namespace

RunRecord evolve(const EvoConfig& cfg) {
  cfg.validate();
  const bool persist = !cfg.run_dir.empty();
  const ControllerSpec controller_spec;
  const int dim = controller_spec.param_count();

  RunRecord record;
  std::atomic<long> episode_counter{0};
  int start_gen = 0;

  if (persist) {
    fs::create_directories(cfg.run_dir / "checkpoints");
    const fs::path config_path = cfg.run_dir / "config.copy";
    const std::string text = config_text(cfg);
    if (fs::exists(config_path)) {
      if (read_text_file(config_path) != text)
        throw Error("evolve: run directory holds a different config: " +
                    config_path.string());
    } else {
      write_text_file_atomic(config_path, text);
    }
    // Resume from the last complete checkpoint.
    for (int g = 0; g < cfg.n_gen; ++g) {
      if (!fs::exists(checkpoint_path(cfg.run_dir, g))) break;
      record.generations.push_back(load_generation(cfg.run_dir, g));
      start_gen = g + 1;
    }
    for (int g = 0; g < start_gen; ++g) {
      record.summary.push_back(summarize(g, record.generations[g]));
      for (const Individual& ind : record.generations[g]) {
        if (record.best_gen < 0 || ind.quality > record.best.quality) {
          record.best = ind;
          record.best_gen = g;
        }
      }
    }
  }

  for (int g = start_gen; g < cfg.n_gen; ++g) {
    // Offspring bodies (and IL genotypes) are prepared sequentially so that
    // selection consumes a single deterministic stream.
    std::vector<OffspringPlan> plan(cfg.n_pop);
    if (g == 0) {
      for (int j = 0; j < cfg.n_pop; ++j) {
        Rng body_rng = make_stream(cfg.seed, "body", g, j);
        plan[j].body = random_body(body_rng);
        if (cfg.strategy == StrategyId::IL) {
          Rng geno_rng = make_stream(cfg.seed, "geno", g, j);
          plan[j].genotype = random_params(controller_spec, geno_rng);
        }
      }
    } else {
      const std::vector<Individual>& prev = record.generations[g - 1];
      Rng sel_rng = make_stream(cfg.seed, "sel", g);
      for (int j = 0; j < cfg.n_pop; ++j) {
        const int parent = tournament_select(prev, cfg.n_tour, sel_rng);
        plan[j].parent = parent;
        Rng mut_rng = make_stream(cfg.seed, "mut", g, j);
        try {
          plan[j].body = mutate_body(prev[parent].body, mut_rng);
        } catch (const RetryExhausted&) {
          plan[j].body = prev[parent].body;  // clone of parent
        }
        if (cfg.strategy == StrategyId::IL) {
          Rng geno_rng = make_stream(cfg.seed, "geno", g, j);
          plan[j].genotype = gaussian_perturb(*prev[parent].genotype,
                                              cfg.sigma_mut, geno_rng);
        }
      }
    }

    GenerationArchive prev_archive;
    if (g > 0) {
      const std::vector<Individual>& prev = record.generations[g - 1];
      prev_archive.entries.reserve(prev.size());
      for (const Individual& ind : prev)
        prev_archive.entries.push_back({&ind.body, ind.quality, &ind.learned});
    }

    std::vector<Individual> pop(cfg.n_pop);
    parallel_for(cfg.n_pop, cfg.jobs, [&](int j) {
      Rng cand_rng = make_stream(cfg.seed, "cand", g, j);
      try {
        const std::vector<InitCandidate> candidates = select_init_candidates(
            cfg.strategy, plan[j].body, plan[j].parent, prev_archive,
            cfg.bo.n0, dim, cfg.bo, cand_rng,
            plan[j].genotype ? &*plan[j].genotype : nullptr);
        pop[j] = evaluate_individual(plan[j].body, plan[j].genotype,
                                     candidates, cfg,
                                     mix_seed(cfg.seed, "eval", g, j),
                                     episode_counter);
      } catch (const std::exception&) {
        pop[j].body = plan[j].body;
        pop[j].genotype = plan[j].genotype;
        pop[j].failed = true;
      }
      pop[j].parent = plan[j].parent;
    });

    record.summary.push_back(summarize(g, pop));
    for (const Individual& ind : pop) {
      if (record.best_gen < 0 || ind.quality > record.best.quality) {
        record.best = ind;
        record.best_gen = g;
      }
    }
    record.generations.push_back(std::move(pop));

    if (persist) {
      save_generation(cfg.run_dir, g, record.generations.back());
      write_summaries(cfg.run_dir, record.summary);
      if (record.best_gen >= 0)
        save_best(cfg.run_dir, record.best, record.best_gen);
    }
  }

  record.episodes = episode_counter.load();
  return record;
}

}  // namespace vsr

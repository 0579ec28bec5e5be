#include "vsrlab/strategies.hpp"

#include <algorithm>
#include <numeric>

#include "vsrlab/error.hpp"

namespace vsr {

StrategyId strategy_from_name(std::string_view name) {
  if (name == "il") return StrategyId::IL;
  if (name == "nobo") return StrategyId::NoBO;
  if (name == "parent") return StrategyId::Parent;
  if (name == "best-1") return StrategyId::BestOne;
  if (name == "best-n") return StrategyId::BestMany;
  if (name == "similar-1") return StrategyId::SimilarOne;
  if (name == "similar-n") return StrategyId::SimilarMany;
  if (name == "random-1") return StrategyId::RandomOne;
  if (name == "random-n") return StrategyId::RandomMany;
  throw ParseError("unknown strategy name: " + std::string(name));
}

std::string strategy_name(StrategyId s) {
  switch (s) {
    case StrategyId::IL: return "il";
    case StrategyId::NoBO: return "nobo";
    case StrategyId::Parent: return "parent";
    case StrategyId::BestOne: return "best-1";
    case StrategyId::BestMany: return "best-n";
    case StrategyId::SimilarOne: return "similar-1";
    case StrategyId::SimilarMany: return "similar-n";
    case StrategyId::RandomOne: return "random-1";
    case StrategyId::RandomMany: return "random-n";
  }
  return "?";
}

bool strategy_is_social(StrategyId s) {
  return s != StrategyId::IL && s != StrategyId::NoBO;
}

namespace {

Eigen::VectorXd clamped(Eigen::VectorXd v, const BOConfig& bo) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    v[i] = std::clamp(v[i], bo.lower, bo.upper);
  return v;
}

std::vector<InitCandidate> uniform_candidates(int count, int dim,
                                              const BOConfig& bo, Rng& rng) {
  std::vector<InitCandidate> out;
  out.reserve(count);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int i = 0; i < count; ++i) {
    Eigen::VectorXd theta(dim);
    for (int d = 0; d < dim; ++d) theta[d] = unif(rng);
    out.push_back({clamped(std::move(theta), bo), -1});
  }
  return out;
}

// Archive sample indices ordered by observed value descending, earliest
// index first on ties.
std::vector<int> samples_by_quality(const SampleArchive& archive) {
  std::vector<int> order(archive.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
    return archive[i].y > archive[j].y;
  });
  return order;
}

// The n0 best samples of a single teacher.
std::vector<InitCandidate> from_one_teacher(const GenerationArchive& prev,
                                            int teacher, int n0,
                                            const BOConfig& bo) {
  const SampleArchive& archive = *prev.entries[teacher].archive;
  if (archive.size() < n0)
    throw InsufficientTeachers(
        "teacher archive holds fewer samples than n0 requires");
  const std::vector<int> order = samples_by_quality(archive);
  std::vector<InitCandidate> out;
  out.reserve(n0);
  for (int i = 0; i < n0; ++i)
    out.push_back({clamped(archive[order[i]].x, bo), teacher});
  return out;
}

// One sample per teacher, walking the ranked teacher list; when there are
// fewer than n0 teachers the list cycles, taking second-best samples and so
// on.
std::vector<InitCandidate> from_many_teachers(const GenerationArchive& prev,
                                              const std::vector<int>& teachers,
                                              int n0, const BOConfig& bo) {
  std::vector<InitCandidate> out;
  out.reserve(n0);
  for (int round = 0; static_cast<int>(out.size()) < n0; ++round) {
    bool any = false;
    for (int t : teachers) {
      if (static_cast<int>(out.size()) >= n0) break;
      const SampleArchive& archive = *prev.entries[t].archive;
      if (round >= archive.size()) continue;
      const std::vector<int> order = samples_by_quality(archive);
      out.push_back({clamped(archive[order[round]].x, bo), t});
      any = true;
    }
    if (!any)
      throw InsufficientTeachers(
          "previous generation holds fewer samples than n0 requires");
  }
  return out;
}

// Teachers ranked by quality descending, index ascending on ties.
std::vector<int> teachers_by_quality(const GenerationArchive& prev) {
  std::vector<int> order(prev.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
    return prev.entries[i].quality > prev.entries[j].quality;
  });
  return order;
}

// Teachers ranked by body distance ascending; ties by quality descending,
// then index ascending.
std::vector<int> teachers_by_similarity(const GenerationArchive& prev,
                                        const BodyGrid& learner) {
  std::vector<int> distance(prev.size());
  for (int i = 0; i < prev.size(); ++i)
    distance[i] = hamming_distance_aligned(learner, *prev.entries[i].body);
  std::vector<int> order(prev.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
    if (distance[i] != distance[j]) return distance[i] < distance[j];
    return prev.entries[i].quality > prev.entries[j].quality;
  });
  return order;
}

std::vector<int> teachers_shuffled(const GenerationArchive& prev, Rng& rng) {
  std::vector<int> order(prev.size());
  std::iota(order.begin(), order.end(), 0);
  // Fisher-Yates with explicit draws, deterministic across platforms that
  // share a standard library build.
  for (int i = prev.size() - 1; i > 0; --i)
    std::swap(order[i], order[uniform_int(rng, 0, i)]);
  return order;
}

}  // namespace

std::vector<InitCandidate> select_init_candidates(
    StrategyId strategy, const BodyGrid& learner_body,
    std::optional<int> learner_parent, const GenerationArchive& prev, int n0,
    int dim, const BOConfig& bo, Rng& rng,
    const Eigen::VectorXd* genotype_theta) {
  if (n0 < 1) throw Error("select_init_candidates: n0 must be >= 1");

  if (strategy == StrategyId::IL) {
    if (!genotype_theta)
      throw Error("select_init_candidates: IL requires a genotype vector");
    return {{clamped(*genotype_theta, bo), -1}};
  }
  if (strategy == StrategyId::NoBO) return uniform_candidates(n0, dim, bo, rng);

  // Generation 0: no previous generation to learn from.
  if (prev.empty()) return uniform_candidates(n0, dim, bo, rng);

  switch (strategy) {
    case StrategyId::Parent: {
      if (!learner_parent || *learner_parent < 0 ||
          *learner_parent >= prev.size())
        throw InsufficientTeachers("Parent strategy needs a valid parent index");
      return from_one_teacher(prev, *learner_parent, n0, bo);
    }
    case StrategyId::BestOne:
      return from_one_teacher(prev, teachers_by_quality(prev)[0], n0, bo);
    case StrategyId::SimilarOne:
      return from_one_teacher(
          prev, teachers_by_similarity(prev, learner_body)[0], n0, bo);
    case StrategyId::RandomOne:
      return from_one_teacher(prev, teachers_shuffled(prev, rng)[0], n0, bo);
    case StrategyId::BestMany: {
      std::vector<int> ranked = teachers_by_quality(prev);
      if (ranked.size() > static_cast<std::size_t>(n0)) ranked.resize(n0);
      return from_many_teachers(prev, ranked, n0, bo);
    }
    case StrategyId::SimilarMany: {
      std::vector<int> ranked = teachers_by_similarity(prev, learner_body);
      if (ranked.size() > static_cast<std::size_t>(n0)) ranked.resize(n0);
      return from_many_teachers(prev, ranked, n0, bo);
    }
    case StrategyId::RandomMany: {
      std::vector<int> ranked = teachers_shuffled(prev, rng);
      if (ranked.size() > static_cast<std::size_t>(n0)) ranked.resize(n0);
      return from_many_teachers(prev, ranked, n0, bo);
    }
    default:
      throw Error("select_init_candidates: unhandled strategy");
  }
}

}  // namespace vsr

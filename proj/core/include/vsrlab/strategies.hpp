#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vsrlab/bayesopt.hpp"
#include "vsrlab/controller.hpp"
#include "vsrlab/morphology.hpp"

namespace vsr {

// How a learner's initial BO candidates are chosen. The seven social modes
// transfer evaluated samples from previous-generation robots; IL carries a
// genotype parameter vector; NoBO stands in for no learning signal at all.
enum class StrategyId {
  IL,
  NoBO,
  Parent,
  BestOne,
  BestMany,
  SimilarOne,
  SimilarMany,
  RandomOne,
  RandomMany,
};

// CLI names: il | nobo | parent | best-1 | best-n | similar-1 | similar-n |
// random-1 | random-n.
StrategyId strategy_from_name(std::string_view name);
std::string strategy_name(StrategyId s);

bool strategy_is_social(StrategyId s);  // the seven teacher-based modes

// Read-only view of the previous generation: what a learner can see of each
// finished robot. Immutable once a generation completes.
struct GenerationArchive {
  struct Entry {
    const BodyGrid* body = nullptr;
    double quality = 0.0;
    const SampleArchive* archive = nullptr;
  };
  std::vector<Entry> entries;

  bool empty() const { return entries.empty(); }
  int size() const { return static_cast<int>(entries.size()); }
};

// A candidate controller plus its provenance: index of the teacher in the
// previous generation, or -1 for candidates with no teacher (random
// bootstrap, genotype).
struct InitCandidate {
  Eigen::VectorXd theta;
  int teacher = -1;
};

// Builds the initial BO candidates for a learner. Social modes return
// exactly n0 candidates, NoBO returns n0 uniform vectors in [-1, 1], IL
// returns the single genotype vector. At generation 0 (empty archive) every
// social mode falls back to uniform candidates. All candidates are clamped
// to the BO search bounds. Throws InsufficientTeachers when a social mode
// cannot gather n0 samples even by cycling teachers.
std::vector<InitCandidate> select_init_candidates(
    StrategyId strategy, const BodyGrid& learner_body,
    std::optional<int> learner_parent, const GenerationArchive& prev, int n0,
    int dim, const BOConfig& bo, Rng& rng,
    const Eigen::VectorXd* genotype_theta = nullptr);

}  // namespace vsr

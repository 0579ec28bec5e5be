#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vsrlab/rng.hpp"

namespace vsr {

// Voxel alphabet. Empty means "no voxel at this grid position"; the other
// four symbols are real material types.
enum class VoxelType : std::uint8_t {
  Empty = 0,
  Rigid,
  Soft,
  ActHorizontal,
  ActVertical,
};

constexpr int kVoxelTypeCount = 5;

constexpr bool is_actuated(VoxelType t) {
  return t == VoxelType::ActHorizontal || t == VoxelType::ActVertical;
}

// Relative deformation limits of an actuated voxel along its driven axis.
constexpr double kDeformMin = 0.6;
constexpr double kDeformMax = 1.6;

char voxel_char(VoxelType t);                 // one of ".RSHV"
VoxelType voxel_from_char(char c);            // throws ParseError

// A 5x5 grid of voxels. Valid bodies are single 4-connected polyominoes;
// construction helpers below enforce that, the raw grid does not.
class BodyGrid {
 public:
  static constexpr int kSize = 5;

  VoxelType at(int row, int col) const { return cells_[index(row, col)]; }
  void set(int row, int col, VoxelType t) { cells_[index(row, col)] = t; }

  int voxel_count() const;
  int actuated_count() const;

  bool operator==(const BodyGrid&) const = default;

  // Text form: 5 rows of 5 chars from {., R, S, H, V} joined by '-',
  // e.g. "..R..-..S..-HHHHH-..V..-.....". Used in CSVs and checkpoints.
  std::string to_text() const;
  static BodyGrid from_text(std::string_view text);  // throws ParseError

 private:
  static int index(int row, int col) { return row * kSize + col; }
  std::array<VoxelType, kSize * kSize> cells_{};
};

struct BodyDescriptor {
  double active_rate = 0.0;   // actuated voxels / all voxels, in [0, 1]
  double compactness = 0.0;   // body area / convex hull area, in (0, 1]
};

// True iff the non-empty cells form exactly one 4-connected polyomino
// (edge adjacency; diagonal contact does not connect) with at least one cell.
bool is_valid_polyomino(const BodyGrid& b);

// Grows a body from a random seed cell by repeatedly adding a uniformly typed
// voxel at a position adjacent to the occupied set, until a target count
// drawn uniformly from [10, 20] is reached.
BodyGrid random_body(Rng& rng);

// Changes 1-3 random cells to different symbols (Empty allowed). Results that
// are not a single polyomino of 5..25 voxels are reverted and the mutation is
// redrawn; throws RetryExhausted after 1000 redraws.
BodyGrid mutate_body(const BodyGrid& b, Rng& rng);

// Unweighted mean (row, col) of occupied cell coordinates.
std::pair<double, double> center_of_mass(const BodyGrid& b);

// Cell-wise symbol mismatches after translating b so the two centers of mass
// coincide (difference rounded half-away-from-zero per axis). Compared over a
// padded canvas so no occupied cell is lost; positions outside a grid count
// as Empty. Symmetric in its arguments.
int hamming_distance_aligned(const BodyGrid& a, const BodyGrid& b);

// active_rate and compactness; the hull is taken over the 4 corner points of
// every occupied unit cell, so a lone voxel has compactness exactly 1.
BodyDescriptor descriptors(const BodyGrid& b);

// Mean hamming_distance_aligned over all unordered pairs.
// Throws DegeneratePopulation if fewer than two bodies are given.
double population_diversity(std::span<const BodyGrid> pop);

// Area of the convex hull of a point set (monotone chain + shoelace).
double convex_hull_area(std::vector<std::pair<double, double>> points);

}  // namespace vsr

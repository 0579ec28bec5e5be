#include "vsrlab/morphology.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "vsrlab/error.hpp"

namespace vsr {

namespace {

constexpr int kN = BodyGrid::kSize;

constexpr std::array<VoxelType, 4> kSolidTypes = {
    VoxelType::Rigid, VoxelType::Soft, VoxelType::ActHorizontal,
    VoxelType::ActVertical};

constexpr int kDr[4] = {-1, 1, 0, 0};
constexpr int kDc[4] = {0, 0, -1, 1};

bool in_grid(int r, int c) { return r >= 0 && r < kN && c >= 0 && c < kN; }

}  // namespace

char voxel_char(VoxelType t) {
  switch (t) {
    case VoxelType::Empty: return '.';
    case VoxelType::Rigid: return 'R';
    case VoxelType::Soft: return 'S';
    case VoxelType::ActHorizontal: return 'H';
    case VoxelType::ActVertical: return 'V';
  }
  return '?';
}

VoxelType voxel_from_char(char c) {
  switch (c) {
    case '.': return VoxelType::Empty;
    case 'R': return VoxelType::Rigid;
    case 'S': return VoxelType::Soft;
    case 'H': return VoxelType::ActHorizontal;
    case 'V': return VoxelType::ActVertical;
  }
  throw ParseError(std::string("unknown voxel symbol '") + c + "'");
}

int BodyGrid::voxel_count() const {
  int n = 0;
  for (VoxelType t : cells_) n += (t != VoxelType::Empty);
  return n;
}

int BodyGrid::actuated_count() const {
  int n = 0;
  for (VoxelType t : cells_) n += is_actuated(t);
  return n;
}

std::string BodyGrid::to_text() const {
  std::string out;
  out.reserve(kSize * kSize + kSize - 1);
  for (int r = 0; r < kSize; ++r) {
    if (r > 0) out.push_back('-');
    for (int c = 0; c < kSize; ++c) out.push_back(voxel_char(at(r, c)));
  }
  return out;
}

BodyGrid BodyGrid::from_text(std::string_view text) {
  if (text.size() != kSize * kSize + kSize - 1)
    throw ParseError("body text must be 5 rows of 5 symbols joined by '-'");
  BodyGrid g;
  std::size_t pos = 0;
  for (int r = 0; r < kSize; ++r) {
    if (r > 0) {
      if (text[pos] != '-') throw ParseError("body text rows must be separated by '-'");
      ++pos;
    }
    for (int c = 0; c < kSize; ++c) g.set(r, c, voxel_from_char(text[pos++]));
  }
  return g;
}

bool is_valid_polyomino(const BodyGrid& b) {
  int start_r = -1, start_c = -1, total = 0;
  for (int r = 0; r < kN; ++r)
    for (int c = 0; c < kN; ++c)
      if (b.at(r, c) != VoxelType::Empty) {
        if (start_r < 0) {
          start_r = r;
          start_c = c;
        }
        ++total;
      }
  if (total == 0) return false;

  // Flood fill over 4-neighbors from the first occupied cell.
  std::array<bool, kN * kN> seen{};
  std::vector<std::pair<int, int>> stack{{start_r, start_c}};
  seen[start_r * kN + start_c] = true;
  int reached = 0;
  while (!stack.empty()) {
    auto [r, c] = stack.back();
    stack.pop_back();
    ++reached;
    for (int d = 0; d < 4; ++d) {
      int nr = r + kDr[d], nc = c + kDc[d];
      if (in_grid(nr, nc) && !seen[nr * kN + nc] &&
          b.at(nr, nc) != VoxelType::Empty) {
        seen[nr * kN + nc] = true;
        stack.emplace_back(nr, nc);
      }
    }
  }
  return reached == total;
}

BodyGrid random_body(Rng& rng) {
  const int target = uniform_int(rng, 10, 20);
  BodyGrid g;
  int r = uniform_int(rng, 0, kN - 1);
  int c = uniform_int(rng, 0, kN - 1);
  g.set(r, c, kSolidTypes[uniform_int(rng, 0, 3)]);
  int count = 1;
  std::vector<std::pair<int, int>> frontier;
  while (count < target) {
    frontier.clear();
    for (int rr = 0; rr < kN; ++rr)
      for (int cc = 0; cc < kN; ++cc) {
        if (g.at(rr, cc) != VoxelType::Empty) continue;
        for (int d = 0; d < 4; ++d) {
          int nr = rr + kDr[d], nc = cc + kDc[d];
          if (in_grid(nr, nc) && g.at(nr, nc) != VoxelType::Empty) {
            frontier.emplace_back(rr, cc);
            break;
          }
        }
      }
    auto [gr, gc] = frontier[uniform_int(rng, 0, int(frontier.size()) - 1)];
    g.set(gr, gc, kSolidTypes[uniform_int(rng, 0, 3)]);
    ++count;
  }
  return g;
}

BodyGrid mutate_body(const BodyGrid& b, Rng& rng) {
  constexpr int kRetryCap = 1000;
  for (int attempt = 0; attempt < kRetryCap; ++attempt) {
    BodyGrid g = b;
    const int k = uniform_int(rng, 1, 3);
    int picked[3];
    for (int i = 0; i < k; ++i) {
      int cell;
      bool fresh;
      do {
        cell = uniform_int(rng, 0, kN * kN - 1);
        fresh = true;
        for (int j = 0; j < i; ++j) fresh &= (picked[j] != cell);
      } while (!fresh);
      picked[i] = cell;
      const VoxelType old = g.at(cell / kN, cell % kN);
      // Draw uniformly among the 4 symbols different from the current one.
      int shift = uniform_int(rng, 1, kVoxelTypeCount - 1);
      VoxelType next =
          static_cast<VoxelType>((static_cast<int>(old) + shift) % kVoxelTypeCount);
      g.set(cell / kN, cell % kN, next);
    }
    const int n = g.voxel_count();
    if (n >= 5 && n <= 25 && is_valid_polyomino(g)) return g;
  }
  throw RetryExhausted("mutate_body: no valid mutation after 1000 redraws");
}

std::pair<double, double> center_of_mass(const BodyGrid& b) {
  double sr = 0, sc = 0;
  int n = 0;
  for (int r = 0; r < kN; ++r)
    for (int c = 0; c < kN; ++c)
      if (b.at(r, c) != VoxelType::Empty) {
        sr += r;
        sc += c;
        ++n;
      }
  return {sr / n, sc / n};
}

namespace {

// Round half away from zero, as lround does.
int round_away(double x) { return static_cast<int>(std::lround(x)); }

}  // namespace

int hamming_distance_aligned(const BodyGrid& a, const BodyGrid& b) {
  const auto [ar, ac] = center_of_mass(a);
  const auto [br, bc] = center_of_mass(b);
  const int dr = round_away(ar - br);
  const int dc = round_away(ac - bc);

  // b is translated by (dr, dc); both grids are laid on a 9x9 canvas whose
  // origin depends on the shift sign so that neither footprint is clipped
  // (|dr|, |dc| <= 4 always holds for 5x5 grids).
  const int oar = std::max(0, -dr), oac = std::max(0, -dc);
  const int obr = oar + dr, obc = oac + dc;
  constexpr int kCanvas = 2 * kN - 1;
  int mismatches = 0;
  for (int r = 0; r < kCanvas; ++r)
    for (int c = 0; c < kCanvas; ++c) {
      const int ra = r - oar, ca = c - oac;
      const int rb = r - obr, cb = c - obc;
      const VoxelType ta = in_grid(ra, ca) ? a.at(ra, ca) : VoxelType::Empty;
      const VoxelType tb = in_grid(rb, cb) ? b.at(rb, cb) : VoxelType::Empty;
      mismatches += (ta != tb);
    }
  return mismatches;
}

double convex_hull_area(std::vector<std::pair<double, double>> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const std::size_t n = pts.size();
  if (n < 3) return 0.0;

  auto cross = [](const auto& o, const auto& a, const auto& b) {
    return (a.first - o.first) * (b.second - o.second) -
           (a.second - o.second) * (b.first - o.first);
  };

  std::vector<std::pair<double, double>> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {  // lower
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = n - 1, t = k + 1; i-- > 0;) {  // upper
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);

  double twice_area = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const auto& p = hull[i];
    const auto& q = hull[(i + 1) % hull.size()];
    twice_area += p.first * q.second - q.first * p.second;
  }
  return std::abs(twice_area) / 2.0;
}

BodyDescriptor descriptors(const BodyGrid& b) {
  const int n = b.voxel_count();
  BodyDescriptor d;
  d.active_rate = static_cast<double>(b.actuated_count()) / n;

  std::vector<std::pair<double, double>> corners;
  corners.reserve(4 * n);
  for (int r = 0; r < kN; ++r)
    for (int c = 0; c < kN; ++c)
      if (b.at(r, c) != VoxelType::Empty) {
        corners.emplace_back(c, r);
        corners.emplace_back(c + 1.0, r);
        corners.emplace_back(c, r + 1.0);
        corners.emplace_back(c + 1.0, r + 1.0);
      }
  d.compactness = n / convex_hull_area(std::move(corners));
  return d;
}

double population_diversity(std::span<const BodyGrid> pop) {
  if (pop.size() < 2)
    throw DegeneratePopulation("population_diversity needs at least 2 bodies");
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < pop.size(); ++i)
    for (std::size_t j = i + 1; j < pop.size(); ++j) {
      sum += hamming_distance_aligned(pop[i], pop[j]);
      ++pairs;
    }
  return sum / pairs;
}

}  // namespace vsr

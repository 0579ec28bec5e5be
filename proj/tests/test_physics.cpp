#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "vsrlab/error.hpp"
#include "vsrlab/physics.hpp"

using namespace vsr;

namespace {

BodyGrid single_voxel(VoxelType t = VoxelType::Rigid) {
  BodyGrid g;
  g.set(2, 2, t);
  return g;
}

std::vector<double> no_actuation(const SoftBodyState& s) {
  return std::vector<double>(s.voxels.size(), 1.0);
}

}  // namespace

TEST_CASE("assemble counts masses and shares corners") {
  SimConfig cfg;
  const Terrain flat = Terrain::flat();

  SUBCASE("single voxel: 4 masses") {
    const SoftBodyState s = assemble(single_voxel(), cfg, flat, 0.0);
    CHECK(s.node_count() == 4);
    CHECK(s.voxels.size() == 1);
    CHECK(s.step_count == 0);
    for (const auto& v : s.voxels) CHECK(v.rest_scale == 1.0);
  }
  SUBCASE("2x1 body: 6 masses, shared edge") {
    BodyGrid g;
    g.set(2, 1, VoxelType::Soft);
    g.set(2, 2, VoxelType::Soft);
    const SoftBodyState s = assemble(g, cfg, flat, 0.0);
    CHECK(s.node_count() == 6);
    CHECK(s.voxels.size() == 2);
  }
  SUBCASE("resting on the terrain, not intersecting") {
    Rng rng = make_stream(3);
    for (int i = 0; i < 20; ++i) {
      const BodyGrid g = random_body(rng);
      const SoftBodyState s = assemble(g, cfg, flat, 0.0);
      double min_gap = 1e300;
      for (const auto& p : s.pos)
        min_gap = std::min(min_gap, p.y() - flat.height_at(p.x()));
      CHECK(min_gap == doctest::Approx(0.0).epsilon(1e-12));
    }
  }
  SUBCASE("deterministic") {
    const BodyGrid g = single_voxel(VoxelType::Soft);
    const SoftBodyState a = assemble(g, cfg, flat, 1.5);
    const SoftBodyState b = assemble(g, cfg, flat, 1.5);
    REQUIRE(a.node_count() == b.node_count());
    for (int i = 0; i < a.node_count(); ++i) CHECK(a.pos[i] == b.pos[i]);
  }
}

TEST_CASE("terrain height interpolation is linear between breakpoints") {
  Terrain t;
  t.breakpoints = {{0.0, 0.0}, {2.0, 1.0}, {3.0, 1.0}, {3.5, 0.2}};
  for (int i = 0; i <= 20; ++i) {
    const double x = 0.2 * i - 0.25;
    const double h = t.height_at(x);
    double want = 0.0;
    if (x <= 0.0)
      want = 0.0;
    else if (x >= 3.5)
      want = 0.2;
    else {
      for (std::size_t s = 1; s < t.breakpoints.size(); ++s) {
        const auto [x0, y0] = t.breakpoints[s - 1];
        const auto [x1, y1] = t.breakpoints[s];
        if (x <= x1) {
          want = y0 + (y1 - y0) * (x - x0) / (x1 - x0);
          break;
        }
      }
    }
    CHECK(h == doctest::Approx(want));
  }
}

TEST_CASE("zero gravity, no actuation: assembled state is an equilibrium") {
  SimConfig cfg;
  cfg.gravity = 0.0;
  const Terrain flat = Terrain::flat();
  BodyGrid g;
  g.set(1, 1, VoxelType::Soft);
  g.set(1, 2, VoxelType::Rigid);
  g.set(2, 1, VoxelType::ActHorizontal);
  g.set(2, 2, VoxelType::ActVertical);
  SoftBodyState s = assemble(g, cfg, flat, 0.0);
  const std::vector<Eigen::Vector2d> initial = s.pos;
  std::vector<double> act = no_actuation(s);
  for (int k = 0; k < 100; ++k) step(s, act, cfg, flat);
  for (int i = 0; i < s.node_count(); ++i) {
    CHECK((s.pos[i] - initial[i]).norm() < 1e-9);
    CHECK(s.vel[i].norm() < 1e-9);
  }
}

TEST_CASE("dropped rigid voxel settles without x drift") {
  SimConfig cfg;
  const Terrain flat = Terrain::flat();
  SoftBodyState s = assemble(single_voxel(), cfg, flat, 0.0);
  for (auto& p : s.pos) p.y() += 0.5;  // drop from half a voxel side
  const double x0 = s.center_of_mass().x();
  std::vector<double> act = no_actuation(s);
  for (int k = 0; k < 500; ++k) step(s, act, cfg, flat);
  CHECK(std::abs(s.center_of_mass().x() - x0) < 1e-3);
  for (const auto& v : s.vel) CHECK(v.norm() < 1e-4);  // settled
}

TEST_CASE("step count and determinism") {
  SimConfig cfg;
  const Terrain flat = Terrain::flat();
  BodyGrid g;
  g.set(2, 1, VoxelType::ActHorizontal);
  g.set(2, 2, VoxelType::ActVertical);

  SoftBodyState a = assemble(g, cfg, flat, 0.0);
  SoftBodyState b = assemble(g, cfg, flat, 0.0);
  std::vector<double> act = {1.3, 0.7};
  for (int k = 0; k < 50; ++k) {
    step(a, act, cfg, flat);
    step(b, act, cfg, flat);
  }
  CHECK(a.step_count == 50);
  for (int i = 0; i < a.node_count(); ++i) {
    CHECK(a.pos[i] == b.pos[i]);  // bit-identical
    CHECK(a.vel[i] == b.vel[i]);
  }
}

TEST_CASE("actuation targets are clamped into the deformation range") {
  SimConfig cfg;
  const Terrain flat = Terrain::flat();
  BodyGrid g;
  g.set(2, 1, VoxelType::ActHorizontal);
  g.set(2, 2, VoxelType::ActVertical);
  g.set(2, 3, VoxelType::Soft);
  SoftBodyState s = assemble(g, cfg, flat, 0.0);
  std::vector<double> act = {-7.0, 99.0, 42.0};
  for (int k = 0; k < 10; ++k) {
    step(s, act, cfg, flat);
    for (const auto& v : s.voxels) {
      CHECK(v.rest_scale >= kDeformMin);
      CHECK(v.rest_scale <= kDeformMax);
    }
  }
  CHECK(s.voxels[0].rest_scale == kDeformMin);
  CHECK(s.voxels[1].rest_scale == kDeformMax);
  CHECK(s.voxels[2].rest_scale == 1.0);  // non-actuated voxels ignore targets
}

TEST_CASE("mirrored body with mirrored actuation gives the mirror trajectory") {
  SimConfig cfg;
  const Terrain flat = Terrain::flat();
  Rng rng = make_stream(2025);
  const BodyGrid body = random_body(rng);
  const BodyGrid mirrored = oracle::mirror_body(body);

  SoftBodyState s = assemble(body, cfg, flat, 0.0);
  SoftBodyState m = assemble(mirrored, cfg, flat, 0.0);
  REQUIRE(s.voxels.size() == m.voxels.size());

  // Mirror axis such that the two spawn footprints coincide.
  const double axis = BodyGrid::kSize * cfg.voxel_side / 2.0;

  // Map each voxel of the original onto the mirrored body's voxel.
  std::vector<int> mirror_voxel(s.voxels.size());
  for (std::size_t i = 0; i < s.voxels.size(); ++i) {
    const auto& v = s.voxels[i];
    const int mc = BodyGrid::kSize - 1 - v.col;
    mirror_voxel[i] = m.voxel_at_cell[v.row * BodyGrid::kSize + mc];
    REQUIRE(mirror_voxel[i] >= 0);
  }

  std::vector<double> act(s.voxels.size()), mact(s.voxels.size());
  for (int k = 0; k < 500; ++k) {
    for (std::size_t i = 0; i < s.voxels.size(); ++i) {
      // Deterministic pseudo-gait, different per voxel.
      act[i] = 1.1 + 0.5 * std::sin(0.13 * k + 0.7 * static_cast<double>(i));
      mact[mirror_voxel[i]] = act[i];
    }
    step(s, act, cfg, flat);
    step(m, mact, cfg, flat);

    const Eigen::Vector2d c1 = s.center_of_mass();
    const Eigen::Vector2d c2 = m.center_of_mass();
    CHECK(std::abs((axis - c1.x()) - (c2.x() - axis)) < 1e-6);
    CHECK(std::abs(c1.y() - c2.y()) < 1e-6);
  }
}

TEST_CASE("with damping, energy is non-increasing once settled") {
  SimConfig cfg;
  const Terrain flat = Terrain::flat();
  BodyGrid g;
  g.set(1, 2, VoxelType::Soft);
  g.set(2, 2, VoxelType::Rigid);
  SoftBodyState s = assemble(g, cfg, flat, 0.0);
  for (auto& p : s.pos) p.y() += 0.3;
  std::vector<double> act = no_actuation(s);
  for (int k = 0; k < 300; ++k) step(s, act, cfg, flat);  // settle

  double prev = mechanical_energy(s, cfg, flat);
  for (int k = 0; k < 200; ++k) {
    step(s, act, cfg, flat);
    const double e = mechanical_energy(s, cfg, flat);
    CHECK(e <= prev + 1e-9);
    prev = e;
  }
}

TEST_CASE("sensor frame layout") {
  SimConfig cfg;
  const Terrain flat = Terrain::flat();
  BodyGrid g;
  g.set(2, 1, VoxelType::Soft);
  g.set(2, 2, VoxelType::ActHorizontal);
  g.set(1, 2, VoxelType::Rigid);
  SoftBodyState s = assemble(g, cfg, flat, 0.0);

  SUBCASE("fresh assembly: zero velocities, unit areas where neighbors exist") {
    const SensorFrame f = observe(s, nullptr, false);
    CHECK(f.n_voxels == 3);
    CHECK(f.values.size() == 3u * kSensorsPerVoxel);
    // Voxel order is grid row-major: (1,2), (2,1), (2,2).
    const auto v12 = f.voxel(0);
    REQUIRE(v12.size() == 30);
    for (int slot = 0; slot < 9; ++slot) {
      CHECK(v12[3 * slot + 0] == 0.0);
      CHECK(v12[3 * slot + 1] == 0.0);
    }
    // (1,2) sees itself (slot 4) and (2,2) below it (slot 7).
    CHECK(v12[3 * 4 + 2] == doctest::Approx(1.0));
    CHECK(v12[3 * 7 + 2] == doctest::Approx(1.0));
    CHECK(v12[3 * 0 + 2] == 0.0);  // no neighbor up-left
    CHECK(v12[27] == 0.0);  // no payload: distance slots zero
    CHECK(v12[28] == 0.0);
    // (2,2) sees (2,1) to its left (slot 3) and (1,2) above (slot 1).
    const auto v22 = f.voxel(2);
    CHECK(v22[3 * 3 + 2] == doctest::Approx(1.0));
    CHECK(v22[3 * 1 + 2] == doctest::Approx(1.0));
  }

  SUBCASE("time signal follows (k mod 25) / 25") {
    std::vector<double> act = no_actuation(s);
    for (int k = 0; k < 12; ++k) step(s, act, cfg, flat);
    CHECK(observe(s, nullptr, false).voxel(0)[29] == doctest::Approx(0.48));
    for (int k = 12; k < 25; ++k) step(s, act, cfg, flat);
    CHECK(observe(s, nullptr, false).voxel(0)[29] == doctest::Approx(0.0));
  }

  SUBCASE("payload distances point to the closest box point, masking zeroes") {
    PayloadBox box;
    box.center = {5.0, 4.0};
    box.width = 2.0;
    box.height = 1.0;
    const SensorFrame f = observe(s, &box, false);
    for (int i = 0; i < f.n_voxels; ++i) {
      const auto vals = f.voxel(i);
      const Eigen::Vector2d c = s.voxel_center(i);
      const double px = std::clamp(c.x(), 4.0, 6.0);
      const double py = std::clamp(c.y(), 3.5, 4.5);
      CHECK(vals[27] == doctest::Approx(px - c.x()));
      CHECK(vals[28] == doctest::Approx(py - c.y()));
    }
    const SensorFrame masked = observe(s, &box, true);
    for (int i = 0; i < masked.n_voxels; ++i) {
      CHECK(masked.voxel(i)[27] == 0.0);
      CHECK(masked.voxel(i)[28] == 0.0);
      CHECK(masked.voxel(i)[29] == doctest::Approx(0.0));  // k = 0 here
    }
  }
}

TEST_CASE("voxel areas are the shoelace quad areas") {
  SimConfig cfg;
  const Terrain flat = Terrain::flat();
  SoftBodyState s = assemble(single_voxel(VoxelType::Soft), cfg, flat, 0.0);
  CHECK(s.voxel_area(0) == doctest::Approx(1.0));
  // Squash one top corner down; the quad becomes a trapezoid.
  s.pos[s.voxels[0].node[0]].y() -= 0.25;
  CHECK(s.voxel_area(0) == doctest::Approx(1.0 - 0.125));
}

TEST_CASE("payload contact keeps a resting box supported") {
  SimConfig cfg;
  const Terrain flat = Terrain::flat();
  BodyGrid g;
  for (int c = 1; c <= 3; ++c) g.set(2, c, VoxelType::Rigid);
  SoftBodyState s = assemble(g, cfg, flat, 0.0);

  PayloadBox box;
  box.width = 2.0;
  box.height = 1.0;
  box.mass = 2.0;
  box.center = {s.center_of_mass().x(), 1.0 + 0.5};  // resting on top

  std::vector<double> act = no_actuation(s);
  for (int k = 0; k < 500; ++k) step(s, act, cfg, flat, &box);
  CHECK(box.center.y() > s.center_of_mass().y());
  CHECK(std::abs(box.center.x() - s.center_of_mass().x()) < 0.2);
}

TEST_CASE("non-finite states raise NumericalBlowup") {
  SimConfig cfg;
  cfg.dt = 1.0;  // unstable on purpose
  cfg.substeps = 1;
  cfg.steps_per_second = 1;
  const Terrain flat = Terrain::flat();
  SoftBodyState s = assemble(single_voxel(VoxelType::Soft), cfg, flat, 0.0);
  for (auto& p : s.pos) p.y() += 100.0;
  std::vector<double> act = no_actuation(s);
  bool blew_up = false;
  try {
    for (int k = 0; k < 200; ++k) step(s, act, cfg, flat);
  } catch (const NumericalBlowup&) {
    blew_up = true;
  }
  CHECK(blew_up);
}

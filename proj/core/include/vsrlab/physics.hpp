#pragma once

#include <Eigen/Core>
#include <array>
#include <optional>
#include <span>
#include <vector>

#include "vsrlab/morphology.hpp"

namespace vsr {

// Deterministic 2-D mass-spring dynamics: point masses at voxel corners
// (shared between adjacent voxels), 4 edge + 2 diagonal springs per voxel,
// semi-implicit Euler with substepping, penalty ground/payload contact with
// regularized Coulomb friction. World frame: x right, y up.

struct SimConfig {
  double dt = 1.0 / 600.0;      // integrator step, seconds
  int substeps = 12;            // integrator steps per control step
  int steps_per_second = 50;    // control rate; must equal 1 / (substeps * dt)
  double gravity = 9.81;
  double stiffness_soft = 500.0;    // soft / actuated voxels
  double stiffness_rigid = 5000.0;  // rigid voxels
  double spring_damping = 5.0;      // dashpot along each spring axis
  double contact_stiffness = 4000.0;
  double contact_damping = 50.0;
  double friction = 0.7;                 // Coulomb coefficient
  double friction_regularization = 100.0;  // viscous cap below full slip
  double voxel_side = 1.0;
  double node_mass = 1.0;  // every instantiated corner mass

  double control_dt() const { return dt * substeps; }
  void validate() const;  // throws Error on inconsistent values
};

// Piecewise-linear height field. Heights are clamped-extended beyond the
// first/last breakpoint.
struct Terrain {
  std::vector<std::pair<double, double>> breakpoints;  // (x, y), x strictly increasing

  double height_at(double x) const;
  static Terrain flat(double y = 0.0);
};

// Axis-aligned, non-rotating rigid box used as the Carry/Catch payload.
struct PayloadBox {
  double width = 2.0;
  double height = 1.0;
  Eigen::Vector2d center{0.0, 0.0};
  Eigen::Vector2d velocity{0.0, 0.0};
  double mass = 2.0;
};

struct SoftBodyState {
  struct Voxel {
    int row, col;
    VoxelType type;
    std::array<int, 4> node;  // TL, TR, BL, BR corner node ids
    double rest_scale = 1.0;  // actuated-axis rest-length scale, in [0.6, 1.6]
  };

  std::vector<Eigen::Vector2d> pos;
  std::vector<Eigen::Vector2d> vel;
  std::vector<Voxel> voxels;                      // grid row-major order
  std::array<int, BodyGrid::kSize * BodyGrid::kSize> voxel_at_cell;  // -1 if empty
  long step_count = 0;                            // control steps taken (k)

  int node_count() const { return static_cast<int>(pos.size()); }
  Eigen::Vector2d center_of_mass() const;
  Eigen::Vector2d voxel_center(int voxel_index) const;
  double voxel_area(int voxel_index) const;       // shoelace on the quad
};

// Number of sensor inputs each voxel exposes: 9 Moore-neighborhood slots of
// (x velocity, y velocity, area), two distances to the closest non-robot
// object, and one periodic time signal.
constexpr int kSensorsPerVoxel = 3 * 9 + 2 + 1;

// Per-voxel sensor readings, voxel order matching SoftBodyState::voxels.
struct SensorFrame {
  int n_voxels = 0;
  std::vector<double> values;  // n_voxels * kSensorsPerVoxel

  std::span<const double> voxel(int i) const {
    return {values.data() + static_cast<std::size_t>(i) * kSensorsPerVoxel,
            kSensorsPerVoxel};
  }
};

// Instantiates the body resting on (not intersecting) the terrain, left grid
// edge at spawn_x, all rest scales 1, k = 0. Throws SpawnCollision if any
// corner would start below the terrain.
SoftBodyState assemble(const BodyGrid& b, const SimConfig& cfg,
                       const Terrain& terrain, double spawn_x);

// Advances one control step (substeps x dt). Actuation targets are given per
// voxel in state order and are clamped into [0.6, 1.6]; entries for
// non-actuated voxels are ignored. Also advances the payload if present.
// Throws NumericalBlowup if any coordinate becomes non-finite.
void step(SoftBodyState& s, std::span<const double> actuation,
          const SimConfig& cfg, const Terrain& terrain,
          PayloadBox* payload = nullptr);

// Reads sensors. Missing-neighbor slots are zero-filled; Moore slots are
// ordered row-major over the 3x3 grid window. Distances are measured from
// the voxel center to the closest point of the payload box (the terrain is
// not an "object"); with mask_distance set, or without a payload, both
// distance inputs are 0. Time signal is (k mod 25) / 25.
SensorFrame observe(const SoftBodyState& s, const PayloadBox* payload,
                    bool mask_distance);

// Total mechanical energy (kinetic + gravitational + spring + contact
// penalty); used by stability diagnostics and tests.
double mechanical_energy(const SoftBodyState& s, const SimConfig& cfg,
                         const Terrain& terrain);

}  // namespace vsr

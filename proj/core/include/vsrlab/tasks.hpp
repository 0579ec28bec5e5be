#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "vsrlab/controller.hpp"
#include "vsrlab/physics.hpp"

namespace vsr {

enum class TaskId { Simple, Steps, Carry, Catch };

TaskId task_from_name(std::string_view name);  // simple|steps|carry|catch
std::string task_name(TaskId task);

// Simple and Steps are plain locomotion (with the distance sensors masked);
// Carry and Catch add the payload box.
bool task_has_payload(TaskId task);
bool task_masks_distance(TaskId task);

struct TaskParams {
  double step_rise = 0.3;    // Steps terrain
  double step_run = 3.0;
  double box_w = 2.0;        // payload geometry
  double box_h = 1.0;
  double drop_height = 3.0;  // Catch: box bottom above robot top
  double gap_max = 2.0;      // Catch: |initial x-gap| bound
  int episode_steps = 500;   // control steps per episode
};

struct EpisodeResult {
  double quality = 0.0;
  bool carried = false;  // Carry/Catch: payload still on top at episode end
  double com_x_start = 0.0, com_y_start = 0.0;
  double com_x_end = 0.0, com_y_end = 0.0;
  // NaN when the task has no payload.
  double payload_x_end = 0.0, payload_y_end = 0.0;
};

// Flat at y = 0, except Steps: an ascending staircase (rise step_rise per
// run step_run) starting ahead of the spawn area.
Terrain build_terrain(TaskId task, const TaskParams& params = {});

// Carry: box resting centered on the body's top surface, zero velocity.
// Catch: box drop_height above the body top, x-gap uniform in
// [-gap_max, gap_max]. Box mass is two corner masses.
PayloadBox spawn_payload(TaskId task, const BodyGrid& b,
                         const TaskParams& params, const SimConfig& cfg,
                         Rng& rng);

// Runs one full episode; deterministic given (b, theta, task, episode_seed).
// Simple/Steps score the x-displacement of the robot's center of mass;
// Carry/Catch score the box x-displacement if it is still carried at the
// end, else the negative x-distance between robot and box. An optional
// stream receives one JSON line per control step.
EpisodeResult run_episode(const BodyGrid& b, const BrainParams& theta,
                          TaskId task, std::uint64_t episode_seed,
                          const SimConfig& cfg = {},
                          const TaskParams& params = {},
                          std::ostream* trajectory = nullptr);

}  // namespace vsr

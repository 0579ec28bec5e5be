#include "vsrlab/tasks.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <vector>

#include <nlohmann/json.hpp>

#include "vsrlab/error.hpp"

namespace vsr {

TaskId task_from_name(std::string_view name) {
  if (name == "simple") return TaskId::Simple;
  if (name == "steps") return TaskId::Steps;
  if (name == "carry") return TaskId::Carry;
  if (name == "catch") return TaskId::Catch;
  throw ParseError("unknown task name: " + std::string(name));
}

std::string task_name(TaskId task) {
  switch (task) {
    case TaskId::Simple: return "simple";
    case TaskId::Steps: return "steps";
    case TaskId::Carry: return "carry";
    case TaskId::Catch: return "catch";
  }
  return "?";
}

bool task_has_payload(TaskId task) {
  return task == TaskId::Carry || task == TaskId::Catch;
}

bool task_masks_distance(TaskId task) {
  return task == TaskId::Simple || task == TaskId::Steps;
}

Terrain build_terrain(TaskId task, const TaskParams& params) {
  if (task != TaskId::Steps) return Terrain::flat(0.0);

  // Ascending staircase ahead of the spawn area (the body spawns on [0, 5]).
  Terrain t;
  constexpr double kRiserWidth = 0.02;
  constexpr int kStepCount = 60;
  const double x0 = 6.0;
  t.breakpoints = {{-1e6, 0.0}, {x0, 0.0}};
  double x = x0, y = 0.0;
  for (int i = 0; i < kStepCount; ++i) {
    x += kRiserWidth;
    y += params.step_rise;
    t.breakpoints.emplace_back(x, y);
    x += params.step_run;
    t.breakpoints.emplace_back(x, y);
  }
  return t;
}

namespace {

struct SupportGeometry {
  double com_x;
  double top_y;       // highest corner overall
  double support_y;   // highest corner under the box span
};

SupportGeometry support_geometry(const SoftBodyState& s, double box_center_x,
                                 double box_w) {
  SupportGeometry g;
  g.com_x = s.center_of_mass().x();
  g.top_y = -std::numeric_limits<double>::infinity();
  g.support_y = -std::numeric_limits<double>::infinity();
  for (const auto& p : s.pos) {
    g.top_y = std::max(g.top_y, p.y());
    if (std::abs(p.x() - box_center_x) <= box_w / 2.0)
      g.support_y = std::max(g.support_y, p.y());
  }
  if (!std::isfinite(g.support_y)) g.support_y = g.top_y;
  return g;
}

bool box_in_contact(const SoftBodyState& s, const PayloadBox& box,
                    double tolerance) {
  for (const auto& p : s.pos) {
    if (std::abs(p.x() - box.center.x()) <= box.width / 2.0 + tolerance &&
        std::abs(p.y() - box.center.y()) <= box.height / 2.0 + tolerance)
      return true;
  }
  return false;
}

}  // namespace

PayloadBox spawn_payload(TaskId task, const BodyGrid& b,
                         const TaskParams& params, const SimConfig& cfg,
                         Rng& rng) {
  if (!task_has_payload(task))
    throw Error("spawn_payload: task has no payload");

  const SoftBodyState s = assemble(b, cfg, Terrain::flat(0.0), 0.0);

  PayloadBox box;
  box.width = params.box_w;
  box.height = params.box_h;
  box.mass = 2.0 * cfg.node_mass;
  box.velocity.setZero();

  if (task == TaskId::Carry) {
    const SupportGeometry g = support_geometry(s, s.center_of_mass().x(),
                                               params.box_w);
    box.center = {g.com_x, g.support_y + params.box_h / 2.0};
  } else {  // Catch
    const double gap = uniform_real(rng, -params.gap_max, params.gap_max);
    const SupportGeometry g = support_geometry(s, 0.0, params.box_w);
    box.center = {g.com_x + gap,
                  g.top_y + params.drop_height + params.box_h / 2.0};
  }
  return box;
}

EpisodeResult run_episode(const BodyGrid& b, const BrainParams& theta,
                          TaskId task, std::uint64_t episode_seed,
                          const SimConfig& cfg, const TaskParams& params,
                          std::ostream* trajectory) {
  const ControllerSpec spec;
  if (theta.size() != spec.param_count())
    throw ShapeMismatch("run_episode: theta length does not match controller");

  const Terrain terrain = build_terrain(task, params);
  SoftBodyState state = assemble(b, cfg, terrain, 0.0);

  std::optional<PayloadBox> payload;
  double payload_x_start = 0.0;
  if (task_has_payload(task)) {
    Rng payload_rng = make_stream(episode_seed, "payload");
    payload = spawn_payload(task, b, params, cfg, payload_rng);
    payload_x_start = payload->center.x();
  }
  const bool mask = task_masks_distance(task);

  const Eigen::Vector2d com_start = state.center_of_mass();
  std::vector<double> actuation(state.voxels.size(), 1.0);

  for (int k = 0; k < params.episode_steps; ++k) {
    const SensorFrame frame =
        observe(state, payload ? &*payload : nullptr, mask);
    for (std::size_t i = 0; i < state.voxels.size(); ++i)
      actuation[i] = forward(spec, theta, frame.voxel(i));
    step(state, actuation, cfg, terrain, payload ? &*payload : nullptr);

    if (trajectory) {
      nlohmann::json line;
      line["k"] = state.step_count;
      const Eigen::Vector2d com = state.center_of_mass();
      line["com_x"] = com.x();
      line["com_y"] = com.y();
      if (payload) {
        line["payload_x"] = payload->center.x();
        line["payload_y"] = payload->center.y();
      }
      line["actuation"] = actuation;
      *trajectory << line.dump() << '\n';
    }
  }

  const Eigen::Vector2d com_end = state.center_of_mass();
  EpisodeResult result;
  result.com_x_start = com_start.x();
  result.com_y_start = com_start.y();
  result.com_x_end = com_end.x();
  result.com_y_end = com_end.y();

  if (!payload) {
    result.quality = com_end.x() - com_start.x();
    result.carried = false;
    result.payload_x_end = std::numeric_limits<double>::quiet_NaN();
    result.payload_y_end = std::numeric_limits<double>::quiet_NaN();
    return result;
  }

  constexpr double kContactTolerance = 0.05;
  result.payload_x_end = payload->center.x();
  result.payload_y_end = payload->center.y();
  result.carried = box_in_contact(state, *payload, kContactTolerance) &&
                   payload->center.y() > com_end.y();
  result.quality = result.carried
                       ? payload->center.x() - payload_x_start
                       : -std::abs(com_end.x() - payload->center.x());
  return result;
}

}  // namespace vsr

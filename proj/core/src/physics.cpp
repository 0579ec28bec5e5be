#include "vsrlab/physics.hpp"

#include <algorithm>
#include <cmath>

#include "vsrlab/error.hpp"

namespace vsr {

namespace {

constexpr int kN = BodyGrid::kSize;

inline double sign0(double v) { return (v > 0.0) - (v < 0.0); }

// Regularized Coulomb friction: viscous below full slip, capped at mu*Fn.
inline double friction_force(double tangential_vel, double normal_force,
                             const SimConfig& cfg) {
  const double cap = cfg.friction * normal_force;
  const double viscous = cfg.friction_regularization * std::abs(tangential_vel);
  return sign0(tangential_vel) * std::min(cap, viscous);
}

struct VoxelRest {
  double w, h, d;  // horizontal, vertical, diagonal rest lengths
};

VoxelRest rest_lengths(const SoftBodyState::Voxel& v, double side) {
  double w = side, h = side;
  if (v.type == VoxelType::ActHorizontal) w *= v.rest_scale;
  if (v.type == VoxelType::ActVertical) h *= v.rest_scale;
  return {w, h, std::hypot(w, h)};
}

inline double stiffness_of(VoxelType t, const SimConfig& cfg) {
  return t == VoxelType::Rigid ? cfg.stiffness_rigid : cfg.stiffness_soft;
}

}  // namespace

void SimConfig::validate() const {
  if (dt <= 0.0) throw Error("SimConfig: dt must be positive");
  if (substeps < 1) throw Error("SimConfig: substeps must be >= 1");
  if (!(stiffness_rigid > stiffness_soft && stiffness_soft > 0.0))
    throw Error("SimConfig: need rigid stiffness > soft stiffness > 0");
  if (friction < 0.0) throw Error("SimConfig: friction must be >= 0");
  if (voxel_side <= 0.0 || node_mass <= 0.0)
    throw Error("SimConfig: voxel_side and node_mass must be positive");
  if (std::abs(dt * substeps * steps_per_second - 1.0) > 1e-9)
    throw Error("SimConfig: substeps * dt must equal 1 / steps_per_second");
}

double Terrain::height_at(double x) const {
  const auto& bp = breakpoints;
  if (bp.empty()) return 0.0;
  if (x <= bp.front().first) return bp.front().second;
  if (x >= bp.back().first) return bp.back().second;
  // First breakpoint with bp.x > x; its predecessor starts the segment.
  auto it = std::upper_bound(
      bp.begin(), bp.end(), x,
      [](double v, const std::pair<double, double>& p) { return v < p.first; });
  const auto& [x1, y1] = *it;
  const auto& [x0, y0] = *(it - 1);
  const double t = (x - x0) / (x1 - x0);
  return y0 + t * (y1 - y0);
}

Terrain Terrain::flat(double y) {
  return Terrain{{{-1e6, y}, {1e6, y}}};
}

Eigen::Vector2d SoftBodyState::center_of_mass() const {
  Eigen::Vector2d com = Eigen::Vector2d::Zero();
  for (const auto& p : pos) com += p;
  return com / static_cast<double>(pos.size());
}

Eigen::Vector2d SoftBodyState::voxel_center(int i) const {
  const auto& v = voxels[i];
  return (pos[v.node[0]] + pos[v.node[1]] + pos[v.node[2]] + pos[v.node[3]]) /
         4.0;
}

double SoftBodyState::voxel_area(int i) const {
  const auto& v = voxels[i];
  // Quad in perimeter order TL, TR, BR, BL.
  const Eigen::Vector2d& a = pos[v.node[0]];
  const Eigen::Vector2d& b = pos[v.node[1]];
  const Eigen::Vector2d& c = pos[v.node[3]];
  const Eigen::Vector2d& d = pos[v.node[2]];
  const double twice =
      a.x() * b.y() - b.x() * a.y() + b.x() * c.y() - c.x() * b.y() +
      c.x() * d.y() - d.x() * c.y() + d.x() * a.y() - a.x() * d.y();
  return std::abs(twice) / 2.0;
}

SoftBodyState assemble(const BodyGrid& b, const SimConfig& cfg,
                       const Terrain& terrain, double spawn_x) {
  cfg.validate();
  if (!is_valid_polyomino(b)) throw Error("assemble: body is not a valid polyomino");

  SoftBodyState s;
  s.voxel_at_cell.fill(-1);

  // Instantiate corner nodes only where an adjacent voxel exists.
  std::array<int, (kN + 1) * (kN + 1)> node_of_corner;
  node_of_corner.fill(-1);
  auto corner_id = [&](int gr, int gc) -> int& {
    return node_of_corner[gr * (kN + 1) + gc];
  };
  for (int r = 0; r < kN; ++r)
    for (int c = 0; c < kN; ++c) {
      if (b.at(r, c) == VoxelType::Empty) continue;
      for (int dr = 0; dr <= 1; ++dr)
        for (int dc = 0; dc <= 1; ++dc)
          if (corner_id(r + dr, c + dc) < 0) {
            corner_id(r + dr, c + dc) = static_cast<int>(s.pos.size());
            s.pos.emplace_back(spawn_x + (c + dc) * cfg.voxel_side,
                               (kN - (r + dr)) * cfg.voxel_side);
          }
    }
  s.vel.assign(s.pos.size(), Eigen::Vector2d::Zero());

  for (int r = 0; r < kN; ++r)
    for (int c = 0; c < kN; ++c) {
      if (b.at(r, c) == VoxelType::Empty) continue;
      SoftBodyState::Voxel v;
      v.row = r;
      v.col = c;
      v.type = b.at(r, c);
      v.node = {corner_id(r, c), corner_id(r, c + 1), corner_id(r + 1, c),
                corner_id(r + 1, c + 1)};
      v.rest_scale = 1.0;
      s.voxel_at_cell[r * kN + c] = static_cast<int>(s.voxels.size());
      s.voxels.push_back(v);
    }

  // Drop the whole assembly so its lowest corner touches the terrain.
  double lift = -1e300;
  for (const auto& p : s.pos)
    lift = std::max(lift, terrain.height_at(p.x()) - p.y());
  for (auto& p : s.pos) p.y() += lift;

  for (const auto& p : s.pos)
    if (p.y() < terrain.height_at(p.x()) - 1e-9)
      throw SpawnCollision("assemble: body cannot rest on this terrain");

  s.step_count = 0;
  return s;
}

namespace {

void accumulate_spring_forces(const SoftBodyState& s, const SimConfig& cfg,
                              std::vector<Eigen::Vector2d>& force) {
  for (const auto& v : s.voxels) {
    const VoxelRest rest = rest_lengths(v, cfg.voxel_side);
    const double k = stiffness_of(v.type, cfg);
    const int tl = v.node[0], tr = v.node[1], bl = v.node[2], br = v.node[3];

    const std::array<std::array<int, 2>, 6> pairs = {{
        {tl, tr}, {bl, br},  // horizontal edges
        {tl, bl}, {tr, br},  // vertical edges
        {tl, br}, {tr, bl},  // shear diagonals
    }};
    const std::array<double, 6> rests = {rest.w, rest.w, rest.h,
                                         rest.h, rest.d, rest.d};
    for (int e = 0; e < 6; ++e) {
      const int a = pairs[e][0], bnode = pairs[e][1];
      const Eigen::Vector2d d = s.pos[bnode] - s.pos[a];
      const double len = d.norm();
      if (len < 1e-12) continue;
      const Eigen::Vector2d dir = d / len;
      const double stretch = len - rests[e];
      const double rel_vel = (s.vel[bnode] - s.vel[a]).dot(dir);
      const Eigen::Vector2d f = (k * stretch + cfg.spring_damping * rel_vel) * dir;
      force[a] += f;
      force[bnode] -= f;
    }
  }
}

void ground_contact(const Eigen::Vector2d& p, const Eigen::Vector2d& v,
                    const Terrain& terrain, const SimConfig& cfg,
                    Eigen::Vector2d& force) {
  const double pen = terrain.height_at(p.x()) - p.y();
  if (pen <= 0.0) return;
  const double fn = std::max(
      0.0, cfg.contact_stiffness * pen - cfg.contact_damping * v.y());
  force.y() += fn;
  force.x() -= friction_force(v.x(), fn, cfg);
}

// Pushes a robot node out of the payload box along the axis of least
// penetration; the opposite force goes to the box.
void box_contact(const Eigen::Vector2d& p, const Eigen::Vector2d& v,
                 const PayloadBox& box, const SimConfig& cfg,
                 Eigen::Vector2d& node_force, Eigen::Vector2d& box_force) {
  const double dx = p.x() - box.center.x();
  const double dy = p.y() - box.center.y();
  const double pen_x = box.width / 2.0 - std::abs(dx);
  const double pen_y = box.height / 2.0 - std::abs(dy);
  if (pen_x <= 0.0 || pen_y <= 0.0) return;

  const Eigen::Vector2d rel = v - box.velocity;
  if (pen_y <= pen_x) {
    const double ny = dy >= 0.0 ? 1.0 : -1.0;
    const double fn = std::max(0.0, cfg.contact_stiffness * pen_y -
                                        cfg.contact_damping * rel.y() * ny);
    const double ft = friction_force(rel.x(), fn, cfg);
    node_force += Eigen::Vector2d(-ft, ny * fn);
    box_force += Eigen::Vector2d(ft, -ny * fn);
  } else {
    const double nx = dx >= 0.0 ? 1.0 : -1.0;
    const double fn = std::max(0.0, cfg.contact_stiffness * pen_x -
                                        cfg.contact_damping * rel.x() * nx);
    const double ft = friction_force(rel.y(), fn, cfg);
    node_force += Eigen::Vector2d(nx * fn, -ft);
    box_force += Eigen::Vector2d(-nx * fn, ft);
  }
}

}  // namespace

void step(SoftBodyState& s, std::span<const double> actuation,
          const SimConfig& cfg, const Terrain& terrain, PayloadBox* payload) {
  if (actuation.size() != s.voxels.size())
    throw ShapeMismatch("step: one actuation target per voxel required");

  for (std::size_t i = 0; i < s.voxels.size(); ++i)
    if (is_actuated(s.voxels[i].type))
      s.voxels[i].rest_scale = std::clamp(actuation[i], kDeformMin, kDeformMax);

  std::vector<Eigen::Vector2d> force(s.pos.size());
  const double inv_mass = 1.0 / cfg.node_mass;

  for (int sub = 0; sub < cfg.substeps; ++sub) {
    std::fill(force.begin(), force.end(), Eigen::Vector2d::Zero());
    Eigen::Vector2d box_force = Eigen::Vector2d::Zero();

    for (auto& f : force) f.y() -= cfg.node_mass * cfg.gravity;
    accumulate_spring_forces(s, cfg, force);
    for (std::size_t i = 0; i < s.pos.size(); ++i)
      ground_contact(s.pos[i], s.vel[i], terrain, cfg, force[i]);

    if (payload) {
      box_force.y() -= payload->mass * cfg.gravity;
      for (std::size_t i = 0; i < s.pos.size(); ++i)
        box_contact(s.pos[i], s.vel[i], *payload, cfg, force[i], box_force);
      // Box bottom corners against the terrain.
      for (double sx : {-1.0, 1.0}) {
        const double cx = payload->center.x() + sx * payload->width / 2.0;
        const double cy = payload->center.y() - payload->height / 2.0;
        const double pen = terrain.height_at(cx) - cy;
        if (pen > 0.0) {
          const double fn =
              std::max(0.0, cfg.contact_stiffness * pen -
                                cfg.contact_damping * payload->velocity.y());
          box_force.y() += fn;
          box_force.x() -= friction_force(payload->velocity.x(), fn, cfg);
        }
      }
    }

    for (std::size_t i = 0; i < s.pos.size(); ++i) {
      s.vel[i] += cfg.dt * inv_mass * force[i];
      s.pos[i] += cfg.dt * s.vel[i];
    }
    if (payload) {
      payload->velocity += cfg.dt / payload->mass * box_force;
      payload->center += cfg.dt * payload->velocity;
    }
  }

  ++s.step_count;

  for (std::size_t i = 0; i < s.pos.size(); ++i)
    if (!s.pos[i].allFinite() || !s.vel[i].allFinite())
      throw NumericalBlowup("step: non-finite node state");
  if (payload && (!payload->center.allFinite() || !payload->velocity.allFinite()))
    throw NumericalBlowup("step: non-finite payload state");
}

SensorFrame observe(const SoftBodyState& s, const PayloadBox* payload,
                    bool mask_distance) {
  const int nv = static_cast<int>(s.voxels.size());
  SensorFrame frame;
  frame.n_voxels = nv;
  frame.values.assign(static_cast<std::size_t>(nv) * kSensorsPerVoxel, 0.0);

  // Per-voxel velocity (mean of corners) and area, computed once.
  std::vector<double> vx(nv), vy(nv), area(nv);
  for (int i = 0; i < nv; ++i) {
    const auto& v = s.voxels[i];
    Eigen::Vector2d mean = (s.vel[v.node[0]] + s.vel[v.node[1]] +
                            s.vel[v.node[2]] + s.vel[v.node[3]]) /
                           4.0;
    vx[i] = mean.x();
    vy[i] = mean.y();
    area[i] = s.voxel_area(i);
  }

  const double time_signal = static_cast<double>(s.step_count % 25) / 25.0;

  for (int i = 0; i < nv; ++i) {
    double* out = frame.values.data() +
                  static_cast<std::size_t>(i) * kSensorsPerVoxel;
    const auto& v = s.voxels[i];
    int slot = 0;
    for (int dr = -1; dr <= 1; ++dr)
      for (int dc = -1; dc <= 1; ++dc, ++slot) {
        const int r = v.row + dr, c = v.col + dc;
        if (r < 0 || r >= kN || c < 0 || c >= kN) continue;
        const int j = s.voxel_at_cell[r * kN + c];
        if (j < 0) continue;
        out[3 * slot + 0] = vx[j];
        out[3 * slot + 1] = vy[j];
        out[3 * slot + 2] = area[j];
      }
    if (payload && !mask_distance) {
      const Eigen::Vector2d center = s.voxel_center(i);
      const double px =
          std::clamp(center.x(), payload->center.x() - payload->width / 2.0,
                     payload->center.x() + payload->width / 2.0);
      const double py =
          std::clamp(center.y(), payload->center.y() - payload->height / 2.0,
                     payload->center.y() + payload->height / 2.0);
      out[27] = px - center.x();
      out[28] = py - center.y();
    }
    out[29] = time_signal;
  }
  return frame;
}

double mechanical_energy(const SoftBodyState& s, const SimConfig& cfg,
                         const Terrain& terrain) {
  double e = 0.0;
  for (std::size_t i = 0; i < s.pos.size(); ++i) {
    e += 0.5 * cfg.node_mass * s.vel[i].squaredNorm();
    e += cfg.node_mass * cfg.gravity * s.pos[i].y();
    const double pen = terrain.height_at(s.pos[i].x()) - s.pos[i].y();
    if (pen > 0.0) e += 0.5 * cfg.contact_stiffness * pen * pen;
  }
  for (const auto& v : s.voxels) {
    const VoxelRest rest = rest_lengths(v, cfg.voxel_side);
    const double k = stiffness_of(v.type, cfg);
    const std::array<std::array<int, 2>, 6> pairs = {{
        {v.node[0], v.node[1]},
        {v.node[2], v.node[3]},
        {v.node[0], v.node[2]},
        {v.node[1], v.node[3]},
        {v.node[0], v.node[3]},
        {v.node[1], v.node[2]},
    }};
    const std::array<double, 6> rests = {rest.w, rest.w, rest.h,
                                         rest.h, rest.d, rest.d};
    for (int e2 = 0; e2 < 6; ++e2) {
      const double len = (s.pos[pairs[e2][1]] - s.pos[pairs[e2][0]]).norm();
      const double stretch = len - rests[e2];
      e += 0.5 * k * stretch * stretch;
    }
  }
  return e;
}

}  // namespace vsr

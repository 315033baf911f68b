#include "chronolens/layout.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <unordered_map>

#include "chronolens/errors.hpp"

namespace chronolens {

Vec2 LayoutState::position(std::string_view id) const {
  for (std::size_t i = 0; i < ids.size(); ++i)
    if (ids[i] == id) return positions[i];
  throw UnknownEntity("node '" + std::string(id) + "' is not part of the layout");
}

bool LayoutState::finite() const {
  return std::all_of(positions.begin(), positions.end(),
                     [](const Vec2& p) { return std::isfinite(p.x) && std::isfinite(p.y); });
}

namespace {

double unit_double(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double norm(Vec2 v) { return std::hypot(v.x, v.y); }

struct Topology {
  std::vector<double> mass; // degree + 1
  struct Link {
    std::size_t a, b;
    double weight;
  };
  std::vector<Link> links;
};

Topology topology(const LayoutState& state, const NetworkView& view, double delta) {
  std::unordered_map<std::string_view, std::size_t> index;
  for (std::size_t i = 0; i < state.ids.size(); ++i) index.emplace(state.ids[i], i);
  Topology t;
  t.mass.assign(state.ids.size(), 1.0);
  for (const auto& e : view.edges) {
    auto a = index.find(e.a);
    auto b = index.find(e.b);
    if (a == index.end() || b == index.end() || a->second == b->second) continue;
    t.mass[a->second] += 1.0;
    t.mass[b->second] += 1.0;
    t.links.push_back({a->second, b->second, std::pow(static_cast<double>(e.weight), delta)});
  }
  return t;
}

// Neumaier-compensated sum. Near equilibrium a node's net force is many
// orders of magnitude smaller than its individual terms; plain summation
// would leave rounding residue of the order of the terms.
struct Accumulator {
  double sum = 0.0;
  double carry = 0.0;

  void add(double v) {
    const double t = sum + v;
    carry += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

// Net forces, plus an upper bound on each node's local stiffness (the
// magnitude of the force Jacobian's diagonal block) when `stiffness` is set.
std::vector<Vec2> forces_for(const LayoutState& state, const Topology& t, const LayoutParams& params,
                             std::vector<double>* stiffness = nullptr) {
  const auto& p = state.positions;
  const std::size_t n = p.size();
  std::vector<Accumulator> fx(n), fy(n);
  if (stiffness) stiffness->assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = p[i].x - p[j].x;
      const double dy = p[i].y - p[j].y;
      const double d = std::max(std::hypot(dx, dy), kMinDistance);
      // Magnitude k_r m_i m_j / d along the unit vector (dx, dy) / d.
      const double s = params.k_r * t.mass[i] * t.mass[j] / (d * d);
      fx[i].add(s * dx);
      fy[i].add(s * dy);
      fx[j].add(-s * dx);
      fy[j].add(-s * dy);
      if (stiffness) {
        (*stiffness)[i] += s;
        (*stiffness)[j] += s;
      }
    }
  }
  for (const auto& l : t.links) {
    // Magnitude w d along the unit vector: the d's cancel.
    const double dx = p[l.b].x - p[l.a].x;
    const double dy = p[l.b].y - p[l.a].y;
    fx[l.a].add(l.weight * dx);
    fy[l.a].add(l.weight * dy);
    fx[l.b].add(-l.weight * dx);
    fy[l.b].add(-l.weight * dy);
  }
  if (params.k_g > 0) {
    for (std::size_t i = 0; i < n; ++i) {
      const double d = norm(p[i]);
      if (d < kMinDistance) continue;
      const double s = params.k_g * t.mass[i] / d;
      fx[i].add(-s * p[i].x);
      fy[i].add(-s * p[i].y);
      if (stiffness) (*stiffness)[i] += s;
    }
  }
  std::vector<Vec2> f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = {fx[i].value(), fy[i].value()};
  return f;
}

} // namespace

LayoutState init_layout(const NetworkView& view, std::uint64_t seed) {
  LayoutState state;
  std::mt19937_64 rng(seed);
  std::set<std::pair<double, double>> taken;
  for (const auto& node : view.nodes) {
    Vec2 p;
    do {
      const double r = std::sqrt(unit_double(rng));
      const double theta = 2.0 * std::numbers::pi * unit_double(rng);
      p = {r * std::cos(theta), r * std::sin(theta)};
    } while (!taken.emplace(p.x, p.y).second);
    state.ids.push_back(node.id);
    state.positions.push_back(p);
  }
  state.previous_forces.assign(state.positions.size(), Vec2{});
  state.converged = state.positions.empty();
  return state;
}

std::vector<Vec2> compute_forces(const LayoutState& state, const NetworkView& view, const LayoutParams& params) {
  return forces_for(state, topology(state, view, params.delta), params);
}

LayoutState layout_step(const LayoutState& state, const NetworkView& view, const LayoutParams& params) {
  LayoutState next = state;
  ++next.iteration;
  const std::size_t n = state.positions.size();
  if (n == 0) {
    next.converged = true;
    next.last_displacement = 0.0;
    return next;
  }
  const auto t = topology(state, view, params.delta);
  std::vector<double> stiffness;
  const auto f = forces_for(state, t, params, &stiffness);

  // Mass-weighted swing (direction changes) and traction (consistent
  // motion) of every node.
  std::vector<double> swing(n);
  double total_swing = 0.0;
  double total_traction = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 prev = i < state.previous_forces.size() ? state.previous_forces[i] : Vec2{};
    swing[i] = t.mass[i] * norm({f[i].x - prev.x, f[i].y - prev.y});
    total_swing += swing[i];
    total_traction += t.mass[i] * norm({f[i].x + prev.x, f[i].y + prev.y}) / 2.0;
  }

  // Global speed follows jitter * traction / swing and rises by at most
  // half its value per step.
  double target = total_swing > 0 ? params.jitter * total_traction / total_swing : kMaxSpeed;
  if (!std::isfinite(target)) target = kMaxSpeed;
  next.speed = std::clamp(std::min(target, 1.5 * state.speed), kMinSpeed, kMaxSpeed);

  double moved = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double local = params.k_s * next.speed / (1.0 + next.speed * std::sqrt(swing[i]));
    // Damped-Jacobi bound: a node never steps further than half the
    // distance to its own local equilibrium, which keeps stiff nodes
    // (heavy edges, high degree) from oscillating.
    if (stiffness[i] > 0) local = std::min(local, kStepDamping / stiffness[i]);
    const double fn = norm(f[i]);
    if (fn > 0 && local * fn > params.max_displacement) local = params.max_displacement / fn;
    const Vec2 step{local * f[i].x, local * f[i].y};
    if (!std::isfinite(step.x) || !std::isfinite(step.y)) continue;
    next.positions[i].x += step.x;
    next.positions[i].y += step.y;
    moved += norm(step);
  }
  next.previous_forces = f;
  next.last_displacement = moved / static_cast<double>(n);
  next.converged = next.last_displacement < params.tolerance;
  return next;
}

LayoutState run_layout(LayoutState state, const NetworkView& view, const LayoutParams& params) {
  if (state.positions.empty()) {
    state.converged = true;
    return state;
  }
  state.converged = false;
  for (int i = 0; i < params.max_iters && !state.converged; ++i) state = layout_step(state, view, params);
  return state;
}

LayoutState run_layout(const NetworkView& view, const LayoutParams& params) {
  return run_layout(init_layout(view, params.seed), view, params);
}

nlohmann::json to_json(const NetworkView& view, const LayoutState& layout) {
  auto j = to_json(view);
  for (auto& node : j.at("nodes")) {
    const auto& id = node.at("id").get_ref<const std::string&>();
    for (std::size_t i = 0; i < layout.ids.size(); ++i) {
      if (layout.ids[i] != id) continue;
      node["pos"] = {{"x", layout.positions[i].x}, {"y", layout.positions[i].y}};
      break;
    }
  }
  return j;
}

} // namespace chronolens

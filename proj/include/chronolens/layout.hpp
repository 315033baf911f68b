#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "chronolens/graph.hpp"

namespace chronolens {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

/// Force-atlas parameters. Attraction along an edge is `weight^delta * d`,
/// repulsion between every pair is `k_r (deg_a+1)(deg_b+1) / d`, gravity is
/// `k_g (deg+1)` toward the origin.
struct LayoutParams {
  double k_r = 1.0;
  double k_g = 0.05;
  double delta = 1.0;
  /// Stop once the mean per-node displacement of a step drops below this.
  double tolerance = 1e-3;
  int max_iters = 1000;
  std::uint64_t seed = 1;
  /// Jitter tolerance of the adaptive global speed.
  double jitter = 1.0;
  /// Local speed factor and per-step displacement cap.
  double k_s = 0.1;
  double max_displacement = 10.0;
};

struct LayoutState {
  /// Node ids in view order; `positions[i]` belongs to `ids[i]`.
  std::vector<std::string> ids;
  std::vector<Vec2> positions;
  /// Forces of the previous step, used for swing/traction.
  std::vector<Vec2> previous_forces;
  double speed = 1.0;
  int iteration = 0;
  bool converged = false;
  double last_displacement = 0.0;

  /// Throws UnknownEntity when the id is not laid out.
  Vec2 position(std::string_view id) const;
  bool finite() const;
};

inline constexpr double kMinDistance = 1e-9;
inline constexpr double kMinSpeed = 1e-4;
inline constexpr double kMaxSpeed = 10.0;
/// Fraction of the locally optimal (Newton) step a node may take.
inline constexpr double kStepDamping = 0.5;

/// Pseudo-random placement in the unit disk; distinct nodes get distinct
/// positions. An empty view yields an already converged state.
LayoutState init_layout(const NetworkView& view, std::uint64_t seed);

/// Net force on every node at the state's current positions.
std::vector<Vec2> compute_forces(const LayoutState& state, const NetworkView& view, const LayoutParams& params);

/// One synchronous update: every force reads the old positions.
LayoutState layout_step(const LayoutState& state, const NetworkView& view, const LayoutParams& params);

/// Steps from `state` until converged or `params.max_iters` steps were taken.
LayoutState run_layout(LayoutState state, const NetworkView& view, const LayoutParams& params);
/// Same, starting from `init_layout(view, params.seed)`.
LayoutState run_layout(const NetworkView& view, const LayoutParams& params);

/// NetworkView wire format with `pos:{x,y}` on every laid-out node.
nlohmann::json to_json(const NetworkView& view, const LayoutState& layout);

} // namespace chronolens

#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "chronolens/errors.hpp"
#include "chronolens/layout.hpp"

using namespace chronolens;

namespace {

NetworkView make_view(std::size_t n, const std::vector<std::tuple<std::size_t, std::size_t, std::uint64_t>>& edges) {
  NetworkView v;
  for (std::size_t i = 0; i < n; ++i) v.nodes.push_back({"n" + std::to_string(i), "", 1, ""});
  for (const auto& [a, b, w] : edges) v.edges.push_back({"n" + std::to_string(a), "n" + std::to_string(b), w});
  return v;
}

double dist(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

} // namespace

TEST_SUITE("layout") {

TEST_CASE("initial placement") {
  const auto empty = init_layout({}, 1);
  CHECK(empty.positions.empty());
  CHECK(empty.converged);
  CHECK(run_layout(NetworkView{}, LayoutParams{}).converged);

  const auto view = make_view(100, {});
  const auto a = init_layout(view, 42);
  const auto b = init_layout(view, 42);
  CHECK(a.positions == b.positions);
  CHECK(init_layout(view, 43).positions != a.positions);
  std::set<std::pair<double, double>> distinct;
  for (const auto& p : a.positions) {
    CHECK(std::hypot(p.x, p.y) <= 1.0);
    distinct.insert({p.x, p.y});
  }
  CHECK(distinct.size() == 100);
  CHECK(a.position("n7") == a.positions[7]);
  CHECK_THROWS_AS(a.position("zz"), UnknownEntity);
}

TEST_CASE("a lone node at the origin stays put") {
  const auto view = make_view(1, {});
  auto s = init_layout(view, 1);
  s.positions[0] = {0, 0};
  LayoutParams p;
  p.k_g = 0;
  const auto next = layout_step(s, view, p);
  CHECK(next.positions[0] == Vec2{0, 0});
}

TEST_CASE("two linked nodes settle at distance 2") {
  LayoutParams p;
  p.k_g = 0;
  p.tolerance = 1e-7;
  p.max_iters = 20000;
  const auto view = make_view(2, {{0, 1, 1}});
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    p.seed = seed;
    const auto s = run_layout(view, p);
    CHECK(s.converged);
    CHECK(std::abs(dist(s.positions[0], s.positions[1]) - 2.0) < 1e-3);
  }
}

TEST_CASE("an equal-weight triangle becomes equilateral") {
  LayoutParams p;
  p.tolerance = 1e-7;
  p.max_iters = 20000;
  const auto s = run_layout(make_view(3, {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}}), p);
  CHECK(s.converged);
  const double d01 = dist(s.positions[0], s.positions[1]);
  CHECK(std::abs(dist(s.positions[1], s.positions[2]) - d01) < 1e-3);
  CHECK(std::abs(dist(s.positions[0], s.positions[2]) - d01) < 1e-3);
}

TEST_CASE("forces obey Newton's third law without gravity") {
  std::mt19937_64 rng(8);
  for (int round = 0; round < 50; ++round) {
    const std::size_t n = 2 + rng() % 25;
    std::vector<std::tuple<std::size_t, std::size_t, std::uint64_t>> edges;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (rng() % 3 == 0) edges.emplace_back(i, j, 1 + rng() % 5);
    const auto view = make_view(n, edges);
    LayoutParams p;
    p.k_g = 0;
    auto s = init_layout(view, rng());
    for (int step = 0; step < 200 && !s.converged; ++step) {
      const auto f = compute_forces(s, view, p);
      double sx = 0, sy = 0, fmax = 0;
      for (const auto& v : f) {
        sx += v.x;
        sy += v.y;
        fmax = std::max(fmax, std::hypot(v.x, v.y));
      }
      CHECK(std::hypot(sx, sy) < 1e-9 * fmax);
      s = layout_step(s, view, p);
    }
  }
}

TEST_CASE("mirror symmetry is preserved by a step") {
  // A path a-b-c mirrored across the x axis: a and c are mirror images.
  const auto view = make_view(3, {{0, 1, 1}, {1, 2, 1}});
  auto s = init_layout(view, 1);
  s.positions = {{0.3, 0.7}, {0.5, 0.0}, {0.3, -0.7}};
  LayoutParams p;
  for (int i = 0; i < 50; ++i) {
    s = layout_step(s, view, p);
    CHECK(s.positions[0].x == doctest::Approx(s.positions[2].x).epsilon(1e-12));
    CHECK(s.positions[0].y == doctest::Approx(-s.positions[2].y).epsilon(1e-12));
    CHECK(std::abs(s.positions[1].y) < 1e-12);
  }
}

TEST_CASE("translation equivariance without gravity") {
  const auto view = make_view(5, {{0, 1, 2}, {1, 2, 1}, {2, 3, 1}, {3, 4, 3}, {0, 4, 1}});
  LayoutParams p;
  p.k_g = 0;
  auto a = init_layout(view, 9);
  auto b = a;
  for (auto& q : b.positions) {
    q.x += 3.25;
    q.y -= 1.5;
  }
  for (int i = 0; i < 300; ++i) {
    a = layout_step(a, view, p);
    b = layout_step(b, view, p);
  }
  for (std::size_t i = 0; i < a.positions.size(); ++i) {
    CHECK(b.positions[i].x - a.positions[i].x == doctest::Approx(3.25).epsilon(1e-6));
    CHECK(b.positions[i].y - a.positions[i].y == doctest::Approx(-1.5).epsilon(1e-6));
  }
}

TEST_CASE("steps stay finite on hostile inputs") {
  std::mt19937_64 rng(1234);
  for (int round = 0; round < 100; ++round) {
    const std::size_t n = 1 + rng() % 30;
    std::vector<std::tuple<std::size_t, std::size_t, std::uint64_t>> edges;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (rng() % 2 == 0) edges.emplace_back(i, j, 1 + rng() % 1000);
    const auto view = make_view(n, edges);
    LayoutParams p;
    p.k_r = 1e-3 + static_cast<double>(rng() % 1000);
    p.k_g = static_cast<double>(rng() % 3);
    p.delta = 0.5 + static_cast<double>(rng() % 3);
    p.max_iters = 200;
    auto s = init_layout(view, rng());
    // Stack some nodes on top of each other and one at the origin.
    if (n > 2) s.positions[1] = s.positions[0];
    s.positions[n - 1] = {0, 0};
    s = run_layout(s, view, p);
    CHECK(s.finite());
    CHECK(s.positions.size() == view.nodes.size());
  }
}

TEST_CASE("determinism") {
  const auto view = make_view(12, {{0, 1, 1}, {1, 2, 2}, {2, 3, 1}, {4, 5, 1}, {5, 6, 3}, {7, 8, 1}, {0, 11, 1}});
  LayoutParams p;
  p.seed = 77;
  const auto a = run_layout(view, p);
  const auto b = run_layout(view, p);
  CHECK(a.positions == b.positions);
  CHECK(a.iteration == b.iteration);
}

TEST_CASE("two cliques separate") {
  std::vector<std::tuple<std::size_t, std::size_t, std::uint64_t>> edges;
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = i + 1; j < 6; ++j) {
      edges.emplace_back(i, j, 3);
      edges.emplace_back(i + 6, j + 6, 3);
    }
  const auto view = make_view(12, edges);
  LayoutParams p;
  p.max_iters = 3000;
  const auto s = run_layout(view, p);
  CHECK(s.finite());
  double intra = 0, inter = 0;
  int n_intra = 0, n_inter = 0;
  for (std::size_t i = 0; i < 12; ++i)
    for (std::size_t j = i + 1; j < 12; ++j) {
      const double d = dist(s.positions[i], s.positions[j]);
      if ((i < 6) == (j < 6)) {
        intra += d;
        ++n_intra;
      } else {
        inter += d;
        ++n_inter;
      }
    }
  CHECK(intra / n_intra < inter / n_inter);
}

TEST_CASE("positions in the wire format") {
  const auto view = make_view(2, {{0, 1, 1}});
  const auto s = run_layout(view, LayoutParams{});
  const auto j = to_json(view, s);
  CHECK(j.at("nodes")[0].at("pos").at("x").get<double>() == s.positions[0].x);
  CHECK(j.at("nodes")[1].at("pos").at("y").get<double>() == s.positions[1].y);
}

}

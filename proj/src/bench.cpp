#include "dtfsc/bench.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <tuple>

#include "dtfsc/error.hpp"

namespace dtfsc {

namespace {

using Cell = GridSpec::Cell;

bool contains(const std::vector<Cell>& cells, Cell c) {
  return std::find(cells.begin(), cells.end(), c) != cells.end();
}

/// Adds `p` to the outcome for `s`, keeping the distribution duplicate-free.
void add_outcome(Dist& d, StateId s, double p) {
  for (auto& o : d)
    if (o.state == s) {
      o.probability += p;
      return;
    }
  d.push_back({s, p});
}

struct Direction {
  const char* action;
  int dx;
  int dy;
};

}  // namespace

void validate(const GridSpec& spec) {
  if (spec.n < 3) throw std::invalid_argument("grid side must be at least 3");
  auto inside = [&](Cell c) { return c.first >= 0 && c.second >= 0 && c.first < spec.n && c.second < spec.n; };
  for (auto c : spec.obstacles)
    if (!inside(c)) throw std::invalid_argument("obstacle outside the grid");
  for (auto c : spec.stations)
    if (!inside(c)) throw std::invalid_argument("station outside the grid");
  if (!inside(spec.goal)) throw std::invalid_argument("goal outside the grid");
  if (contains(spec.obstacles, spec.goal) || contains(spec.obstacles, {0, 0}))
    throw std::invalid_argument("start and goal must be free cells");
  if (!(spec.slip >= 0.0 && spec.slip < 1.0)) throw std::invalid_argument("slip must be in [0, 1)");
  if (spec.family == GridSpec::Family::refuel) {
    if (spec.n < 4) throw std::invalid_argument("refuel grids need a side of at least 4");
    if (spec.energy < 2) throw std::invalid_argument("refuel energy must be at least 2");
    for (auto c : spec.stations)
      if (contains(spec.obstacles, c)) throw std::invalid_argument("station on an obstacle");
  }
}

GridSpec obstacle_spec(int n) {
  if (n < 5) throw std::invalid_argument("obstacle grids need a side of at least 5");
  GridSpec g;
  g.family = GridSpec::Family::obstacle;
  g.n = n;
  g.slip = 0.1;
  g.goal = {n - 1, n - 1};
  g.obstacles = {{n / 2, 0}, {n / 2, 1}, {1, n - 1}};
  return g;
}

GridSpec refuel_spec(int n, int energy) {
  GridSpec g;
  g.family = GridSpec::Family::refuel;
  g.n = n;
  g.energy = energy;
  g.slip = 0.4;
  g.goal = {n - 1, n - 1};
  const int h = (n + 1) / 2;
  g.stations = {{0, 0}, {h, h}};
  g.obstacles = {{h - 1, h - 1}};
  return g;
}

namespace {

Pomdp gen_obstacle_grid(const GridSpec& g) {
  const std::vector<Direction> dirs{{"down", 0, 1}, {"left", -1, 0}, {"right", 1, 0}, {"up", 0, -1}};
  std::vector<FeatureSpec> features{FeatureSpec::integer("class", 0, 2), FeatureSpec::boolean("CanGoDown"),
                                    FeatureSpec::boolean("CanGoLeft"), FeatureSpec::boolean("CanGoRight"),
                                    FeatureSpec::boolean("CanGoUp")};
  PomdpBuilder b(features, {"down", "left", "right", "up"});
  auto inside = [&](int x, int y) { return x >= 0 && y >= 0 && x < g.n && y < g.n; };

  std::map<Cell, StateId> id;
  for (int y = 0; y < g.n; ++y)
    for (int x = 0; x < g.n; ++x) {
      if (contains(g.obstacles, {x, y}) || Cell{x, y} == g.goal) continue;
      Observation z{0, 0, 0, 0, 0};
      for (std::size_t d = 0; d < dirs.size(); ++d) z.values[d + 1] = inside(x + dirs[d].dx, y + dirs[d].dy);
      id[{x, y}] = b.add_state(z);
    }
  const StateId bad = b.add_state({1, 0, 0, 0, 0});
  const StateId goal = b.add_state({2, 0, 0, 0, 0});
  auto land = [&](Cell c) {
    if (c == g.goal) return goal;
    if (contains(g.obstacles, c)) return bad;
    return id.at(c);
  };
  for (const auto& [c, s] : id)
    for (ActionId a = 0; a < dirs.size(); ++a) {
      const int nx = c.first + dirs[a].dx, ny = c.second + dirs[a].dy;
      if (!inside(nx, ny)) continue;
      Dist d;
      add_outcome(d, land({nx, ny}), 1.0 - g.slip);
      if (g.slip > 0) add_outcome(d, s, g.slip);
      b.set_transition(s, a, std::move(d));
    }
  for (StateId s : {bad, goal})
    for (ActionId a = 0; a < dirs.size(); ++a) b.set_transition(s, a, {{s, 1.0}});
  b.set_init(id.at({0, 0}));
  b.add_target(goal);
  return std::move(b).build();
}

Pomdp gen_refuel_grid(const GridSpec& g) {
  // Actions 0..3 move, 4 refuels.
  const std::vector<Direction> dirs{{"north", 0, -1}, {"east", 1, 0}, {"south", 0, 1}, {"west", -1, 0}};
  const ActionId refuel = 4;
  std::vector<FeatureSpec> features{
      FeatureSpec::integer("class", 0, 3),      FeatureSpec::integer("fuelmeter", 0, 2),
      FeatureSpec::boolean("refuelStation"),    FeatureSpec::boolean("fuelFull"),
      FeatureSpec::boolean("CanGoNorth"),       FeatureSpec::boolean("CanGoEast"),
      FeatureSpec::boolean("CanGoSouth"),       FeatureSpec::boolean("CanGoWest")};
  PomdpBuilder b(features, {"north", "east", "south", "west", "refuel"});
  auto inside = [&](int x, int y) { return x >= 0 && y >= 0 && x < g.n && y < g.n; };
  const int e = g.energy;
  auto meter = [&](int f) { return f * 3 / (e + 1); };

  std::map<std::tuple<int, int, int>, StateId> id;
  for (int y = 0; y < g.n; ++y)
    for (int x = 0; x < g.n; ++x) {
      if (contains(g.obstacles, {x, y}) || Cell{x, y} == g.goal) continue;
      for (int f = 0; f <= e; ++f) {
        Observation z{(x == 0 && y == 0) ? 1 : 0, meter(f), contains(g.stations, {x, y}), f == e, 0, 0, 0, 0};
        for (std::size_t d = 0; d < dirs.size(); ++d) z.values[4 + d] = inside(x + dirs[d].dx, y + dirs[d].dy);
        id[{x, y, f}] = b.add_state(z);
      }
    }
  const StateId bad = b.add_state({2, 0, 0, 0, 0, 0, 0, 0});
  const StateId goal = b.add_state({3, 0, 0, 0, 0, 0, 0, 0});

  for (const auto& [key, s] : id) {
    const auto [x, y, f] = key;
    for (ActionId a = 0; a < dirs.size(); ++a) {
      const int x1 = x + dirs[a].dx, y1 = y + dirs[a].dy;
      if (!inside(x1, y1)) continue;
      Dist d;
      if (f == 0) {
        d.push_back({bad, 1.0});
      } else {
        auto land = [&](int lx, int ly) {
          if (Cell{lx, ly} == g.goal) return goal;
          if (contains(g.obstacles, {lx, ly})) return bad;
          if (f - 1 == 0 && !contains(g.stations, {lx, ly})) return bad;
          return id.at({lx, ly, f - 1});
        };
        const int x2 = x1 + dirs[a].dx, y2 = y1 + dirs[a].dy;
        const bool passes = contains(g.obstacles, {x1, y1}) || Cell{x1, y1} == g.goal;
        if (passes || !inside(x2, y2)) {
          add_outcome(d, land(x1, y1), 1.0);
        } else {
          add_outcome(d, land(x1, y1), 1.0 - g.slip);
          add_outcome(d, land(x2, y2), g.slip);
        }
      }
      b.set_transition(s, a, std::move(d));
    }
    if (contains(g.stations, {x, y})) b.set_transition(s, refuel, {{id.at({x, y, e}), 1.0}});
  }
  for (StateId s : {bad, goal})
    for (ActionId a = 0; a < dirs.size(); ++a) b.set_transition(s, a, {{s, 1.0}});
  b.set_init(id.at({0, 0, e}));
  b.add_target(goal);
  return std::move(b).build();
}

}  // namespace

Pomdp gen_grid(const GridSpec& spec) {
  validate(spec);
  return spec.family == GridSpec::Family::obstacle ? gen_obstacle_grid(spec) : gen_refuel_grid(spec);
}

Pomdp gen_obstacle(int n) { return gen_grid(obstacle_spec(n)); }

Pomdp gen_refuel(int n, int energy) {
  if (n < 4 || energy < 2) throw std::invalid_argument("refuel needs n >= 4 and energy >= 2");
  return gen_grid(refuel_spec(n, energy));
}

Pomdp gen_maze() {
  // Feature order: CanGoDown, CanGoLeft, CanGoRight, CanGoUp, bad, clk, goal.
  std::vector<FeatureSpec> features;
  for (const char* f : {"CanGoDown", "CanGoLeft", "CanGoRight", "CanGoUp", "bad", "clk", "goal"})
    features.push_back(FeatureSpec::boolean(f));
  const std::vector<Direction> dirs{{"down", 0, 1}, {"left", -1, 0}, {"right", 1, 0}, {"up", 0, -1}};
  const ActionId init_action = 4;
  PomdpBuilder b(features, {"down", "left", "right", "up", "INIT"});

  std::vector<Cell> free_cells;
  for (int x = 0; x < 5; ++x) free_cells.push_back({x, 0});
  for (int x : {0, 2, 4})
    for (int y : {1, 2}) free_cells.push_back({x, y});
  const std::vector<Cell> traps{{0, 3}, {4, 3}};
  const Cell cheese{2, 3};
  auto walkable = [&](Cell c) { return contains(free_cells, c) || contains(traps, c) || c == cheese; };

  const StateId pre = b.add_state({0, 0, 0, 0, 0, 0, 0});
  std::map<Cell, StateId> id;
  for (Cell c : free_cells) {
    Observation z{0, 0, 0, 0, 0, 1, 0};
    for (std::size_t d = 0; d < dirs.size(); ++d)
      z.values[d] = walkable({c.first + dirs[d].dx, c.second + dirs[d].dy});
    id[c] = b.add_state(z);
  }
  for (Cell c : traps) id[c] = b.add_state({0, 0, 0, 0, 1, 1, 0});
  id[cheese] = b.add_state({0, 0, 0, 0, 0, 1, 1});

  Dist place;
  for (Cell c : free_cells) place.push_back({id.at(c), 1.0 / static_cast<double>(free_cells.size())});
  b.set_transition(pre, init_action, place);
  for (Cell c : free_cells)
    for (ActionId a = 0; a < dirs.size(); ++a) {
      const Cell to{c.first + dirs[a].dx, c.second + dirs[a].dy};
      if (walkable(to)) b.set_transition(id.at(c), a, {{id.at(to), 1.0}});
    }
  for (Cell c : {traps[0], traps[1], cheese})
    for (ActionId a = 0; a < dirs.size(); ++a) b.set_transition(id.at(c), a, {{id.at(c), 1.0}});
  b.set_init(pre);
  b.add_target(id.at(cheese));
  return std::move(b).build();
}

Pomdp gen_line() {
  PomdpBuilder b({FeatureSpec::integer("pos", 0, 2)}, {"left", "right"});
  const StateId start = b.add_state({0});
  const StateId mid = b.add_state({1});
  const StateId goal = b.add_state({2});
  b.set_transition(start, 0, {{start, 1.0}});
  b.set_transition(start, 1, {{mid, 1.0}});
  b.set_transition(mid, 0, {{start, 1.0}});
  b.set_transition(mid, 1, {{goal, 1.0}});
  b.set_transition(goal, 0, {{goal, 1.0}});
  b.set_transition(goal, 1, {{goal, 1.0}});
  b.set_init(start);
  b.add_target(goal);
  return std::move(b).build();
}

Fsc maze_reference_fsc() {
  const Observation pre{0, 0, 0, 0, 0, 0, 0};
  const Observation lr{0, 1, 1, 0, 0, 1, 0};
  const Observation dl{1, 1, 0, 0, 0, 1, 0};
  const Observation ud{1, 0, 0, 1, 0, 1, 0};
  const Observation dr{1, 0, 1, 0, 0, 1, 0};
  const Observation dlr{1, 1, 1, 0, 0, 1, 0};
  const Observation trap{0, 0, 0, 0, 1, 1, 0};
  const Observation cheese{0, 0, 0, 0, 0, 1, 1};
  enum : ActionId { down, left, right, up, init };

  Fsc fsc(2, 0, {"down", "left", "right", "up", "INIT"});
  fsc.set_gamma(0, lr, Choice::act(left));
  fsc.set_gamma(0, pre, Choice::act(init));
  fsc.set_gamma(0, dl, Choice::act(left));
  fsc.set_gamma(0, ud, Choice::act(up));
  fsc.set_gamma(1, dr, Choice::act(right));
  fsc.set_gamma(1, ud, Choice::act(down));
  fsc.set_gamma(1, dlr, Choice::act(down));
  fsc.set_gamma(1, lr, Choice::act(right));

  const std::vector<std::pair<Observation, NodeId>> t0{{lr, 0}, {dl, 0}, {dlr, 1}, {ud, 1}, {pre, 0}, {dr, 1}};
  const std::vector<std::pair<Observation, NodeId>> t1{{lr, 1}, {dlr, 1}, {ud, 1}, {dr, 1}};
  for (NodeId n : {0u, 1u}) {
    for (const auto& [z, ch] : fsc.gamma[n]) {
      for (const auto& [next, to] : n == 0 ? t0 : t1) fsc.set_delta(n, z, next, to);
      // The listed rows leave out posteriors that end the run.
      fsc.set_delta(n, z, trap, n);
      fsc.set_delta(n, z, cheese, n);
    }
  }
  // Moving right from (3, 0) in node 1 meets dl, which the listed rows omit.
  for (const auto& [z, ch] : fsc.gamma[1]) {
    if (ch.id == right) fsc.set_delta(1, z, dl, 1);
  }
  return fsc;
}

Pomdp make_benchmark(const std::string& name) {
  if (name == "maze") return gen_maze();
  if (name == "line") return gen_line();
  int n = 0, e = 0;
  char tail = 0;
  if (std::sscanf(name.c_str(), "obstacle-%d%c", &n, &tail) == 1) return gen_obstacle(n);
  if (std::sscanf(name.c_str(), "refuel-%d-%d%c", &n, &e, &tail) == 2) return gen_refuel(n, e);
  throw std::invalid_argument("unknown benchmark '" + name + "'");
}

std::vector<std::string> bundled_benchmarks() {
  return {"maze", "obstacle-6", "obstacle-8", "refuel-6-8", "refuel-7-7", "line"};
}

}  // namespace dtfsc

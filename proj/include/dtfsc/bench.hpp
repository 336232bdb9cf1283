#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dtfsc/fsc.hpp"
#include "dtfsc/pomdp.hpp"

namespace dtfsc {

/// Parameters of a grid benchmark. Coordinates are (x, y) with y growing
/// downwards; the start is (0, 0).
struct GridSpec {
  enum class Family { obstacle, refuel };
  using Cell = std::pair<int, int>;

  Family family = Family::obstacle;
  int n = 6;
  /// Fuel capacity (refuel only).
  int energy = 8;
  /// Probability that a move goes one cell further (refuel) or does not
  /// happen at all (obstacle).
  double slip = 0.0;
  std::vector<Cell> obstacles;
  /// Refuelling stations (refuel only).
  std::vector<Cell> stations;
  Cell goal{0, 0};
};

/// Checks ranges; throws std::invalid_argument.
void validate(const GridSpec& spec);

/// Default obstacle layout for an n x n grid (n >= 5): a two-cell wall at
/// column n/2 hanging from the top edge and a trap at (1, n - 1), goal in
/// the far corner, slip 0.1 (the move fails and the agent stays put).
GridSpec obstacle_spec(int n);
/// Default refuel layout: stations at (0, 0) and (ceil(n/2), ceil(n/2)),
/// obstacle at (ceil(n/2) - 1, ceil(n/2) - 1), slip 0.4.
GridSpec refuel_spec(int n, int energy);

Pomdp gen_grid(const GridSpec& spec);
Pomdp gen_obstacle(int n);
Pomdp gen_refuel(int n, int energy);

/// Cheese maze: a five-cell corridor on top with three two-cell columns
/// below it. The left and right columns end in traps, the middle one in
/// the cheese. A pre-placement state puts the mouse on one of the 11 free
/// cells uniformly through the action INIT.
Pomdp gen_maze();

/// start - mid - goal with actions left and right.
Pomdp gen_line();

/// Hand-written two-node maze controller: node 0 climbs and heads left,
/// node 1 heads right and down. Trap and cheese posteriors keep the node.
/// Not winning from every placement; used as a fixed example controller.
/// Built on the action names of gen_maze().
Fsc maze_reference_fsc();

/// Names accepted by make_benchmark: maze, line, obstacle-<n>, refuel-<n>-<e>.
Pomdp make_benchmark(const std::string& name);
/// Bundled benchmark names in a fixed order.
std::vector<std::string> bundled_benchmarks();

}  // namespace dtfsc

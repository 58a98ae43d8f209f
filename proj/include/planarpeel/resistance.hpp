#pragma once
#include <utility>
#include <vector>

#include "planarpeel/map.hpp"
#include "planarpeel/quad.hpp"
#include "planarpeel/rational.hpp"
#include "planarpeel/rng.hpp"

namespace planarpeel {

// Unit-conductance multigraph with two disjoint terminal sets. Parallel
// edges are kept (conductances add); self-loops are ignored by the solver.
struct Network {
  int n_vertices = 0;
  std::vector<std::pair<int32_t, int32_t>> edges;
  std::vector<int32_t> a, b;  // terminal sets, contracted by the solver
};

struct Resistance {
  bool exact = false;
  Rat value;           // set when exact
  double value_d = 0;  // always set
};

// Effective resistance between the contracted terminal sets. Exact rational
// elimination up to exact_edge_limit edges, conjugate gradient beyond.
// Errors: DomainError (bad terminals), DisconnectedTerminals.
Resistance effective_resistance(const Network& net,
                                long long exact_edge_limit = 2000);

// Dual of a finite planar map whose external face is split in two at chosen
// corners of the boundary vertices a1 and a3: dual vertices are the internal
// faces plus the two outer halves a2/a4, with one dual edge per primal edge
// (the two splitting half-lines are not edges). At a vertex with several
// external corners the first corner on the boundary orbit from the root is
// used.
struct DualPair {
  Network primal;  // terminals {a1} / {a3}
  Network dual;    // terminals {a2} / {a4}
  int a2 = -1, a4 = -1;  // dual vertex ids of the two outer halves
};
DualPair dual_network(const PlanarMap& m, int a1, int a3);

// Resistance across the image of a quadrangulation whose boundary is split
// into four arcs of 2*p1-1, ..., 2*p4-1 edges (clockwise from the root):
// the white vertices of the first and third arcs are the terminal sets.
Resistance arc_resistance(const Quadrangulation& q, int p1, int p2, int p3,
                          int p4, long long exact_edge_limit = 2000);

// Boltzmann-sampled version of arc_resistance, with the sampled sizes
struct BlockResistance {
  Resistance r;
  int edges = 0, vertices = 0;  // of the image network
};
BlockResistance block_resistance(int p1, int p2, int p3, int p4, Rng& rng);

}  // namespace planarpeel

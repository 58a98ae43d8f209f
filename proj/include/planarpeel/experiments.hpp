#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "planarpeel/peeling.hpp"
#include "planarpeel/rng.hpp"

namespace planarpeel {

inline constexpr const char* kVersion = "planarpeel 0.1.0";

// One experiment run. Identical configs produce byte-identical output files:
// every replica owns its own rng stream (seed, replica), rows are emitted in
// replica order regardless of the thread count.
struct ExperimentConfig {
  std::string name;
  uint64_t seed = 1;
  int replicas = 1;
  std::vector<int> radii;          // resistance_vs_radius
  long long steps = 10'000;        // srw_run
  int k = 1;                       // boundary_distance_run
  long long budget = 400'000'000;  // peeling step budget per replica
  int tail_cutoff = 2000;          // half-plane law truncation
  bool exact = false;              // exact rational resistances
  int threads = 1;
  std::string out_path;            // CSV path; empty writes nothing
};

uint64_t config_hash(const ExperimentConfig& cfg);

struct ExperimentRecord {
  ExperimentConfig config;
  std::vector<std::string> columns;  // metric columns only
  struct Row {
    long long replica = 0;
    std::vector<double> v;   // one per metric column
    bool budget_hit = false;
  };
  std::vector<Row> rows;  // sorted by replica (stable within a replica)

  // full csv: provenance header comments, then
  // replica,seed,<columns...>,budget_hit
  std::string csv() const;
  std::string json_sidecar() const;  // config echo + hash + version
  // writes csv to config.out_path and the sidecar next to it (.json)
  void write() const;
  bool any_budget_hit() const;

  // values of one metric column, budget-hit rows excluded
  std::vector<double> column(const std::string& name) const;
};

// Per replica: reveal the hull of the half-plane quadrangulation to radius
// 2 r_max + 2, form the white-diagonal image, and for every requested radius
// r compute the effective resistance between the root and the contracted
// complement of the hull of radius r of the image.
// columns: r, resistance, res_exact, ball_whites, hull_whites, complement_whites,
//          image_edges, faces_revealed
ExperimentRecord resistance_vs_radius(const ExperimentConfig& cfg);

// Image neighbors of the white builder vertex at the origin of at_v, with
// multiplicity (one per incident internal face); reveals the star of that
// vertex first, so the list is exact. Each returned dart has its origin at
// the neighboring white.
std::vector<Dart> image_neighbor_darts(Frontier& f, Dart at_v, Rng& rng,
                                       long long budget = 50'000'000);

// simple random walk on the white image graph, revealed lazily
// columns: steps_done, returns_to_root, range, displacement
// (displacement: image-graph distance measured in the revealed subgraph)
ExperimentRecord srw_run(const ExperimentConfig& cfg);

// Distance estimator between the root white u_0 and the boundary white u_{2k}
// (2k line edges to the right of the root). For each boundary pair
// (u_{2j-2}, u_{2j}) in turn, peel the edge on the left of the line edge
// e_1 = (u_{2j-1}, u_{2j}) along the boundary of the undiscovered component
// containing e_1, without filling holes, until a discovered face is incident
// to u_{2j}; the white-white diagonals of the discovered faces form a path,
// so their count bounds the graph distance in the image.
struct BoundaryDistanceSample {
  long long red_steps = 0;  // faces discovered; upper bound for the distance
  int distance = -1;        // bfs distance over the recorded diagonals
  bool path_connected = false;
};
BoundaryDistanceSample boundary_distance(int k, Rng& rng,
                                         const HalfPlaneLaw& law,
                                         long long budget = 1'000'000);

// columns: k, red_steps, distance, path_connected
ExperimentRecord boundary_distance_run(const ExperimentConfig& cfg);

}  // namespace planarpeel

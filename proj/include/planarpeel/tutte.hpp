#pragma once
#include <vector>

#include "planarpeel/map.hpp"
#include "planarpeel/quad.hpp"

namespace planarpeel {

// Map on the white vertices of a quadrangulation with simple boundary: one
// edge per internal face (the diagonal joining its two white corners), rooted
// at the diagonal of the face left of q's root edge, same root vertex.
struct TutteImage {
  PlanarMap map;
  bool no_internal_face = false;  // image collapsed to the one-vertex map
  // q dart (white origin, internal face on the left) -> image dart; -1 else
  std::vector<Dart> image_dart;
  // image vertex -> white vertex of q
  std::vector<int32_t> q_vertex;
};

TutteImage tutte_image(const Quadrangulation& q);

// boundary vertices with at least two corners in the external face
std::vector<int> pinchpoints(const PlanarMap& m);

// One simple-boundary component obtained by cutting at pinchpoints. Dart ids
// of the ambient map are preserved through orig_dart; the bead is rooted at
// the boundary vertex closest to the ambient root (ties broken by the
// counterclockwise boundary walk from the attachment pinchpoint).
struct Bead {
  PlanarMap map;
  std::vector<Dart> orig_dart;      // bead dart -> ambient dart
  std::vector<int32_t> orig_vertex; // bead vertex -> ambient vertex
  int attachment = -1;              // ambient pinchpoint toward the root bead
};

struct BeadDecomposition {
  std::vector<Bead> beads;
  int root_bead = 0;
  std::vector<int> pinch;                        // ambient pinchpoint vertices
  // block-cut incidences: (bead index, index into pinch)
  std::vector<std::pair<int, int>> incidences;
  // rotation splices undone by reglue: next[first] = second
  std::vector<std::pair<Dart, Dart>> cut_records;
  Dart orig_root = -1;
  int orig_darts = 0;
};

BeadDecomposition beads(const PlanarMap& m);

// inverse of the pinchpoint cutting; reproduces the decomposed map exactly
PlanarMap reglue_beads(const BeadDecomposition& bd);

// every black boundary vertex has degree 2
bool is_truncated(const Quadrangulation& q);

// The unique truncated-boundary quadrangulation whose image is m (m must
// have a simple boundary). Round-trips with tutte_image both ways.
struct TutteInverse {
  Quadrangulation q;
  std::vector<int32_t> white_of;  // m vertex -> q vertex
};
TutteInverse tutte_inverse(const PlanarMap& m);

// quadrangulation with a simple boundary and an optional extra marked
// boundary edge (beyond the root); mark == root encodes "marked at the root"
struct MarkedQuad {
  Quadrangulation q;
  Dart mark = -1;
};

// component glued at one white vertex of the core boundary: either a single
// quadrangulation over both incident boundary edges (root glued to the edge
// ending at the vertex), or one per edge (the second glued by the boundary
// edge preceding its root)
struct JElement {
  std::vector<MarkedQuad> parts;  // size 1 or 2
};

// Decomposition of a tri-marked quadrangulation (root plus two more marked
// boundary edges, all white -> black with the external face on the right)
// into its Tutte core and the components glued around it.
struct CoreDecomposition {
  PlanarMap core;          // simple-boundary map, rooted at v1
  int v1 = -1, v2 = -1, v3 = -1;  // marked core boundary vertices
  // one element per core boundary vertex, counterclockwise from v1; the
  // slots of v1, v2, v3 carry the extra marks
  std::vector<JElement> components;
  // bookkeeping: volume (inner faces / edges) and half-perimeter sums
  long long volume = 0;
  int half_perimeter = 0;
};

// marked edges: e1 = q.map.root, e2, e3 distinct boundary darts oriented
// white -> black with the external face on the right. NotInA when the three
// derived core vertices are not distinct.
CoreDecomposition tutte_core(const Quadrangulation& q, Dart e2, Dart e3);

// inverse gluing; returns the quadrangulation and its three marked darts
struct GluedQuad {
  Quadrangulation q;
  Dart e1 = -1, e2 = -1, e3 = -1;
};
GluedQuad core_glue(const CoreDecomposition& d);

// Finite-radius approximation of the unique infinite bead of the image of a
// revealed region: descend the bead tree from the root bead while a single
// branch separates the root from every flagged (unexplored-boundary) vertex,
// and return the first bead that holds a flagged vertex or branches.
// unexplored flags are per vertex of q.map.
PlanarMap infinite_bead_approx(const Quadrangulation& revealed,
                               const std::vector<uint8_t>& unexplored);

}  // namespace planarpeel

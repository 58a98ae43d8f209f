#pragma once
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "planarpeel/errors.hpp"

namespace planarpeel {

// Darts are dense integers; the twin of d is d^1 (pair 2k, 2k+1).
using Dart = int32_t;

inline Dart twin(Dart d) { return d ^ 1; }

// Rooted planar map as a rotation system. `next` is the counterclockwise
// successor around the origin vertex of a dart. Faces are the orbits of
// d -> next[twin(d)]; such an orbit is the face lying on the LEFT of its
// darts. The external face is the face on the right of the root dart.
//
// The map with a single vertex and no edge cannot be encoded by a fixed-point
// free twin; it is the tagged `one_vertex` case with zero darts.
struct PlanarMap {
  std::vector<Dart> next;
  Dart root = -1;
  bool one_vertex = false;

  // derived by finalize()
  std::vector<Dart> prev;
  std::vector<int32_t> vert;  // origin vertex of each dart
  std::vector<int32_t> face;  // face id of the face LEFT of each dart
  int n_vertices = 0;
  int n_faces = 0;
  int external_face = -1;

  int n_darts() const { return (int)next.size(); }
  int n_edges() const { return (int)next.size() / 2; }
  Dart phi(Dart d) const { return next[d ^ 1]; }        // walk face on left
  Dart phi_inv(Dart d) const { return prev[d] ^ 1; }
  int vertex_of(Dart d) const { return vert[d]; }
  int face_left(Dart d) const { return face[d]; }
  int face_right(Dart d) const { return face[d ^ 1]; }
  bool is_one_vertex() const { return one_vertex; }

  // orbit sizes
  int face_degree(int f) const;
  int vertex_degree(int v) const;

  // recompute vert/face/prev tables and run the validity checks
  // (involution is structural; checks: permutation, connectivity, genus 0)
  void finalize();

  // all darts of the face orbit containing d, in phi order
  std::vector<Dart> face_orbit(Dart d) const;
  // all darts around the origin vertex of d, in next order
  std::vector<Dart> vertex_orbit(Dart d) const;

  // vertex graph distances from the origin of `from`
  std::vector<int> distances_from(int v0) const;

  bool operator==(const PlanarMap& o) const {
    return next == o.next && root == o.root && one_vertex == o.one_vertex;
  }
};

// Map plus per-vertex / per-dart membership flags (used by ball/hull to
// remember which vertices and darts lay on the ambient boundary).
struct FlaggedMap {
  PlanarMap map;
  std::vector<uint8_t> vert_flag;
  std::vector<uint8_t> dart_flag;
};

// build from an explicit twin pairing (relabeled to the implicit 2k/2k+1
// pairing internally). Errors: NonInvolutiveTwin, Disconnected, NonPlanar.
PlanarMap build_map(int dart_count, const std::vector<Dart>& twin_pairing,
                    const std::vector<Dart>& next, Dart root);

// external-face orbit starting at twin(root)
std::vector<Dart> boundary_walk(const PlanarMap& m);
bool is_simple_boundary(const PlanarMap& m);

// canonical form: BFS relabeling from the root over (next, twin); two rooted
// maps are isomorphic iff the codes are equal
std::vector<int32_t> canonical_code(const PlanarMap& m);
std::vector<int32_t> canonical_code(const FlaggedMap& m);

FlaggedMap ball(const PlanarMap& m, int r);
FlaggedMap hull(const PlanarMap& m, int r);

// (1 + sup{r : [m1]_r iso [m2]_r})^-1, 0 when the sup is infinite
double local_distance(const PlanarMap& m1, const PlanarMap& m2);

// text serialization; round-trip safe
std::string serialize_map(const PlanarMap& m,
                          const std::vector<uint8_t>* vcolor = nullptr);
PlanarMap parse_map(const std::string& text,
                    std::vector<uint8_t>* vcolor_out = nullptr);

// Mutable half-edge structure for surgeries. Darts/vertices are never
// renumbered during editing; deletions mark slots dead and freeze() compacts.
class MapBuilder {
 public:
  std::vector<Dart> nxt, prv;      // rotation and its inverse
  std::vector<int32_t> vrt;        // origin vertex per dart
  std::vector<uint8_t> alive;      // per dart
  std::vector<uint8_t> vcolor;     // per vertex: 0 white, 1 black, 2 unset
  int n_alive_darts = 0;

  int n_vertices() const { return (int)vcolor.size(); }
  int n_darts_total() const { return (int)nxt.size(); }

  int new_vertex(uint8_t color = 2) {
    vcolor.push_back(color);
    return (int)vcolor.size() - 1;
  }

  // allocate an edge pair (d: u->v, d^1: v->u); each dart starts as the sole
  // element of a fresh rotation cycle, to be spliced in by the link helpers
  Dart new_edge(int u, int v);

  // insert dart n (already allocated, same origin vertex) into the rotation
  // immediately before dart d
  void link_before(Dart n, Dart d);

  // remove d and twin(d) from their rotations and mark them dead
  void remove_edge(Dart d);

  // k-gon on fresh vertices; returns the even darts e_i: v_i -> v_{i+1}.
  // Dart 2i+1 is the reverse of edge i. The orbit of the even darts is the
  // face on the left when walking v_0 -> v_1 -> ...
  std::vector<Dart> make_cycle(int k, uint8_t first_color = 2);

  // new edge origin(a) -> origin(b) between the face corners that precede
  // darts a and b (a, b must lie on the same face orbit); returns the dart
  // with origin(a). Splits that face in two.
  Dart insert_diagonal(Dart a, Dart b);

  // new pendant vertex joined to the corner preceding dart a; returns the
  // dart out of origin(a)
  Dart insert_pendant(Dart a, uint8_t color = 2);

  Dart next_dart(Dart d) const { return nxt[d]; }
  Dart phi(Dart d) const { return nxt[d ^ 1]; }
  int vertex_of(Dart d) const { return vrt[d]; }

  // compact live darts (pair structure preserved) into a validated PlanarMap;
  // old->new dart index map returned through dart_map when non-null
  PlanarMap freeze(Dart root, std::vector<Dart>* dart_map = nullptr,
                   std::vector<int32_t>* vertex_map = nullptr) const;

  // vertex colors of the frozen map (same vertex numbering as freeze's
  // vertex_map output)
  std::vector<uint8_t> frozen_colors(const PlanarMap& m,
                                     const std::vector<int32_t>& vertex_map) const;
};

}  // namespace planarpeel

#pragma once
#include "planarpeel/map.hpp"

namespace planarpeel {

// Quadrangulation with a boundary: every internal face has degree 4, vertices
// properly 2-colored, root vertex white, root edge directed white -> black
// with the external face on its right. The trivial quadrangulation (2
// vertices, 1 edge, no internal face) carries the is_trivial tag.
struct Quadrangulation {
  PlanarMap map;
  std::vector<uint8_t> color;  // per vertex: 0 white, 1 black
  bool is_trivial = false;

  int n_internal_faces() const {
    return map.one_vertex ? 0 : map.n_faces - 1;
  }
  int half_perimeter() const {
    return map.one_vertex ? 0 : map.face_degree(map.external_face) / 2;
  }

  void validate() const;
};

// wrap a frozen map, checking quadrangulation invariants; colors inferred
// from bipartite parity when not supplied
Quadrangulation make_quadrangulation(const PlanarMap& m,
                                     const std::vector<uint8_t>* color = nullptr);

std::string serialize_quad(const Quadrangulation& q);
Quadrangulation parse_quad(const std::string& text);

}  // namespace planarpeel

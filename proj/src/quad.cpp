#include <queue>

#include "planarpeel/quad.hpp"

namespace planarpeel {

void Quadrangulation::validate() const {
  if (map.one_vertex) throw MapError("quadrangulation cannot be the one-vertex map");
  if (is_trivial) {
    if (map.n_edges() != 1 || map.n_vertices != 2)
      throw InvariantViolation("trivial quadrangulation must be the edge map");
  }
  std::vector<int> deg(map.n_faces, 0);
  for (Dart d = 0; d < map.n_darts(); ++d) ++deg[map.face[d]];
  for (int f = 0; f < map.n_faces; ++f)
    if (f != map.external_face && deg[f] != 4)
      throw InvariantViolation("internal face of degree != 4");
  if ((int)color.size() != map.n_vertices)
    throw InvariantViolation("color table size mismatch");
  for (Dart d = 0; d < map.n_darts(); d += 2)
    if (color[map.vert[d]] == color[map.vert[d ^ 1]])
      throw InvariantViolation("coloring is not proper");
  if (color[map.vert[map.root]] != 0 || color[map.vert[map.root ^ 1]] != 1)
    throw InvariantViolation("root must be directed white -> black");
}

Quadrangulation make_quadrangulation(const PlanarMap& m,
                                     const std::vector<uint8_t>* color) {
  Quadrangulation q;
  q.map = m;
  if (color) {
    q.color = *color;
  } else {
    // bipartite parity from the root vertex
    q.color.assign(m.n_vertices, 2);
    auto dist = m.distances_from(m.vert[m.root]);
    for (int v = 0; v < m.n_vertices; ++v) q.color[v] = (uint8_t)(dist[v] % 2);
  }
  q.is_trivial = (m.n_edges() == 1);
  q.validate();
  return q;
}

std::string serialize_quad(const Quadrangulation& q) {
  return serialize_map(q.map, &q.color);
}

Quadrangulation parse_quad(const std::string& text) {
  std::vector<uint8_t> colors;
  PlanarMap m = parse_map(text, &colors);
  Quadrangulation q;
  q.map = m;
  q.color = colors;
  q.is_trivial = (m.n_edges() == 1);
  q.validate();
  return q;
}

}  // namespace planarpeel

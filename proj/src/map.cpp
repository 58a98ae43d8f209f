#include "planarpeel/map.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

namespace planarpeel {

void PlanarMap::finalize() {
  const int n = n_darts();
  if (one_vertex) {
    if (n != 0) throw InvariantViolation("one-vertex map must have no darts");
    n_vertices = 1;
    n_faces = 1;
    external_face = 0;
    return;
  }
  if (n == 0 || n % 2 != 0) throw MapError("dart count must be positive and even");
  if (root < 0 || root >= n) throw MapError("root out of range");

  // next must be a permutation
  prev.assign(n, -1);
  for (Dart d = 0; d < n; ++d) {
    Dart x = next[d];
    if (x < 0 || x >= n || prev[x] != -1) throw MapError("next is not a permutation");
    prev[x] = d;
  }

  // vertices: orbits of next
  vert.assign(n, -1);
  n_vertices = 0;
  for (Dart d = 0; d < n; ++d) {
    if (vert[d] != -1) continue;
    for (Dart x = d; vert[x] == -1; x = next[x]) vert[x] = n_vertices;
    ++n_vertices;
  }

  // faces: orbits of phi
  face.assign(n, -1);
  n_faces = 0;
  for (Dart d = 0; d < n; ++d) {
    if (face[d] != -1) continue;
    for (Dart x = d; face[x] == -1; x = phi(x)) face[x] = n_faces;
    ++n_faces;
  }
  external_face = face[root ^ 1];

  // connectivity from root over {next, twin}
  std::vector<uint8_t> seen(n, 0);
  std::queue<Dart> q;
  q.push(root);
  seen[root] = 1;
  int cnt = 1;
  while (!q.empty()) {
    Dart d = q.front();
    q.pop();
    for (Dart x : {next[d], (Dart)(d ^ 1)}) {
      if (!seen[x]) {
        seen[x] = 1;
        ++cnt;
        q.push(x);
      }
    }
  }
  if (cnt != n) throw Disconnected("map is not connected from the root");

  const int V = n_vertices, E = n / 2, F = n_faces;
  if (V - E + F != 2) throw NonPlanar("Euler characteristic is not 2");
}

int PlanarMap::face_degree(int f) const {
  int c = 0;
  for (Dart d = 0; d < n_darts(); ++d)
    if (face[d] == f) ++c;
  return c;
}

int PlanarMap::vertex_degree(int v) const {
  int c = 0;
  for (Dart d = 0; d < n_darts(); ++d)
    if (vert[d] == v) ++c;
  return c;
}

std::vector<Dart> PlanarMap::face_orbit(Dart d) const {
  std::vector<Dart> out;
  Dart x = d;
  do {
    out.push_back(x);
    x = phi(x);
  } while (x != d);
  return out;
}

std::vector<Dart> PlanarMap::vertex_orbit(Dart d) const {
  std::vector<Dart> out;
  Dart x = d;
  do {
    out.push_back(x);
    x = next[x];
  } while (x != d);
  return out;
}

std::vector<int> PlanarMap::distances_from(int v0) const {
  std::vector<int> dist(std::max(n_vertices, 1), -1);
  if (one_vertex) {
    dist[0] = 0;
    return dist;
  }
  std::vector<std::vector<int>> adj(n_vertices);
  for (Dart d = 0; d < n_darts(); d += 2) {
    adj[vert[d]].push_back(vert[d ^ 1]);
    adj[vert[d ^ 1]].push_back(vert[d]);
  }
  std::queue<int> q;
  dist[v0] = 0;
  q.push(v0);
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (int w : adj[v])
      if (dist[w] == -1) {
        dist[w] = dist[v] + 1;
        q.push(w);
      }
  }
  return dist;
}

PlanarMap build_map(int dart_count, const std::vector<Dart>& twin_pairing,
                    const std::vector<Dart>& next, Dart root) {
  if (dart_count <= 0 || (int)twin_pairing.size() != dart_count ||
      (int)next.size() != dart_count)
    throw MapError("build_map: inconsistent array sizes");
  for (Dart d = 0; d < dart_count; ++d) {
    Dart t = twin_pairing[d];
    if (t < 0 || t >= dart_count || t == d || twin_pairing[t] != d)
      throw NonInvolutiveTwin("twin is not a fixed-point free involution");
  }
  // relabel so that twin(d) = d^1
  std::vector<Dart> to_new(dart_count, -1);
  int k = 0;
  for (Dart d = 0; d < dart_count; ++d) {
    if (to_new[d] != -1) continue;
    to_new[d] = k++;
    to_new[twin_pairing[d]] = k++;
  }
  PlanarMap m;
  m.next.assign(dart_count, -1);
  for (Dart d = 0; d < dart_count; ++d) m.next[to_new[d]] = to_new[next[d]];
  m.root = to_new[root];
  m.finalize();
  return m;
}

Dart MapBuilder::new_edge(int u, int v) {
  Dart d = (Dart)nxt.size();
  nxt.push_back(d);
  nxt.push_back(d + 1);
  prv.push_back(d);
  prv.push_back(d + 1);
  vrt.push_back(u);
  vrt.push_back(v);
  alive.push_back(1);
  alive.push_back(1);
  n_alive_darts += 2;
  return d;
}

void MapBuilder::link_before(Dart n, Dart d) {
  if (n == d) return;
  // detach n from its singleton cycle and splice before d
  Dart p = prv[d];
  nxt[p] = n;
  prv[n] = p;
  nxt[n] = d;
  prv[d] = n;
}

void MapBuilder::remove_edge(Dart d) {
  for (Dart x : {d, (Dart)(d ^ 1)}) {
    nxt[prv[x]] = nxt[x];
    prv[nxt[x]] = prv[x];
    nxt[x] = prv[x] = x;
    alive[x] = 0;
  }
  n_alive_darts -= 2;
}

std::vector<Dart> MapBuilder::make_cycle(int k, uint8_t first_color) {
  std::vector<int> vs(k);
  for (int i = 0; i < k; ++i)
    vs[i] = new_vertex(first_color == 2 ? 2 : (uint8_t)((first_color + i) % 2));
  std::vector<Dart> es(k);
  for (int i = 0; i < k; ++i) es[i] = new_edge(vs[i], vs[(i + 1) % k]);
  for (int i = 0; i < k; ++i) {
    // at v_i: rotation (out, in) with out = es[i], in = twin(es[i-1])
    Dart out = es[i], in = es[(i + k - 1) % k] ^ 1;
    nxt[out] = in;
    prv[in] = out;
    nxt[in] = out;
    prv[out] = in;
  }
  return es;
}

Dart MapBuilder::insert_diagonal(Dart a, Dart b) {
  Dart n = new_edge(vrt[a], vrt[b]);
  link_before(n, a);
  link_before(n ^ 1, b);
  return n;
}

Dart MapBuilder::insert_pendant(Dart a, uint8_t color) {
  int x = new_vertex(color);
  Dart n = new_edge(vrt[a], x);
  link_before(n, a);
  return n;
}

PlanarMap MapBuilder::freeze(Dart root, std::vector<Dart>* dart_map,
                             std::vector<int32_t>* vertex_map) const {
  const int n = n_darts_total();
  std::vector<Dart> to_new(n, -1);
  int k = 0;
  for (Dart d = 0; d < n; d += 2) {
    if (!alive[d]) continue;
    if (!alive[d + 1]) throw InvariantViolation("freeze: half-dead edge pair");
    to_new[d] = k++;
    to_new[d + 1] = k++;
  }
  if (root < 0 || root >= n || !alive[root]) throw MapError("freeze: bad root");
  PlanarMap m;
  m.next.assign(k, -1);
  for (Dart d = 0; d < n; ++d)
    if (alive[d]) m.next[to_new[d]] = to_new[nxt[d]];
  m.root = to_new[root];
  m.finalize();
  if (dart_map) *dart_map = to_new;
  if (vertex_map) {
    vertex_map->assign(m.n_vertices, -1);
    for (Dart d = 0; d < n; ++d)
      if (alive[d]) (*vertex_map)[m.vert[to_new[d]]] = vrt[d];
  }
  return m;
}

std::vector<uint8_t> MapBuilder::frozen_colors(
    const PlanarMap& m, const std::vector<int32_t>& vertex_map) const {
  std::vector<uint8_t> out(m.n_vertices, 2);
  for (int v = 0; v < m.n_vertices; ++v) out[v] = vcolor[vertex_map[v]];
  return out;
}

}  // namespace planarpeel

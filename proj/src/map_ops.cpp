#include <algorithm>
#include <queue>
#include <sstream>

#include "planarpeel/map.hpp"

namespace planarpeel {

std::vector<Dart> boundary_walk(const PlanarMap& m) {
  if (m.one_vertex) return {};
  return m.face_orbit(m.root ^ 1);
}

bool is_simple_boundary(const PlanarMap& m) {
  if (m.one_vertex) return true;
  auto walk = boundary_walk(m);
  std::vector<int> seen;
  for (Dart d : walk) seen.push_back(m.vert[d]);
  std::sort(seen.begin(), seen.end());
  return std::adjacent_find(seen.begin(), seen.end()) == seen.end();
}

namespace {

// BFS dart relabeling from the root; returns old->new ids
std::vector<int32_t> bfs_order(const PlanarMap& m) {
  std::vector<int32_t> id(m.n_darts(), -1);
  std::vector<Dart> by_new;
  by_new.reserve(m.n_darts());
  int k = 0;
  id[m.root] = k++;
  by_new.push_back(m.root);
  for (size_t i = 0; i < by_new.size(); ++i) {
    Dart d = by_new[i];
    for (Dart x : {m.next[d], (Dart)(d ^ 1)}) {
      if (id[x] == -1) {
        id[x] = k++;
        by_new.push_back(x);
      }
    }
  }
  return id;
}

}  // namespace

std::vector<int32_t> canonical_code(const PlanarMap& m) {
  if (m.one_vertex) return {-1};
  auto id = bfs_order(m);
  std::vector<Dart> inv(m.n_darts());
  for (Dart d = 0; d < m.n_darts(); ++d) inv[id[d]] = d;
  std::vector<int32_t> code;
  code.reserve(2 * m.n_darts() + 1);
  code.push_back(m.n_darts());
  for (int i = 0; i < m.n_darts(); ++i) {
    Dart d = inv[i];
    code.push_back(id[m.next[d]]);
    code.push_back(id[d ^ 1]);
  }
  return code;
}

std::vector<int32_t> canonical_code(const FlaggedMap& fm) {
  const PlanarMap& m = fm.map;
  if (m.one_vertex) {
    std::vector<int32_t> code{-1};
    code.push_back(fm.vert_flag.empty() ? 0 : fm.vert_flag[0]);
    return code;
  }
  auto code = canonical_code(m);
  auto id = bfs_order(m);
  std::vector<Dart> inv(m.n_darts());
  for (Dart d = 0; d < m.n_darts(); ++d) inv[id[d]] = d;
  for (int i = 0; i < m.n_darts(); ++i) {
    Dart d = inv[i];
    code.push_back(fm.dart_flag.empty() ? 0 : fm.dart_flag[d]);
    code.push_back(fm.vert_flag.empty() ? 0 : fm.vert_flag[m.vert[d]]);
  }
  return code;
}

namespace {

// sub-map induced by a set of kept internal faces: keeps every edge incident
// to a kept face, restricted to the component of the root vertex; flags mark
// incidence to the ambient external face
FlaggedMap extract_faces(const PlanarMap& m, const std::vector<uint8_t>& keep_face) {
  const int n = m.n_darts();
  std::vector<uint8_t> keep(n, 0);
  for (Dart d = 0; d < n; ++d)
    if (keep_face[m.face[d]] || keep_face[m.face[d ^ 1]]) keep[d] = 1;

  const int root_v = m.vert[m.root];
  // component of the root vertex within kept darts (moves: rotation, twin)
  std::vector<uint8_t> comp(n, 0);
  std::queue<Dart> q;
  Dart seed = -1;
  {
    Dart d = m.root;
    do {
      if (keep[d]) {
        seed = d;
        break;
      }
      d = m.next[d];
    } while (d != m.root);
  }
  if (seed == -1) {
    FlaggedMap out;
    out.map.one_vertex = true;
    out.map.finalize();
    bool on_b = false;
    for (Dart d = 0; d < n; ++d)
      if (m.vert[d] == root_v && m.face[d] == m.external_face) on_b = true;
    out.vert_flag = {(uint8_t)(on_b ? 1 : 0)};
    return out;
  }
  comp[seed] = 1;
  q.push(seed);
  while (!q.empty()) {
    Dart d = q.front();
    q.pop();
    Dart x = m.next[d];
    while (!keep[x]) x = m.next[x];
    for (Dart y : {x, (Dart)(d ^ 1)}) {
      if (keep[y] && !comp[y]) {
        comp[y] = 1;
        q.push(y);
      }
    }
  }

  std::vector<int32_t> to_new(n, -1);
  int k = 0;
  for (Dart d = 0; d < n; d += 2) {
    if (!comp[d] && !comp[d + 1]) continue;
    if (!(comp[d] && comp[d + 1]))
      throw InvariantViolation("extract_faces: kept set not twin-closed");
    to_new[d] = k++;
    to_new[d + 1] = k++;
  }
  FlaggedMap out;
  out.map.next.assign(k, -1);
  for (Dart d = 0; d < n; ++d) {
    if (!comp[d]) continue;
    Dart x = m.next[d];
    while (!comp[x]) x = m.next[x];
    out.map.next[to_new[d]] = to_new[x];
  }
  out.map.root = to_new[seed];
  out.map.finalize();

  // ambient-boundary flags
  std::vector<uint8_t> v_on_b(m.n_vertices, 0);
  for (Dart d = 0; d < n; ++d)
    if (m.face[d] == m.external_face) v_on_b[m.vert[d]] = 1;
  out.vert_flag.assign(out.map.n_vertices, 0);
  out.dart_flag.assign(k, 0);
  for (Dart d = 0; d < n; ++d) {
    if (!comp[d]) continue;
    out.vert_flag[out.map.vert[to_new[d]]] = v_on_b[m.vert[d]];
    if (m.face[d] == m.external_face || m.face[d ^ 1] == m.external_face)
      out.dart_flag[to_new[d]] = 1;
  }
  return out;
}

std::vector<uint8_t> ball_faces(const PlanarMap& m, int r) {
  std::vector<uint8_t> keep(m.n_faces, 0);
  auto dist = m.distances_from(m.vert[m.root]);
  std::vector<uint8_t> far(m.n_faces, 0);
  for (Dart d = 0; d < m.n_darts(); ++d)
    if (dist[m.vert[d]] > r) far[m.face[d]] = 1;
  for (int f = 0; f < m.n_faces; ++f)
    if (f != m.external_face && !far[f]) keep[f] = 1;
  return keep;
}

}  // namespace

FlaggedMap ball(const PlanarMap& m, int r) {
  if (m.one_vertex) {
    FlaggedMap out;
    out.map = m;
    out.vert_flag = {1};
    return out;
  }
  return extract_faces(m, ball_faces(m, r));
}

FlaggedMap hull(const PlanarMap& m, int r) {
  if (m.one_vertex) return ball(m, r);
  auto keep = ball_faces(m, r);
  // components of the complement under edge adjacency; those not reaching the
  // external face get filled in
  std::vector<std::vector<Dart>> face_darts(m.n_faces);
  for (Dart d = 0; d < m.n_darts(); ++d) face_darts[m.face[d]].push_back(d);
  std::vector<int> comp(m.n_faces, -1);
  int nc = 0;
  for (int f0 = 0; f0 < m.n_faces; ++f0) {
    if (keep[f0] || comp[f0] != -1) continue;
    std::queue<int> q;
    comp[f0] = nc;
    q.push(f0);
    while (!q.empty()) {
      int f = q.front();
      q.pop();
      for (Dart d : face_darts[f]) {
        int g = m.face[d ^ 1];
        if (!keep[g] && comp[g] == -1) {
          comp[g] = nc;
          q.push(g);
        }
      }
    }
    ++nc;
  }
  int ext_comp = comp[m.external_face];
  for (int f = 0; f < m.n_faces; ++f)
    if (!keep[f] && comp[f] != ext_comp) keep[f] = 1;
  keep[m.external_face] = 0;
  return extract_faces(m, keep);
}

double local_distance(const PlanarMap& m1, const PlanarMap& m2) {
  auto whole = [](const PlanarMap& m, const FlaggedMap& b) {
    return b.map.n_darts() == m.n_darts();
  };
  for (int r = 0;; ++r) {
    FlaggedMap b1 = ball(m1, r), b2 = ball(m2, r);
    if (canonical_code(b1) != canonical_code(b2)) return 1.0 / (1 + r);
    if (whole(m1, b1) && whole(m2, b2)) return 0.0;
  }
}

std::string serialize_map(const PlanarMap& m, const std::vector<uint8_t>* vcolor) {
  std::ostringstream os;
  os << "planarpeel-map v1\n";
  os << "darts " << m.n_darts() << " root " << m.root << " external "
     << (m.one_vertex ? -1 : (m.root ^ 1)) << " onevertex " << (m.one_vertex ? 1 : 0)
     << "\n";
  os << "twin";
  for (Dart d = 0; d < m.n_darts(); ++d) os << ' ' << (d ^ 1);
  os << "\nnext";
  for (Dart d = 0; d < m.n_darts(); ++d) os << ' ' << m.next[d];
  os << "\n";
  if (vcolor) {
    os << "colors";
    for (uint8_t c : *vcolor) os << ' ' << (int)c;
    os << "\n";
  }
  return os.str();
}

PlanarMap parse_map(const std::string& text, std::vector<uint8_t>* vcolor_out) {
  std::istringstream is(text);
  std::string word, ver;
  is >> word >> ver;
  if (word != "planarpeel-map" || ver != "v1") throw ParseError("bad map header");
  int n, onev;
  Dart root, ext;
  is >> word >> n >> word >> root >> word >> ext >> word >> onev;
  if (!is) throw ParseError("bad map size line");
  if (onev) {
    PlanarMap m;
    m.one_vertex = true;
    m.finalize();
    if (vcolor_out) vcolor_out->assign(1, 2);
    return m;
  }
  std::vector<Dart> tw(n), nx(n);
  is >> word;
  if (word != "twin") throw ParseError("expected twin line");
  for (auto& x : tw) is >> x;
  is >> word;
  if (word != "next") throw ParseError("expected next line");
  for (auto& x : nx) is >> x;
  if (!is) throw ParseError("truncated map arrays");
  PlanarMap m = build_map(n, tw, nx, root);
  if (vcolor_out) {
    vcolor_out->assign(m.n_vertices, 2);
    if (is >> word && word == "colors") {
      for (auto& c : *vcolor_out) {
        int x;
        is >> x;
        c = (uint8_t)x;
      }
    }
  }
  return m;
}

}  // namespace planarpeel

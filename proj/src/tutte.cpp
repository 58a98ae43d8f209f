#include "planarpeel/tutte.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>

#include "planarpeel/enumgf.hpp"

namespace planarpeel {

namespace {

// the corner between rotation-consecutive darts t and next(t) belongs to the
// face on the right of t
inline int corner_face(const PlanarMap& m, Dart t) { return m.face[t ^ 1]; }

// boundary successor with the interior on the left (reverse of the external
// face orbit, darts twinned)
inline Dart trig_next(const PlanarMap& m, Dart t) { return m.prev[t ^ 1]; }

Quadrangulation trivial_quad() {
  PlanarMap m;
  m.next = {0, 1};
  m.root = 0;
  m.finalize();
  Quadrangulation q;
  q.map = m;
  q.color = {0, 1};
  q.color[m.vert[0]] = 0;
  q.color[m.vert[1]] = 1;
  q.is_trivial = true;
  return q;
}

}  // namespace

TutteImage tutte_image(const Quadrangulation& q) {
  const PlanarMap& m = q.map;
  TutteImage out;
  out.image_dart.assign(m.n_darts(), -1);
  if (m.one_vertex || m.n_faces < 2) {
    out.no_internal_face = true;
    out.map.one_vertex = true;
    out.map.finalize();
    out.q_vertex = {m.one_vertex ? 0 : m.vert[m.root]};
    return out;
  }
  // image darts are the q darts with a white origin and an internal face on
  // the left; the diagonal of a face pairs its two white corners
  std::vector<uint8_t> included(m.n_darts(), 0);
  for (Dart d = 0; d < m.n_darts(); ++d)
    if (q.color[m.vert[d]] == 0 && m.face[d] != m.external_face) included[d] = 1;
  int k = 0;
  std::vector<Dart> by_new;
  for (Dart d = 0; d < m.n_darts(); ++d) {
    if (!included[d] || out.image_dart[d] != -1) continue;
    Dart e = m.phi(m.phi(d));
    if (e == d || !included[e] || m.face[e] != m.face[d])
      throw InvariantViolation("internal face is not a bicolored quadrangle");
    out.image_dart[d] = k++;
    out.image_dart[e] = k++;
    by_new.push_back(d);
    by_new.push_back(e);
  }
  out.map.next.assign(k, -1);
  for (int i = 0; i < k; ++i) {
    Dart d = by_new[i];
    Dart e = m.next[d];
    while (!included[e]) e = m.next[e];
    out.map.next[i] = out.image_dart[e];
  }
  if (!included[m.root])
    throw InvariantViolation("root edge has the external face on its left");
  out.map.root = out.image_dart[m.root];
  out.map.finalize();
  out.q_vertex.assign(out.map.n_vertices, -1);
  for (int i = 0; i < k; ++i) out.q_vertex[out.map.vert[i]] = m.vert[by_new[i]];
  return out;
}

std::vector<int> pinchpoints(const PlanarMap& m) {
  std::vector<int> out;
  if (m.one_vertex) return out;
  std::vector<int> corners(m.n_vertices, 0);
  for (Dart t = 0; t < m.n_darts(); ++t)
    if (corner_face(m, t) == m.external_face) ++corners[m.vert[t]];
  for (int v = 0; v < m.n_vertices; ++v)
    if (corners[v] >= 2) out.push_back(v);
  return out;
}

BeadDecomposition beads(const PlanarMap& m) {
  BeadDecomposition bd;
  bd.orig_root = m.root;
  bd.orig_darts = m.n_darts();
  bd.pinch = pinchpoints(m);
  const int n = m.n_darts();

  // split the rotation at every external corner of a pinchpoint: each arc
  // between consecutive external corners becomes its own vertex copy
  std::vector<Dart> nxt(m.next);
  std::vector<uint8_t> is_pinch(m.n_vertices, 0);
  for (int v : bd.pinch) is_pinch[v] = 1;
  std::vector<std::vector<Dart>> pinch_corners(bd.pinch.size());
  std::map<int, int> pinch_index;
  for (size_t i = 0; i < bd.pinch.size(); ++i) pinch_index[bd.pinch[i]] = (int)i;
  {
    std::vector<uint8_t> seen(n, 0);
    for (Dart d0 = 0; d0 < n; ++d0) {
      if (seen[d0] || !is_pinch[m.vert[d0]]) continue;
      std::vector<Dart> cycle, corners;
      Dart d = d0;
      do {
        seen[d] = 1;
        cycle.push_back(d);
        if (corner_face(m, d) == m.external_face) corners.push_back(d);
        d = m.next[d];
      } while (d != d0);
      if (corners.size() < 2) continue;
      int kc = (int)corners.size();
      for (int i = 0; i < kc; ++i) {
        Dart u = corners[i], u2 = corners[(i + 1) % kc];
        bd.cut_records.push_back({u2, m.next[u2]});
        nxt[u2] = m.next[u];
      }
      pinch_corners[pinch_index[m.vert[d0]]] = corners;
    }
  }

  // connected components of (cut rotation, twin) are the beads
  std::vector<int> comp(n, -1);
  int nc = 0;
  for (Dart s = 0; s < n; ++s) {
    if (comp[s] != -1) continue;
    comp[s] = nc;
    std::queue<Dart> bfs;
    bfs.push(s);
    while (!bfs.empty()) {
      Dart d = bfs.front();
      bfs.pop();
      for (Dart x : {nxt[d], (Dart)(d ^ 1)}) {
        if (comp[x] == -1) {
          comp[x] = nc;
          bfs.push(x);
        }
      }
    }
    ++nc;
  }

  // block-cut incidences
  std::set<std::pair<int, int>> inc;
  for (size_t i = 0; i < bd.pinch.size(); ++i)
    for (Dart u : pinch_corners[i]) inc.insert({comp[u], (int)i});
  bd.incidences.assign(inc.begin(), inc.end());
  bd.root_bead = comp[m.root];

  // block-cut tree rooted at the root bead; parent pinch = attachment
  std::vector<std::vector<int>> bead_pinches(nc), pinch_beads(bd.pinch.size());
  for (auto [b, pi] : bd.incidences) {
    bead_pinches[b].push_back(pi);
    pinch_beads[pi].push_back(b);
  }
  std::vector<int> attach(nc, -1), depth(nc, -1);
  {
    std::queue<int> bfs;
    depth[bd.root_bead] = 0;
    bfs.push(bd.root_bead);
    std::vector<uint8_t> pseen(bd.pinch.size(), 0);
    while (!bfs.empty()) {
      int b = bfs.front();
      bfs.pop();
      for (int pi : bead_pinches[b]) {
        if (pseen[pi]) continue;
        pseen[pi] = 1;
        for (int b2 : pinch_beads[pi]) {
          if (depth[b2] != -1) continue;
          depth[b2] = depth[b] + 1;
          attach[b2] = bd.pinch[pi];
          bfs.push(b2);
        }
      }
    }
  }

  auto dist = m.distances_from(m.vert[m.root]);

  // local dart ids per bead, twin pairs preserved
  std::vector<Dart> to_local(n, -1);
  std::vector<int> sz(nc, 0);
  bd.beads.resize(nc);
  for (Dart d = 0; d < n; d += 2) {
    int b = comp[d];
    to_local[d] = sz[b]++;
    to_local[d + 1] = sz[b]++;
  }
  for (int b = 0; b < nc; ++b) {
    bd.beads[b].map.next.assign(sz[b], -1);
    bd.beads[b].orig_dart.assign(sz[b], -1);
  }
  for (Dart d = 0; d < n; ++d) {
    int b = comp[d];
    bd.beads[b].map.next[to_local[d]] = to_local[nxt[d]];
    bd.beads[b].orig_dart[to_local[d]] = d;
  }

  for (int b = 0; b < nc; ++b) {
    Bead& bead = bd.beads[b];
    bead.attachment = attach[b];
    Dart root_local;
    if (b == bd.root_bead) {
      root_local = to_local[m.root];
    } else {
      // boundary darts of the bead: external face of the ambient map stays on
      // the left of the same darts after cutting; walk the boundary with the
      // interior on the left from the attachment copy and pick the first
      // vertex closest to the ambient root
      std::vector<Dart> prv(sz[b]);
      for (Dart ld = 0; ld < sz[b]; ++ld) prv[bead.map.next[ld]] = ld;
      Dart start = -1;
      for (Dart ld = 0; ld < sz[b]; ++ld) {
        Dart od = bead.orig_dart[ld];
        if (m.vert[od] == attach[b] && m.face[od ^ 1] == m.external_face) {
          start = ld;  // trig dart out of the attachment copy
          break;
        }
      }
      if (start == -1) throw InvariantViolation("bead lost its attachment");
      Dart best = start, t = start;
      do {
        if (dist[m.vert[bead.orig_dart[t]]] <
            dist[m.vert[bead.orig_dart[best]]])
          best = t;
        t = prv[t ^ 1];  // trig successor
      } while (t != start);
      root_local = best;
    }
    bead.map.root = root_local;
    bead.map.finalize();
    bead.orig_vertex.assign(bead.map.n_vertices, -1);
    for (Dart ld = 0; ld < sz[b]; ++ld)
      bead.orig_vertex[bead.map.vert[ld]] = m.vert[bead.orig_dart[ld]];
  }
  return bd;
}

PlanarMap reglue_beads(const BeadDecomposition& bd) {
  PlanarMap m;
  m.next.assign(bd.orig_darts, -1);
  for (const Bead& b : bd.beads)
    for (Dart ld = 0; ld < b.map.n_darts(); ++ld)
      m.next[b.orig_dart[ld]] = b.orig_dart[b.map.next[ld]];
  for (auto [d, old_next] : bd.cut_records) m.next[d] = old_next;
  m.root = bd.orig_root;
  m.finalize();
  return m;
}

bool is_truncated(const Quadrangulation& q) {
  const PlanarMap& m = q.map;
  if (m.one_vertex) return false;
  // every edge at a black boundary vertex lies on the boundary
  std::vector<uint8_t> on_bd(m.n_darts(), 0);
  for (Dart d : m.face_orbit(m.root ^ 1)) on_bd[d] = on_bd[d ^ 1] = 1;
  for (Dart d : m.face_orbit(m.root ^ 1)) {
    if (q.color[m.vert[d]] != 1) continue;
    for (Dart x : m.vertex_orbit(d))
      if (!on_bd[x]) return false;
  }
  return true;
}

TutteInverse tutte_inverse(const PlanarMap& m) {
  if (m.one_vertex) {
    TutteInverse out;
    out.q = trivial_quad();
    out.white_of = {out.q.map.vert[0]};
    return out;
  }
  if (!is_simple_boundary(m)) throw NotSimpleBoundary("tutte_inverse");
  const int nd = m.n_darts();
  // boundary edges indexed by their external-orbit dart
  auto ext = m.face_orbit(m.root ^ 1);
  const int p = (int)ext.size();
  std::vector<int> bidx(nd, -1);
  for (int j = 0; j < p; ++j) bidx[ext[j]] = j;

  // q darts: per m dart x an edge from the white copy of vert[x] to the black
  // vertex of the face left of x (a boundary black when that face is
  // external); per boundary edge one more edge from the head of its
  // external-orbit dart to its boundary black
  const int total = 2 * nd + 2 * p;
  auto ew = [](Dart x) { return 2 * x; };        // white side of E_x
  auto eb = [](Dart x) { return 2 * x + 1; };    // black side of E_x
  auto fw = [&](int j) { return 2 * nd + 2 * j; };
  auto fb = [&](int j) { return 2 * nd + 2 * j + 1; };

  std::vector<Dart> nxt(total, -1);
  auto chain = [&](const std::vector<Dart>& seq) {
    for (size_t i = 0; i < seq.size(); ++i)
      nxt[seq[i]] = seq[(i + 1) % seq.size()];
  };

  // white rotations follow the rotation of m; the edge of the corner before a
  // dart sits just before it, and the external wedge after dart z (when the
  // face right of z is external) holds the boundary edge of twin(z)'s side
  std::vector<uint8_t> seen(nd, 0);
  for (Dart d0 = 0; d0 < nd; ++d0) {
    if (seen[d0]) continue;
    std::vector<Dart> seq;
    Dart z = d0;
    do {
      seen[z] = 1;
      seq.push_back(ew(z));
      if (m.face[z ^ 1] == m.external_face) seq.push_back(fw(bidx[z ^ 1]));
      z = m.next[z];
    } while (z != d0);
    chain(seq);
  }
  // internal black rotations follow the face orbit reversed (the two spokes
  // of the quadrangle of an edge must be rotation-adjacent with the quadrangle
  // in the corner on the correct side)
  std::vector<uint8_t> fseen(nd, 0);
  for (Dart d0 = 0; d0 < nd; ++d0) {
    if (fseen[d0] || m.face[d0] == m.external_face) continue;
    std::vector<Dart> seq;
    Dart x = d0;
    do {
      fseen[x] = 1;
      seq.push_back(eb(x));
      x = m.phi(x);
    } while (x != d0);
    std::reverse(seq.begin(), seq.end());
    chain(seq);
  }
  // boundary blacks: degree 2
  for (int j = 0; j < p; ++j) chain({eb(ext[j]), fb(j)});

  PlanarMap qm;
  qm.next = std::move(nxt);
  qm.root = fw(bidx[m.root ^ 1]);
  qm.finalize();

  TutteInverse out;
  out.q.map = qm;
  out.q.color.assign(qm.n_vertices, 2);
  out.white_of.assign(m.n_vertices, -1);
  for (Dart x = 0; x < nd; ++x) {
    out.q.color[qm.vert[ew(x)]] = 0;
    out.q.color[qm.vert[eb(x)]] = 1;
    out.white_of[m.vert[x]] = qm.vert[ew(x)];
  }
  for (int j = 0; j < p; ++j) {
    out.q.color[qm.vert[fw(j)]] = 0;
    out.q.color[qm.vert[fb(j)]] = 1;
  }
  out.q.validate();
  return out;
}

namespace {

// --- core decomposition machinery ---

// region boundary successor: t has a kept face on the left and an unkept one
// on the right; rotate at the head of t until the wedge leaves the region
Dart region_next(const PlanarMap& m, const std::vector<uint8_t>& keep,
                 Dart t) {
  Dart s = t ^ 1;
  while (keep[m.face[s ^ 1]]) s = m.next[s];
  return s;
}

struct Extracted {
  PlanarMap map;
  std::vector<Dart> to_new;  // ambient dart -> extracted dart (-1 outside)
  std::vector<uint8_t> color;
};

// component of `seed` among the darts incident to a kept face, rotation
// induced by skipping dropped darts; rooted at (the copy of) root_ambient
Extracted extract_region(const PlanarMap& m, const std::vector<uint8_t>& keep,
                         Dart seed, Dart root_ambient,
                         const std::vector<uint8_t>& qcolor) {
  const int n = m.n_darts();
  std::vector<uint8_t> kept(n, 0);
  for (Dart d = 0; d < n; ++d)
    if (keep[m.face[d]] || keep[m.face[d ^ 1]]) kept[d] = 1;
  auto skip_next = [&](Dart d) {
    Dart e = m.next[d];
    while (!kept[e]) e = m.next[e];
    return e;
  };
  std::vector<uint8_t> in_comp(n, 0);
  std::queue<Dart> bfs;
  in_comp[seed] = 1;
  bfs.push(seed);
  while (!bfs.empty()) {
    Dart d = bfs.front();
    bfs.pop();
    for (Dart x : {skip_next(d), (Dart)(d ^ 1)})
      if (!in_comp[x]) {
        in_comp[x] = 1;
        bfs.push(x);
      }
  }
  Extracted out;
  out.to_new.assign(n, -1);
  int k = 0;
  for (Dart d = 0; d < n; d += 2)
    if (in_comp[d]) {
      out.to_new[d] = k++;
      out.to_new[d + 1] = k++;
    }
  out.map.next.assign(k, -1);
  std::vector<Dart> orig(k);
  for (Dart d = 0; d < n; ++d)
    if (in_comp[d]) {
      out.map.next[out.to_new[d]] = out.to_new[skip_next(d)];
      orig[out.to_new[d]] = d;
    }
  if (root_ambient < 0 || !in_comp[root_ambient])
    throw InvariantViolation("extraction root outside the region");
  out.map.root = out.to_new[root_ambient];
  out.map.finalize();
  out.color.assign(out.map.n_vertices, 2);
  for (Dart ld = 0; ld < k; ++ld)
    out.color[out.map.vert[ld]] = qcolor[m.vert[orig[ld]]];
  return out;
}

struct CoreAnalysis {
  TutteImage ti;
  BeadDecomposition bd;
  std::vector<int> bead_of;  // ambient image dart -> bead
  std::vector<std::vector<int>> adj;  // block-cut tree: beads then pinches
  int nb = 0, np = 0;
};

CoreAnalysis analyze_core(const Quadrangulation& q) {
  CoreAnalysis ca;
  ca.ti = tutte_image(q);
  if (ca.ti.no_internal_face)
    throw DomainError("image has no edge; no core structure");
  ca.bd = beads(ca.ti.map);
  ca.nb = (int)ca.bd.beads.size();
  ca.np = (int)ca.bd.pinch.size();
  ca.bead_of.assign(ca.ti.map.n_darts(), -1);
  for (int b = 0; b < ca.nb; ++b)
    for (Dart od : ca.bd.beads[b].orig_dart) ca.bead_of[od] = b;
  ca.adj.assign(ca.nb + ca.np, {});
  for (auto [b, pi] : ca.bd.incidences) {
    ca.adj[b].push_back(ca.nb + pi);
    ca.adj[ca.nb + pi].push_back(b);
  }
  return ca;
}

std::vector<int> tree_path(const CoreAnalysis& ca, int a, int b) {
  std::vector<int> par(ca.adj.size(), -2);
  par[a] = -1;
  std::queue<int> bfs;
  bfs.push(a);
  while (!bfs.empty()) {
    int x = bfs.front();
    bfs.pop();
    if (x == b) break;
    for (int y : ca.adj[x])
      if (par[y] == -2) {
        par[y] = x;
        bfs.push(y);
      }
  }
  std::vector<int> path;
  for (int x = b; x != -1; x = par[x]) path.push_back(x);
  std::reverse(path.begin(), path.end());
  return path;  // from a to b
}

// marked beads b1,b2,b3 -> (core bead, per-mark next tree node from the core
// toward the mark, or -1 when the mark sits in the core bead). Throws NotInA
// when the tree median is a pinch node.
struct CoreChoice {
  int core;
  int toward[3];
};

CoreChoice choose_core(const CoreAnalysis& ca, const int b[3]) {
  auto p12 = tree_path(ca, b[0], b[1]);
  auto p13 = tree_path(ca, b[0], b[2]);
  auto p23 = tree_path(ca, b[1], b[2]);
  std::set<int> s12(p12.begin(), p12.end()), s13(p13.begin(), p13.end());
  int med = -1;
  for (int x : p23)
    if (s12.count(x) && s13.count(x)) {
      med = x;
      break;
    }
  if (med == -1) throw InvariantViolation("tree median not found");
  if (med >= ca.nb) throw NotInA("marked branches meet at a pinchpoint");
  CoreChoice cc;
  cc.core = med;
  for (int i = 0; i < 3; ++i) {
    if (b[i] == med) {
      cc.toward[i] = -1;
      continue;
    }
    auto pc = tree_path(ca, med, b[i]);
    cc.toward[i] = pc[1];
  }
  return cc;
}

}  // namespace

CoreDecomposition tutte_core(const Quadrangulation& q, Dart e2, Dart e3) {
  const PlanarMap& m = q.map;
  const Dart e1 = m.root;
  Dart marks[3] = {e1, e2, e3};
  for (Dart e : marks) {
    if (e < 0 || e >= m.n_darts()) throw DomainError("mark out of range");
    if (q.color[m.vert[e]] != 0 || m.face[e ^ 1] != m.external_face)
      throw NotOnBoundary("mark must leave a white boundary vertex");
  }
  if (e1 == e2 || e1 == e3 || e2 == e3)
    throw DomainError("marks must be distinct");

  CoreAnalysis ca = analyze_core(q);
  int b[3];
  Dart g[3];
  for (int i = 0; i < 3; ++i) {
    g[i] = ca.ti.image_dart[marks[i]];
    if (g[i] < 0) throw InvariantViolation("boundary mark with no image dart");
    b[i] = ca.bead_of[g[i]];
  }
  CoreChoice cc = choose_core(ca, b);
  const Bead& core_bead = ca.bd.beads[cc.core];

  // marked core vertices (local to the core bead)
  int v[3];
  for (int i = 0; i < 3; ++i) {
    if (cc.toward[i] == -1) {
      Dart ld = -1;
      for (Dart x = 0; x < core_bead.map.n_darts(); ++x)
        if (core_bead.orig_dart[x] == g[i]) ld = x;
      v[i] = core_bead.map.vert[ld];
    } else {
      int pv = ca.bd.pinch[cc.toward[i] - ca.nb];
      v[i] = -1;
      for (int lv = 0; lv < core_bead.map.n_vertices; ++lv)
        if (core_bead.orig_vertex[lv] == pv) v[i] = lv;
      if (v[i] == -1) throw InvariantViolation("pinch copy missing from core");
    }
  }
  if (v[0] == v[1] || v[0] == v[2] || v[1] == v[2])
    throw NotInA("marked core vertices are not distinct");

  CoreDecomposition out;
  out.core = core_bead.map;
  {  // re-root the core at v1 (its unique boundary dart with external right)
    Dart r = -1;
    for (Dart t = 0; t < out.core.n_darts(); ++t)
      if (out.core.vert[t] == v[0] &&
          out.core.face[t ^ 1] == out.core.external_face)
        r = t;
    if (r == -1) throw InvariantViolation("v1 is not on the core boundary");
    out.core.root = r;
    out.core.finalize();
  }
  out.v1 = v[0];
  out.v2 = v[1];
  out.v3 = v[2];
  const int pc = (int)out.core.face_orbit(out.core.root ^ 1).size();

  // q faces whose diagonal lies in the core bead
  std::vector<uint8_t> keep(m.n_faces, 0);
  for (Dart d = 0; d < m.n_darts(); ++d)
    if (ca.ti.image_dart[d] >= 0 && ca.bead_of[ca.ti.image_dart[d]] == cc.core)
      keep[m.face[d]] = 1;

  // boundary walk of the kept region from the slot dart of v1
  const int W1 = ca.ti.q_vertex[core_bead.orig_vertex[v[0]]];
  Dart t0 = -1;
  for (Dart d = 0; d < m.n_darts(); ++d)
    if (m.vert[d] == W1 && keep[m.face[d]] && !keep[m.face[d ^ 1]]) {
      if (t0 != -1) throw InvariantViolation("several slot darts at v1");
      t0 = d;
    }
  if (t0 == -1) throw InvariantViolation("no slot dart at v1");
  std::vector<Dart> walk;
  for (Dart t = t0;;) {
    walk.push_back(t);
    t = region_next(m, keep, t);
    if (t == t0) break;
  }
  const int L = (int)walk.size();
  if (L % 2 != 0 || L > 2 * pc)
    throw InvariantViolation("kept region boundary length mismatch");

  // slot whites in core boundary order; the walk visits the subsequence of
  // slots that are not folded (a folded slot has a single trivial part over
  // both of its edges, and its white vertex is interior to the region)
  std::vector<int> slot_white(pc), white_slot_of(m.n_vertices, -1);
  {
    std::vector<Dart> cb = out.core.face_orbit(out.core.root ^ 1);
    for (int j = 0; j < pc; ++j) {
      Dart trig = cb[(pc - j) % pc] ^ 1;  // trig order reverses the orbit
      slot_white[j] = ca.ti.q_vertex[core_bead.orig_vertex[out.core.vert[trig]]];
      white_slot_of[slot_white[j]] = j;
    }
  }
  std::vector<bool> folded(pc, false);
  std::vector<int> wpos(pc, -1);       // slot -> even walk position
  std::vector<int> pos_slot(L, -1);    // even walk position -> slot
  {
    int i = 0;
    for (int j = 0; j < pc; ++j) {
      if (i < L / 2 && m.vert[walk[2 * i]] == slot_white[j]) {
        wpos[j] = 2 * i;
        pos_slot[2 * i] = j;
        ++i;
      } else {
        folded[j] = true;
      }
    }
    if (2 * i != L)
      throw InvariantViolation("core boundary order mismatch");
  }

  // group the unkept internal faces into glued components
  std::vector<int> fcomp(m.n_faces, -1);
  int ncomp = 0;
  for (int f0 = 0; f0 < m.n_faces; ++f0) {
    if (f0 == m.external_face || keep[f0] || fcomp[f0] != -1) continue;
    fcomp[f0] = ncomp;
    std::queue<int> bfs;
    bfs.push(f0);
    while (!bfs.empty()) {
      int f = bfs.front();
      bfs.pop();
      for (Dart d = 0; d < m.n_darts(); ++d) {
        if (m.face[d] != f) continue;
        int f2 = m.face[d ^ 1];
        if (f2 == m.external_face || keep[f2] || fcomp[f2] != -1) continue;
        fcomp[f2] = ncomp;
        bfs.push(f2);
      }
    }
    ++ncomp;
  }
  // gluing walk positions per component
  std::vector<std::vector<int>> comp_pos(ncomp);
  std::vector<int> pos_comp(L, -1);  // -1 = external (a bare edge)
  for (int i = 0; i < L; ++i) {
    int f = m.face[walk[i] ^ 1];
    if (f == m.external_face) continue;
    if (keep[f]) throw InvariantViolation("walk edge interior to the region");
    pos_comp[i] = fcomp[f];
    comp_pos[fcomp[f]].push_back(i);
  }

  // extract every component once
  std::vector<Extracted> ex(ncomp);
  std::vector<int> comp_slot(ncomp, -1);
  std::vector<bool> comp_both(ncomp, false);
  for (int c = 0; c < ncomp; ++c) {
    auto& pos = comp_pos[c];
    if (pos.empty() || pos.size() > 2)
      throw InvariantViolation("component glued along != 1 or 2 edges");
    std::vector<uint8_t> keep_c(m.n_faces, 0);
    for (int f = 0; f < m.n_faces; ++f)
      if (fcomp[f] == c) keep_c[f] = 1;
    int slot, root_pos;
    if (pos.size() == 2) {
      int i = pos[0], j2 = pos[1];
      if (!((i % 2 == 1 && j2 == (i + 1) % L) ||
            (j2 % 2 == 1 && i == (j2 + 1) % L)))
        throw InvariantViolation("pair gluing not at a single slot");
      root_pos = (i % 2 == 1) ? i : j2;
      slot = pos_slot[(root_pos + 1) % L];
      comp_both[c] = true;
    } else {
      int i = pos[0];
      root_pos = i;
      slot = pos_slot[(i % 2 == 1) ? (i + 1) % L : i];
    }
    comp_slot[c] = slot;
    Dart seed = walk[root_pos] ^ 1;
    Dart root_amb;
    if (root_pos % 2 == 1) {
      root_amb = walk[root_pos] ^ 1;  // glued by its root edge
      ex[c] = extract_region(m, keep_c, seed, root_amb, q.color);
    } else {
      // glued only by the edge before the root: the root is the unique
      // boundary dart of the component at the shared white vertex
      ex[c] = extract_region(m, keep_c, seed, walk[root_pos] ^ 1, q.color);
      Dart pre = ex[c].to_new[walk[root_pos] ^ 1];
      Dart r = ex[c].map.prev[pre ^ 1];  // trig successor of the pre-root dart
      if (ex[c].map.face[r ^ 1] != ex[c].map.external_face)
        throw InvariantViolation("component root is not on its boundary");
      ex[c].map.root = r;
      ex[c].map.finalize();
    }
  }

  // assemble the slots
  out.components.assign(pc, {});
  auto make_part = [&](int walk_pos) {
    MarkedQuad mq;
    if (pos_comp[walk_pos] == -1) {
      mq.q = trivial_quad();
    } else {
      const Extracted& e = ex[pos_comp[walk_pos]];
      mq.q.map = e.map;
      mq.q.color = e.color;
      mq.q.validate();
    }
    return mq;
  };
  for (int j = 0; j < pc; ++j) {
    JElement el;
    if (folded[j]) {
      MarkedQuad mq;
      mq.q = trivial_quad();
      el.parts.push_back(mq);
    } else {
      int ie = (wpos[j] - 1 + L) % L, iep = wpos[j];
      if (pos_comp[ie] != -1 && pos_comp[ie] == pos_comp[iep]) {
        el.parts.push_back(make_part(ie));
      } else {
        el.parts.push_back(make_part(ie));
        el.parts.push_back(make_part(iep));
      }
    }
    out.components[j] = el;
  }

  // place the marks (e1 in the slot of v1, e2/e3 in theirs)
  for (int i = 0; i < 3; ++i) {
    Dart e = marks[i];
    int f = m.face[e];
    int slot, part_idx;
    Dart mark_local;
    if (keep[f]) {
      // the mark is a bare region-boundary edge: its part is the trivial
      // quadrangulation glued on it, marked at the root
      int pos = -1;
      for (int k2 = 0; k2 < L; ++k2)
        if (walk[k2] == e) pos = k2;
      if (pos == -1 || pos % 2 != 0)
        throw InvariantViolation("kept mark is not a slot dart");
      slot = pos_slot[pos];
      const JElement& el = out.components[slot];
      part_idx = (int)el.parts.size() - 1;
      mark_local = el.parts[part_idx].q.map.root;
    } else {
      int c = fcomp[f];
      slot = comp_slot[c];
      const JElement& el = out.components[slot];
      if (el.parts.size() == 1) {
        part_idx = 0;
      } else {
        // which of the two parts is this component?
        int ie = (wpos[slot] - 1 + L) % L;
        part_idx = (pos_comp[ie] == c) ? 0 : 1;
      }
      mark_local = ex[c].to_new[e];
      if (mark_local < 0)
        throw InvariantViolation("mark outside its component");
    }
    if (slot_white[slot] != ca.ti.q_vertex[core_bead.orig_vertex[v[i]]] ||
        white_slot_of[ca.ti.q_vertex[core_bead.orig_vertex[v[i]]]] != slot)
      throw InvariantViolation("mark landed in the wrong slot");
    out.components[slot].parts[part_idx].mark = mark_local;
  }

  // bookkeeping identities
  out.volume = q.n_internal_faces();
  out.half_perimeter = q.half_perimeter();
  long long vol = out.core.n_darts() / 2;
  long long hp_sum = 0;
  for (const auto& el : out.components)
    for (const auto& part : el.parts) {
      vol += part.q.n_internal_faces();
      hp_sum += part.q.half_perimeter();
    }
  if (vol != out.volume || hp_sum - pc != out.half_perimeter)
    throw InvariantViolation("core decomposition bookkeeping mismatch");
  return out;
}

GluedQuad core_glue(const CoreDecomposition& d) {
  TutteInverse inv = tutte_inverse(d.core);
  const PlanarMap& cq = inv.q.map;
  const int pc = (int)d.components.size();

  // rotation under construction, with origin colors; prv kept in sync
  std::vector<Dart> nxt(cq.next), prv(cq.n_darts());
  std::vector<int32_t> ocolor(cq.n_darts());
  std::vector<uint8_t> alive(cq.n_darts(), 1);
  for (Dart x = 0; x < cq.n_darts(); ++x) {
    prv[nxt[x]] = x;
    ocolor[x] = inv.q.color[cq.vert[x]];
  }
  auto setn = [&](Dart x, Dart y) {
    nxt[x] = y;
    prv[y] = x;
  };

  // boundary walk of the inverse, whites in slot order from v1
  std::vector<Dart> ts;
  {
    Dart t = cq.root;
    do {
      ts.push_back(t);
      t = cq.prev[t ^ 1];  // trig successor
    } while (t != cq.root);
  }
  if ((int)ts.size() != 2 * pc)  // truncated boundary has 2 pc edges
    throw InvariantViolation("inverse boundary length mismatch");
  if (inv.q.color[cq.vert[ts[0]]] != 0)
    throw InvariantViolation("inverse boundary does not start white");

  // glue one part: a = host dart with the external face on its left, part
  // dart r identified with a (its interior replaces the external side)
  std::vector<std::vector<std::vector<Dart>>> part_map(pc);
  auto glue = [&](Dart a, const MarkedQuad& part) {
    const PlanarMap& pm = part.q.map;
    std::vector<Dart> to_glued(pm.n_darts(), -1);
    Dart r = pm.root;
    if (pm.n_darts() == 2) {  // trivial: the edge is identified, nothing added
      to_glued[r] = a;
      to_glued[r ^ 1] = a ^ 1;
      return to_glued;
    }
    const int base = (int)nxt.size();
    for (Dart x = 0; x < pm.n_darts(); ++x) {
      nxt.push_back(-1);
      prv.push_back(-1);
      ocolor.push_back(part.q.color[pm.vert[x]]);
      alive.push_back(1);
    }
    for (Dart x = 0; x < pm.n_darts(); ++x)
      to_glued[x] = (x == r) ? a : (x == (r ^ 1)) ? (a ^ 1) : base + x;
    alive[base + r] = alive[base + (r ^ 1)] = 0;
    ocolor[a] = part.q.color[pm.vert[r]];
    ocolor[a ^ 1] = part.q.color[pm.vert[r ^ 1]];
    Dart pa = prv[a], na = nxt[a ^ 1];
    for (Dart x = 0; x < pm.n_darts(); ++x)
      if (x != r && x != (r ^ 1)) setn(to_glued[x], to_glued[pm.next[x]]);
    if (pm.next[r] != r) {
      setn(pa, to_glued[pm.next[r]]);
      // the chain from the part already ends at a
    }
    if (pm.next[r ^ 1] != (r ^ 1)) {
      Dart first = to_glued[pm.next[r ^ 1]];
      Dart last = to_glued[pm.prev[r ^ 1]];
      setn(a ^ 1, first);
      setn(last, na);
    }
    return to_glued;
  };

  // one part covering both slot edges: identify its root edge with the edge
  // arriving at the slot vertex and its pre-root edge with the one leaving
  auto double_glue = [&](Dart a, Dart a2, const MarkedQuad& part) {
    const PlanarMap& pm = part.q.map;
    std::vector<Dart> to_glued(pm.n_darts(), -1);
    Dart r = pm.root;
    Dart s = pm.next[r] ^ 1;  // interior-side dart of the pre-root edge
    const int base = (int)nxt.size();
    for (Dart x = 0; x < pm.n_darts(); ++x) {
      nxt.push_back(-1);
      prv.push_back(-1);
      ocolor.push_back(part.q.color[pm.vert[x]]);
      alive.push_back(1);
    }
    for (Dart x = 0; x < pm.n_darts(); ++x) {
      if (x == r) to_glued[x] = a;
      else if (x == (r ^ 1)) to_glued[x] = a ^ 1;
      else if (x == s) to_glued[x] = a2;
      else if (x == (s ^ 1)) to_glued[x] = a2 ^ 1;
      else to_glued[x] = base + x;
    }
    alive[base + r] = alive[base + (r ^ 1)] = 0;
    alive[base + s] = alive[base + (s ^ 1)] = 0;
    Dart na = nxt[a ^ 1], pa2 = prv[a2];
    for (Dart x = 0; x < pm.n_darts(); ++x)
      if (x != r && x != (r ^ 1) && x != s && x != (s ^ 1))
        setn(to_glued[x], to_glued[pm.next[x]]);
    if (pm.next[s ^ 1] != r)  // interior fan at the slot vertex
      setn((Dart)(a2 ^ 1), to_glued[pm.next[s ^ 1]]);
    if (pm.vert[r ^ 1] == pm.vert[s]) {
      // the part meets both slot black vertices in a single vertex, so the
      // glued map merges them; the two part fans interleave with the two
      // ambient fans in boundary order
      setn((Dart)(a ^ 1), to_glued[pm.next[r ^ 1]]);
      if (pm.prev[r ^ 1] != s)
        setn(to_glued[pm.prev[r ^ 1]], na);
      else
        setn(pa2, na);
      if (pm.next[s] != (Dart)(r ^ 1))
        setn(pa2, to_glued[pm.next[s]]);
    } else {
      if (pm.next[r ^ 1] != (r ^ 1)) {  // fan at the head of the root edge
        setn((Dart)(a ^ 1), to_glued[pm.next[r ^ 1]]);
        setn(to_glued[pm.prev[r ^ 1]], na);
      }
      if (pm.next[s] != s)  // fan at the head of the pre-root edge
        setn(pa2, to_glued[pm.next[s]]);
    }
    return to_glued;
  };

  for (int j = 0; j < pc; ++j) {
    const JElement& el = d.components[j];
    const int LL = (int)ts.size();
    Dart te = ts[(2 * j - 1 + LL) % LL], tep = ts[2 * j];
    part_map[j].resize(el.parts.size());
    if (el.parts.size() == 1 && el.parts[0].q.map.n_darts() == 2) {
      // folded slot: the trivial part covers both slot edges, so they are
      // identified with each other and the slot black vertex disappears
      Dart wp = prv[tep], wn = nxt[tep];  // unlink tep at the slot white
      setn(wp, wn);
      if (nxt[tep ^ 1] != (Dart)(tep ^ 1)) {
        // merge the head's whole fan into te's vertex at te's position
        Dart h2 = nxt[tep ^ 1], hl = prv[tep ^ 1], o1 = nxt[te];
        setn(te, h2);
        setn(hl, o1);
      }
      alive[tep] = alive[tep ^ 1] = 0;
      part_map[j][0] = {(Dart)(te ^ 1), te};
      if (el.parts[0].q.map.root == 1)
        std::swap(part_map[j][0][0], part_map[j][0][1]);
    } else if (el.parts.size() == 1) {
      part_map[j][0] = double_glue((Dart)(te ^ 1), (Dart)(tep ^ 1), el.parts[0]);
    } else if (el.parts.size() == 2) {
      part_map[j][0] = glue((Dart)(te ^ 1), el.parts[0]);
      // second part: its pre-root boundary edge is identified with tep, so
      // the identified interior-side dart is the twin of next(root)
      const MarkedQuad& p2 = el.parts[1];
      const PlanarMap& pm = p2.q.map;
      if (pm.n_darts() == 2) {
        // a trivial part glued on its pre-root edge: the root of the part is
        // the boundary dart leaving the slot vertex
        part_map[j][1] = {tep, (Dart)(tep ^ 1)};
        if (pm.root == 1) std::swap(part_map[j][1][0], part_map[j][1][1]);
      } else {
        MarkedQuad shifted = p2;
        // glue() identifies part.root with a, so re-root a copy at the
        // interior-side dart of the pre-root edge
        shifted.q.map.root = (Dart)(pm.next[pm.root] ^ 1);
        shifted.q.map.finalize();
        part_map[j][1] = glue((Dart)(tep ^ 1), shifted);
      }
    } else {
      throw InvariantViolation("slot with an empty element");
    }
  }

  // compact and build
  std::vector<Dart> cmp(nxt.size(), -1);
  int k = 0;
  for (size_t x = 0; x < nxt.size(); x += 2) {
    if (alive[x] != alive[x + 1])
      throw InvariantViolation("half-dead edge after gluing");
    if (alive[x]) {
      cmp[x] = k++;
      cmp[x + 1] = k++;
    }
  }
  GluedQuad out;
  out.q.map.next.assign(k, -1);
  std::vector<int32_t> oc(k);
  for (size_t x = 0; x < nxt.size(); ++x)
    if (alive[x]) {
      out.q.map.next[cmp[x]] = cmp[nxt[x]];
      oc[cmp[x]] = ocolor[x];
    }

  // resolve the marks through the glue maps; a mark belongs to e_i when its
  // slot sits at the core vertex v_i
  std::vector<int32_t> core_vertex_of(cq.n_vertices, -1);
  for (int cv = 0; cv < d.core.n_vertices; ++cv)
    core_vertex_of[inv.white_of[cv]] = cv;
  Dart marks[3] = {-1, -1, -1};
  const int32_t vs[3] = {d.v1, d.v2, d.v3};
  for (int j = 0; j < pc; ++j) {
    const JElement& el = d.components[j];
    int32_t slot_core_vertex = core_vertex_of[cq.vert[ts[2 * j]]];
    for (size_t pi = 0; pi < el.parts.size(); ++pi) {
      Dart mk = el.parts[pi].mark;
      if (mk < 0) continue;
      Dart glued = part_map[j][pi][mk];
      if (glued < 0 || cmp[glued] < 0)
        throw InvariantViolation("mark glued onto a dead dart");
      int which = -1;
      for (int i = 0; i < 3; ++i)
        if (vs[i] == slot_core_vertex && marks[i] == -1) {
          which = i;
          break;
        }
      if (which == -1)
        throw InvariantViolation("mark in a slot without a marked vertex");
      marks[which] = cmp[glued];
    }
  }
  if (marks[0] < 0 || marks[1] < 0 || marks[2] < 0)
    throw InvariantViolation("expected exactly three marks");
  out.e1 = marks[0];
  out.e2 = marks[1];
  out.e3 = marks[2];
  out.q.map.root = out.e1;
  out.q.map.finalize();
  out.q.color.assign(out.q.map.n_vertices, -1);
  for (Dart x = 0; x < k; ++x) out.q.color[out.q.map.vert[x]] = oc[x];
  out.q.validate();
  return out;
}

ResidualReport core_identity_residual(const Rat& z, int volume_cutoff,
                                      int perim_cutoff) {
  if (!(z > Rat(0)) || !(z < rat(2, 9)))
    throw DomainError("z must lie in (0, 2/9)");
  Rat lhs(0), drop(0);
  const Rat w12(1, 12);
  for (int p = 3; p <= perim_cutoff; ++p) {
    Rat partial(0);
    auto counts = count_quadrangulations(volume_cutoff, p);
    for (int n = 0; n <= volume_cutoff; ++n) {
      Rat wn = rat_pow(w12, n);
      partial += Rat((long)counts[n]) * wn;
      if (counts[n] == 0) continue;
      long long in_a = 0;
      for (const auto& q : enumerate_quadrangulations(n, p)) {
        CoreAnalysis ca;
        try {
          ca = analyze_core(q);
        } catch (const DomainError&) {
          continue;
        }
        // white boundary darts with the external face on the right
        std::vector<Dart> bs;
        for (Dart dd : q.map.face_orbit(q.map.root ^ 1))
          if (q.color[q.map.vert[dd ^ 1]] == 0) bs.push_back(dd ^ 1);
        for (Dart e2 : bs)
          for (Dart e3 : bs) {
            if (e2 == e3 || e2 == q.map.root || e3 == q.map.root) continue;
            int b[3];
            bool ok = true;
            Dart mk[3] = {q.map.root, e2, e3};
            for (int i = 0; i < 3; ++i) {
              Dart gi = ca.ti.image_dart[mk[i]];
              if (gi < 0) {
                ok = false;
                break;
              }
              b[i] = ca.bead_of[gi];
            }
            if (!ok) continue;
            try {
              CoreChoice cc = choose_core(ca, b);
              const Bead& cb = ca.bd.beads[cc.core];
              int v[3];
              for (int i = 0; i < 3; ++i) {
                if (cc.toward[i] == -1) {
                  Dart ld = -1;
                  for (Dart x = 0; x < cb.map.n_darts(); ++x)
                    if (cb.orig_dart[x] == ca.ti.image_dart[mk[i]]) ld = x;
                  v[i] = cb.map.vert[ld];
                } else {
                  int pv = ca.bd.pinch[cc.toward[i] - ca.nb];
                  v[i] = -1;
                  for (int lv = 0; lv < cb.map.n_vertices; ++lv)
                    if (cb.orig_vertex[lv] == pv) v[i] = lv;
                }
              }
              if (v[0] != v[1] && v[0] != v[2] && v[1] != v[2]) ++in_a;
            } catch (const NotInA&) {
            }
          }
      }
      lhs += Rat((long)in_a) * wn * rat_pow(z, p);
    }
    // everything with n > volume_cutoff at this perimeter
    drop += Rat((p - 1) * (p - 2)) * (q_partition(p) - partial) * rat_pow(z, p);
  }
  // perimeters beyond the cutoff: terms (p-1)(p-2) Q_p z^p, ratio certified
  // below ((p+1)/(p-1)) (9/2) z
  {
    int p = perim_cutoff + 1;
    Rat term = Rat((p - 1) * (p - 2)) * q_partition(p) * rat_pow(z, p);
    for (; to_double(term) > 1e-22; ++p) {
      drop += term;
      Rat ratio = rat(p + 1, p - 1) * rat(9, 2) * z;
      term = term * ratio;
    }
    Rat ratio = rat(p + 1, p - 1) * rat(9, 2) * z;
    if (!(ratio < Rat(1)))
      throw DomainError("perimeter tail does not contract at this z");
    drop += term / (Rat(1) - ratio);
  }

  // right-hand side from the series, with corner evaluation of the certified
  // series tails folded into the budget
  SeriesValue J = j_series(z), Jd = j_dot_series(z);
  auto rhs_at = [&](const Rat& jv, const Rat& jdv) {
    Rat zeta = jv / z;
    if (!(zeta < Rat(2))) throw DomainError("J/z reaches the series radius");
    Rat acc(0), pow = rat_pow(zeta, 3);
    Rat prev_term(0);
    int p = 3;
    Rat mprev = m_coefficient(3);
    for (;; ++p) {
      Rat mc = (p == 3) ? mprev : m_coefficient(p);
      if (p > 3) {
        if (!(mc * Rat(2) <= mprev))
          throw InvariantViolation("m coefficient ratio exceeds 1/2");
        mprev = mc;
      }
      Rat term = Rat((p - 1) * (p - 2)) * mc * pow;
      acc += term;
      prev_term = term;
      pow = pow * zeta;
      if (p > 8 && to_double(term) < 1e-24) break;
    }
    // certified: m ratio <= 1/2, term ratio <= ((p+1)/(p-1)) zeta/2 < 1
    Rat ratio = rat(p + 2, p) * zeta / Rat(2);
    if (!(ratio < Rat(1)))
      throw DomainError("image series tail does not contract");
    Rat tail = prev_term * ratio / (Rat(1) - ratio);
    Rat jd3 = (jdv / jv) * (jdv / jv) * (jdv / jv);
    return std::pair<Rat, Rat>(acc * jd3, tail * jd3);
  };
  auto [rhs, rhs_tail] = rhs_at(J.value, Jd.value);
  double series_span = 0;
  for (int si = 0; si < 4; ++si) {
    Rat jv = J.value + ((si & 1) ? J.tail_bound : Rat(0) - J.tail_bound);
    Rat jdv = Jd.value + ((si & 2) ? Jd.tail_bound : Rat(0) - Jd.tail_bound);
    if (!(jv > Rat(0))) continue;
    auto [r2, t2] = rhs_at(jv, jdv);
    series_span = std::max(
        series_span, std::abs(to_double(r2) - to_double(rhs)) +
                         to_double(t2));
  }

  ResidualReport rep;
  rep.lhs = to_double(lhs);
  rep.rhs = to_double(rhs);
  rep.residual = std::abs(rep.lhs - rep.rhs);
  rep.budget = to_double(drop) + to_double(rhs_tail) + series_span +
               1e-15 * (std::abs(rep.lhs) + std::abs(rep.rhs));
  return rep;
}

PlanarMap infinite_bead_approx(const Quadrangulation& revealed,
                               const std::vector<uint8_t>& unexplored) {
  TutteImage ti = tutte_image(revealed);
  if (ti.no_internal_face) return ti.map;
  BeadDecomposition bd = beads(ti.map);
  // beads holding a white vertex of the unexplored boundary
  std::vector<uint8_t> flagged(bd.beads.size(), 0);
  bool any = false;
  for (size_t b = 0; b < bd.beads.size(); ++b)
    for (int v : bd.beads[b].orig_vertex)
      if (unexplored[ti.q_vertex[v]]) {
        flagged[b] = 1;
        any = true;
      }
  if (!any) throw DomainError("no unexplored boundary vertex in the image");

  // walk down the block-cut tree while one branch holds every flagged bead
  std::vector<std::vector<int>> bead_pinches(bd.beads.size()),
      pinch_beads(bd.pinch.size());
  for (auto [b, pi] : bd.incidences) {
    bead_pinches[b].push_back(pi);
    pinch_beads[pi].push_back(b);
  }
  // subtree of bead b entered through pinch pi holds a flagged bead?
  auto subtree_flagged = [&](int b, int pi) {
    std::vector<uint8_t> seen_b(bd.beads.size(), 0), seen_p(bd.pinch.size(), 0);
    seen_p[pi] = 1;
    seen_b[b] = 1;
    std::queue<int> bfs;
    bfs.push(b);
    while (!bfs.empty()) {
      int b2 = bfs.front();
      bfs.pop();
      if (flagged[b2]) return true;
      for (int pj : bead_pinches[b2]) {
        if (seen_p[pj]) continue;
        seen_p[pj] = 1;
        for (int b3 : pinch_beads[pj])
          if (!seen_b[b3]) {
            seen_b[b3] = 1;
            bfs.push(b3);
          }
      }
    }
    return false;
  };
  int cur = bd.root_bead, from_pinch = -1;
  for (;;) {
    if (flagged[cur]) break;
    int nb = -1, np = -1, count = 0;
    for (int pi : bead_pinches[cur]) {
      if (pi == from_pinch) continue;
      for (int b2 : pinch_beads[pi]) {
        if (b2 == cur) continue;
        if (subtree_flagged(b2, pi)) {
          ++count;
          nb = b2;
          np = pi;
        }
      }
    }
    if (count != 1) break;  // branching (or dead end): stop at cur
    cur = nb;
    from_pinch = np;
  }
  return bd.beads[cur].map;
}

}  // namespace planarpeel

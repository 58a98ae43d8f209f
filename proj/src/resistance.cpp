#include "planarpeel/resistance.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <queue>

#include "planarpeel/errors.hpp"
#include "planarpeel/peeling.hpp"
#include "planarpeel/tutte.hpp"

namespace planarpeel {

namespace {

// contracted graph: terminal set a -> node 0, b -> node 1, the rest of the
// component of node 0 renumbered from 2; self-loops dropped
struct Contracted {
  int n = 0;
  std::vector<std::pair<int, int>> edges;
};

Contracted contract(const Network& net) {
  if (net.a.empty() || net.b.empty())
    throw DomainError("empty terminal set");
  std::vector<int> node(net.n_vertices, -1);
  for (int v : net.a) {
    if (v < 0 || v >= net.n_vertices) throw DomainError("terminal out of range");
    node[v] = 0;
  }
  for (int v : net.b) {
    if (v < 0 || v >= net.n_vertices) throw DomainError("terminal out of range");
    if (node[v] == 0) throw DomainError("terminal sets intersect");
    node[v] = 1;
  }
  // adjacency on contracted nodes, then keep the component of node 0
  int n = 2;
  for (int v = 0; v < net.n_vertices; ++v)
    if (node[v] == -1) node[v] = n++;
  std::vector<std::vector<int>> adj(n);
  std::vector<std::pair<int, int>> es;
  es.reserve(net.edges.size());
  for (auto [u, v] : net.edges) {
    int x = node[u], y = node[v];
    if (x == y) continue;
    es.push_back({x, y});
    adj[x].push_back(y);
    adj[y].push_back(x);
  }
  std::vector<uint8_t> reach(n, 0);
  std::queue<int> bfs;
  reach[0] = 1;
  bfs.push(0);
  while (!bfs.empty()) {
    int x = bfs.front();
    bfs.pop();
    for (int y : adj[x])
      if (!reach[y]) {
        reach[y] = 1;
        bfs.push(y);
      }
  }
  if (!reach[1]) throw DisconnectedTerminals("terminal sets are not connected");
  std::vector<int> compact(n, -1);
  int k = 0;
  for (int x = 0; x < n; ++x)
    if (reach[x]) compact[x] = k++;
  Contracted c;
  c.n = k;
  for (auto [x, y] : es)
    if (reach[x]) c.edges.push_back({compact[x], compact[y]});
  return c;
}

// exact grounded-Laplacian solve: unknowns are all nodes but node 1, unit
// current injected at node 0; the resistance is the potential of node 0
Rat solve_exact(const Contracted& c) {
  int n = c.n - 1;  // node 1 grounded
  auto idx = [](int x) { return x == 0 ? 0 : x - 1; };
  std::vector<std::vector<Rat>> m(n, std::vector<Rat>(n + 1, Rat(0)));
  for (auto [x, y] : c.edges) {
    if (x != 1) m[idx(x)][idx(x)] += 1;
    if (y != 1) m[idx(y)][idx(y)] += 1;
    if (x != 1 && y != 1) {
      m[idx(x)][idx(y)] -= 1;
      m[idx(y)][idx(x)] -= 1;
    }
  }
  m[0][n] = 1;  // right-hand side
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int r = col; r < n; ++r)
      if (m[r][col] != 0) {
        piv = r;
        break;
      }
    if (piv == -1) throw InvariantViolation("singular grounded laplacian");
    std::swap(m[col], m[piv]);
    for (int r = 0; r < n; ++r) {
      if (r == col || m[r][col] == 0) continue;
      Rat f = m[r][col] / m[col][col];
      for (int k = col; k <= n; ++k) m[r][k] -= f * m[col][k];
    }
  }
  return m[0][n] / m[0][0];
}

double solve_cg(const Contracted& c) {
  int n = c.n - 1;
  auto idx = [](int x) { return x == 0 ? 0 : x - 1; };
  std::vector<Eigen::Triplet<double>> ts;
  ts.reserve(4 * c.edges.size());
  for (auto [x, y] : c.edges) {
    if (x != 1) ts.push_back({idx(x), idx(x), 1.0});
    if (y != 1) ts.push_back({idx(y), idx(y), 1.0});
    if (x != 1 && y != 1) {
      ts.push_back({idx(x), idx(y), -1.0});
      ts.push_back({idx(y), idx(x), -1.0});
    }
  }
  Eigen::SparseMatrix<double> lap(n, n);
  lap.setFromTriplets(ts.begin(), ts.end());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs[0] = 1.0;
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>,
                           Eigen::Lower | Eigen::Upper>
      cg;
  cg.setTolerance(1e-12);
  cg.setMaxIterations(20L * n + 1000);
  cg.compute(lap);
  Eigen::VectorXd x = cg.solve(rhs);
  if (cg.info() != Eigen::Success)
    throw Unstable("conjugate gradient did not converge");
  return x[0];
}

}  // namespace

Resistance effective_resistance(const Network& net, long long exact_edge_limit) {
  Contracted c = contract(net);
  Resistance out;
  if ((long long)c.edges.size() <= exact_edge_limit) {
    out.exact = true;
    out.value = solve_exact(c);
    out.value_d = to_double(out.value);
  } else {
    out.exact = false;
    out.value_d = solve_cg(c);
  }
  return out;
}

DualPair dual_network(const PlanarMap& m, int a1, int a3) {
  if (m.one_vertex) throw NotOnBoundary("one-vertex map has no boundary");
  if (a1 == a3) throw NotOnBoundary("coinciding split vertices");
  std::vector<Dart> ext = m.face_orbit(m.root ^ 1);
  int i1 = -1, i3 = -1;
  for (int i = 0; i < (int)ext.size(); ++i) {
    int v = m.vert[ext[i]];
    if (v == a1 && i1 == -1) i1 = i;
    if (v == a3 && i3 == -1) i3 = i;
  }
  if (i1 == -1 || i3 == -1)
    throw NotOnBoundary("split vertex not on the external face");

  // dual vertex of each dart's left face: internal faces first, then the two
  // outer halves obtained by splitting the boundary orbit at i1 and i3
  std::vector<int> face_id(m.n_faces, -1);
  int nf = 0;
  for (int f = 0; f < m.n_faces; ++f)
    if (f != m.external_face) face_id[f] = nf++;
  DualPair out;
  out.a2 = nf;
  out.a4 = nf + 1;
  std::vector<int> dual_of(m.n_darts(), -1);
  for (Dart d = 0; d < m.n_darts(); ++d)
    if (m.face[d] != m.external_face) dual_of[d] = face_id[m.face[d]];
  const int L = (int)ext.size();
  for (int i = 0; i < L; ++i) {
    bool first_arc = (i1 <= i3) ? (i >= i1 && i < i3) : (i >= i1 || i < i3);
    dual_of[ext[i]] = first_arc ? out.a2 : out.a4;
  }

  out.primal.n_vertices = m.n_vertices;
  for (Dart d = 0; d < m.n_darts(); d += 2)
    out.primal.edges.push_back({m.vert[d], m.vert[d ^ 1]});
  out.primal.a = {a1};
  out.primal.b = {a3};

  out.dual.n_vertices = nf + 2;
  for (Dart d = 0; d < m.n_darts(); d += 2)
    out.dual.edges.push_back({dual_of[d], dual_of[d ^ 1]});
  out.dual.a = {out.a2};
  out.dual.b = {out.a4};
  return out;
}

Resistance arc_resistance(const Quadrangulation& q, int p1, int p2, int p3,
                          int p4, long long exact_edge_limit) {
  if (p1 < 1 || p2 < 1 || p3 < 1 || p4 < 1)
    throw DomainError("arc sizes must be positive");
  int p = p1 + p2 + p3 + p4 - 2;
  if (q.half_perimeter() != p)
    throw DomainError("arc sizes do not add up to the perimeter");
  if (!is_simple_boundary(q.map))
    throw NotSimpleBoundary("arc resistance needs a simple boundary");

  // boundary walk from the root with the external face on the right; the
  // walk starts at a white vertex and alternates colors
  std::vector<Dart> bw;
  Dart t = q.map.root;
  do {
    bw.push_back(t);
    t = q.map.prev[t ^ 1];
  } while (t != q.map.root);
  if ((int)bw.size() != 2 * p)
    throw InvariantViolation("boundary length does not match the perimeter");

  TutteImage ti = tutte_image(q);
  if (ti.no_internal_face) throw NoInternalFace("image has no edges");
  std::vector<int> image_of(q.map.n_vertices, -1);
  for (int v = 0; v < ti.map.n_vertices; ++v) image_of[ti.q_vertex[v]] = v;

  Network net;
  net.n_vertices = ti.map.n_vertices;
  for (Dart d = 0; d < ti.map.n_darts(); d += 2)
    net.edges.push_back({ti.map.vert[d], ti.map.vert[d ^ 1]});
  // whites of the first arc (walk positions 0..2*p1-2) and of the third arc
  for (int i = 0; i <= 2 * p1 - 2; i += 2) {
    int w = image_of[q.map.vert[bw[i]]];
    if (w < 0) throw InvariantViolation("boundary white missing in the image");
    net.a.push_back(w);
  }
  int s3 = 2 * p1 + 2 * p2 - 2;
  for (int i = s3; i <= s3 + 2 * p3 - 2; i += 2) {
    int w = image_of[q.map.vert[bw[i]]];
    if (w < 0) throw InvariantViolation("boundary white missing in the image");
    net.b.push_back(w);
  }
  return effective_resistance(net, exact_edge_limit);
}

BlockResistance block_resistance(int p1, int p2, int p3, int p4, Rng& rng) {
  int p = p1 + p2 + p3 + p4 - 2;
  if (p < 2) throw DomainError("block perimeter too small");
  Quadrangulation q = sample_boltzmann_quadrangulation(p, rng);
  BlockResistance out;
  out.r = arc_resistance(q, p1, p2, p3, p4);
  out.edges = q.n_internal_faces();
  out.vertices = 0;
  for (uint8_t c : q.color)
    if (c == 0) ++out.vertices;
  return out;
}

}  // namespace planarpeel

#include "planarpeel/experiments.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <queue>
#include <set>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "planarpeel/errors.hpp"
#include "planarpeel/resistance.hpp"

namespace planarpeel {

namespace {

void hash_u64(uint64_t& h, uint64_t x) {
  for (int i = 0; i < 8; ++i) {
    h ^= (x >> (8 * i)) & 0xff;
    h *= 0x100000001b3ULL;  // fnv-1a
  }
}

std::string fmt_value(double v) {
  char buf[40];
  double r = std::nearbyint(v);
  if (r == v && std::fabs(v) < 9e15) {
    snprintf(buf, sizeof buf, "%lld", (long long)r);
  } else {
    snprintf(buf, sizeof buf, "%.17g", v);
  }
  return buf;
}

using Row = ExperimentRecord::Row;

// replica-level parallelism; rows are concatenated in replica order so the
// output does not depend on the thread count
template <class Fn>
std::vector<Row> run_replicas(const ExperimentConfig& cfg, Fn fn) {
  if (cfg.replicas < 1) throw DomainError("need at least one replica");
  int nthreads = std::max(1, cfg.threads);
  std::vector<std::vector<Row>> per(cfg.replicas);
  std::atomic<long long> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto work = [&] {
    for (;;) {
      long long i = next.fetch_add(1);
      if (i >= cfg.replicas) return;
      try {
        Rng rng(cfg.seed, (uint64_t)i);
        per[i] = fn(i, rng);
        for (auto& r : per[i]) r.replica = i;
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!err) err = std::current_exception();
        return;
      }
    }
  };
  if (nthreads == 1) {
    work();
  } else {
    std::vector<std::thread> ts;
    for (int t = 0; t < nthreads; ++t) ts.emplace_back(work);
    for (auto& t : ts) t.join();
  }
  if (err) std::rethrow_exception(err);
  std::vector<Row> out;
  for (auto& rs : per) out.insert(out.end(), rs.begin(), rs.end());
  return out;
}

}  // namespace

uint64_t config_hash(const ExperimentConfig& cfg) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : cfg.name) hash_u64(h, (uint8_t)c);
  hash_u64(h, cfg.seed);
  hash_u64(h, (uint64_t)cfg.replicas);
  for (int r : cfg.radii) hash_u64(h, (uint64_t)r);
  hash_u64(h, (uint64_t)cfg.steps);
  hash_u64(h, (uint64_t)cfg.k);
  hash_u64(h, (uint64_t)cfg.budget);
  hash_u64(h, (uint64_t)cfg.tail_cutoff);
  hash_u64(h, cfg.exact ? 1 : 0);
  return h;
}

std::string ExperimentRecord::csv() const {
  std::string s;
  char head[128];
  snprintf(head, sizeof head, "# name=%s\n# version=%s\n# config_hash=%016" PRIx64 "\n",
           config.name.c_str(), kVersion, config_hash(config));
  s += head;
  s += "replica,seed";
  for (const auto& c : columns) s += "," + c;
  s += ",budget_hit\n";
  for (const auto& r : rows) {
    s += std::to_string(r.replica) + "," + std::to_string(config.seed);
    for (double v : r.v) s += "," + fmt_value(v);
    s += r.budget_hit ? ",1\n" : ",0\n";
  }
  return s;
}

std::string ExperimentRecord::json_sidecar() const {
  nlohmann::json j;
  j["name"] = config.name;
  j["seed"] = config.seed;
  j["replicas"] = config.replicas;
  j["radii"] = config.radii;
  j["steps"] = config.steps;
  j["k"] = config.k;
  j["budget"] = config.budget;
  j["tail_cutoff"] = config.tail_cutoff;
  j["exact"] = config.exact;
  j["out_path"] = config.out_path;
  char h[24];
  snprintf(h, sizeof h, "%016" PRIx64, config_hash(config));
  j["config_hash"] = h;
  j["version"] = kVersion;
  j["columns"] = columns;
  j["n_rows"] = rows.size();
  return j.dump(2) + "\n";
}

void ExperimentRecord::write() const {
  if (config.out_path.empty()) return;
  std::ofstream f(config.out_path, std::ios::binary);
  if (!f) throw DomainError("cannot open output file " + config.out_path);
  f << csv();
  std::string side = config.out_path + ".json";
  std::ofstream g(side, std::ios::binary);
  if (!g) throw DomainError("cannot open output file " + side);
  g << json_sidecar();
}

bool ExperimentRecord::any_budget_hit() const {
  for (const auto& r : rows)
    if (r.budget_hit) return true;
  return false;
}

std::vector<double> ExperimentRecord::column(const std::string& name) const {
  size_t idx = columns.size();
  for (size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) idx = i;
  if (idx == columns.size()) throw DomainError("no column named " + name);
  std::vector<double> out;
  for (const auto& r : rows)
    if (!r.budget_hit) out.push_back(r.v[idx]);
  return out;
}

// ---------------------------------------------------------------------------
// resistance against the hull complement
// ---------------------------------------------------------------------------

ExperimentRecord resistance_vs_radius(const ExperimentConfig& cfg) {
  if (cfg.radii.empty()) throw DomainError("no radii requested");
  for (int r : cfg.radii)
    if (r < 1 || r > 64) throw DomainError("radii must lie in [1, 64]");
  int rmax = *std::max_element(cfg.radii.begin(), cfg.radii.end());
  HalfPlaneLaw law = halfplane_case_distribution(cfg.tail_cutoff);

  ExperimentRecord rec;
  rec.config = cfg;
  rec.columns = {"r",          "resistance",        "res_exact",
                 "ball_whites", "hull_whites",      "complement_whites",
                 "image_edges", "faces_revealed"};

  rec.rows = run_replicas(cfg, [&](long long, Rng& rng) {
    std::vector<Row> rows;
    Frontier f(&law);
    bool hit = false;
    try {
      f = reveal_hull(2 * rmax + 2, rng, law, cfg.budget);
    } catch (const BudgetExceeded&) {
      hit = true;
    }
    if (hit) {
      for (int r : cfg.radii) {
        Row row;
        row.v = {(double)r, 0, 0, 0, 0, 0, 0, 0};
        row.budget_hit = true;
        rows.push_back(row);
      }
      return rows;
    }
    const MapBuilder& b = f.builder();
    std::vector<Dart> dmap;
    std::vector<int32_t> vmap;
    PlanarMap m = f.freeze(&dmap, &vmap);
    std::vector<uint8_t> color = f.freeze_colors(m, vmap);

    // white image graph: one edge per internal quadrangle, joining its two
    // white corners
    std::vector<int> wid(m.n_vertices, -1);
    int nw = 0;
    for (int v = 0; v < m.n_vertices; ++v)
      if (color[v] == 0) wid[v] = nw++;
    int rv = b.vrt[f.root_dart()];
    if (vmap[rv] < 0 || wid[vmap[rv]] < 0)
      throw InvariantViolation("root white missing from the frozen hull");
    int root = wid[vmap[rv]];
    std::vector<Dart> fd(m.n_faces, -1);
    for (Dart d = 0; d < m.n_darts(); ++d)
      if (fd[m.face[d]] == -1) fd[m.face[d]] = d;
    std::vector<std::pair<int32_t, int32_t>> edges;
    for (int fc = 0; fc < m.n_faces; ++fc) {
      if (fc == m.external_face) continue;
      auto orb = m.face_orbit(fd[fc]);
      if (orb.size() != 4)
        throw InvariantViolation("hull face is not a quadrangle");
      int off = color[m.vert[orb[0]]] == 0 ? 0 : 1;
      edges.push_back({wid[m.vert[orb[off]]], wid[m.vert[orb[off + 2]]]});
    }
    std::vector<std::vector<int>> adj(nw);
    for (auto [u, v] : edges) {
      adj[u].push_back(v);
      adj[v].push_back(u);
    }
    std::vector<int> dist(nw, -1);
    std::queue<int> bfs;
    dist[root] = 0;
    bfs.push(root);
    while (!bfs.empty()) {
      int v = bfs.front();
      bfs.pop();
      for (int w : adj[v])
        if (dist[w] == -1) {
          dist[w] = dist[v] + 1;
          bfs.push(w);
        }
    }
    // whites still on the frontier mark the unbounded side of the window
    std::vector<uint8_t> outer(nw, 0);
    for (int v = 0; v < b.n_vertices(); ++v)
      if (f.on_frontier(v) && vmap[v] >= 0 && wid[vmap[v]] >= 0)
        outer[wid[vmap[v]]] = 1;

    for (int r : cfg.radii) {
      // hull of radius r: the ball plus the complement components that do
      // not reach the frontier
      std::vector<int> comp(nw, -1);
      std::vector<uint8_t> comp_outer;
      for (int v = 0; v < nw; ++v) {
        if (comp[v] != -1 || (dist[v] >= 0 && dist[v] <= r)) continue;
        int id = (int)comp_outer.size();
        comp_outer.push_back(0);
        std::queue<int> q;
        comp[v] = id;
        q.push(v);
        while (!q.empty()) {
          int x = q.front();
          q.pop();
          if (outer[x]) comp_outer[id] = 1;
          for (int w : adj[x])
            if (comp[w] == -1 && !(dist[w] >= 0 && dist[w] <= r)) {
              comp[w] = id;
              q.push(w);
            }
        }
      }
      long long ball = 0, hull = 0, complement = 0;
      Network net;
      net.n_vertices = nw;
      net.edges = edges;
      net.a = {root};
      for (int v = 0; v < nw; ++v) {
        bool in_ball = dist[v] >= 0 && dist[v] <= r;
        if (in_ball) ++ball;
        if (in_ball || !comp_outer[comp[v]]) {
          ++hull;
        } else {
          ++complement;
          net.b.push_back(v);
        }
      }
      Row row;
      if (net.b.empty()) {
        // the window failed to isolate the hull; flag rather than guess
        row.v = {(double)r, 0, 0, (double)ball, (double)hull, 0,
                 (double)edges.size(), (double)f.faces_revealed()};
        row.budget_hit = true;
      } else {
        Resistance res =
            effective_resistance(net, cfg.exact ? (1LL << 40) : 0);
        row.v = {(double)r,           res.value_d,
                 res.exact ? 1.0 : 0.0, (double)ball,
                 (double)hull,        (double)complement,
                 (double)edges.size(), (double)f.faces_revealed()};
      }
      rows.push_back(row);
    }
    return rows;
  });
  rec.write();
  return rec;
}

// ---------------------------------------------------------------------------
// simple random walk on the lazily revealed image
// ---------------------------------------------------------------------------

std::vector<Dart> image_neighbor_darts(Frontier& f, Dart at_v, Rng& rng,
                                       long long budget) {
  MapBuilder& b = f.builder();
  int v = b.vrt[at_v];
  if (b.vcolor[v] != 0) throw DomainError("image walk needs a white vertex");
  reveal_star(f, v, rng, budget);
  std::vector<Dart> out;
  Dart x = at_v;
  do {
    // skip the external face below the line: its boundary darts run right
    // to left along the line
    bool below = f.is_line_dart(x) &&
                 f.line_coord(b.vrt[x]) > f.line_coord(b.vrt[x ^ 1]);
    if (!below) out.push_back(b.phi(b.phi(x)));
    x = b.nxt[x];
  } while (x != at_v);
  if (out.empty()) throw InvariantViolation("white with no incident face");
  for (Dart y : out)
    if (b.vcolor[b.vrt[y]] != 0)
      throw InvariantViolation("image neighbor is not white");
  return out;
}

ExperimentRecord srw_run(const ExperimentConfig& cfg) {
  if (cfg.steps < 0) throw DomainError("negative step count");
  HalfPlaneLaw law = halfplane_case_distribution(cfg.tail_cutoff);
  ExperimentRecord rec;
  rec.config = cfg;
  rec.columns = {"steps_done", "returns_to_root", "range", "displacement"};
  rec.rows = run_replicas(cfg, [&](long long, Rng& rng) {
    Frontier f(&law);
    MapBuilder& b = f.builder();
    Dart cur = f.root_dart();
    int root = b.vrt[cur];
    std::unordered_map<int, std::vector<int>> adj;  // revealed image edges
    std::unordered_set<int> range{root};
    long long returns = 0, done = 0;
    bool hit = false;
    for (long long t = 0; t < cfg.steps; ++t) {
      long long left = cfg.budget - f.faces_revealed();
      if (left <= 0) {
        hit = true;
        break;
      }
      std::vector<Dart> nb;
      try {
        nb = image_neighbor_darts(f, cur, rng, left);
      } catch (const BudgetExceeded&) {
        hit = true;
        break;
      }
      int v = b.vrt[cur];
      if (!adj.count(v)) {
        auto& lst = adj[v];
        for (Dart y : nb) lst.push_back(b.vrt[y]);
      }
      cur = nb[rng.next_below(nb.size())];
      ++done;
      int w = b.vrt[cur];
      range.insert(w);
      if (w == root) ++returns;
    }
    // displacement within the subgraph whose stars were revealed
    std::unordered_map<int, std::vector<int>> und;
    for (auto& [v, lst] : adj)
      for (int w : lst) {
        und[v].push_back(w);
        und[w].push_back(v);
      }
    std::unordered_map<int, int> dist{{root, 0}};
    std::queue<int> bfs;
    bfs.push(root);
    while (!bfs.empty()) {
      int v = bfs.front();
      bfs.pop();
      auto it = und.find(v);
      if (it == und.end()) continue;
      for (int w : it->second)
        if (!dist.count(w)) {
          dist[w] = dist[v] + 1;
          bfs.push(w);
        }
    }
    int final_v = b.vrt[cur];
    if (!dist.count(final_v))
      throw InvariantViolation("walk position unreachable along walk edges");
    Row row;
    row.v = {(double)done, (double)returns, (double)range.size(),
             (double)dist[final_v]};
    row.budget_hit = hit;
    return std::vector<Row>{row};
  });
  rec.write();
  return rec;
}

// ---------------------------------------------------------------------------
// boundary distance by red diagonals
// ---------------------------------------------------------------------------

namespace {

const FiniteCaseLaw& finite_law_cached(int p) {
  static std::mutex mu;
  static std::map<int, FiniteCaseLaw> cache;
  std::lock_guard<std::mutex> lk(mu);
  auto it = cache.find(p);
  if (it == cache.end()) it = cache.emplace(p, finite_case_distribution(p)).first;
  return it->second;
}

std::vector<Dart> hole_orbit(const MapBuilder& b, Dart rep) {
  std::vector<Dart> out;
  Dart x = rep;
  do {
    out.push_back(x);
    x = b.phi(x);
  } while (x != rep);
  return out;
}

}  // namespace

BoundaryDistanceSample boundary_distance(int k, Rng& rng,
                                         const HalfPlaneLaw& law,
                                         long long budget) {
  if (k < 1) throw DomainError("boundary distance needs k >= 1");
  Frontier f(&law);
  MapBuilder& b = f.builder();

  // line vertices u_0 .. u_2k and the line edge darts between them, with the
  // unexplored side on the left
  std::vector<int> u(2 * k + 1);
  std::vector<Dart> line_edge(2 * k);
  {
    auto root = f.root_edge();
    for (int i = 0; i < 2 * k; ++i) {
      auto it = f.at_offset(root, i);
      line_edge[i] = it->d;
      u[i] = b.vrt[it->d];
    }
    u[2 * k] = b.vrt[line_edge[2 * k - 1] ^ 1];
  }

  std::vector<std::pair<int, int>> diag;
  std::set<int> touched;
  long long steps = 0;
  auto record_face = [&](Dart pd) {
    int w0 = b.vrt[pd];
    int w2 = b.vrt[b.phi(b.phi(pd))];
    if (b.vcolor[w0] != 0 || b.vcolor[w2] != 0)
      throw InvariantViolation("face diagonal is not white-white");
    diag.push_back({w0, w2});
    touched.insert(w0);
    touched.insert(w2);
  };

  // all finite holes left open so far (the exploration never fills them)
  std::vector<std::pair<Dart, int>> open;

  for (int j = 1; j <= k; ++j) {
    int tgt = u[2 * j];
    Dart e1 = line_edge[2 * j - 1];  // between u_{2j-1} and u_{2j}
    while (!touched.count(tgt)) {
      if (++steps > budget)
        throw BudgetExceeded("boundary distance exploration budget", steps);
      // component of the undiscovered region containing e1: the half plane
      // above the frontier, or one of the open holes
      if (f.on_frontier(b.vrt[e1]) && f.entry_of_vertex(b.vrt[e1])->d == e1) {
        auto itL = f.at_offset(f.entry_of_vertex(b.vrt[e1]), -1);
        Dart pd = itL->d;
        auto sr = f.peel(itL, rng, /*fill=*/false);
        record_face(pd);
        for (const auto& h : sr.holes) open.push_back({h.rep, h.half_perim});
        continue;
      }
      size_t hi = open.size();
      size_t ie = 0;
      for (size_t i = 0; i < open.size() && hi == open.size(); ++i) {
        auto orb = hole_orbit(b, open[i].first);
        for (size_t t = 0; t < orb.size(); ++t)
          if (orb[t] == e1) {
            hi = i;
            ie = t;
          }
      }
      if (hi == open.size())
        throw InvariantViolation("lost track of the marked boundary edge");
      auto [rep, hp] = open[hi];
      if (hp == 1)
        throw InvariantViolation("component exhausted before the target");
      auto orb = hole_orbit(b, rep);
      if ((int)orb.size() != 2 * hp)
        throw InvariantViolation("hole perimeter bookkeeping mismatch");
      Dart pd = orb[(ie + orb.size() - 1) % orb.size()];
      if (b.vcolor[b.vrt[pd]] != 0)
        throw InvariantViolation("peel edge has a black origin");
      const FiniteCaseLaw& flaw = finite_law_cached(hp);
      double x = rng.next_double(), acc = 0;
      const FiniteCaseLaw::Entry* pick = &flaw.entries.back();
      for (const auto& e : flaw.entries) {
        acc += to_double(e.prob);
        if (x < acc) {
          pick = &e;
          break;
        }
      }
      if (pick->zip) throw InvariantViolation("zip drawn above perimeter 2");
      auto regions = attach_in_hole(b, pd, hp, pick->a);
      record_face(pd);
      open.erase(open.begin() + hi);
      open.insert(open.end(), regions.begin(), regions.end());
    }
  }

  // distance over the recorded diagonals
  std::map<int, std::vector<int>> adj;
  for (auto [a, c] : diag) {
    adj[a].push_back(c);
    adj[c].push_back(a);
  }
  std::map<int, int> dist{{u[0], 0}};
  std::queue<int> bfs;
  bfs.push(u[0]);
  while (!bfs.empty()) {
    int v = bfs.front();
    bfs.pop();
    auto it = adj.find(v);
    if (it == adj.end()) continue;
    for (int w : it->second)
      if (!dist.count(w)) {
        dist[w] = dist[v] + 1;
        bfs.push(w);
      }
  }
  BoundaryDistanceSample out;
  out.red_steps = steps;
  auto it = dist.find(u[2 * k]);
  out.path_connected = it != dist.end();
  out.distance = out.path_connected ? it->second : -1;
  return out;
}

ExperimentRecord boundary_distance_run(const ExperimentConfig& cfg) {
  if (cfg.k < 1) throw DomainError("boundary distance needs k >= 1");
  HalfPlaneLaw law = halfplane_case_distribution(cfg.tail_cutoff);
  ExperimentRecord rec;
  rec.config = cfg;
  rec.columns = {"k", "red_steps", "distance", "path_connected"};
  rec.rows = run_replicas(cfg, [&](long long, Rng& rng) {
    Row row;
    try {
      auto s = boundary_distance(cfg.k, rng, law, cfg.budget);
      row.v = {(double)cfg.k, (double)s.red_steps, (double)s.distance,
               s.path_connected ? 1.0 : 0.0};
    } catch (const BudgetExceeded& e) {
      row.v = {(double)cfg.k, (double)e.steps_done, -1.0, 0.0};
      row.budget_hit = true;
    }
    return std::vector<Row>{row};
  });
  rec.write();
  return rec;
}

}  // namespace planarpeel

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "planarpeel/enumgf.hpp"
#include "planarpeel/peeling.hpp"
#include "planarpeel/resistance.hpp"
#include "planarpeel/rng.hpp"
#include "planarpeel/tutte.hpp"

using namespace planarpeel;

namespace {

Network path_network(int n) {
  Network net;
  net.n_vertices = n + 1;
  for (int i = 0; i < n; ++i) net.edges.push_back({i, i + 1});
  net.a = {0};
  net.b = {n};
  return net;
}

// brute-force series/parallel reduction with rational edge resistances;
// returns false when stuck (graph is not series-parallel between 0 and 1)
bool sp_reduce(int n, std::vector<std::array<int, 2>> ends,
               std::vector<Rat> res, Rat* out) {
  for (;;) {
    if (ends.size() == 1 && ((ends[0][0] == 0 && ends[0][1] == 1) ||
                             (ends[0][0] == 1 && ends[0][1] == 0))) {
      *out = res[0];
      return true;
    }
    bool progress = false;
    // drop self-loops
    for (size_t i = 0; i < ends.size(); ++i)
      if (ends[i][0] == ends[i][1]) {
        ends.erase(ends.begin() + i);
        res.erase(res.begin() + i);
        progress = true;
        break;
      }
    if (progress) continue;
    // parallel pair
    for (size_t i = 0; i < ends.size() && !progress; ++i)
      for (size_t j = i + 1; j < ends.size() && !progress; ++j) {
        if ((ends[i][0] == ends[j][0] && ends[i][1] == ends[j][1]) ||
            (ends[i][0] == ends[j][1] && ends[i][1] == ends[j][0])) {
          res[i] = res[i] * res[j] / (res[i] + res[j]);
          ends.erase(ends.begin() + j);
          res.erase(res.begin() + j);
          progress = true;
        }
      }
    if (progress) continue;
    // series vertex: degree 2, not a terminal
    std::vector<int> deg(n, 0);
    for (auto& e : ends) {
      ++deg[e[0]];
      ++deg[e[1]];
    }
    for (int v = 2; v < n && !progress; ++v) {
      if (deg[v] != 2) continue;
      int e1 = -1, e2 = -1;
      for (size_t i = 0; i < ends.size(); ++i)
        if (ends[i][0] == v || ends[i][1] == v) (e1 == -1 ? e1 : e2) = (int)i;
      int u = ends[e1][0] == v ? ends[e1][1] : ends[e1][0];
      int w = ends[e2][0] == v ? ends[e2][1] : ends[e2][0];
      ends[e1] = {u, w};
      res[e1] = res[e1] + res[e2];
      ends.erase(ends.begin() + e2);
      res.erase(res.begin() + e2);
      progress = true;
    }
    if (!progress) return false;
  }
}

std::vector<int> boundary_vertices(const PlanarMap& m) {
  std::set<int> vs;
  for (Dart d : m.face_orbit(m.root ^ 1)) vs.insert(m.vert[d]);
  return {vs.begin(), vs.end()};
}

}  // namespace

TEST_CASE("closed-form resistances") {
  CHECK(effective_resistance(path_network(1)).value == 1);
  CHECK(effective_resistance(path_network(5)).value == 5);
  Network cyc;  // 4-cycle, opposite corners: two 2-paths in parallel
  cyc.n_vertices = 4;
  cyc.edges = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
  cyc.a = {0};
  cyc.b = {2};
  CHECK(effective_resistance(cyc).value == 1);
  Network tri;
  tri.n_vertices = 3;
  tri.edges = {{0, 1}, {1, 2}, {2, 0}};
  tri.a = {0};
  tri.b = {1};
  CHECK(effective_resistance(tri).value == rat(2, 3));
  // contracting a terminal set: triangle with b = {1, 2} collapses to 1 || 1
  tri.b = {1, 2};
  CHECK(effective_resistance(tri).value == rat(1, 2));
  // parallel edges add conductance, self-loops are ignored
  Network par;
  par.n_vertices = 2;
  par.edges = {{0, 1}, {0, 1}, {0, 1}, {0, 0}};
  par.a = {0};
  par.b = {1};
  CHECK(effective_resistance(par).value == rat(1, 3));
}

TEST_CASE("bad terminal configurations") {
  Network net = path_network(2);
  net.b = {0};
  CHECK_THROWS_AS(effective_resistance(net), DomainError);
  net = path_network(2);
  net.b.clear();
  CHECK_THROWS_AS(effective_resistance(net), DomainError);
  Network disc;
  disc.n_vertices = 4;
  disc.edges = {{0, 1}, {2, 3}};
  disc.a = {0};
  disc.b = {3};
  CHECK_THROWS_AS(effective_resistance(disc), DisconnectedTerminals);
}

TEST_CASE("series-parallel oracle") {
  Rng rng(7101);
  for (int trial = 0; trial < 200; ++trial) {
    // grow a series-parallel network by edge subdivision and duplication
    int n = 2;
    std::vector<std::array<int, 2>> ends = {{0, 1}};
    int target = 2 + (int)rng.next_below(9);
    while ((int)ends.size() < target) {
      int e = (int)rng.next_below(ends.size());
      if (rng.next_below(2)) {
        ends.push_back(ends[e]);  // parallel
      } else {
        int mid = n++;
        int b = ends[e][1];
        ends[e][1] = mid;
        ends.push_back({mid, b});  // series
      }
    }
    Network net;
    net.n_vertices = n;
    for (auto& e : ends) net.edges.push_back({e[0], e[1]});
    net.a = {0};
    net.b = {1};
    Rat expect;
    REQUIRE(sp_reduce(n, ends, std::vector<Rat>(ends.size(), Rat(1)), &expect));
    CHECK(effective_resistance(net).value == expect);
  }
}

TEST_CASE("Rayleigh monotonicity under edge deletion") {
  Rng rng(7102);
  for (int trial = 0; trial < 60; ++trial) {
    int n = 4 + (int)rng.next_below(3);
    Network net;
    net.n_vertices = n;
    for (int i = 1; i < n; ++i)  // random spanning tree keeps it connected
      net.edges.push_back({(int)rng.next_below(i), i});
    int extra = (int)rng.next_below(5);
    for (int i = 0; i < extra; ++i) {
      int u = (int)rng.next_below(n), v = (int)rng.next_below(n);
      if (u != v) net.edges.push_back({u, v});
    }
    net.a = {0};
    net.b = {1};
    Rat r0 = effective_resistance(net).value;
    for (size_t e = 0; e < net.edges.size(); ++e) {
      Network del = net;
      del.edges.erase(del.edges.begin() + e);
      try {
        Rat rd = effective_resistance(del).value;
        CHECK(rd >= r0);
      } catch (const DisconnectedTerminals&) {
      }
    }
  }
}

TEST_CASE("conjugate-gradient path agrees with exact values") {
  Network p = path_network(3000);  // above the exact threshold
  Resistance r = effective_resistance(p);
  CHECK(!r.exact);
  CHECK(r.value_d == doctest::Approx(3000.0).epsilon(1e-9));
  // force the float path on small exactly-solvable networks
  Rng rng(7103);
  for (int trial = 0; trial < 20; ++trial) {
    Network net;
    net.n_vertices = 6;
    for (int i = 1; i < 6; ++i) net.edges.push_back({(int)rng.next_below(i), i});
    net.edges.push_back({0, 5});
    net.edges.push_back({(int)rng.next_below(6), (int)rng.next_below(6)});
    net.a = {0};
    net.b = {5};
    Resistance ex = effective_resistance(net);
    Resistance fl = effective_resistance(net, 0);
    REQUIRE(ex.exact);
    REQUIRE(!fl.exact);
    CHECK(fl.value_d == doctest::Approx(ex.value_d).epsilon(1e-9));
  }
}

TEST_CASE("dual of a single edge and of a cycle") {
  PlanarMap edge;
  edge.next = {0, 1};
  edge.root = 0;
  edge.finalize();
  auto dp = dual_network(edge, edge.vert[0], edge.vert[1]);
  CHECK(dp.dual.edges.size() == 1);
  CHECK(effective_resistance(dp.primal).value == 1);
  CHECK(effective_resistance(dp.dual).value == 1);

  MapBuilder b;
  auto es = b.make_cycle(3, 0);
  PlanarMap tri = b.freeze(es[0]);
  auto bd = boundary_vertices(tri);
  REQUIRE(bd.size() == 3);
  auto dp2 = dual_network(tri, bd[0], bd[1]);
  CHECK(dp2.dual.edges.size() == 3);
  Rat r = effective_resistance(dp2.primal).value;
  Rat rs = effective_resistance(dp2.dual).value;
  CHECK(r == rat(2, 3));
  CHECK(rs == rat(3, 2));
}

TEST_CASE("duality product is exactly one on all small maps") {
  std::vector<PlanarMap> maps;
  for (auto [n, p] : std::vector<std::pair<int, int>>{
           {1, 1}, {2, 1}, {3, 1}, {1, 2}, {2, 2}, {3, 2}, {1, 3}, {2, 3}}) {
    for (const auto& q : enumerate_quadrangulations(n, p)) {
      maps.push_back(q.map);  // 2n + p <= 8 edges
      auto ti = tutte_image(q);
      for (const auto& bead : beads(ti.map).beads)
        if (!bead.map.one_vertex) maps.push_back(bead.map);
    }
  }
  int pairs = 0;
  for (const auto& m : maps) {
    auto bd = boundary_vertices(m);
    for (size_t i = 0; i < bd.size(); ++i)
      for (size_t j = i + 1; j < bd.size(); ++j) {
        auto dp = dual_network(m, bd[i], bd[j]);
        CHECK(dp.dual.edges.size() == dp.primal.edges.size());
        Rat r = effective_resistance(dp.primal).value;
        Rat rs = effective_resistance(dp.dual).value;
        CHECK(r * rs == 1);
        ++pairs;
      }
  }
  CHECK(pairs > 900);
}

TEST_CASE("arc resistance and its monotonicity coupling") {
  Rng rng(7104);
  int checked = 0;
  while (checked < 40) {
    Quadrangulation q = sample_boltzmann_quadrangulation(6, rng);
    if (q.n_internal_faces() == 0) continue;
    Rat base = arc_resistance(q, 1, 3, 1, 3).value;
    CHECK(base > 0);
    // enlarging the first terminal arc at the second arc's expense can only
    // lower the resistance; the third arc's position is unchanged
    Rat wider = arc_resistance(q, 2, 2, 1, 3).value;
    CHECK(wider <= base);
    // same for the third arc at the fourth arc's expense
    Rat wider3 = arc_resistance(q, 1, 3, 2, 2).value;
    CHECK(wider3 <= base);
    ++checked;
  }
}

TEST_CASE("block resistance sampler") {
  Rng rng(7105);
  std::set<double> seen;
  for (int i = 0; i < 25; ++i) {
    auto br = block_resistance(2, 2, 2, 2, rng);
    CHECK(br.r.value_d > 0);
    if (br.r.exact) CHECK(br.r.value > 0);
    CHECK(br.edges > 0);
    CHECK(br.vertices > 0);
    seen.insert(br.r.value_d);
  }
  CHECK(seen.size() > 3);  // the law is not degenerate
  CHECK_THROWS_AS(block_resistance(1, 1, 1, 0, rng), DomainError);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "planarpeel/map.hpp"
#include "planarpeel/quad.hpp"

using namespace planarpeel;

namespace {

// 4-cycle via build_map with an explicit (non-implicit) twin pairing
PlanarMap four_cycle() {
  // darts i (v_i -> v_{i+1}) and i+4 (reverse), i = 0..3
  std::vector<Dart> tw = {4, 5, 6, 7, 0, 1, 2, 3};
  std::vector<Dart> nx(8);
  for (int i = 0; i < 4; ++i) {
    nx[i] = (i + 3) % 4 + 4;  // at v_i: out -> in
    nx[(i + 3) % 4 + 4] = i;  // in -> out
  }
  return build_map(8, tw, nx, 0);
}

}  // namespace

TEST_CASE("single edge map") {
  std::vector<Dart> tw = {1, 0};
  std::vector<Dart> nx = {0, 1};
  PlanarMap m = build_map(2, tw, nx, 0);
  CHECK(m.n_vertices == 2);
  CHECK(m.n_edges() == 1);
  CHECK(m.n_faces == 1);
  CHECK(m.face_degree(0) == 2);
}

TEST_CASE("4-cycle invariants") {
  PlanarMap m = four_cycle();
  CHECK(m.n_vertices == 4);
  CHECK(m.n_edges() == 4);
  CHECK(m.n_faces == 2);
  CHECK(m.face_degree(0) == 4);
  CHECK(m.face_degree(1) == 4);
  CHECK(is_simple_boundary(m));
  CHECK(boundary_walk(m).size() == 4);
}

TEST_CASE("fixed point twin rejected") {
  std::vector<Dart> tw = {0, 1};
  std::vector<Dart> nx = {0, 1};
  CHECK_THROWS_AS(build_map(2, tw, nx, 0), NonInvolutiveTwin);
}

TEST_CASE("disconnected rejected") {
  // two separate single edges
  std::vector<Dart> tw = {1, 0, 3, 2};
  std::vector<Dart> nx = {0, 1, 2, 3};
  CHECK_THROWS_AS(build_map(4, tw, nx, 0), Disconnected);
}

TEST_CASE("path of two edges has non-simple boundary") {
  MapBuilder b;
  int u = b.new_vertex(), v = b.new_vertex(), w = b.new_vertex();
  Dart e1 = b.new_edge(u, v);
  Dart e2 = b.new_edge(v, w);
  b.link_before(e2, e1 ^ 1);
  PlanarMap m = b.freeze(e1);
  CHECK(m.n_faces == 1);
  CHECK(boundary_walk(m).size() == 4);
  CHECK(!is_simple_boundary(m));
}

TEST_CASE("builder cycle matches build_map cycle") {
  MapBuilder b;
  auto es = b.make_cycle(4);
  PlanarMap m = b.freeze(es[0]);
  CHECK(canonical_code(m) == canonical_code(four_cycle()));
}

TEST_CASE("insert_diagonal splits a face") {
  MapBuilder b;
  auto es = b.make_cycle(4);
  // diagonal across the square between origins of es[0] and es[2]
  b.insert_diagonal(es[0], es[2]);
  PlanarMap m = b.freeze(es[0]);
  CHECK(m.n_vertices == 4);
  CHECK(m.n_edges() == 5);
  CHECK(m.n_faces == 3);
  // two triangles and the intact square side
  std::vector<int> degs;
  for (int f = 0; f < 3; ++f) degs.push_back(m.face_degree(f));
  std::sort(degs.begin(), degs.end());
  CHECK(degs == std::vector<int>{3, 3, 4});
}

TEST_CASE("insert_pendant and remove_edge round-trip") {
  MapBuilder b;
  auto es = b.make_cycle(4);
  auto before = canonical_code(b.freeze(es[0]));
  Dart p = b.insert_pendant(es[1]);
  PlanarMap with = b.freeze(es[0]);
  CHECK(with.n_edges() == 5);
  CHECK(with.n_faces == 2);  // pendant edge lives inside one face
  b.remove_edge(p);
  CHECK(canonical_code(b.freeze(es[0])) == before);
}

TEST_CASE("ball on a single quadrangular face") {
  MapBuilder b;
  auto es = b.make_cycle(4);
  PlanarMap m = b.freeze(es[0]);
  CHECK(ball(m, 2).map.n_darts() == m.n_darts());  // whole map
  CHECK(ball(m, 1).map.is_one_vertex());           // far corner at distance 2
  CHECK(ball(m, 0).map.is_one_vertex());
}

TEST_CASE("ball monotone and hull fills pockets") {
  // 3x1 strip of quadrangles; middle face only reachable within r of left root
  MapBuilder b;
  auto es = b.make_cycle(8);
  // split the octagon into 2 quads with one chord
  b.insert_diagonal(es[2], es[7]);  // chord v2 - v7
  PlanarMap m = b.freeze(es[0]);
  CHECK(m.n_faces == 3);
  for (int r = 0; r < 5; ++r) {
    auto br = ball(m, r), br1 = ball(m, r + 1);
    CHECK(br.map.n_darts() <= br1.map.n_darts());
  }
  CHECK(hull(m, 1).map.n_darts() >= ball(m, 1).map.n_darts());
  CHECK(hull(m, 8).map.n_darts() == m.n_darts());
}

TEST_CASE("hull strictly larger when complement pocket is finite") {
  // square with an inner square joined by a quad ring: ball r=1 of root keeps
  // only faces near root; inner pocket gets filled by the hull
  MapBuilder b;
  auto outer = b.make_cycle(4);
  // inner vertex joined to all four corners: wheel, faces = 4 triangles
  Dart p = b.insert_pendant(outer[0]);
  Dart c_dart = p ^ 1;  // dart at the hub on the still-open face
  for (int i = 1; i < 4; ++i) {
    Dart nd = b.insert_diagonal(outer[i], c_dart);
    c_dart = nd ^ 1;
  }
  PlanarMap m = b.freeze(outer[0]);
  CHECK(m.n_faces == 5);
  auto h1 = hull(m, 1);
  auto b1 = ball(m, 1);
  CHECK(h1.map.n_darts() >= b1.map.n_darts());
  // complement of every hull has no finite component
  for (int r = 0; r <= 3; ++r) {
    auto h = hull(m, r);
    CHECK(h.map.n_darts() <= m.n_darts());
  }
}

TEST_CASE("canonical code is a root-preserving isomorphism certificate") {
  // same map built with two different dart labelings
  MapBuilder b1;
  auto e1 = b1.make_cycle(4);
  b1.insert_diagonal(e1[0], e1[2]);
  PlanarMap m1 = b1.freeze(e1[0]);

  MapBuilder b2;
  auto e2 = b2.make_cycle(4);
  Dart d = b2.insert_diagonal(e2[2], e2[0]);
  (void)d;
  PlanarMap m2 = b2.freeze(e2[0]);
  CHECK(canonical_code(m1) == canonical_code(m2));

  // moving the root breaks equality here (diagonal breaks the symmetry)
  PlanarMap m3 = b2.freeze(e2[1]);
  CHECK(canonical_code(m1) != canonical_code(m3));
}

TEST_CASE("canonical code vs exhaustive re-rooting on small maps") {
  MapBuilder b;
  auto es = b.make_cycle(6);
  b.insert_diagonal(es[0], es[3]);
  PlanarMap base = b.freeze(es[0]);
  // two rootings are isomorphic iff their codes agree; the 6-cycle with a
  // diagonal from the root has a reflection symmetry pairing up rootings
  int classes = 0;
  std::vector<std::vector<int32_t>> seen;
  for (Dart r = 0; r < (Dart)b.n_darts_total(); ++r) {
    auto code = canonical_code(b.freeze(r));
    if (std::find(seen.begin(), seen.end(), code) == seen.end()) {
      seen.push_back(code);
      ++classes;
    }
  }
  CHECK(classes > 1);
  CHECK(classes <= b.n_darts_total());
}

TEST_CASE("local distance conventions") {
  MapBuilder b1;
  auto e1 = b1.make_cycle(4);
  PlanarMap m1 = b1.freeze(e1[0]);
  CHECK(local_distance(m1, m1) == 0.0);

  MapBuilder b2;
  auto e2 = b2.make_cycle(4);
  b2.insert_diagonal(e2[0], e2[2]);
  PlanarMap m2 = b2.freeze(e2[0]);
  double d = local_distance(m1, m2);
  CHECK(d > 0.0);
  CHECK(d <= 1.0);
}

TEST_CASE("serialization round trip") {
  MapBuilder b;
  auto es = b.make_cycle(4, 0);
  PlanarMap m = b.freeze(es[0]);
  std::string s = serialize_map(m);
  PlanarMap m2 = parse_map(s);
  CHECK(m2 == m);
  CHECK(serialize_map(m2) == s);

  // one-vertex map round trip
  PlanarMap ov;
  ov.one_vertex = true;
  ov.finalize();
  CHECK(parse_map(serialize_map(ov)).is_one_vertex());
}

TEST_CASE("quadrangulation wrapper") {
  MapBuilder b;
  auto es = b.make_cycle(4, 0);
  PlanarMap m = b.freeze(es[0]);
  Quadrangulation q = make_quadrangulation(m);
  CHECK(q.n_internal_faces() == 1);
  CHECK(q.half_perimeter() == 2);
  CHECK(!q.is_trivial);

  // trivial quadrangulation: single edge
  MapBuilder bt;
  int u = bt.new_vertex(0), v = bt.new_vertex(1);
  Dart e = bt.new_edge(u, v);
  Quadrangulation t = make_quadrangulation(bt.freeze(e));
  CHECK(t.is_trivial);
  CHECK(t.n_internal_faces() == 0);
  CHECK(t.half_perimeter() == 1);
}

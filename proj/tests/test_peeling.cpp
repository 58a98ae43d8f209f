#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "planarpeel/enumgf.hpp"
#include "planarpeel/peeling.hpp"

using namespace planarpeel;

TEST_CASE("attach_face splits a hole into a quadrangle plus regions") {
  for (int p = 1; p <= 3; ++p) {
    for (int tc = 0; tc <= 2 * p; tc += 2) {
      for (int td = 0; td <= 2 * p - 1; ++td) {
        if (td != 0 && td % 2 == 0) continue;
        if (tc != 0 && td != 0 && tc >= td) continue;
        MapBuilder b;
        auto es = b.make_cycle(2 * p, 0);
        auto regions = attach_in_hole(b, es[0], p, DiskAttachment{tc, td});
        // new face is a quadrangle
        Dart d = es[0];
        int deg = 0;
        do {
          ++deg;
          d = b.phi(d);
        } while (d != es[0]);
        CHECK(deg == 4);
        // regions have the declared sizes and sum to p + 1
        int total = 0;
        for (auto& r : regions) {
          CHECK(r.second >= 1);
          CHECK(b.vcolor[b.vrt[r.first]] == 0);  // reps start at white vertices
          int sz = 0;
          Dart x = r.first;
          do {
            ++sz;
            x = b.phi(x);
          } while (x != r.first);
          CHECK(sz == 2 * r.second);
          total += r.second;
        }
        CHECK(total == p + 1);
        // the whole structure freezes into a valid planar map
        PlanarMap m = b.freeze(es[0]);
        CHECK(m.n_faces >= 2);
      }
    }
  }
  MapBuilder b;
  auto es = b.make_cycle(4, 0);
  CHECK_THROWS_AS(attach_in_hole(b, es[0], 2, DiskAttachment{3, 0}), DomainError);
  CHECK_THROWS_AS(attach_in_hole(b, es[0], 2, DiskAttachment{2, 1}), DomainError);
}

TEST_CASE("zip_hole respects protection and the deletion choice is cosmetic") {
  // build two copies of the same digon configuration, zip with opposite
  // protections: the resulting maps are isomorphic
  std::vector<std::vector<int32_t>> codes;
  for (int keep = 0; keep < 2; ++keep) {
    MapBuilder b;
    auto es = b.make_cycle(2, 0);
    auto regions = attach_in_hole(b, es[0], 1, DiskAttachment{2, 0});
    // regions: two digons; zip the second, then the first with protection
    std::vector<uint8_t> prot(b.n_darts_total(), 0);
    prot[es[0]] = prot[es[0] ^ 1] = 1;
    prot[regions[0].first] = 1;
    zip_hole(b, regions[1].first, prot);
    std::vector<uint8_t> prot2(b.n_darts_total(), 0);
    prot2[es[0]] = prot2[es[0] ^ 1] = 1;
    if (keep) {
      Dart other = b.phi(regions[0].first);
      prot2[other] = prot2[other ^ 1] = 1;
    }
    Dart kept = zip_hole(b, regions[0].first, prot2);
    CHECK(b.alive[kept]);
    codes.push_back(canonical_code(b.freeze(es[0])));
  }
  CHECK(codes[0] == codes[1]);
}

TEST_CASE("finite peeling law is an exact probability distribution") {
  for (int p = 1; p <= 5; ++p) {
    auto law = finite_case_distribution(p);  // throws if mass != 1
    Rat total = 0;
    for (auto& e : law.entries) {
      CHECK(e.prob > 0);
      total += e.prob;
    }
    CHECK(total == 1);
  }
  auto law1 = finite_case_distribution(1);
  CHECK(finite_case_probability(law1, make_peel_case(PeelKind::Zip)) == rat(3, 4));
  CHECK(finite_case_probability(law1, make_peel_case(PeelKind::Growth)) == rat(1, 36));
  CHECK(finite_case_probability(law1, make_peel_case(PeelKind::GlueRight, 1)) ==
        rat(1, 9));
  CHECK(finite_case_probability(law1, make_peel_case(PeelKind::GlueLeft, 1)) ==
        rat(1, 9));
}

TEST_CASE("boltzmann sampler matches enumeration at perimeter 4") {
  // oracle: P(q) = 12^{-n} / Q_2 per isomorphism class
  std::map<std::vector<int32_t>, double> expect;
  for (int n = 1; n <= 3; ++n)
    for (auto& q : enumerate_quadrangulations(n, 2))
      expect[canonical_code(q.map)] = std::pow(12.0, -n) / to_double(q_partition(2));
  CHECK(expect.size() == 101);

  Rng rng(20260825);
  const int N = 20000;
  std::map<std::vector<int32_t>, int> seen;
  for (int i = 0; i < N; ++i) {
    Quadrangulation q = sample_boltzmann_quadrangulation(2, rng);
    CHECK(boundary_walk(q.map).size() == 4);
    auto code = canonical_code(q.map);
    if (expect.count(code)) ++seen[code];
  }
  for (auto& [code, prob] : expect) {
    double freq = seen[code] / (double)N;
    double sigma = std::sqrt(prob * (1 - prob) / N);
    CHECK(std::fabs(freq - prob) < 4.5 * sigma);
  }
}

TEST_CASE("boltzmann sampler matches enumeration at perimeter 6") {
  // perimeter 6 exercises the two-hole split of the filling chain: the
  // smallest maps here already require a (1,1) split of a size-2 hole
  std::map<std::vector<int32_t>, double> expect;
  for (int n = 2; n <= 3; ++n)
    for (auto& q : enumerate_quadrangulations(n, 3))
      expect[canonical_code(q.map)] = std::pow(12.0, -n) / to_double(q_partition(3));
  CHECK(expect.size() == 59);

  Rng rng(31);
  const int N = 30000;
  std::map<std::vector<int32_t>, int> seen;
  for (int i = 0; i < N; ++i) {
    Quadrangulation q = sample_boltzmann_quadrangulation(3, rng);
    CHECK(boundary_walk(q.map).size() == 6);
    auto code = canonical_code(q.map);
    if (expect.count(code)) ++seen[code];
  }
  for (auto& [code, prob] : expect) {
    double freq = seen[code] / (double)N;
    double sigma = std::sqrt(prob * (1 - prob) / N);
    CHECK(std::fabs(freq - prob) < 4.5 * sigma);
  }
}

TEST_CASE("half-plane law normalization and golden probabilities") {
  auto law = halfplane_case_distribution(2000);
  CHECK(law.config_prob(PeelConfig::Growth, 0, 0) == doctest::Approx(0.375));
  // pi is a probability on half-perimeters
  double mass = 0;
  for (int l = 1; l <= 2000; ++l) mass += law.pi[l];
  CHECK(mass + law.tail_mass == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(law.tail_mass <= law.tail_bound * 1.000001 + 1e-12);
  CHECK(law.tail_bound < 1e-3);
  // pi(1) = 3 (2/9) Q_1 = 8/9; pi(2) = 3 (2/9)^2 Q_2 = 16/243
  CHECK(law.pi[1] == doctest::Approx(8.0 / 9).epsilon(1e-12));
  CHECK(law.pi[2] == doctest::Approx(16.0 / 243).epsilon(1e-12));
  // aggregated case probabilities: each one-hole family merges two mirror
  // configurations
  CHECK(law.case_prob(make_peel_case(PeelKind::Growth)) == doctest::Approx(0.375));
  CHECK(law.case_prob(make_peel_case(PeelKind::GlueRight, 1)) ==
        doctest::Approx(2.0 * 0.125 * 8.0 / 9).epsilon(1e-9));
}

TEST_CASE("half-plane sampling frequencies") {
  auto law = halfplane_case_distribution(500);
  Rng rng(7);
  const int N = 200000;
  int growth = 0;
  long long sum_dx = 0;
  std::map<int, int> perims;
  for (int i = 0; i < N; ++i) {
    auto d = law.sample(rng);
    if (d.config == PeelConfig::Growth) ++growth;
    sum_dx += d.pc.delta_x;
    if (d.l1 > 0) ++perims[d.l1];
  }
  double fg = growth / (double)N;
  CHECK(std::fabs(fg - 0.375) < 4.5 * std::sqrt(0.375 * 0.625 / N));
  for (int l = 1; l <= 3; ++l) {
    // l1 is drawn from pi whenever the config has a hole (prob 5/8)
    double prob = 0.625 * law.pi[l];
    double freq = perims[l] / (double)N;
    CHECK(std::fabs(freq - prob) < 4.5 * std::sqrt(prob * (1 - prob) / N));
  }
  // E[delta X] = 0 exactly; the increment is in the domain of a 3/2-stable
  // law, so the sample mean converges slowly
  CHECK(std::fabs(sum_dx / (double)N) < 0.25);
}

TEST_CASE("tail sampling beyond the alias cutoff") {
  auto law = halfplane_case_distribution(64);
  Rng rng(99);
  const int N = 300000;
  int beyond = 0;
  for (int i = 0; i < N; ++i)
    if (law.sample_half_perimeter(rng) > 64) ++beyond;
  double freq = beyond / (double)N;
  CHECK(freq > 0);
  CHECK(std::fabs(freq - law.tail_mass) <
        4.5 * std::sqrt(law.tail_mass / N) + 0.1 * law.tail_mass);
}

TEST_CASE("frontier peeling keeps its invariants gap-free") {
  auto law = halfplane_case_distribution(1000);
  Rng rng(31415);
  Frontier f(&law, /*debug_checks=*/1);
  CHECK(f.boundary_size() == 1);
  CHECK(f.line_coord(0) == 0);
  const long long steps = 1200;
  for (long long i = 0; i < steps; ++i) {
    // peel at the middle boundary entry; stretches of untouched line cancel
    // in recompute_x, so the identity holds for any site choice
    auto cit = f.boundary_entries().begin();
    std::advance(cit, f.boundary_size() / 2);
    auto it = f.entry_of_vertex(f.builder().vertex_of(cit->d));
    auto sr = f.peel(it, rng, /*fill=*/true);
    CHECK(f.recompute_x() == f.x_value());
    for (auto& h : sr.holes) CHECK(h.fill_faces >= 0);
  }
  CHECK(f.steps() == steps);
  CHECK(f.faces_revealed() >= steps);
  // frozen exploration is a valid planar map with only quadrangle internal
  // faces (all holes were filled)
  PlanarMap m = f.freeze();
  for (int fc = 0; fc < m.n_faces; ++fc)
    if (fc != m.external_face) CHECK(m.face_degree(fc) == 4);
  // builder coloring stayed proper across all surgeries
  const MapBuilder& b = f.builder();
  for (Dart d = 0; d < b.n_darts_total(); ++d)
    if (b.alive[d]) CHECK(b.vcolor[b.vrt[d]] != b.vcolor[b.vrt[d ^ 1]]);
}

TEST_CASE("peel_step rejects non-frontier darts") {
  auto law = halfplane_case_distribution(200);
  Rng rng(5);
  Frontier f(&law);
  Dart root = f.root_dart();
  CHECK_THROWS_AS(peel_step(f, twin(root), rng, true), NotOnBoundary);
  auto [pc, sr] = peel_step(f, root, rng, true);
  CHECK(pc.delta_x == sr.pc.delta_x);
}

TEST_CASE("blocks run and satisfy the swallowed-boundary bound") {
  auto law = halfplane_case_distribution(2000);
  Rng rng(2718);
  int successes = 0;
  for (int i = 0; i < 500; ++i) {
    int L = (i % 2) ? 4 : 8;
    BlockResult br = build_block(L, rng, law);  // throws on bound violation
    CHECK(br.tau >= 1);
    CHECK(br.explored.region.n_faces >= 2);
    CHECK(br.explored.bottom_len >= 1);
    CHECK(br.explored.top_len == br.explored.bottom_len + br.x_tau);
    for (int hp : br.explored.hole_perimeters) CHECK(hp % 2 == 0);
    if (br.success_with_dimensions) {
      CHECK(br.success);
      CHECK(br.has_hole);
      CHECK(br.db_H == L);
      CHECK(br.dt_H <= L);
      CHECK(br.dl_H >= L);
      CHECK(br.dr_H >= L);
    }
    CHECK(br.tau <= (long long)std::floor(std::pow((double)L, 1.5)));
    if (br.success) ++successes;
  }
  CHECK(successes > 0);
}

TEST_CASE("block iteration produces even scales") {
  auto law = halfplane_case_distribution(2000);
  Rng rng(11);
  auto rows = iterate_blocks(6, rng, law);
  CHECK(rows.size() == 6);
  for (auto& r : rows) {
    CHECK(r.L_next >= 1);
    CHECK(r.L_next % 2 == 0);
    if (r.good) CHECK(r.block.success_with_dimensions);
  }
}

TEST_CASE("hull revelation completes all stars within the radius") {
  auto law = halfplane_case_distribution(2000);
  Rng rng(424242);
  Frontier f = reveal_hull(2, rng, law);
  CHECK(f.faces_revealed() > 0);
  // recheck the stopping condition: no frontier vertex within distance 2 of
  // the root in the revealed region
  const MapBuilder& b = f.builder();
  std::vector<int32_t> vmap;
  PlanarMap m2 = f.freeze(nullptr, &vmap);
  REQUIRE(vmap[0] >= 0);
  auto dist = m2.distances_from(vmap[0]);
  for (int v = 0; v < b.n_vertices(); ++v)
    if (f.on_frontier(v) && vmap[v] >= 0 && dist[vmap[v]] >= 0)
      CHECK(dist[vmap[v]] > 2);
}

#include "planarpeel/enumgf.hpp"

#include <cfloat>
#include <cmath>
#include <initializer_list>
#include <mutex>
#include <unordered_map>
#include <unordered_set>

#include "planarpeel/peeling.hpp"

namespace planarpeel {

namespace {

std::mutex table_mtx;

// Q_{p+1}/Q_p for p >= 2 (from the closed form)
Rat q_ratio(long p) {
  return rat(2, 3) * rat((3 * p - 1) * (3 * p - 2) * (3 * p - 3)) /
         rat((p - 1) * (2 * p + 1) * (2 * p + 2));
}

std::vector<Rat>& q_table(int upto) {
  static std::vector<Rat> tab = {Rat(0), rat(4, 3), rat(4, 9)};
  while ((int)tab.size() <= upto) {
    long p = (long)tab.size() - 1;
    tab.push_back(tab.back() * q_ratio(p));
  }
  return tab;
}

// q_tilde term ratio t_{p+1}/t_p for p >= 2; at most (p/(p+1))^2
double qt_ratio(long p) {
  return (4.0 / 27.0) * (double)(3 * p - 1) * (double)(3 * p - 2) *
         (double)(3 * p - 3) / ((double)(p - 1) * (double)(2 * p + 1) *
                                (double)(2 * p + 2));
}

std::vector<double>& qt_table(int upto) {
  static std::vector<double> tab = {0.0, 8.0 / 27.0, 16.0 / 729.0};
  while ((int)tab.size() <= upto) {
    long p = (long)tab.size() - 1;
    tab.push_back(tab.back() * qt_ratio(p));
  }
  return tab;
}

std::vector<Rat>& m_table(int upto) {
  // sqrt-series of (18-z)(2-z)^3 = 144 - 224z + 120z^2 - 24z^3 + z^4
  static std::vector<Rat> s = {Rat(12)};
  static std::vector<Rat> m;
  static const long P[5] = {144, -224, 120, -24, 1};
  while ((int)s.size() <= upto) {
    int n = (int)s.size();
    Rat acc = (n <= 4) ? rat(P[n]) : Rat(0);
    for (int k = 1; k < n; ++k) acc -= s[k] * s[n - k];
    s.push_back(acc / 24);
  }
  while ((int)m.size() <= upto) {
    int p = (int)m.size();
    Rat v = s[p] / 24;
    if (p == 0) v -= rat(1, 2);
    if (p == 1) v += rat(1, 2);
    if (p == 2) v -= rat(1, 24);
    m.push_back(v);
  }
  return m;
}

const Rat kCrit = rat(2, 9);

}  // namespace

Rat q_partition(int p) {
  if (p < 1) throw DomainError("q_partition: p must be >= 1");
  std::lock_guard<std::mutex> lk(table_mtx);
  return q_table(p)[p];
}

double q_tilde(int p) {
  if (p < 1) throw DomainError("q_tilde: p must be >= 1");
  std::lock_guard<std::mutex> lk(table_mtx);
  return qt_table(p)[p];
}

double q_tilde_tail_bound(int p) {
  // t_k <= t_p (p/k)^2 for k > p, so the tail is below t_p p^2 sum 1/k^2 < p t_p
  if (p < 2) p = 2;
  return (double)p * q_tilde(p);
}

Rat m_coefficient(int p) {
  if (p < 0) throw DomainError("m_coefficient: p must be >= 0");
  std::lock_guard<std::mutex> lk(table_mtx);
  return m_table(p)[p];
}

Rat m_series(const Rat& z) {
  if (z > 2) throw DomainError("m_series: z must be <= 2");
  Rat rad = (Rat(18) - z) * rat_pow(Rat(2) - z, 3);
  Rat base = -rat(1, 2) + z / 2 - z * z / 24;
  Int num = rad.get_num(), den = rad.get_den();
  if (mpz_perfect_square_p(num.get_mpz_t()) &&
      mpz_perfect_square_p(den.get_mpz_t())) {
    Int sn, sd;
    mpz_sqrt(sn.get_mpz_t(), num.get_mpz_t());
    mpz_sqrt(sd.get_mpz_t(), den.get_mpz_t());
    Rat root(sn, sd);
    root.canonicalize();
    return root / 24 + base;
  }
  double r = std::sqrt(to_double(rad));
  Rat approx(r / 24.0);
  return approx + base;
}

double m_series_d(double z) {
  if (z > 2) throw DomainError("m_series_d: z must be <= 2");
  return std::sqrt((18 - z) * (2 - z) * (2 - z) * (2 - z)) / 24 - 0.5 + z / 2 -
         z * z / 24;
}

namespace {

// sum of w_p Q_p z^p with weight(p) in {1, p-1}; geometric tail certificate
// from the term-ratio bound 9z/2 (valid from p = 2 on)
SeriesValue q_like_series(const Rat& z, bool dot) {
  if (z < 0 || z > kCrit) throw DomainError("series: need 0 <= z <= 2/9");
  SeriesValue out{Rat(0), Rat(0)};
  if (z == 0) return out;
  if (z == kCrit) {
    // exact critical values: W = 1/3 is the double root of the cubic
    // functional equation at z = 2/9, and zW' - W = 4/9 - 1/3 = 1/9
    out.value = dot ? rat(1, 9) : rat(1, 3);
    return out;
  }
  Rat r = rat(9, 2) * z;  // < 1 here
  Rat zp = z;
  Rat term;
  const int kMax = 2400;
  for (int p = 1; p <= kMax; ++p) {
    Rat qp = q_partition(p);
    term = qp * zp;
    if (dot) term *= (p - 1);
    out.value += term;
    zp *= z;
    if (p >= 2 && p % 32 == 0) {
      Rat tail = term * r / (1 - r);
      if (tail < rat(1, 1000000) * rat(1, 1000000) * rat(1, 1000000000)) {
        out.tail_bound = tail;
        return out;
      }
    }
  }
  out.tail_bound = (term < 0 ? -term : term) * r / (1 - r);
  return out;
}

}  // namespace

SeriesValue q_series(const Rat& z) { return q_like_series(z, false); }
SeriesValue q_dot_series(const Rat& z) { return q_like_series(z, true); }

SeriesValue j_series(const Rat& z) {
  SeriesValue q = q_series(z);
  SeriesValue out;
  out.value = q.value + q.value * q.value;
  // |dJ| <= |dQ| (1 + 2Q + |dQ|)
  out.tail_bound = q.tail_bound * (1 + 2 * q.value + q.tail_bound);
  return out;
}

SeriesValue j_dot_series(const Rat& z) {
  SeriesValue q = q_series(z), qd = q_dot_series(z);
  SeriesValue out;
  out.value = 2 * q.value * qd.value + q.value * q.value + qd.value;
  Rat eq = q.tail_bound, ed = qd.tail_bound;
  out.tail_bound = 2 * (q.value * ed + qd.value * eq + eq * ed) +
                   eq * (1 + 2 * q.value + eq) + ed;
  return out;
}

Rat q_cubic_residual(const Rat& z, const Rat& w) {
  return w * (1 + w) * (1 + w) - (rat(4, 3) * z - 12 * z * z + 12 * z * w);
}

CriticalSum critical_q_sum(int terms) {
  if (terms < 2) terms = 2;
  long double acc = 8.0L / 27.0L;
  long double t = 16.0L / 729.0L;
  for (long p = 2; p <= terms; ++p) {
    acc += t;
    if (p < terms)
      t *= (4.0L / 27.0L) * (long double)((3 * p - 1) * (3 * p - 2)) *
           (long double)(3 * p - 3) /
           ((long double)(p - 1) * (long double)((2 * p + 1) * (2 * p + 2)));
  }
  CriticalSum out;
  out.value = (double)acc;
  // series tail (t_k <= t_N (N/k)^2) plus float accumulation slack
  out.error_bound = (double)((long double)terms * t) +
                    (double)(4.0L * (long double)terms * LDBL_EPSILON * acc);
  return out;
}

// ---------------------------------------------------------------------------
// exhaustive peeling histories
// ---------------------------------------------------------------------------

namespace {

struct EnumState {
  int n_target;
  bool truncated_only;
  bool exact_count_only;  // no map materialization
  long long budget;
  long long steps = 0;
  Dart root = 0;
  int init_boundary_vertices = 0;  // initial cycle vertices are 0..2p-1
  std::vector<long long> counts;
  std::vector<Quadrangulation>* out = nullptr;
};

int min_faces_needed(const std::vector<std::pair<Dart, int>>& holes) {
  int s = 0;
  for (auto& h : holes) s += h.second - 1;
  return s;
}

bool face_is_open_hole(const MapBuilder& b, Dart d,
                       const std::unordered_set<Dart>& reps) {
  Dart x = d;
  do {
    if (reps.count(x)) return true;
    x = b.phi(x);
  } while (x != d);
  return false;
}

// Lower bound on the degree this vertex will have once all open holes are
// filled. Edges whose both sides are completed faces can never disappear;
// edges bordering an open hole can only be removed by a trivial filling that
// identifies them with a parallel edge also bordering a hole, so each
// parallel class with at least one hole-adjacent edge retains at least one.
int min_final_degree(const MapBuilder& b, Dart at,
                     const std::unordered_set<Dart>& reps) {
  std::unordered_map<int, std::pair<int, bool>> cls;  // far vertex -> (closed, open?)
  Dart x = at;
  do {
    int far = b.vrt[x ^ 1];
    bool open = face_is_open_hole(b, x, reps) || face_is_open_hole(b, x ^ 1, reps);
    auto& c = cls[far];
    if (open)
      c.second = true;
    else
      ++c.first;
    x = b.nxt[x];
  } while (x != at);
  int out = 0;
  for (auto& kv : cls) out += kv.second.first + (kv.second.second ? 1 : 0);
  return out;
}

// truncated mode: initial-boundary black vertices (odd ids below the cutoff)
// must be able to end at degree exactly 2
bool truncation_hopeless(const MapBuilder& b, const EnumState& st,
                         std::initializer_list<Dart> at,
                         const std::unordered_set<Dart>& reps) {
  for (Dart d : at) {
    if (d < 0) continue;
    int v = b.vrt[d];
    if (v < st.init_boundary_vertices && (v % 2) == 1 &&
        min_final_degree(b, d, reps) > 2)
      return true;
  }
  return false;
}

void record(const MapBuilder& b, EnumState& st, int faces) {
  if (st.truncated_only) {
    // keep only maps whose black boundary vertices carry no internal edge
    // (the degree-bound pruning during the search is a lower bound, so
    // non-truncated histories can still reach this point and are dropped)
    std::vector<int32_t> vmap;
    PlanarMap m = b.freeze(st.root, nullptr, &vmap);
    std::vector<uint8_t> colors = b.frozen_colors(m, vmap);
    std::vector<uint8_t> on_bd(m.n_darts(), 0);
    for (Dart d : m.face_orbit(m.root ^ 1)) on_bd[d] = on_bd[d ^ 1] = 1;
    for (Dart d : m.face_orbit(m.root ^ 1)) {
      if (colors[m.vert[d]] != 1) continue;
      for (Dart x : m.vertex_orbit(d))
        if (!on_bd[x]) return;
    }
    ++st.counts[faces];
    if (st.out) st.out->push_back(make_quadrangulation(m, &colors));
    return;
  }
  ++st.counts[faces];
  if (!st.out) return;
  std::vector<int32_t> vmap;
  PlanarMap m = b.freeze(st.root, nullptr, &vmap);
  std::vector<uint8_t> colors = b.frozen_colors(m, vmap);
  st.out->push_back(make_quadrangulation(m, &colors));
}

void enum_dfs(const MapBuilder& b, std::vector<std::pair<Dart, int>> holes,
              int faces, EnumState& st) {
  if (++st.steps > st.budget)
    throw BudgetExceeded("enumeration budget exhausted", st.steps);
  if (holes.empty()) {
    record(b, st, faces);
    return;
  }
  auto [rep, l] = holes.back();
  holes.pop_back();
  if (faces + (l - 1) + min_faces_needed(holes) > st.n_target) return;

  // protected darts: the root edge and every other open hole's representative
  auto protect = [&](const MapBuilder& bb) {
    std::vector<uint8_t> prot(bb.n_darts_total(), 0);
    prot[st.root] = prot[st.root ^ 1] = 1;
    for (auto& h : holes) prot[h.first] = 1;
    return prot;
  };

  if (l == 1) {
    MapBuilder bb = b;
    auto prot = protect(bb);
    Dart kept = zip_hole(bb, rep, prot);
    bool ok = true;
    if (st.truncated_only) {
      std::unordered_set<Dart> reps;
      for (auto& h : holes) reps.insert(h.first);
      // the zip may have turned hole-adjacent edges into completed ones at
      // the two endpoints of the surviving edge
      if (truncation_hopeless(bb, st, {kept, (Dart)(kept ^ 1)}, reps)) ok = false;
    }
    if (ok) enum_dfs(bb, holes, faces, st);
  }
  // attachments are not pruned further here: a hole of half perimeter l can
  // finish in l-1 faces (each attach splitting off three regions), which the
  // check above already accounts for
  std::vector<int> td_opts = {0};
  for (int td = 1; td <= 2 * l - 1; td += 2) td_opts.push_back(td);
  for (int t_c = 0; t_c <= 2 * l; t_c += 2) {
    for (int td : td_opts) {
      if (t_c > 0 && td > 0 && t_c >= td) continue;
      MapBuilder bb = b;
      auto regions = attach_in_hole(bb, rep, l, DiskAttachment{t_c, td});
      auto nh = holes;
      for (auto& r : regions) nh.push_back(r);
      if (st.truncated_only) {
        // the new face orbit is (rep, n1, n2, n3); degrees only grew at its
        // corners b, c, d, and the peeled edge is the only edge that closed
        std::unordered_set<Dart> reps;
        for (auto& h : nh) reps.insert(h.first);
        Dart n1 = bb.phi(rep), n2 = bb.phi(n1), n3 = bb.phi(n2);
        if (truncation_hopeless(bb, st, {n1, n2, n3}, reps)) continue;
      }
      enum_dfs(bb, nh, faces + 1, st);
    }
  }
}

}  // namespace

std::vector<Quadrangulation> enumerate_quadrangulations(int n, int p,
                                                        const EnumOptions& opts) {
  if (p < 1 || n < 0) throw DomainError("enumerate: need p >= 1, n >= 0");
  std::vector<Quadrangulation> out;
  EnumState st;
  st.n_target = n;
  st.truncated_only = opts.truncated_only;
  st.budget = opts.budget;
  st.counts.assign(n + 1, 0);
  st.out = &out;
  MapBuilder b;
  auto es = b.make_cycle(2 * p, 0);
  st.root = es[0];
  st.init_boundary_vertices = 2 * p;
  enum_dfs(b, {{es[0], p}}, 0, st);
  // keep only exact-n maps
  std::vector<Quadrangulation> filtered;
  for (auto& q : out)
    if (q.n_internal_faces() == n) filtered.push_back(std::move(q));
  return filtered;
}

std::vector<long long> count_quadrangulations(int n, int p) {
  if (p < 1 || n < 0) throw DomainError("count: need p >= 1, n >= 0");
  EnumState st;
  st.n_target = n;
  st.truncated_only = false;
  st.budget = 400000000;
  st.counts.assign(n + 1, 0);
  st.out = nullptr;
  MapBuilder b;
  auto es = b.make_cycle(2 * p, 0);
  st.root = es[0];
  st.init_boundary_vertices = 2 * p;
  enum_dfs(b, {{es[0], p}}, 0, st);
  return st.counts;
}

// ---------------------------------------------------------------------------
// sub-map probabilities
// ---------------------------------------------------------------------------

Rat submap_probability(int edges_minus_top, int bottom_len, int top_len, int p) {
  if (p <= bottom_len) throw PerimeterTooSmall("submap_probability: need p > |db m|");
  int idx = p - bottom_len + top_len;
  // the ratio uses the boundary-free normalization M'_p = 4^p m_coefficient(p),
  // whose growth rate is 2 (this is what makes the p -> infinity limit below
  // equal 2^{dt-db}); the 4^{idx-p} prefactor is that rescaling
  Rat num = m_coefficient(idx), den = m_coefficient(p);
  if (den == 0) throw DomainError("submap_probability: M_p vanishes");
  int d = idx - p;
  Rat scale = d >= 0 ? rat_pow(Rat(4), (unsigned long)d)
                     : rat_pow(rat(1, 4), (unsigned long)(-d));
  Rat f = rat_pow(rat(1, 12), (unsigned long)edges_minus_top);
  return f * scale * num / den;
}

Rat submap_probability_limit(int edges_minus_top, int bottom_len, int top_len) {
  Rat f = rat_pow(rat(1, 12), (unsigned long)edges_minus_top);
  int d = top_len - bottom_len;
  Rat two = d >= 0 ? rat_pow(Rat(2), (unsigned long)d)
                   : rat_pow(rat(1, 2), (unsigned long)(-d));
  return f * two;
}

Rat submap_probability(const PlanarMap& m, int bottom_len, int p) {
  int perim = m.face_degree(m.external_face);
  if (bottom_len < 0 || bottom_len > perim)
    throw DomainError("submap_probability: bad bottom length");
  int top = perim - bottom_len;
  return submap_probability(m.n_edges() - top, bottom_len, top, p);
}

Rat submap_probability_limit(const PlanarMap& m, int bottom_len) {
  int perim = m.face_degree(m.external_face);
  if (bottom_len < 0 || bottom_len > perim)
    throw DomainError("submap_probability_limit: bad bottom length");
  int top = perim - bottom_len;
  return submap_probability_limit(m.n_edges() - top, bottom_len, top);
}

}  // namespace planarpeel

#include "planarpeel/peeling.hpp"

#include <cmath>
#include <mutex>

namespace planarpeel {

// ---------------------------------------------------------------------------
// surgery
// ---------------------------------------------------------------------------

AttachedFace attach_face(MapBuilder& b, Dart peel, Dart at_b, const AttachChoice& ch) {
  AttachedFace f;
  // fresh vertices take their colors from the peeled edge: c matches w and d
  // matches b, so the quadrangle alternates whichever way the edge is colored
  uint8_t cw = b.vcolor[b.vrt[peel]], cb = b.vcolor[b.vrt[at_b]];
  Dart dc, dd;
  if (ch.at_c < 0) {
    f.n1 = b.insert_pendant(at_b, cw);
    dc = f.n1 ^ 1;
  } else {
    f.n1 = b.insert_diagonal(at_b, ch.at_c);
    dc = ch.at_c;
  }
  if (ch.at_d < 0) {
    f.n2 = b.insert_pendant(dc, cb);
    dd = f.n2 ^ 1;
  } else {
    f.n2 = b.insert_diagonal(dc, ch.at_d);
    dd = ch.at_d;
  }
  f.n3 = b.insert_diagonal(dd, peel);
  return f;
}

Dart zip_hole(MapBuilder& b, Dart rep, const std::vector<uint8_t>& prot) {
  Dart y = b.phi(rep);
  if (y == rep || b.phi(y) != rep)
    throw InvariantViolation("zip_hole: face is not a bigon");
  if (y == (rep ^ 1))
    throw InvariantViolation("zip_hole: bigon bounded by a single edge");
  auto ok = [&](Dart d) {
    return !((size_t)d < prot.size() && prot[d]) &&
           !((size_t)(d ^ 1) < prot.size() && prot[d ^ 1]);
  };
  if (ok(y)) {
    b.remove_edge(y);
    return rep;
  }
  if (ok(rep)) {
    b.remove_edge(rep);
    return y;
  }
  throw InvariantViolation("zip_hole: both bigon edges protected");
}

std::vector<std::pair<Dart, int>> attach_in_hole(MapBuilder& b, Dart rep,
                                                 int half_perim,
                                                 const DiskAttachment& a) {
  const int p = half_perim, tc = a.t_c, td = a.t_d;
  if (p < 1) throw PerimeterTooSmall("attach_in_hole: empty hole");
  if (tc != 0 && (tc % 2 != 0 || tc < 2 || tc > 2 * p))
    throw DomainError("attach_in_hole: bad t_c");
  if (td != 0 && (td % 2 != 1 || td > 2 * p - 1))
    throw DomainError("attach_in_hole: bad t_d");
  if (tc != 0 && td != 0 && tc >= td)
    throw DomainError("attach_in_hole: need t_c < t_d");

  std::vector<Dart> d(2 * p);
  d[0] = rep;
  for (int i = 1; i < 2 * p; ++i) d[i] = b.phi(d[i - 1]);
  if (b.phi(d[2 * p - 1]) != rep)
    throw InvariantViolation("attach_in_hole: perimeter mismatch");

  AttachChoice ch;
  if (tc != 0) ch.at_c = d[tc % (2 * p)];
  if (td != 0) ch.at_d = d[td];
  AttachedFace f = attach_face(b, rep, d[1], ch);

  std::vector<std::pair<Dart, int>> regions;
  int la = 0, lb = 0;
  if (tc != 0) {
    la = tc / 2;
    regions.push_back({f.n1 ^ 1, la});
  }
  if (td != 0) {
    lb = (tc != 0) ? (td - tc + 1) / 2 : (td + 1) / 2;
    // n2^1 starts at d (a black vertex); hole representatives must start at a
    // white one, so advance one step along the region boundary
    regions.push_back({b.phi(f.n2 ^ 1), lb});
  }
  regions.push_back({f.n3 ^ 1, p + 1 - la - lb});
  return regions;
}

// ---------------------------------------------------------------------------
// case laws
// ---------------------------------------------------------------------------

PeelCase make_peel_case(PeelKind k, int l1, int l2) {
  PeelCase pc;
  pc.kind = k;
  pc.l1 = l1;
  pc.l2 = l2;
  switch (k) {
    case PeelKind::Growth: pc.delta_x = 2; break;
    case PeelKind::GlueLeft:
    case PeelKind::GlueRight: pc.delta_x = 2 - 2 * l1; break;
    case PeelKind::TwoHoles: pc.delta_x = 2 - 2 * (l1 + l2); break;
    case PeelKind::Zip: pc.delta_x = 0; break;
  }
  return pc;
}

FiniteCaseLaw finite_case_distribution(int p) {
  if (p < 1) throw DomainError("finite_case_distribution: p >= 1");
  FiniteCaseLaw law;
  law.p = p;
  Rat norm = 12 * q_partition(p);
  Rat total = 0;

  auto add = [&](bool zip, DiskAttachment a, const Rat& w, PeelCase pc) {
    FiniteCaseLaw::Entry e;
    e.zip = zip;
    e.a = a;
    e.prob = w / norm;
    e.pc = pc;
    total += e.prob;
    law.entries.push_back(std::move(e));
  };

  if (p == 1)
    add(true, {}, Rat(12), make_peel_case(PeelKind::Zip));
  add(false, {0, 0}, q_partition(p + 1), make_peel_case(PeelKind::Growth));
  // the disk has no left/right; c-bound attachments are labeled GlueRight,
  // d-bound ones GlueLeft, matching the half-plane frontier orientation
  for (int l = 1; l <= p; ++l) {
    Rat w = q_partition(l) * q_partition(p + 1 - l);
    add(false, {2 * l, 0}, w, make_peel_case(PeelKind::GlueRight, l));
    add(false, {0, 2 * l - 1}, w, make_peel_case(PeelKind::GlueLeft, l));
  }
  for (int tc = 2; tc <= 2 * p - 2; tc += 2) {
    for (int td = tc + 1; td <= 2 * p - 1; td += 2) {
      int l1 = tc / 2, l2 = (td - tc + 1) / 2, l3 = p + 1 - l1 - l2;
      Rat w = q_partition(l1) * q_partition(l2) * q_partition(l3);
      add(false, {tc, td}, w, make_peel_case(PeelKind::TwoHoles, l1, l2));
    }
  }
  if (total != 1)
    throw NormalizationFailure("finite peeling cases do not sum to 1 at p=" +
                               std::to_string(p));
  return law;
}

Rat finite_case_probability(const FiniteCaseLaw& law, const PeelCase& pc) {
  Rat s = 0;
  for (auto& e : law.entries)
    if (e.pc.kind == pc.kind && e.pc.l1 == pc.l1 && e.pc.l2 == pc.l2) s += e.prob;
  return s;
}

int HalfPlaneLaw::sample_half_perimeter(Rng& rng) const {
  double u = rng.next_double();
  if (u < pi_cum_at_cutoff) {
    // alias table over l = 1..cutoff
    uint64_t slot = rng.next_below((uint64_t)tail_cutoff);
    return (rng.next_double() < alias_cut[slot]) ? (int)slot + 1 : alias_idx[slot];
  }
  // heavy tail: Pareto(3/2) proposal on (cutoff, infinity), pointwise
  // rejection against the exact pi via Stirling in log space
  const double c0 = tail_cutoff + 0.5;
  for (int it = 0; it < 100000; ++it) {
    double v = c0 * std::pow(rng.next_double(), -2.0 / 3.0);
    if (v >= 4.5e15) continue;  // re-draw: beyond exact integer doubles
    long long m = (long long)v;
    if (m <= tail_cutoff) continue;
    double g = std::pow(c0 / (double)m, 1.5) - std::pow(c0 / (double)(m + 1), 1.5);
    double lp = std::log(36.0) + (double)m * std::log(4.0 / 27.0) +
                std::lgamma(3.0 * m - 3.0) - std::lgamma((double)m - 1.0) -
                std::lgamma(2.0 * m + 1.0);
    double acc = std::exp(lp) / (tail_envelope_c * g);
    if (acc > 1.0)
      throw NormalizationFailure("tail rejection envelope too small");
    if (rng.next_double() < acc) return (int)std::min<long long>(m, INT32_MAX);
  }
  throw InvariantViolation("tail rejection failed to terminate");
}

HalfPlaneLaw::Draw HalfPlaneLaw::sample(Rng& rng) const {
  Draw d;
  double u = rng.next_double();
  if (u < 3.0 / 8.0) {
    d.config = PeelConfig::Growth;
    d.pc = make_peel_case(PeelKind::Growth);
    return d;
  }
  u -= 3.0 / 8.0;
  static const PeelConfig one[4] = {PeelConfig::AttachedRight, PeelConfig::WrappedRight,
                                    PeelConfig::AttachedLeft, PeelConfig::WrappedLeft};
  for (PeelConfig c : one) {
    if (u < 1.0 / 8.0) {
      d.config = c;
      d.l1 = sample_half_perimeter(rng);
      bool left = (c == PeelConfig::AttachedLeft || c == PeelConfig::WrappedLeft);
      d.pc = make_peel_case(left ? PeelKind::GlueLeft : PeelKind::GlueRight, d.l1);
      return d;
    }
    u -= 1.0 / 8.0;
  }
  static const PeelConfig two[3] = {PeelConfig::TwoRight, PeelConfig::TwoLeft,
                                    PeelConfig::Split};
  for (int i = 0; i < 3; ++i) {
    if (u < 1.0 / 24.0 || i == 2) {
      d.config = two[i];
      d.l1 = sample_half_perimeter(rng);
      d.l2 = sample_half_perimeter(rng);
      d.pc = make_peel_case(PeelKind::TwoHoles, d.l1, d.l2);
      return d;
    }
    u -= 1.0 / 24.0;
  }
  throw InvariantViolation("unreachable");
}

double HalfPlaneLaw::config_prob(PeelConfig c, int l1, int l2) const {
  auto pi_of = [&](int l) { return 3.0 * q_tilde(l); };
  switch (c) {
    case PeelConfig::Growth: return 3.0 / 8.0;
    case PeelConfig::AttachedRight:
    case PeelConfig::WrappedRight:
    case PeelConfig::AttachedLeft:
    case PeelConfig::WrappedLeft: return pi_of(l1) / 8.0;
    default: return pi_of(l1) * pi_of(l2) / 24.0;
  }
}

double HalfPlaneLaw::case_prob(const PeelCase& pc) const {
  switch (pc.kind) {
    case PeelKind::Growth: return 3.0 / 8.0;
    case PeelKind::GlueLeft:
    case PeelKind::GlueRight: return 2.0 * config_prob(PeelConfig::AttachedLeft, pc.l1, 0);
    case PeelKind::TwoHoles:
      // ordered (left-to-right) hole pair across the three configurations
      return 3.0 * config_prob(PeelConfig::TwoRight, pc.l1, pc.l2);
    case PeelKind::Zip: return 0.0;
  }
  return 0.0;
}

HalfPlaneLaw halfplane_case_distribution(int tail_cutoff) {
  if (tail_cutoff < 16) throw DomainError("halfplane law: cutoff too small");
  HalfPlaneLaw law;
  law.tail_cutoff = tail_cutoff;
  law.pi.assign(tail_cutoff + 1, 0.0);
  double cum = 0;
  for (int l = 1; l <= tail_cutoff; ++l) {
    law.pi[l] = 3.0 * q_tilde(l);
    cum += law.pi[l];
  }
  law.pi_cum_at_cutoff = cum;
  law.tail_mass = 1.0 - cum;
  law.tail_bound = 3.0 * q_tilde_tail_bound(tail_cutoff);
  if (law.tail_mass < -1e-12 || law.tail_mass > law.tail_bound * 1.000001 + 1e-12)
    throw NormalizationFailure("half-plane hole law does not sum to 1");

  // rejection envelope: pi(m)/g(m) <= c for m > cutoff, with the Pareto mass
  // g(m) = (c0/m)^{3/2} - (c0/(m+1))^{3/2}. The supremum is approached from
  // below; a 10% pad plus the per-draw acceptance assert keeps it honest.
  const double c0 = tail_cutoff + 0.5;
  double sup = 0;
  for (long long m = tail_cutoff + 1; m <= (long long)tail_cutoff * 4; m += 1 + m / 64) {
    double g = std::pow(c0 / (double)m, 1.5) - std::pow(c0 / (double)(m + 1), 1.5);
    double lp = std::log(36.0) + (double)m * std::log(4.0 / 27.0) +
                std::lgamma(3.0 * m - 3.0) - std::lgamma((double)m - 1.0) -
                std::lgamma(2.0 * m + 1.0);
    sup = std::max(sup, std::exp(lp) / g);
  }
  law.tail_envelope_c = sup * 1.10;

  // Vose alias table over the truncated distribution pi(l)/cum
  int n = tail_cutoff;
  law.alias_idx.assign(n, 0);
  law.alias_cut.assign(n, 1.0);
  std::vector<double> scaled(n);
  for (int i = 0; i < n; ++i) scaled[i] = law.pi[i + 1] / cum * n;
  std::vector<int> small, large;
  for (int i = 0; i < n; ++i) (scaled[i] < 1.0 ? small : large).push_back(i);
  while (!small.empty() && !large.empty()) {
    int s = small.back(), g = large.back();
    small.pop_back();
    large.pop_back();
    law.alias_cut[s] = scaled[s];
    law.alias_idx[s] = g + 1;
    scaled[g] -= 1.0 - scaled[s];
    (scaled[g] < 1.0 ? small : large).push_back(g);
  }
  for (int i : small) law.alias_cut[i] = 1.0;
  for (int i : large) law.alias_cut[i] = 1.0;
  return law;
}

// ---------------------------------------------------------------------------
// Boltzmann samplers
// ---------------------------------------------------------------------------

namespace {

// tilted weights u_l = Q_l (2/9)^l and their convolution C[m] = sum u_i u_{m-i};
// every attachment's regions have half-perimeters summing to p+1, so tilted
// weights give the same case distribution as the exact law. Built once,
// read-only afterwards (thread-safe static initialization).
struct Tables {
  // holes beyond the cap would need >~cap^2 faces to fill, far past any
  // practical budget, so they are reported as budget failures instead
  static constexpr int kCap = 16384;
  std::vector<double> u, C;
  Tables() {
    u.assign(kCap + 2, 0.0);
    for (int i = 1; i <= kCap + 1; ++i) u[i] = q_tilde(i);
    C.assign(kCap + 2, 0.0);
    for (int k = 2; k <= kCap + 1; ++k) {
      double s = 0;
      for (int i = 1; i < k; ++i) s += u[i] * u[k - i];
      C[k] = s;
    }
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

// pending hole; `marked` records whether its rep protection bit is ours to
// clear on pop (reps already protected by the caller keep their bit)
struct PendingHole {
  Dart rep;
  int h;
  uint8_t marked;
};

// sample one peeling case for a finite hole of half-perimeter h and apply it
void fill_step(MapBuilder& b, std::vector<PendingHole>& stack, Rng& rng,
               std::vector<uint8_t>& prot) {
  auto [rep, h, marked] = stack.back();
  stack.pop_back();
  if (marked) prot[rep] = 0;
  if (h + 1 > Tables::kCap)
    throw BudgetExceeded("fill: hole too large for exact filling", h);
  const Tables& t = tables();

  double w_growth = t.u[h + 1];
  double w_one = t.C[h + 1];  // each of the c-bound and d-bound families
  double w_two = 0;
  for (int a = 1; a <= h - 1; ++a) w_two += t.u[a] * t.C[h + 1 - a];
  double w_zip = (h == 1) ? 12.0 * std::pow(2.0 / 9.0, h + 1) : 0.0;
  double total = w_growth + 2 * w_one + w_two + w_zip;

  double x = rng.next_double() * total;
  DiskAttachment at;
  bool zip = false;
  if (x < w_zip) {
    zip = true;
  } else if ((x -= w_zip) < w_growth) {
    at = {0, 0};
  } else if ((x -= w_growth) < w_one) {
    int l = h;
    for (int j = 1; j <= h; ++j) {
      double w = t.u[j] * t.u[h + 1 - j];
      if (x < w) { l = j; break; }
      x -= w;
    }
    at = {2 * l, 0};
  } else if ((x -= w_one) < w_one) {
    int l = h;
    for (int j = 1; j <= h; ++j) {
      double w = t.u[j] * t.u[h + 1 - j];
      if (x < w) { l = j; break; }
      x -= w;
    }
    at = {0, 2 * l - 1};
  } else {
    x -= w_one;
    int l1 = 1, l2 = 1;
    for (int a = 1; a <= h - 1; ++a) {
      double w = t.u[a] * t.C[h + 1 - a];
      if (x < w) {
        l1 = a;
        // the leftover x is uniform on [0, u_a C_{h+1-a}); rescale it to the
        // C_{h+1-a} range the inner thresholds live on
        double y = x / t.u[a];
        for (int bsz = 1; bsz <= h - a; ++bsz) {
          double wb = t.u[bsz] * t.u[h + 1 - a - bsz];
          if (y < wb) { l2 = bsz; break; }
          y -= wb;
        }
        break;
      }
      x -= w;
    }
    at = {2 * l1, 2 * l1 + 2 * l2 - 1};
  }

  if (zip) {
    // all other pending reps carry a protection bit, so the identification
    // never deletes a dart still referenced by the stack
    zip_hole(b, rep, prot);
    return;
  }
  auto regions = attach_in_hole(b, rep, h, at);
  if ((size_t)b.n_darts_total() > prot.size()) prot.resize(b.n_darts_total(), 0);
  for (auto& r : regions) {
    uint8_t mk = !prot[r.first];
    prot[r.first] = 1;
    stack.push_back({r.first, r.second, mk});
  }
}

}  // namespace

long long fill_hole(MapBuilder& b, Dart rep, int half_perim, Rng& rng,
                    std::vector<uint8_t>& prot, long long budget) {
  if ((size_t)b.n_darts_total() > prot.size()) prot.resize(b.n_darts_total(), 0);
  std::vector<PendingHole> stack = {{rep, half_perim, (uint8_t)!prot[rep]}};
  prot[rep] = 1;
  long long steps = 0;
  while (!stack.empty()) {
    if (++steps > budget) throw BudgetExceeded("fill_hole budget", steps);
    fill_step(b, stack, rng, prot);
  }
  return steps;
}

Quadrangulation sample_boltzmann_quadrangulation(int p, Rng& rng, long long budget) {
  if (p < 1) throw DomainError("sample_boltzmann_quadrangulation: p >= 1");
  MapBuilder b;
  auto es = b.make_cycle(2 * p, 0);
  std::vector<uint8_t> prot(b.n_darts_total(), 0);
  prot[es[0]] = prot[es[0] ^ 1] = 1;
  fill_hole(b, es[0], p, rng, prot, budget);
  std::vector<int32_t> vmap;
  PlanarMap m = b.freeze(es[0], nullptr, &vmap);
  std::vector<uint8_t> colors = b.frozen_colors(m, vmap);
  return make_quadrangulation(m, &colors);
}

}  // namespace planarpeel

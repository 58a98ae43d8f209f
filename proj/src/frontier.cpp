#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <limits>
#include <utility>
#include <vector>

#include "planarpeel/peeling.hpp"

namespace planarpeel {

namespace {
// largest swallowed arc we are willing to materialize as list entries
constexpr int kMaxHole = 2'000'000;
}  // namespace

Frontier::Frontier(const HalfPlaneLaw* law, uint8_t debug_checks)
    : law_(law), debug_checks_(debug_checks) {
  int v0 = b_.new_vertex(0);  // root vertex, x = 0
  int v1 = b_.new_vertex(1);
  Dart e = b_.new_edge(v0, v1);
  root_dart_ = e;
  top_.push_back(Entry{e, 0, true});
  vert_entry_[v0] = top_.begin();
  line_x_[v0] = 0;
  line_x_[v1] = 1;
  x_to_vertex_[0] = v0;
  x_to_vertex_[1] = v1;
  left_v_ = v0;
  right_v_ = v1;
  left_x_ = 0;
  right_x_ = 1;
  prot_.assign(b_.n_darts_total(), 0);
  prot_[e] = prot_[twin(e)] = 1;
  line_dart_.assign(b_.n_darts_total(), 1);
}

static void grow_tables(const MapBuilder& b, std::vector<uint8_t>& prot,
                        std::vector<uint8_t>& line) {
  prot.resize(b.n_darts_total(), 0);
  line.resize(b.n_darts_total(), 0);
}

void Frontier::extend_right() {
  int u = right_v_;
  Dart last = std::prev(top_.end())->d;
  int64_t x = right_x_ + 1;
  int v = b_.new_vertex((uint8_t)(((x % 2) + 2) % 2));
  Dart n = b_.new_edge(u, v);
  // splice n right after the incoming dart at u, so phi(last) = n and the
  // external face keeps running left to right along the top
  b_.link_before(n, b_.nxt[twin(last)]);
  grow_tables(b_, prot_, line_dart_);
  line_dart_[n] = line_dart_[twin(n)] = 1;
  top_.push_back(Entry{n, right_x_, true});
  vert_entry_[u] = std::prev(top_.end());
  line_x_[v] = x;
  x_to_vertex_[x] = v;
  right_v_ = v;
  right_x_ = x;
}

void Frontier::extend_left() {
  int u = left_v_;
  Dart first = top_.begin()->d;
  int64_t x = left_x_ - 1;
  int v = b_.new_vertex((uint8_t)(((x % 2) + 2) % 2));
  Dart n = b_.new_edge(v, u);
  // phi(n) must be the old first top dart
  b_.link_before(twin(n), first);
  grow_tables(b_, prot_, line_dart_);
  line_dart_[n] = line_dart_[twin(n)] = 1;
  top_.push_front(Entry{n, x, true});
  vert_entry_[v] = top_.begin();
  line_x_[v] = x;
  x_to_vertex_[x] = v;
  left_v_ = v;
  left_x_ = x;
}

Frontier::Iter Frontier::root_edge() {
  auto it = vert_entry_.find(0);
  if (it == vert_entry_.end())
    throw InvariantViolation("root vertex is no longer on the frontier");
  return it->second;
}

Frontier::Iter Frontier::at_offset(Iter base, int off) {
  Iter it = base;
  while (off > 0) {
    ++it;
    if (it == top_.end()) {
      extend_right();
      it = std::prev(top_.end());
    }
    --off;
  }
  while (off < 0) {
    if (it == top_.begin()) {
      extend_left();
      it = top_.begin();
    } else {
      --it;
    }
    ++off;
  }
  return it;
}

Frontier::Iter Frontier::entry_of_vertex(int v) {
  auto it = vert_entry_.find(v);
  if (it == vert_entry_.end()) throw NotOnBoundary("vertex is not on the frontier");
  return it->second;
}

bool Frontier::on_frontier(int v) const { return vert_entry_.count(v) != 0; }

void Frontier::check_local(Iter it) const {
  auto chk = [&](Iter a) {
    Iter nx = std::next(a);
    if (nx == top_.end()) return;
    if (b_.vrt[twin(a->d)] != b_.vrt[nx->d])
      throw InvariantViolation("frontier entries are not endpoint-chained");
    if (b_.phi(a->d) != nx->d)
      throw InvariantViolation("frontier breaks the external face orbit");
  };
  if (it != top_.begin()) chk(std::prev(it));
  chk(it);
  if (std::next(it) != top_.end()) chk(std::next(it));
}

Frontier::StepResult Frontier::peel(Iter edge, Rng& rng, bool fill,
                                    long long fill_budget) {
  HalfPlaneLaw::Draw dr = law_->sample(rng);
  if (dr.l1 > kMaxHole || dr.l2 > kMaxHole)
    throw BudgetExceeded("peel: swallowed arc too large to materialize", steps_);

  const int l1 = dr.l1, l2 = dr.l2;
  Iter atb_it = at_offset(edge, 1);

  // resolve bound targets and the consumed range [lo, hi] (inclusive) before
  // any surgery; offsets count boundary entries from the peeled edge
  AttachChoice ch;
  Iter lo = edge, hi = edge;
  switch (dr.config) {
    case PeelConfig::Growth:
      break;
    case PeelConfig::AttachedRight:
      ch.at_c = at_offset(edge, 2 * l1)->d;
      hi = at_offset(edge, 2 * l1 - 1);
      break;
    case PeelConfig::WrappedRight:
      ch.at_d = at_offset(edge, 2 * l1 - 1)->d;
      hi = l1 == 1 ? edge : at_offset(edge, 2 * l1 - 2);
      break;
    case PeelConfig::AttachedLeft:
      lo = at_offset(edge, -(2 * l1 - 1));
      ch.at_d = lo->d;
      break;
    case PeelConfig::WrappedLeft:
      lo = l1 == 1 ? edge : at_offset(edge, -(2 * l1 - 2));
      ch.at_c = lo->d;
      break;
    case PeelConfig::TwoRight:
      ch.at_c = at_offset(edge, 2 * l1)->d;
      ch.at_d = at_offset(edge, 2 * l1 + 2 * l2 - 1)->d;
      hi = at_offset(edge, 2 * (l1 + l2) - 2);
      break;
    case PeelConfig::TwoLeft:
      ch.at_d = at_offset(edge, -(2 * l2 - 1))->d;
      lo = at_offset(edge, -(2 * l1 + 2 * l2 - 2));
      ch.at_c = lo->d;
      break;
    case PeelConfig::Split:
      ch.at_c = at_offset(edge, 2 * l2)->d;
      lo = at_offset(edge, -(2 * l1 - 1));
      ch.at_d = lo->d;
      hi = at_offset(edge, 2 * l2 - 1);
      break;
  }

  const int64_t x_w = edge->x;
  const int64_t x_at_d = ch.at_d >= 0 && lo->d == ch.at_d ? lo->x : kNoLine;
  const int64_t x_at_c = ch.at_c >= 0 && lo->d == ch.at_c ? lo->x : kNoLine;

  AttachedFace af = attach_face(b_, edge->d, atb_it->d, ch);
  grow_tables(b_, prot_, line_dart_);

  // replacement top entries, left to right, with inherited line coordinates
  std::vector<Entry> ins;
  StepResult sr;
  sr.pc = dr.pc;
  sr.config = dr.config;
  sr.l1 = l1;
  sr.l2 = l2;
  switch (dr.config) {
    case PeelConfig::Growth:
      ins = {{twin(af.n3), x_w, false}, {twin(af.n2), kNoLine, false},
             {twin(af.n1), kNoLine, false}};
      break;
    case PeelConfig::AttachedRight:
      ins = {{twin(af.n3), x_w, false}, {twin(af.n2), kNoLine, false}};
      sr.holes.push_back(HoleInfo{twin(af.n1), l1});
      break;
    case PeelConfig::WrappedRight:
      ins = {{twin(af.n3), x_w, false}};
      sr.holes.push_back(HoleInfo{b_.phi(twin(af.n2)), l1});
      break;
    case PeelConfig::AttachedLeft:
      ins = {{twin(af.n2), x_at_d, false}, {twin(af.n1), kNoLine, false}};
      sr.holes.push_back(HoleInfo{twin(af.n3), l1});
      break;
    case PeelConfig::WrappedLeft:
      ins = {{twin(af.n1), x_at_c, false}};
      sr.holes.push_back(HoleInfo{twin(af.n3), l1});
      break;
    case PeelConfig::TwoRight:
      ins = {{twin(af.n3), x_w, false}};
      sr.holes.push_back(HoleInfo{twin(af.n1), l1});
      sr.holes.push_back(HoleInfo{b_.phi(twin(af.n2)), l2});
      break;
    case PeelConfig::TwoLeft:
      ins = {{twin(af.n1), x_at_c, false}};
      sr.holes.push_back(HoleInfo{b_.phi(twin(af.n2)), l1});
      sr.holes.push_back(HoleInfo{twin(af.n3), l2});
      break;
    case PeelConfig::Split:
      ins = {{twin(af.n2), x_at_d, false}};
      sr.holes.push_back(HoleInfo{twin(af.n3), l1});
      sr.holes.push_back(HoleInfo{twin(af.n1), l2});
      break;
  }

  // line extent touched by this step: consumed entries plus the surviving
  // boundary vertex on the right of the consumed range
  Iter after = std::next(hi);
  int64_t mn = std::numeric_limits<int64_t>::max();
  int64_t mx = std::numeric_limits<int64_t>::min();
  bool any = false;
  auto touch = [&](int64_t x) {
    if (x == kNoLine) return;
    mn = std::min(mn, x);
    mx = std::max(mx, x);
    any = true;
  };
  for (Iter it = lo; it != after; ++it) touch(it->x);
  touch(after->x);
  if (any) {
    sr.swallow_reach_x = mx;
    if (!touched_any_) {
      touched_lo_ = mn;
      touched_hi_ = mx;
      touched_any_ = true;
    } else {
      touched_lo_ = std::min(touched_lo_, mn);
      touched_hi_ = std::max(touched_hi_, mx);
    }
  }

  // splice the boundary list
  for (Iter it = lo; it != after;) {
    vert_entry_.erase(b_.vrt[it->d]);
    it = top_.erase(it);
  }
  Iter first_ins = after;
  for (const Entry& e : ins) {
    Iter ni = top_.insert(after, e);
    if (first_ins == after) first_ins = ni;
    vert_entry_[b_.vrt[e.d]] = ni;
  }
  if (!root_swallowed_ && vert_entry_.find(0) == vert_entry_.end())
    root_swallowed_ = true;

  x_value_ += dr.pc.delta_x;
  min_x_ = std::min(min_x_, x_value_);
  ++steps_;
  ++faces_;

  // hole boundary stats
  for (HoleInfo& h : sr.holes) {
    int64_t hmn = std::numeric_limits<int64_t>::max();
    int64_t hmx = std::numeric_limits<int64_t>::min();
    long long deg = 0;
    Dart d = h.rep;
    do {
      auto lx = line_x_.find(b_.vrt[d]);
      if (lx != line_x_.end()) {
        hmn = std::min(hmn, lx->second);
        hmx = std::max(hmx, lx->second);
        h.has_line = true;
      }
      if ((d | 1) == (root_dart_ | 1)) h.contains_root_edge = true;
      d = b_.phi(d);
      if (++deg > 2LL * h.half_perim)
        throw InvariantViolation("hole orbit longer than its recorded perimeter");
    } while (d != h.rep);
    if (deg != 2LL * h.half_perim)
      throw InvariantViolation("hole orbit shorter than its recorded perimeter");
    h.x_min = h.has_line ? hmn : kNoLine;
    h.x_max = h.has_line ? hmx : kNoLine;
  }

  if (debug_checks_) check_local(first_ins);
  if (fill) fill_holes(sr, rng, fill_budget);
  return sr;
}

void Frontier::fill_holes(StepResult& sr, Rng& rng, long long fill_budget) {
  long long used = 0;
  for (HoleInfo& h : sr.holes) {
    if (h.fill_faces > 0) continue;
    grow_tables(b_, prot_, line_dart_);
    // the reps of the holes still waiting must survive this fill
    std::vector<Dart> marked;
    for (const HoleInfo& o : sr.holes) {
      if (&o == &h || o.fill_faces > 0) continue;
      prot_[o.rep] = prot_[twin(o.rep)] = 1;
      marked.push_back(o.rep);
    }
    h.fill_faces = fill_hole(b_, h.rep, h.half_perim, rng, prot_, fill_budget - used);
    used += h.fill_faces;
    faces_ += h.fill_faces;
    grow_tables(b_, prot_, line_dart_);
    for (Dart m : marked) prot_[m] = prot_[twin(m)] = 0;
  }
}

long long Frontier::recompute_x() const {
  // every untouched line stretch contributes exactly one entry per unit of
  // coordinate span, so it cancels in the count; what remains is the net
  // boundary-length change of the explored stretches
  return (long long)top_.size() - (right_x_ - left_x_);
}

PlanarMap Frontier::freeze(std::vector<Dart>* dart_map,
                           std::vector<int32_t>* vertex_map) const {
  return b_.freeze(root_dart_, dart_map, vertex_map);
}

std::vector<uint8_t> Frontier::freeze_colors(const PlanarMap& m,
                                             const std::vector<int32_t>& vmap) const {
  return b_.frozen_colors(m, vmap);
}

int64_t Frontier::line_coord(int v) const {
  auto it = line_x_.find(v);
  return it == line_x_.end() ? kNoLine : it->second;
}

std::pair<PeelCase, Frontier::StepResult> peel_step(Frontier& f, Dart edge, Rng& rng,
                                                    bool fill) {
  MapBuilder& b = f.builder();
  if (edge < 0 || edge >= b.n_darts_total() || !b.alive[edge])
    throw NotOnBoundary("not a live dart");
  Frontier::Iter it = f.entry_of_vertex(b.vrt[edge]);
  if (it->d != edge) throw NotOnBoundary("dart is not a frontier dart");
  Frontier::StepResult sr = f.peel(it, rng, fill);
  return {sr.pc, sr};
}

// ---------------------------------------------------------------------------
// blocks
// ---------------------------------------------------------------------------

static BlockResult run_block(Frontier& f, int L, Rng& rng) {
  if (L < 1) throw DomainError("block scale must be positive");
  BlockResult br;
  const long long tmax = (long long)std::floor(std::pow((double)L, 1.5));
  // with the site S entries left of the root, the covered line span obeys
  // db <= S + 2 - min X (a left glue reaching j entries past the site covers
  // S + j - X new coordinates); S = 3L/2 makes the asserted bound hold on
  // every run
  const int site_off = -(3 * L / 2);

  Frontier::StepResult last;
  StopReason reason = StopReason::Time;
  long long t = 0;
  // line extent covered by revealed faces; the stopping step's holes are left
  // unfilled, so their line arcs belong to the holes, not to the bottom
  // boundary of the revealed region
  int64_t db = 1;
  while (true) {
    Frontier::Iter site = f.at_offset(f.root_edge(), site_off);
    Frontier::StepResult sr = f.peel(site, rng, false);
    ++t;
    const long long dx = sr.pc.delta_x;
    if (2 * std::llabs(dx) >= L) {
      reason = StopReason::Jump;
      last = std::move(sr);
      break;
    }
    if (2 * std::llabs(f.x_value()) >= L) {
      reason = StopReason::Walk;
      last = std::move(sr);
      break;
    }
    if (t >= tmax) {
      reason = StopReason::Time;
      last = std::move(sr);
      break;
    }
    f.fill_holes(sr, rng);
    db = std::max<int64_t>(f.touched_hi(), 1) - std::min<int64_t>(f.touched_lo(), 0);
  }

  // swallowed-line bound: |db| <= (3/2)L + 2 - 2 min X
  if (2 * db > 3LL * L + 4 - 4 * f.min_x())
    throw InvariantViolation("swallowed boundary exceeds the a.s. bound");

  br.stop_reason = reason;
  br.tau = t;
  br.x_tau = f.x_value();
  br.min_x = f.min_x();
  br.success = reason == StopReason::Jump && last.swallow_reach_x != Frontier::kNoLine &&
               last.swallow_reach_x >= 3LL * L;

  for (const Frontier::HoleInfo& h : last.holes) {
    if (!h.contains_root_edge) continue;
    br.has_hole = true;
    if (h.has_line) {
      br.dt_H = 2LL * h.half_perim - (h.x_max - h.x_min);
      br.dl_H = -h.x_min;
      br.db_H = L;
      br.dr_H = h.x_max - L;
      br.success_with_dimensions = br.success && h.x_min <= -(int64_t)L &&
                                   h.x_max >= 2LL * L && br.dt_H <= L;
    }
    break;
  }

  std::vector<Dart> dmap;
  std::vector<int32_t> vmap;
  br.explored.region = f.freeze(&dmap, &vmap);
  br.explored.dart_on_line.assign(br.explored.region.n_darts(), 0);
  for (Dart d = 0; d < (Dart)dmap.size(); ++d)
    if (dmap[d] >= 0 && f.is_line_dart(d)) br.explored.dart_on_line[dmap[d]] = 1;
  br.explored.bottom_len = db;
  br.explored.top_len = f.recompute_x() + db;
  for (const Frontier::HoleInfo& h : last.holes)
    br.explored.hole_perimeters.push_back(2 * h.half_perim);
  return br;
}

BlockResult build_block(int L, Rng& rng, const HalfPlaneLaw& law) {
  Frontier f(&law);
  return run_block(f, L, rng);
}

std::vector<IterateRow> iterate_blocks(int n_max, Rng& rng, const HalfPlaneLaw& law,
                                       long long budget) {
  std::vector<IterateRow> rows;
  long long L = 2;
  long long faces_total = 0;
  for (int n = 0; n < n_max; ++n) {
    if (L > 2'000'000)
      throw BudgetExceeded("iterate_blocks: scale grew past the materialization cap", n);
    Frontier f(&law);
    IterateRow row;
    row.block = run_block(f, (int)L, rng);
    faces_total += f.faces_revealed();
    if (faces_total > budget) throw BudgetExceeded("iterate_blocks", faces_total);

    // separating segment: the span of boundary entries covering everything
    // exposed plus the touched part of the line
    const int64_t lo_x = std::min<int64_t>(f.touched_lo(), 0);
    const int64_t hi_x = std::max<int64_t>(f.touched_hi(), 1);
    long long idx = 0, a = -1, bz = -1;
    for (const Frontier::Entry& e : f.boundary_entries()) {
      bool in = !e.line_edge || (e.x != Frontier::kNoLine && e.x >= lo_x && e.x < hi_x);
      if (in) {
        if (a < 0) a = idx;
        bz = idx;
      }
      ++idx;
    }
    if (a < 0) throw InvariantViolation("block left no exposed boundary");
    long long ln = bz - a + 1;
    ln += ln & 1;
    row.L_next = ln;
    row.good = row.block.success_with_dimensions;
    rows.push_back(std::move(row));
    L = std::max<long long>(ln, 2);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// lazy revelation
// ---------------------------------------------------------------------------

void reveal_star(Frontier& f, int v, Rng& rng, long long budget) {
  const long long start = f.faces_revealed();
  while (f.on_frontier(v)) {
    if (f.faces_revealed() - start > budget)
      throw BudgetExceeded("reveal_star", f.faces_revealed() - start);
    Frontier::Iter it = f.entry_of_vertex(v);
    f.peel(it, rng, true, budget - (f.faces_revealed() - start));
  }
}

Frontier reveal_hull(int radius, Rng& rng, const HalfPlaneLaw& law, long long budget) {
  if (radius < 0) throw DomainError("radius must be nonnegative");
  Frontier f(&law);
  while (true) {
    if (f.faces_revealed() > budget)
      throw BudgetExceeded("reveal_hull", f.faces_revealed());
    const MapBuilder& b = f.builder();
    const int nv = b.n_vertices();
    std::vector<std::vector<int>> adj(nv);
    for (Dart d = 0; d < (Dart)b.n_darts_total(); d += 2) {
      if (!b.alive[d]) continue;
      adj[b.vrt[d]].push_back(b.vrt[twin(d)]);
      adj[b.vrt[twin(d)]].push_back(b.vrt[d]);
    }
    std::vector<int> dist(nv, -1);
    std::deque<int> q;
    dist[0] = 0;
    q.push_back(0);
    while (!q.empty()) {
      int u = q.front();
      q.pop_front();
      if (dist[u] > radius) continue;
      for (int w : adj[u])
        if (dist[w] < 0) {
          dist[w] = dist[u] + 1;
          q.push_back(w);
        }
    }
    std::vector<int> close;
    for (int v = 0; v < nv; ++v)
      if (dist[v] >= 0 && dist[v] <= radius && f.on_frontier(v)) close.push_back(v);
    if (close.empty()) break;
    for (int v : close)
      if (f.on_frontier(v))
        reveal_star(f, v, rng, budget - f.faces_revealed());
  }
  return f;
}

}  // namespace planarpeel

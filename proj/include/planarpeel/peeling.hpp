#pragma once
#include <array>
#include <list>
#include <unordered_map>
#include <vector>

#include "planarpeel/enumgf.hpp"
#include "planarpeel/quad.hpp"
#include "planarpeel/rational.hpp"
#include "planarpeel/rng.hpp"

namespace planarpeel {

// ---------------------------------------------------------------------------
// surgery
//
// Peeling a hole edge e = (w, b) (w white, hole on the left of e) reveals the
// quadrangle F = (w, b, c, d). Each of c, d is either a fresh vertex or an
// existing hole-boundary vertex; the three new edges b-c, c-d, d-w are drawn
// inside the hole and split it into F plus up to three smaller regions.
// Perimeter-2 regions may then be collapsed by identifying their two edges
// (the trivial quadrangulation filling).
// ---------------------------------------------------------------------------

struct AttachChoice {
  Dart at_c = -1;  // hole dart whose origin is c, or -1 for a fresh vertex
  Dart at_d = -1;  // likewise for d
};

struct AttachedFace {
  Dart n1;  // b -> c
  Dart n2;  // c -> d
  Dart n3;  // d -> w
};

// peel: hole dart at e (origin w); at_b: the following hole dart (origin b).
// The new face orbit is (peel, n1, n2, n3).
AttachedFace attach_face(MapBuilder& b, Dart peel, Dart at_b, const AttachChoice& ch);

// fill the perimeter-2 hole at rep with the trivial quadrangulation: the two
// hole edges are identified; the edge carrying a protected dart survives.
// Returns a dart of the surviving edge.
Dart zip_hole(MapBuilder& b, Dart rep, const std::vector<uint8_t>& prot);

// attachment in disk coordinates along a finite hole: t counts hole darts
// from the peeled edge (t = 0), so the vertex at position t is w for t = 0
// (mod 2p), b for t = 1. t_c is even in [2, 2p] or 0 for fresh; t_d is odd in
// [1, 2p-1] or 0 for fresh; when both are bound, t_c < t_d.
struct DiskAttachment {
  int t_c = 0;
  int t_d = 0;
};

// returns the new finite regions as (representative dart, half perimeter),
// in the order: c-side region, d-side region, remainder
std::vector<std::pair<Dart, int>> attach_in_hole(MapBuilder& b, Dart rep,
                                                 int half_perim,
                                                 const DiskAttachment& a);

// ---------------------------------------------------------------------------
// step laws
// ---------------------------------------------------------------------------

enum class PeelKind { Growth, GlueLeft, GlueRight, TwoHoles, Zip };

struct PeelCase {
  PeelKind kind = PeelKind::Growth;
  int l1 = 0, l2 = 0;  // hole half-perimeters
  int delta_x = 2;     // +2 growth, 2-2l glue, 2-2(l1+l2) two holes
};

PeelCase make_peel_case(PeelKind k, int l1 = 0, int l2 = 0);

// Exact finite-perimeter law. Weight of an attachment is the product of Q
// over the resulting regions, divided by 12 Q_p; the trivial filling (p = 1
// only) has weight 12 / (12 Q_1). Total mass 1 exactly, or
// NormalizationFailure.
struct FiniteCaseLaw {
  int p = 0;
  struct Entry {
    bool zip = false;
    DiskAttachment a;
    Rat prob;
    PeelCase pc;
  };
  std::vector<Entry> entries;
};
FiniteCaseLaw finite_case_distribution(int p);

// aggregated probability of a PeelCase kind under the finite law
Rat finite_case_probability(const FiniteCaseLaw& law, const PeelCase& pc);

// The half-plane configurations. Seen from the peeled edge (boundary running
// left to right, unexplored region above): holes can be swallowed on the
// right of the edge, on the left, or on both sides; "wrapped" holes carry the
// fresh third vertex of the face on their boundary.
enum class PeelConfig : uint8_t {
  Growth,
  AttachedRight,  // c on the boundary right of b, d fresh
  WrappedRight,   // d on the boundary right of b, c fresh (hole contains c)
  AttachedLeft,   // d on the boundary left of w, c fresh
  WrappedLeft,    // c on the boundary left of w, d fresh (hole contains d)
  TwoRight,       // c and d right of b: two holes on the right
  TwoLeft,        // c and d left of w: two holes on the left
  Split           // c right of b, d left of w: one hole on each side
};

// Half-plane step law: growth has mass 3/8; each of the four one-hole
// configurations has mass (3/8)(2/9)^l Q_l; each of the three two-hole
// configurations has mass (3/8)(2/9)^(l1+l2) Q_l1 Q_l2. Equivalently: the
// configuration is Growth w.p. 3/8, each one-hole configuration w.p. 1/8,
// each two-hole configuration w.p. 1/24, and hole half-perimeters are drawn
// independently from pi(l) = 3 (2/9)^l Q_l.
struct HalfPlaneLaw {
  int tail_cutoff = 0;
  std::vector<double> pi;     // pi[l], l = 1..cutoff
  double pi_cum_at_cutoff = 0;
  double tail_mass = 0;        // 1 - partial sum (certified small)
  double tail_bound = 0;       // proven bound on sum_{l>cutoff} pi(l)
  double tail_envelope_c = 0;  // c with pi(l) <= c l^{-5/2} for l > cutoff
  std::vector<int> alias_idx;
  std::vector<double> alias_cut;

  struct Draw {
    PeelConfig config;
    int l1 = 0, l2 = 0;
    PeelCase pc;
  };
  int sample_half_perimeter(Rng& rng) const;
  Draw sample(Rng& rng) const;
  double config_prob(PeelConfig c, int l1, int l2) const;
  // aggregated over the mirror configurations of the same PeelCase
  double case_prob(const PeelCase& pc) const;
};
HalfPlaneLaw halfplane_case_distribution(int tail_cutoff);

// ---------------------------------------------------------------------------
// samplers
// ---------------------------------------------------------------------------

// critical Boltzmann quadrangulation of perimeter 2p: P(q) = 12^{-n} / Q_p
Quadrangulation sample_boltzmann_quadrangulation(int p, Rng& rng,
                                                 long long budget = 50'000'000);

// in-place Boltzmann filling of a hole of an ambient builder; returns the
// number of faces added. prot darts are never deleted by trivial fillings.
long long fill_hole(MapBuilder& b, Dart rep, int half_perim, Rng& rng,
                    std::vector<uint8_t>& prot, long long budget);

// ---------------------------------------------------------------------------
// the half-plane frontier
// ---------------------------------------------------------------------------

// Lazily revealed UIHPQ. The initial boundary is a two-colored line,
// materialized on demand; the explored region grows by peel(). The boundary
// list runs left to right; entry darts have the unexplored region on their
// left. x_value accumulates the per-case increments delta_x.
class Frontier {
 public:
  struct Entry {
    Dart d;
    int64_t x;  // line coordinate of the origin vertex, or kNoLine
    bool line_edge;
  };
  static constexpr int64_t kNoLine = INT64_MIN;
  using Iter = std::list<Entry>::iterator;

  struct HoleInfo {
    Dart rep;
    int half_perim;
    int64_t x_min = 0, x_max = 0;  // line extent of the hole boundary (kNoLine none)
    bool has_line = false;
    bool contains_root_edge = false;
    long long fill_faces = 0;
  };

  struct StepResult {
    PeelCase pc;
    PeelConfig config;
    int l1 = 0, l2 = 0;
    std::vector<HoleInfo> holes;
    int64_t swallow_reach_x = kNoLine;  // rightmost line coordinate touched
  };

  explicit Frontier(const HalfPlaneLaw* law, uint8_t debug_checks = 0);

  const HalfPlaneLaw& law() const { return *law_; }
  MapBuilder& builder() { return b_; }
  const MapBuilder& builder() const { return b_; }
  Dart root_dart() const { return root_dart_; }
  bool root_swallowed() const { return root_swallowed_; }

  long long x_value() const { return x_value_; }
  long long min_x() const { return min_x_; }
  int64_t touched_lo() const { return touched_lo_; }
  int64_t touched_hi() const { return touched_hi_; }
  long long steps() const { return steps_; }

  // boundary navigation; offsets extend the line window as needed
  Iter root_edge();  // entry whose origin is the root vertex (x = 0)
  Iter at_offset(Iter base, int off);
  Iter entry_of_vertex(int v);  // frontier entry rooted at builder vertex v
  bool on_frontier(int v) const;
  int boundary_size() const { return (int)top_.size(); }
  const std::list<Entry>& boundary_entries() const { return top_; }

  // one peeling step at the given boundary entry; with fill = false the new
  // finite holes are left open (fill_holes completes them later)
  StepResult peel(Iter edge, Rng& rng, bool fill, long long fill_budget = 50'000'000);
  void fill_holes(StepResult& sr, Rng& rng, long long fill_budget = 50'000'000);

  // |dt| - |db| recomputed from the boundary list over the whole materialized
  // window; always equals x_value when the splice bookkeeping is consistent
  long long recompute_x() const;

  // explored region (plus the materialized line window) as a finite map
  PlanarMap freeze(std::vector<Dart>* dart_map = nullptr,
                   std::vector<int32_t>* vertex_map = nullptr) const;
  std::vector<uint8_t> freeze_colors(const PlanarMap& m,
                                     const std::vector<int32_t>& vmap) const;
  // line coordinate of a builder vertex, or kNoLine
  int64_t line_coord(int v) const;
  bool is_line_dart(Dart d) const {
    return d >= 0 && d < (Dart)line_dart_.size() && line_dart_[d];
  }
  long long faces_revealed() const { return faces_; }

 private:
  const HalfPlaneLaw* law_;
  MapBuilder b_;
  std::list<Entry> top_;
  std::unordered_map<int, Iter> vert_entry_;      // origin vertex -> entry
  std::unordered_map<int, int64_t> line_x_;       // line vertices -> coordinate
  std::unordered_map<int64_t, int> x_to_vertex_;  // inverse of line_x_
  std::vector<uint8_t> prot_;
  std::vector<uint8_t> line_dart_;  // darts of line-window edges
  int left_v_ = -1, right_v_ = -1;  // window end vertices
  Dart root_dart_ = -1;
  bool root_swallowed_ = false;
  int64_t left_x_ = 0, right_x_ = 1;  // window vertex coordinate range
  long long x_value_ = 0, min_x_ = 0, steps_ = 0, faces_ = 0;
  int64_t touched_lo_ = 0, touched_hi_ = 0;
  bool touched_any_ = false;
  uint8_t debug_checks_;

  void extend_left();
  void extend_right();
  void check_local(Iter it) const;
};

// spec-shaped wrapper: one peeling step at a boundary dart
std::pair<PeelCase, Frontier::StepResult> peel_step(Frontier& f, Dart edge, Rng& rng,
                                                    bool fill);

// ---------------------------------------------------------------------------
// blocks
// ---------------------------------------------------------------------------

struct SubMap {
  PlanarMap region;                 // explored faces, holes left as faces
  std::vector<uint8_t> dart_on_line;
  int64_t bottom_len = 0;           // touched line extent (includes the root)
  int64_t top_len = 0;              // boundary edges spanning that extent
  std::vector<int> hole_perimeters;
};

enum class StopReason { Time, Walk, Jump };

struct BlockResult {
  SubMap explored;
  StopReason stop_reason = StopReason::Time;
  bool success = false;             // tau = tau_jump and reach >= 3L right of root
  bool success_with_dimensions = false;
  bool has_hole = false;
  int64_t dt_H = 0, dl_H = 0, db_H = 0, dr_H = 0;
  long long min_x = 0;
  long long tau = 0;
  long long x_tau = 0;
};

// One block at scale L: peel the edge whose right endpoint sits (3/2)L left
// of the root along the boundary, stop at tau = min(floor(L^{3/2}),
// first |X| >= L/2, first |delta X| >= L/2); holes are not filled. The bound
// |db Q^tau| <= (3/2)L + 2 - 2 min X is asserted on every run.
BlockResult build_block(int L, Rng& rng, const HalfPlaneLaw& law);

struct IterateRow {
  BlockResult block;
  long long L_next = 0;
  bool good = false;
};

// the block recursion: L[0] = 2, each block built in a fresh half plane (the
// spatial Markov property makes the unexplored region a fresh UIHPQ), L[n+1]
// read off the separating boundary segment, rounded up to even
std::vector<IterateRow> iterate_blocks(int n_max, Rng& rng, const HalfPlaneLaw& law,
                                       long long budget = 400'000'000);

// ---------------------------------------------------------------------------
// lazy revelation
// ---------------------------------------------------------------------------

// peel (filled-in) until the star of builder vertex v is complete
void reveal_star(Frontier& f, int v, Rng& rng, long long budget = 50'000'000);

// reveal until every vertex within graph distance `radius` of the root has a
// complete star; the returned frontier then determines the hull of radius
// `radius` around the root
Frontier reveal_hull(int radius, Rng& rng, const HalfPlaneLaw& law,
                     long long budget = 400'000'000);

}  // namespace planarpeel

#include "stringtop/chords.hpp"

#include "stringtop/errors.hpp"
#include "stringtop/signs.hpp"

#include <algorithm>
#include <set>

namespace stringtop {

std::string to_string(RepKind r) {
  return r == RepKind::Standard ? "std" : "twist";
}

RepKind rep_from_string(const std::string &s) {
  if (s == "std")
    return RepKind::Standard;
  if (s == "twist")
    return RepKind::Twisted;
  throw ConfigError("unknown representation label '" + s + "'");
}

ChordDiagram::ChordDiagram(std::vector<ChordCircle> circles,
                           std::vector<std::pair<int, int>> arcs,
                           bool allow_open)
    : circles_(std::move(circles)), arcs_(std::move(arcs)) {
  std::set<int> labels;
  for (const auto &c : circles_) {
    if (c.dim < 0)
      throw ValidationError("negative representation dimension");
    for (int l : c.endpoints) {
      if (l < 0)
        throw ValidationError("endpoint labels must be non-negative");
      if (!labels.insert(l).second)
        throw ValidationError("endpoint " + std::to_string(l) +
                              " appears twice");
    }
  }
  std::set<int> used;
  for (const auto &[x, y] : arcs_) {
    if (x == y)
      throw ValidationError("an arc joins endpoint " + std::to_string(x) +
                            " to itself");
    for (int l : {x, y}) {
      if (!labels.count(l))
        throw ValidationError("arc endpoint " + std::to_string(l) +
                              " is on no circle");
      if (!used.insert(l).second)
        throw ValidationError("endpoint " + std::to_string(l) +
                              " belongs to two arcs");
    }
  }
  closed_ = used.size() == labels.size();
  if (!closed_ && !allow_open)
    throw ValidationError("every endpoint must belong to exactly one arc");
}

std::pair<int, int> ChordDiagram::locate(int label) const {
  for (size_t c = 0; c < circles_.size(); ++c) {
    const auto &e = circles_[c].endpoints;
    auto it = std::find(e.begin(), e.end(), label);
    if (it != e.end())
      return {static_cast<int>(c), static_cast<int>(it - e.begin())};
  }
  throw ConfigError("no endpoint labelled " + std::to_string(label));
}

int ChordDiagram::partner(int label) const {
  for (const auto &[x, y] : arcs_) {
    if (x == label)
      return y;
    if (y == label)
      return x;
  }
  return -1;
}

int ChordDiagram::max_label() const {
  int m = -1;
  for (const auto &c : circles_)
    for (int l : c.endpoints)
      m = std::max(m, l);
  return m;
}

ChordDiagram ChordDiagram::canonical() const {
  std::vector<ChordCircle> cs = circles_;
  for (auto &c : cs) {
    auto best = c.endpoints;
    auto cur = c.endpoints;
    for (size_t r = 1; r < cur.size(); ++r) {
      std::rotate(cur.begin(), cur.begin() + 1, cur.end());
      best = std::min(best, cur);
    }
    c.endpoints = best;
  }
  auto as = arcs_;
  for (auto &[x, y] : as)
    if (x > y)
      std::swap(x, y);
  std::sort(as.begin(), as.end());
  return ChordDiagram(std::move(cs), std::move(as), true);
}

bool ChordDiagram::operator==(const ChordDiagram &o) const {
  const ChordDiagram a = canonical(), b = o.canonical();
  if (a.circles_.size() != b.circles_.size() || a.arcs_ != b.arcs_)
    return false;
  for (size_t c = 0; c < a.circles_.size(); ++c)
    if (a.circles_[c].rep != b.circles_[c].rep ||
        a.circles_[c].dim != b.circles_[c].dim ||
        a.circles_[c].endpoints != b.circles_[c].endpoints)
      return false;
  return true;
}

std::vector<DiagramTerm> four_t_combination(const ChordDiagram &d,
                                            const FourTSite &site) {
  if (site.arc < 0 || site.arc >= static_cast<int>(d.arcs().size()))
    throw ConfigError("4T site refers to a missing arc");
  if (site.circle < 0 || site.circle >= static_cast<int>(d.circles().size()))
    throw ConfigError("4T site refers to a missing circle");
  const int len =
      static_cast<int>(d.circles()[site.circle].endpoints.size());
  if (site.position < 0 || site.position > len)
    throw ConfigError("4T slot position out of range");
  const int fixed = d.max_label() + 1, moving = fixed + 1;
  auto base = d.circles();
  auto &slot = base[site.circle].endpoints;
  slot.insert(slot.begin() + site.position, fixed);
  auto arcs = d.arcs();
  arcs.emplace_back(moving, fixed);
  auto with = [&](int at, bool after) {
    auto cs = base;
    for (auto &c : cs) {
      auto it = std::find(c.endpoints.begin(), c.endpoints.end(), at);
      if (it != c.endpoints.end()) {
        c.endpoints.insert(it + (after ? 1 : 0), moving);
        break;
      }
    }
    return ChordDiagram(std::move(cs), arcs);
  };
  const auto [p, q] = d.arcs()[site.arc];
  return {{1, with(p, false)},
          {-1, with(p, true)},
          {1, with(q, false)},
          {-1, with(q, true)}};
}

namespace {

template <class T>
std::vector<T> slice(const std::vector<T> &v, size_t from, size_t to) {
  return std::vector<T>(v.begin() + from, v.begin() + to);
}

template <class T> void append(std::vector<T> &a, const std::vector<T> &b) {
  a.insert(a.end(), b.begin(), b.end());
}

} // namespace

std::vector<DiagramTerm> gln_ideal_element(const ChordDiagram &d, int arc) {
  if (arc < 0 || arc >= static_cast<int>(d.arcs().size()))
    throw ConfigError("no arc " + std::to_string(arc));
  const auto [x, y] = d.arcs()[arc];
  const auto [cx, px] = d.locate(x);
  const auto [cy, py] = d.locate(y);
  auto cs = d.circles();
  if (cs[cx].rep != RepKind::Standard || cs[cy].rep != RepKind::Standard)
    throw ConfigError("GL(n) smoothing applies to standard circles only");
  auto arcs = d.arcs();
  arcs.erase(arcs.begin() + arc);
  if (cx != cy) {
    const auto &a = cs[cx].endpoints;
    const auto &b = cs[cy].endpoints;
    std::vector<int> merged = slice(a, 0, px);
    append(merged, slice(b, py + 1, b.size()));
    append(merged, slice(b, 0, py));
    append(merged, slice(a, px + 1, a.size()));
    const int keep = std::min(cx, cy);
    cs[keep].endpoints = merged;
    cs.erase(cs.begin() + std::max(cx, cy));
  } else {
    const auto &a = cs[cx].endpoints;
    const int p1 = std::min(px, py), p2 = std::max(px, py);
    std::vector<int> inner = slice(a, p1 + 1, p2);
    std::vector<int> outer = slice(a, p2 + 1, a.size());
    append(outer, slice(a, 0, p1));
    cs[cx].endpoints = outer;
    cs.insert(cs.begin() + cx + 1,
              ChordCircle{RepKind::Standard, inner, cs[cx].dim});
  }
  return {{1, d}, {-1, ChordDiagram(std::move(cs), std::move(arcs))}};
}

namespace {

using Kind = CircleEvent::Kind;

CircleEvent transport_event(int loop, Rational from, Rational to) {
  CircleEvent e;
  e.kind = Kind::Transport;
  e.loop = loop;
  e.from = std::move(from);
  e.to = std::move(to);
  return e;
}

CircleEvent insert_event(int label) {
  CircleEvent e;
  e.kind = Kind::Insert;
  e.label = label;
  return e;
}

bool same_point(const Space &space, const RVec &a, const RVec &b) {
  for (size_t mu = 0; mu < a.size(); ++mu) {
    const Rational diff = a[mu] - b[mu];
    if (space.is_torus() ? boost::multiprecision::denominator(diff) != 1
                         : diff != 0)
      return false;
  }
  return true;
}

std::vector<int> insert_labels(const std::vector<CircleEvent> &events) {
  std::vector<int> out;
  for (const auto &e : events)
    if (e.kind == Kind::Insert)
      out.push_back(e.label);
  return out;
}

bool is_rotation(const std::vector<int> &a, const std::vector<int> &b) {
  if (a.size() != b.size())
    return false;
  if (a.empty())
    return true;
  for (size_t r = 0; r < a.size(); ++r) {
    bool ok = true;
    for (size_t k = 0; k < a.size() && ok; ++k)
      ok = a[(r + k) % a.size()] == b[k];
    if (ok)
      return true;
  }
  return false;
}

int find_insert(const std::vector<CircleEvent> &events, int label) {
  for (size_t k = 0; k < events.size(); ++k)
    if (events[k].kind == Kind::Insert && events[k].label == label)
      return static_cast<int>(k);
  return -1;
}

std::pair<int, int> locate_event(const DiagramRealization &r, int label) {
  for (size_t c = 0; c < r.circles.size(); ++c) {
    const int k = find_insert(r.circles[c], label);
    if (k >= 0)
      return {static_cast<int>(c), k};
  }
  throw ConfigError("realization has no endpoint " + std::to_string(label));
}

/// Splits the first transport step strictly containing t and places an
/// insertion there; returns false if no step contains t in its interior.
bool insert_at(std::vector<CircleEvent> &events, const Rational &t,
               int label) {
  for (size_t k = 0; k < events.size(); ++k) {
    const auto &e = events[k];
    if (e.kind != Kind::Transport || !(e.from < t && t < e.to))
      continue;
    const CircleEvent first = transport_event(e.loop, e.from, t);
    const CircleEvent second = transport_event(e.loop, t, e.to);
    events[k] = first;
    events.insert(events.begin() + k + 1, {insert_event(label), second});
    return true;
  }
  return false;
}

std::vector<ChordCircle> reps_of(const ChordDiagram &d) {
  std::vector<ChordCircle> out = d.circles();
  for (auto &c : out)
    c.endpoints.clear();
  return out;
}

/// Zero-length step at the point reached just before event k, for routes
/// that lose all of their transport steps.
CircleEvent filler_before(const std::vector<CircleEvent> &events, int k) {
  const int m = static_cast<int>(events.size());
  for (int s = 1; s <= m; ++s) {
    const auto &e = events[((k - s) % m + m) % m];
    if (e.kind == Kind::Transport)
      return transport_event(e.loop, e.to, e.to);
  }
  throw ValidationError("circle route has no transport step");
}

bool has_transport(const std::vector<CircleEvent> &events) {
  return std::any_of(events.begin(), events.end(), [](const auto &e) {
    return e.kind == Kind::Transport;
  });
}

} // namespace

DiagramRealization
DiagramRealization::from_loops(const ChordDiagram &d, std::vector<PLLoop> loops,
                               const std::map<int, Placement> &at) {
  if (loops.size() != d.circles().size())
    throw ConfigError("need one loop per circle");
  DiagramRealization r;
  r.loops = std::move(loops);
  for (size_t c = 0; c < d.circles().size(); ++c) {
    struct Item {
      Rational param;
      int tie;
      int label;
    };
    std::vector<Item> items;
    for (int l : d.circles()[c].endpoints) {
      auto it = at.find(l);
      if (it == at.end())
        throw ConfigError("no placement for endpoint " + std::to_string(l));
      if (it->second.param < 0 || it->second.param > 1)
        throw ConfigError("placement parameter outside [0,1]");
      items.push_back({it->second.param, it->second.tie, l});
    }
    std::sort(items.begin(), items.end(), [](const Item &a, const Item &b) {
      return a.param != b.param ? a.param < b.param : a.tie < b.tie;
    });
    for (size_t k = 1; k < items.size(); ++k)
      if (items[k].param == items[k - 1].param &&
          items[k].tie == items[k - 1].tie)
        throw ValidationError("two endpoints share a placement");
    std::vector<CircleEvent> events;
    Rational t = 0;
    for (const auto &item : items) {
      events.push_back(transport_event(static_cast<int>(c), t, item.param));
      events.push_back(insert_event(item.label));
      t = item.param;
    }
    events.push_back(transport_event(static_cast<int>(c), t, 1));
    r.circles.push_back(std::move(events));
  }
  validate_realization(d, r);
  return r;
}

std::optional<int> DiagramRealization::carrier(int circle) const {
  const auto &events = circles.at(circle);
  std::optional<int> loop;
  Rational t = 0;
  for (const auto &e : events) {
    if (e.kind != Kind::Transport)
      continue;
    if (loop && *loop != e.loop)
      return std::nullopt;
    loop = e.loop;
    if (e.from != t)
      return std::nullopt;
    t = e.to;
  }
  if (!loop || t != 1)
    return std::nullopt;
  return loop;
}

RVec DiagramRealization::insertion_point(int circle, int label) const {
  const auto &events = circles.at(circle);
  const int k = find_insert(events, label);
  if (k < 0)
    throw ConfigError("circle has no endpoint " + std::to_string(label));
  const CircleEvent f = filler_before(events, k);
  return loops.at(f.loop).point_exact(f.to);
}

void validate_realization(const ChordDiagram &d, const DiagramRealization &r) {
  if (r.circles.size() != d.circles().size())
    throw ValidationError("realization and diagram have different circles");
  if (r.loops.empty())
    throw ValidationError("realization has no loops");
  const Space space = r.loops.front().space();
  for (const auto &l : r.loops)
    if (!(l.space() == space))
      throw ValidationError("realization loops live on different spaces");
  for (size_t c = 0; c < r.circles.size(); ++c) {
    const auto &events = r.circles[c];
    std::vector<const CircleEvent *> steps;
    for (const auto &e : events) {
      if (e.kind != Kind::Transport)
        continue;
      if (e.loop < 0 || e.loop >= static_cast<int>(r.loops.size()))
        throw ValidationError("transport step refers to a missing loop");
      if (e.from < 0 || e.to > 1 || e.from > e.to)
        throw ValidationError("transport step outside [0,1] or reversed");
      steps.push_back(&e);
    }
    if (steps.empty())
      throw ValidationError("circle " + std::to_string(c) +
                            " has no transport step");
    for (size_t k = 0; k < steps.size(); ++k) {
      const auto *a = steps[k];
      const auto *b = steps[(k + 1) % steps.size()];
      if (!same_point(space, r.loops[a->loop].point_exact(a->to),
                      r.loops[b->loop].point_exact(b->from)))
        throw ValidationError("route of circle " + std::to_string(c) +
                              " is not closed");
    }
    if (!is_rotation(insert_labels(events), d.circles()[c].endpoints))
      throw ValidationError("insertion order on circle " + std::to_string(c) +
                            " does not match the diagram");
  }
}

ChordDiagram diagram_of(const DiagramRealization &r,
                        const std::vector<ChordCircle> &reps,
                        const std::vector<std::pair<int, int>> &arcs,
                        bool allow_open) {
  if (reps.size() != r.circles.size())
    throw ConfigError("need one representation per circle");
  std::vector<ChordCircle> cs;
  for (size_t c = 0; c < r.circles.size(); ++c)
    cs.push_back({reps[c].rep, insert_labels(r.circles[c]), reps[c].dim});
  return ChordDiagram(std::move(cs), arcs, allow_open);
}

Complex evaluate_with_fixed(const ChordDiagram &d, const DiagramRealization &r,
                            const FlatConnection &a,
                            const std::map<int, int> &fixed,
                            const TransportPlan &plan) {
  validate_realization(d, r);
  const int n = a.n();
  const LieBasis basis(n);
  const Representation rep_std = basis.standard();
  const Representation rep_tw = basis.twisted_rep();
  for (const auto &[label, idx] : fixed) {
    d.locate(label);
    if (d.partner(label) >= 0)
      throw ConfigError("fixed endpoint " + std::to_string(label) +
                        " belongs to an arc");
    if (idx < 0 || idx >= basis.size())
      throw ConfigError("fixed basis index out of range");
  }
  for (const auto &c : d.circles()) {
    if (c.dim != 0 && c.dim != n)
      throw ConfigError("circle representation dimension " +
                        std::to_string(c.dim) + " differs from the "
                        "connection's " + std::to_string(n));
    for (int l : c.endpoints)
      if (d.partner(l) < 0 && !fixed.count(l))
        throw ValidationError("endpoint " + std::to_string(l) +
                              " is neither paired nor fixed");
  }

  // Per circle: transport products in the circle's representation,
  // interleaved with insertion labels.
  struct Step {
    bool insert = false;
    Matrix m;
    int label = -1;
  };
  std::vector<std::vector<Step>> prepared;
  std::vector<const Representation *> reps;
  for (size_t c = 0; c < r.circles.size(); ++c) {
    const bool twisted = d.circles()[c].rep == RepKind::Twisted;
    reps.push_back(twisted ? &rep_tw : &rep_std);
    std::vector<Step> steps;
    for (const auto &e : r.circles[c]) {
      if (e.kind == Kind::Insert) {
        steps.push_back({true, Matrix(), e.label});
        continue;
      }
      Matrix h = transport(a, r.loops[e.loop], static_cast<double>(e.from),
                           static_cast<double>(e.to), plan)
                     .body();
      if (twisted)
        h *= h.determinant();
      if (!steps.empty() && !steps.back().insert)
        steps.back().m = steps.back().m * h;
      else
        steps.push_back({false, h, -1});
    }
    prepared.push_back(std::move(steps));
  }

  const auto &arcs = d.arcs();
  const size_t na = arcs.size();
  const long dim = basis.size();
  long total = 1;
  for (size_t k = 0; k < na; ++k) {
    total *= dim;
    if (total > 50'000'000)
      throw ConfigError("too many index assignments to sum explicitly");
  }
  std::map<int, int> index = fixed;
  std::vector<int> assign(na, 0);
  Complex sum = 0;
  for (long it = 0; it < total; ++it) {
    long rest = it;
    Complex weight = 1;
    for (size_t k = 0; k < na; ++k) {
      assign[k] = static_cast<int>(rest % dim);
      rest /= dim;
      index[arcs[k].first] = assign[k];
      index[arcs[k].second] = basis.dual(assign[k]);
      weight *= basis.kappa_inv(assign[k], basis.dual(assign[k]));
    }
    Complex value = weight;
    for (size_t c = 0; c < prepared.size() && value != 0.0; ++c) {
      Matrix m = Matrix::Identity(n, n);
      for (const auto &s : prepared[c])
        m = m * (s.insert ? (*reps[c])(index.at(s.label)) : s.m);
      value *= m.trace();
    }
    sum += value;
  }
  return sum;
}

GradedCoefficient evaluate_diagram(const ChordDiagram &d,
                                   const DiagramRealization &r,
                                   const FlatConnection &a,
                                   const TransportPlan &plan) {
  if (!d.is_closed())
    throw ValidationError("diagram has unpaired endpoints");
  return GradedCoefficient(0, evaluate_with_fixed(d, r, a, {}, plan));
}

std::vector<RealizedDiagram> realize_four_t(const ChordDiagram &d,
                                            const DiagramRealization &r,
                                            int arc, int circle,
                                            const Rational &slot) {
  validate_realization(d, r);
  if (arc < 0 || arc >= static_cast<int>(d.arcs().size()))
    throw ConfigError("no arc " + std::to_string(arc));
  if (circle < 0 || circle >= static_cast<int>(d.circles().size()))
    throw ConfigError("no circle " + std::to_string(circle));
  const int fixed = d.max_label() + 1, moving = fixed + 1;
  DiagramRealization base = r;
  if (!insert_at(base.circles[circle], slot, fixed))
    throw ValidationError("4T slot must lie strictly inside a transport step");
  auto arcs = d.arcs();
  arcs.emplace_back(moving, fixed);
  const auto reps = reps_of(d);
  auto with = [&](int at, bool after, long coeff) {
    DiagramRealization x = base;
    auto [c, k] = locate_event(x, at);
    auto &ev = x.circles[c];
    ev.insert(ev.begin() + k + (after ? 1 : 0), insert_event(moving));
    return RealizedDiagram{coeff, diagram_of(x, reps, arcs), std::move(x)};
  };
  const auto [p, q] = d.arcs()[arc];
  return {with(p, false, 1), with(p, true, -1), with(q, false, 1),
          with(q, true, -1)};
}

RealizedDiagram smooth_arc(const ChordDiagram &d, const DiagramRealization &r,
                           int arc, bool any_rep) {
  validate_realization(d, r);
  if (arc < 0 || arc >= static_cast<int>(d.arcs().size()))
    throw ConfigError("no arc " + std::to_string(arc));
  const auto [x, y] = d.arcs()[arc];
  const auto [cx, kx] = locate_event(r, x);
  const auto [cy, ky] = locate_event(r, y);
  if (!any_rep && (d.circles()[cx].rep != RepKind::Standard ||
                   d.circles()[cy].rep != RepKind::Standard))
    throw ConfigError("GL(n) smoothing applies to standard circles only");
  const RepKind rep = d.circles()[cx].rep;
  const int dim = d.circles()[cx].dim;
  if (!same_point(r.loops.front().space(), r.insertion_point(cx, x),
                  r.insertion_point(cy, y)))
    throw ValidationError("arc endpoints are not at the same point");
  DiagramRealization out;
  out.loops = r.loops;
  auto reps = reps_of(d);
  auto arcs = d.arcs();
  arcs.erase(arcs.begin() + arc);
  const auto &a = r.circles[cx];
  if (cx != cy) {
    const auto &b = r.circles[cy];
    std::vector<CircleEvent> merged = slice(a, 0, kx);
    append(merged, slice(b, ky + 1, b.size()));
    append(merged, slice(b, 0, ky));
    append(merged, slice(a, kx + 1, a.size()));
    out.circles = r.circles;
    const int keep = std::min(cx, cy), drop = std::max(cx, cy);
    out.circles[keep] = std::move(merged);
    out.circles.erase(out.circles.begin() + drop);
    reps.erase(reps.begin() + drop);
  } else {
    const int k1 = std::min(kx, ky), k2 = std::max(kx, ky);
    std::vector<CircleEvent> inner = slice(a, k1 + 1, k2);
    std::vector<CircleEvent> outer = slice(a, k2 + 1, a.size());
    append(outer, slice(a, 0, k1));
    if (!has_transport(inner))
      inner.insert(inner.begin(), filler_before(a, k1));
    if (!has_transport(outer))
      outer.insert(outer.begin(), filler_before(a, k2));
    out.circles = r.circles;
    out.circles[cx] = std::move(outer);
    out.circles.insert(out.circles.begin() + cx + 1, std::move(inner));
    reps.insert(reps.begin() + cx + 1, ChordCircle{rep, {}, dim});
  }
  ChordDiagram dd = diagram_of(out, reps, arcs);
  return RealizedDiagram{1, std::move(dd), std::move(out)};
}

std::vector<RealizedDiagram> gln_quotient(const RealizedDiagram &x) {
  RealizedDiagram cur = x;
  while (!cur.diagram.arcs().empty()) {
    RealizedDiagram next = smooth_arc(cur.diagram, cur.realization, 0);
    next.coeff = cur.coeff;
    cur = std::move(next);
  }
  return {cur};
}

Complex evaluate_combination(const std::vector<RealizedDiagram> &terms,
                             const FlatConnection &a,
                             const TransportPlan &plan) {
  Complex sum = 0;
  for (const auto &t : terms)
    if (t.coeff != 0)
      sum += static_cast<double>(t.coeff) *
             evaluate_diagram(t.diagram, t.realization, a, plan).body();
  return sum;
}

namespace {

/// Disjoint union of two realized diagrams; labels of the second are
/// shifted by `offset`.
RealizedDiagram disjoint_union(const RealizedDiagram &x,
                               const RealizedDiagram &y, int offset) {
  RealizedDiagram out;
  out.coeff = x.coeff * y.coeff;
  out.realization = x.realization;
  const int loop_shift = static_cast<int>(x.realization.loops.size());
  append(out.realization.loops, y.realization.loops);
  for (auto events : y.realization.circles) {
    for (auto &e : events) {
      e.loop += e.kind == Kind::Transport ? loop_shift : 0;
      e.label += e.kind == Kind::Insert ? offset : 0;
    }
    out.realization.circles.push_back(std::move(events));
  }
  auto cs = x.diagram.circles();
  for (auto c : y.diagram.circles()) {
    for (int &l : c.endpoints)
      l += offset;
    cs.push_back(std::move(c));
  }
  auto arcs = x.diagram.arcs();
  for (auto [p, q] : y.diagram.arcs())
    arcs.emplace_back(p + offset, q + offset);
  out.diagram = ChordDiagram(std::move(cs), std::move(arcs), true);
  return out;
}

int carrier_or_throw(const DiagramRealization &r, int circle) {
  auto l = r.carrier(circle);
  if (!l)
    throw ConfigError("the chord bracket needs circles running once around "
                      "a single loop");
  return *l;
}

/// Adds an open endpoint at parameter t of a carrier circle.
void add_open(RealizedDiagram &x, int circle, const Rational &t, int label,
              const IntersectionPoint &p) {
  if (!insert_at(x.realization.circles[circle], t, label))
    throw TransversalityError("crossing coincides with a chord endpoint",
                              p.segment, p.other_segment);
  auto cs = x.diagram.circles();
  cs[circle].endpoints = insert_labels(x.realization.circles[circle]);
  x.diagram = ChordDiagram(std::move(cs), x.diagram.arcs(), true);
}

} // namespace

std::vector<RealizedDiagram>
chord_bracket_degree0(const std::vector<RealizedDiagram> &a,
                      const std::vector<RealizedDiagram> &abar) {
  const int pre = string_bracket_prefactor(0, 0, 2);
  std::vector<RealizedDiagram> out;
  for (const auto &x : a)
    for (const auto &y : abar) {
      const int offset = x.diagram.max_label() + 1;
      const int nx = static_cast<int>(x.diagram.circles().size());
      const RealizedDiagram u = disjoint_union(x, y, offset);
      const int fresh = std::max(u.diagram.max_label() + 1, 0);
      for (int i = 0; i < nx; ++i)
        for (int j = 0; j < static_cast<int>(y.diagram.circles().size());
             ++j) {
          const int li = carrier_or_throw(x.realization, i);
          const int lj = carrier_or_throw(y.realization, j);
          for (const auto &p : intersections(x.realization.loops[li],
                                             y.realization.loops[lj])) {
            RealizedDiagram t = u;
            add_open(t, i, p.s, fresh, p);
            add_open(t, nx + j, p.sbar, fresh + 1, p);
            auto arcs = t.diagram.arcs();
            arcs.emplace_back(fresh, fresh + 1);
            t.diagram = ChordDiagram(t.diagram.circles(), std::move(arcs));
            t.coeff = u.coeff * pre * p.sign;
            out.push_back(std::move(t));
          }
        }
    }
  return out;
}

Complex evaluation_bracket(const std::vector<RealizedDiagram> &a,
                           const std::vector<RealizedDiagram> &abar,
                           const FlatConnection &conn,
                           const TransportPlan &plan) {
  const int d = 2;
  const LieBasis basis(conn.n());
  const int hom = homomorphism_sign(0, 0, d);
  Complex total = 0;
  for (const auto &x : a)
    for (const auto &y : abar)
      for (int i = 0; i < static_cast<int>(x.diagram.circles().size()); ++i)
        for (int j = 0; j < static_cast<int>(y.diagram.circles().size());
             ++j) {
          const int li = carrier_or_throw(x.realization, i);
          const int lj = carrier_or_throw(y.realization, j);
          for (const auto &p : intersections(x.realization.loops[li],
                                             y.realization.loops[lj])) {
            RealizedDiagram xo = x, yo = y;
            const int lx = x.diagram.max_label() + 1;
            const int ly = y.diagram.max_label() + 1;
            add_open(xo, i, p.s, lx, p);
            add_open(yo, j, p.sbar, ly, p);
            std::vector<Complex> v(basis.size()), w(basis.size());
            for (int k = 0; k < basis.size(); ++k) {
              v[k] = evaluate_with_fixed(xo.diagram, xo.realization, conn,
                                         {{lx, k}}, plan);
              w[k] = evaluate_with_fixed(yo.diagram, yo.realization, conn,
                                         {{ly, k}}, plan);
            }
            Complex fused = 0;
            for (int k = 0; k < basis.size(); ++k)
              for (int l = 0; l < basis.size(); ++l)
                fused += basis.kappa_inv(k, l) * v[k] * w[l];
            total += static_cast<double>(wilson_bracket_sign(d) * p.sign *
                                         hom * x.coeff * y.coeff) *
                     fused;
          }
        }
  return total;
}

} // namespace stringtop

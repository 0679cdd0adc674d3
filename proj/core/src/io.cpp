#include "stringtop/io.hpp"

#include <fstream>
#include <regex>

namespace stringtop {

namespace {

using boost::multiprecision::cpp_int;

[[noreturn]] void bad(const std::string &what) {
  throw ConfigError("malformed JSON: " + what);
}

const Json &field(const Json &j, const char *key) {
  if (!j.is_object() || !j.contains(key))
    bad(std::string("missing field '") + key + "'");
  return j.at(key);
}

template <class T> T get(const Json &j, const char *what) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception &) {
    bad(what);
  }
}

int get_int(const Json &j, const char *what) {
  if (!j.is_number_integer())
    bad(std::string(what) + " must be an integer");
  return j.get<int>();
}

Mask mask_from_indices(const Json &j, int generators) {
  if (!j.is_array())
    bad("indices must be an array");
  Mask m = 0;
  int last = 0;
  for (const auto &x : j) {
    const int i = get_int(x, "generator index");
    if (i <= last || i > generators)
      bad("generator indices must be strictly increasing in 1..N");
    m |= Mask{1} << (i - 1);
    last = i;
  }
  return m;
}

Json indices_of(Mask m) {
  Json out = Json::array();
  for (; m; m &= m - 1)
    out.push_back(std::countr_zero(m) + 1);
  return out;
}

} // namespace

std::string rational_to_string(const Rational &r) {
  const cpp_int num = boost::multiprecision::numerator(r);
  const cpp_int den = boost::multiprecision::denominator(r);
  return den == 1 ? num.str() : num.str() + "/" + den.str();
}

Rational rational_from_json(const Json &j) {
  if (j.is_number_integer())
    return Rational(j.get<long long>());
  if (!j.is_string())
    bad("rationals must be \"p/q\" strings");
  static const std::regex re(R"(\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*)");
  std::smatch m;
  const std::string s = j.get<std::string>();
  if (!std::regex_match(s, m, re))
    bad("cannot parse rational '" + s + "'");
  const cpp_int num(m[1].str());
  const cpp_int den(m[2].matched ? m[2].str() : std::string("1"));
  if (den == 0)
    bad("zero denominator in '" + s + "'");
  return Rational(num, den);
}

Json to_json(const GradedCoefficient &a) {
  Json out = Json::array();
  for (const auto &t : a.terms())
    out.push_back({{"indices", indices_of(t.mask)},
                   {"re", t.value.real()},
                   {"im", t.value.imag()}});
  return out;
}

GradedCoefficient graded_from_json(const Json &j, int generators) {
  if (!j.is_array())
    bad("graded coefficient must be an array of terms");
  std::vector<GradedCoefficient::Term> terms;
  for (const auto &t : j) {
    const Mask m = mask_from_indices(field(t, "indices"), generators);
    const double re = get<double>(field(t, "re"), "re");
    const double im = t.contains("im") ? get<double>(t.at("im"), "im") : 0.0;
    terms.push_back({m, Complex(re, im)});
  }
  return GradedCoefficient::from_terms(generators, std::move(terms));
}

Json to_json(const SuperMatrix &m) {
  Json rows = Json::array();
  for (int r = 0; r < m.n(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.n(); ++c)
      row.push_back(to_json(m.entry(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

SuperMatrix super_matrix_from_json(const Json &j, int generators) {
  if (!j.is_array() || j.empty())
    bad("matrix must be a non-empty array of rows");
  std::vector<std::vector<GradedCoefficient>> rows;
  for (const auto &row : j) {
    if (!row.is_array() || row.size() != j.size())
      bad("matrix must be square");
    std::vector<GradedCoefficient> r;
    for (const auto &e : row)
      r.push_back(graded_from_json(e, generators));
    rows.push_back(std::move(r));
  }
  return SuperMatrix::from_entries(rows, generators);
}

Json to_json(const Space &s) {
  return {{"type", to_string(s.kind)}, {"d", s.d}};
}

Space space_from_json(const Json &j) {
  const std::string type = get<std::string>(field(j, "type"), "space type");
  const int d = get_int(field(j, "d"), "d");
  if (type == "chart")
    return Space::chart(d);
  if (type == "torus")
    return Space::torus(d);
  bad("unknown space type '" + type + "'");
}

Json to_json(const PLLoop &loop) {
  Json verts = Json::array();
  for (const auto &v : loop.vertices()) {
    Json p = Json::array();
    for (const auto &x : v)
      p.push_back(rational_to_string(x));
    verts.push_back(std::move(p));
  }
  return {{"space", to_json(loop.space())},
          {"vertices", verts},
          {"closure", loop.closure()}};
}

PLLoop loop_from_json(const Json &j) {
  const Space space = space_from_json(field(j, "space"));
  const Json &vs = field(j, "vertices");
  if (!vs.is_array())
    bad("vertices must be an array");
  std::vector<RVec> verts;
  for (const auto &v : vs) {
    if (!v.is_array())
      bad("each vertex must be an array");
    RVec p;
    for (const auto &x : v)
      p.push_back(rational_from_json(x));
    verts.push_back(std::move(p));
  }
  IVec closure(space.d, 0);
  if (j.contains("closure"))
    closure = get<IVec>(j.at("closure"), "closure must be integers");
  return PLLoop(space, std::move(verts), std::move(closure));
}

Json to_json(const StringCycle &c) {
  Json out = Json::array();
  for (const auto &[loop, coeff] : c.terms())
    out.push_back({{"coeff", coeff}, {"loop", to_json(loop)}});
  return out;
}

StringCycle cycle_from_json(const Json &j) {
  if (!j.is_array())
    bad("cycle must be an array of {coeff, loop}");
  StringCycle out;
  for (const auto &t : j)
    out.add(loop_from_json(field(t, "loop")),
            get<long>(field(t, "coeff"), "coeff"));
  return out;
}

namespace {

Json scalar_field_json(const ScalarField &f) {
  Json terms = Json::array();
  for (const auto &[key, c] : f.terms())
    terms.push_back({{"key", key.k},
                     {"twopi", key.twopi},
                     {"re", rational_to_string(c.re)},
                     {"im", rational_to_string(c.im)}});
  return {{"kind", f.kind() == ScalarField::Kind::Polynomial ? "polynomial"
                                                             : "fourier"},
          {"terms", terms}};
}

ScalarField scalar_field_from_json(const Json &j, int d) {
  const std::string kind = get<std::string>(field(j, "kind"), "field kind");
  ScalarField::Kind k;
  if (kind == "polynomial")
    k = ScalarField::Kind::Polynomial;
  else if (kind == "fourier")
    k = ScalarField::Kind::Fourier;
  else
    bad("unknown field kind '" + kind + "'");
  ScalarField f(k, d);
  for (const auto &t : field(j, "terms")) {
    ScalarField::Key key{get<std::vector<int>>(field(t, "key"), "key"),
                         t.contains("twopi") ? get_int(t.at("twopi"), "twopi")
                                             : 0};
    const Rational re = rational_from_json(field(t, "re"));
    const Rational im = t.contains("im") ? rational_from_json(t.at("im"))
                                         : Rational(0);
    f.add(key, CRational(re, im));
  }
  return f;
}

Json complex_matrix_json(const Matrix &m) {
  Json rows = Json::array();
  for (int r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.cols(); ++c)
      row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix complex_matrix_from_json(const Json &j, int n) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    bad("connection component must have n rows");
  Matrix m(n, n);
  for (int r = 0; r < n; ++r) {
    if (!j[r].is_array() || static_cast<int>(j[r].size()) != n)
      bad("connection component must be n x n");
    for (int c = 0; c < n; ++c) {
      const Json &e = j[r][c];
      if (e.is_number())
        m(r, c) = e.get<double>();
      else if (e.is_array() && e.size() == 2)
        m(r, c) = Complex(get<double>(e[0], "re"), get<double>(e[1], "im"));
      else
        bad("matrix entries must be numbers or [re, im]");
    }
  }
  return m;
}

} // namespace

Json to_json(const FieldConfig &c) {
  const LieBasis basis(c.n());
  Json terms = Json::array();
  for (const auto &t : c.terms()) {
    const auto [i, j] = basis.pair(t.lie);
    terms.push_back({{"dims", t.dims},
                     {"lie", {i, j}},
                     {"eps", indices_of(t.eps)},
                     {"field", scalar_field_json(t.field)}});
  }
  return {{"space", to_json(c.space())},
          {"n", c.n()},
          {"generators", c.generators()},
          {"parity", c.parity()},
          {"terms", terms}};
}

FieldConfig field_from_json(const Json &j) {
  const Space space = space_from_json(field(j, "space"));
  const int n = get_int(field(j, "n"), "n");
  const int gens =
      j.contains("generators") ? get_int(j.at("generators"), "generators") : 6;
  const int parity = j.contains("parity") ? get_int(j.at("parity"), "parity")
                                          : 1;
  FieldConfig out(space, n, gens, parity);
  const LieBasis basis(n);
  for (const auto &t : field(j, "terms")) {
    const auto lie = get<std::vector<int>>(field(t, "lie"), "lie");
    if (lie.size() != 2 || lie[0] < 0 || lie[0] >= n || lie[1] < 0 ||
        lie[1] >= n)
      bad("lie must be [i, j] with 0 <= i, j < n");
    out.add(get<std::vector<int>>(field(t, "dims"), "dims"),
            scalar_field_from_json(field(t, "field"), space.d),
            basis.index(lie[0], lie[1]),
            mask_from_indices(t.contains("eps") ? t.at("eps") : Json::array(),
                              gens));
  }
  return out;
}

Json to_json(const FlatConnection &a) {
  Json comps = Json::array();
  for (const auto &m : a.components())
    comps.push_back(complex_matrix_json(m));
  return {{"type", a.kind() == FlatConnection::Kind::Zero ? "zero"
                                                          : "constant"},
          {"n", a.n()},
          {"d", a.dim()},
          {"components", comps}};
}

FlatConnection connection_from_json(const Json &j) {
  const std::string type = get<std::string>(field(j, "type"), "type");
  const int n = get_int(field(j, "n"), "n");
  const int d = get_int(field(j, "d"), "d");
  if (type == "zero")
    return FlatConnection::zero(n, d);
  if (type != "constant")
    bad("unknown connection type '" + type + "'");
  const Json &comps = field(j, "components");
  if (!comps.is_array() || static_cast<int>(comps.size()) != d)
    bad("constant connection needs d components");
  std::vector<Matrix> a;
  for (const auto &c : comps)
    a.push_back(complex_matrix_from_json(c, n));
  return FlatConnection::constant(std::move(a));
}

Json to_json(const ChordDiagram &d) {
  Json circles = Json::array();
  for (const auto &c : d.circles()) {
    std::string rep = to_string(c.rep);
    if (c.dim > 0)
      rep += ":" + std::to_string(c.dim);
    circles.push_back({{"rep", rep}, {"endpoints", c.endpoints}});
  }
  Json arcs = Json::array();
  for (const auto &[x, y] : d.arcs())
    arcs.push_back({x, y});
  return {{"circles", circles}, {"arcs", arcs}};
}

ChordDiagram diagram_from_json(const Json &j) {
  std::vector<ChordCircle> circles;
  for (const auto &c : field(j, "circles")) {
    ChordCircle circle;
    const std::string rep = get<std::string>(field(c, "rep"), "rep");
    const auto colon = rep.find(':');
    circle.rep = rep_from_string(rep.substr(0, colon));
    if (colon != std::string::npos) {
      try {
        circle.dim = std::stoi(rep.substr(colon + 1));
      } catch (const std::exception &) {
        bad("representation label '" + rep + "'");
      }
      if (circle.dim < 1)
        bad("representation dimension must be positive");
    }
    circle.endpoints = get<std::vector<int>>(field(c, "endpoints"),
                                             "endpoints");
    circles.push_back(std::move(circle));
  }
  std::vector<std::pair<int, int>> arcs;
  for (const auto &a : field(j, "arcs")) {
    const auto v = get<std::vector<int>>(a, "arc");
    if (v.size() != 2)
      bad("each arc is a pair of labels");
    arcs.emplace_back(v[0], v[1]);
  }
  return ChordDiagram(std::move(circles), std::move(arcs));
}

Json to_json(const DiagramRealization &r) {
  Json loops = Json::array();
  for (const auto &l : r.loops)
    loops.push_back(to_json(l));
  Json circles = Json::array();
  for (const auto &events : r.circles) {
    Json c = Json::array();
    for (const auto &e : events) {
      if (e.kind == CircleEvent::Kind::Insert)
        c.push_back({{"insert", e.label}});
      else
        c.push_back({{"transport",
                      {{"loop", e.loop},
                       {"from", rational_to_string(e.from)},
                       {"to", rational_to_string(e.to)}}}});
    }
    circles.push_back(std::move(c));
  }
  return {{"loops", loops}, {"circles", circles}};
}

DiagramRealization realization_from_json(const Json &j,
                                         const std::filesystem::path &base) {
  DiagramRealization r;
  for (const auto &l : field(j, "loops")) {
    if (l.is_string())
      r.loops.push_back(loop_from_json(read_json_file(base / l.get<std::string>())));
    else
      r.loops.push_back(loop_from_json(l));
  }
  for (const auto &c : field(j, "circles")) {
    std::vector<CircleEvent> events;
    for (const auto &e : c) {
      CircleEvent ev;
      if (e.contains("insert")) {
        ev.kind = CircleEvent::Kind::Insert;
        ev.label = get_int(e.at("insert"), "insert label");
      } else {
        const Json &t = field(e, "transport");
        ev.kind = CircleEvent::Kind::Transport;
        ev.loop = get_int(field(t, "loop"), "loop index");
        ev.from = rational_from_json(field(t, "from"));
        ev.to = rational_from_json(field(t, "to"));
      }
      events.push_back(std::move(ev));
    }
    r.circles.push_back(std::move(events));
  }
  return r;
}

Json read_json_file(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error &e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path &path, const Json &j) {
  std::ofstream out(path);
  if (!out)
    throw ConfigError("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

} // namespace stringtop

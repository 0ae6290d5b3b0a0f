#pragma once

#include <json.hpp>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "ppkit/avcourant/avcourant.hpp"
#include "ppkit/cli/expr.hpp"
#include "ppkit/reduction/models.hpp"

namespace ppkit::cli {

using Json = nlohmann::json;

inline constexpr int kScenarioVersion = 1;

struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Command-line overrides of the scenario's sample block.
struct SampleOverride {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> count;
  std::optional<long> box;
};

struct NamedForm {
  KForm form;
  std::vector<std::string> names;
};

struct PolysymplecticInput {
  NamedForm w;
};

struct StructureInput {
  PolyPoissonStruct pp;
};

struct FoliationInput {
  std::optional<PolyPoissonStruct> pp;
  // reconstruction from a distribution and a form
  std::optional<Distribution> D;
  std::optional<NamedForm> w;
  std::optional<std::vector<KForm>> annihilator;
};

struct AVInput {
  AVSubbundle L;
  bool from_structure = false;
};

struct GroupoidInput {
  GroupoidModel M;
};

struct ReductionInput {
  NamedForm omega;
  std::optional<ActionData> action;
  std::optional<MomentData> moment;
  std::optional<QuotientModel> quotient;
  std::optional<LevelSetModel> level;
  std::optional<GroupoidReductionInput> groupoid;
};

using Payload = std::variant<PolysymplecticInput, StructureInput, FoliationInput, AVInput, GroupoidInput, ReductionInput>;

struct Scenario {
  int version = kScenarioVersion;
  std::string name;
  std::string kind;
  SamplePlan sample;
  std::map<std::string, std::string> conventions;
  std::map<std::string, Verdict> expect;
  std::size_t n = 0;
  std::size_t k = 0;
  std::vector<std::string> names;  // ambient coordinates, x0.. when the payload names none
  Payload payload;
};

inline const std::vector<std::string>& scenario_kinds() {
  static const std::vector<std::string> v{"polysymplectic", "polypoisson", "foliation", "avcourant", "groupoid", "reduction"};
  return v;
}

inline std::optional<Verdict> verdict_from_name(const std::string& s) {
  for (Verdict v : {Verdict::Pass, Verdict::Fail, Verdict::Warn, Verdict::Error})
    if (s == verdict_name(v)) return v;
  return std::nullopt;
}

namespace detail {

// Strict object access: every key must be listed, required keys must be present.
class Obj {
 public:
  Obj(const Json& j, std::string path, std::initializer_list<const char*> required, std::initializer_list<const char*> optional = {})
      : j_(j), path_(std::move(path)) {
    if (!j.is_object()) fail("expected an object");
    std::set<std::string> allowed;
    for (const char* r : required) {
      allowed.insert(r);
      if (!j.contains(r)) fail("missing field '" + std::string(r) + "'");
    }
    for (const char* o : optional) allowed.insert(o);
    for (auto it = j.begin(); it != j.end(); ++it)
      if (!allowed.count(it.key())) throw ScenarioError(path_ + ": unknown field '" + it.key() + "'");
  }

  bool has(const char* key) const { return j_.contains(key); }
  const Json& operator[](const char* key) const { return j_.at(key); }
  std::string at(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  std::size_t count(const char* key, std::size_t lo = 0) const {
    const Json& v = j_.at(key);
    if (!v.is_number_integer() || v.get<long long>() < static_cast<long long>(lo))
      throw ScenarioError(at(key) + ": expected an integer >= " + std::to_string(lo));
    return v.get<std::size_t>();
  }

  std::string str(const char* key) const {
    const Json& v = j_.at(key);
    if (!v.is_string()) throw ScenarioError(at(key) + ": expected a string");
    return v.get<std::string>();
  }

  // Exactly one of the listed keys must be present.
  std::string which(std::initializer_list<const char*> keys) const {
    std::string found;
    for (const char* key : keys)
      if (j_.contains(key)) {
        if (!found.empty()) fail("fields '" + found + "' and '" + key + "' are exclusive");
        found = key;
      }
    if (found.empty()) {
      std::string all;
      for (const char* key : keys) all += std::string(all.empty() ? "" : ", ") + key;
      fail("expected one of: " + all);
    }
    return found;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ScenarioError((path_.empty() ? "scenario" : path_) + ": " + what); }

 private:
  const Json& j_;
  std::string path_;
};

inline std::string idx(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

inline const Json& array_at(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ScenarioError(path + ": expected an array");
  return j;
}

inline std::vector<std::string> names_at(const Json& j, const std::string& path) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < array_at(j, path).size(); ++i) {
    const Json& v = j[i];
    if (!v.is_string()) throw ScenarioError(idx(path, i) + ": expected a variable name");
    std::string s = v.get<std::string>();
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_'))
      throw ScenarioError(idx(path, i) + ": invalid variable name '" + s + "'");
    for (char c : s)
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_'))
        throw ScenarioError(idx(path, i) + ": invalid variable name '" + s + "'");
    if (!seen.insert(s).second) throw ScenarioError(idx(path, i) + ": duplicate variable '" + s + "'");
    out.push_back(s);
  }
  if (out.empty()) throw ScenarioError(path + ": at least one variable is required");
  return out;
}

inline Poly poly_at(const ExprParser& P, const Json& j, const std::string& path) {
  if (j.is_number_integer()) return Poly::constant(P.nvars(), Q(static_cast<long>(j.get<long long>())));
  if (!j.is_string()) throw ScenarioError(path + ": expected a polynomial string");
  try {
    return P.parse(j.get<std::string>());
  } catch (const ExprError& e) {
    throw ScenarioError(path + ": " + e.what());
  }
}

inline Q rational_at(const Json& j, const std::string& path) {
  ExprParser P({});
  Poly p = poly_at(P, j, path);
  return p.is_zero() ? Q(0) : p.constant_term();
}

inline std::vector<Poly> polys_at(const ExprParser& P, const Json& j, const std::string& path) {
  std::vector<Poly> out;
  for (std::size_t i = 0; i < array_at(j, path).size(); ++i) out.push_back(poly_at(P, j[i], idx(path, i)));
  return out;
}

inline std::size_t var_index(const ExprParser& P, const std::string& name, const std::string& path) {
  for (std::size_t i = 0; i < P.nvars(); ++i)
    if (P.names()[i] == name) return i;
  throw ScenarioError(path + ": unknown variable '" + name + "'");
}

// {"x": "poly", ...} as a vector field.
inline VectorField field_at(const ExprParser& P, const Json& j, const std::string& path) {
  if (!j.is_object()) throw ScenarioError(path + ": expected an object of components");
  VectorField X(P.nvars());
  for (auto it = j.begin(); it != j.end(); ++it) X[var_index(P, it.key(), path)] += poly_at(P, it.value(), path + "." + it.key());
  return X;
}

// {"x": "poly", ...} as the 1-form Σ f dx in slot j.
inline void add_one_form(CoSection& s, std::size_t slot, const ExprParser& P, const Json& j, const std::string& path) {
  if (!j.is_object()) throw ScenarioError(path + ": expected an object of components");
  for (auto it = j.begin(); it != j.end(); ++it)
    s.add(slot, {var_index(P, it.key(), path)}, poly_at(P, it.value(), path + "." + it.key()));
}

inline LieAlgebra algebra_at(const Json& j, const std::string& path) {
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    if (s == "heisenberg") return heisenberg();
    if (s == "so3") return so3();
    throw ScenarioError(path + ": unknown algebra '" + s + "'");
  }
  Obj o(j, path, {}, {"abelian", "dim", "brackets"});
  if (o.has("abelian")) {
    if (o.has("dim") || o.has("brackets")) o.fail("'abelian' excludes 'dim' and 'brackets'");
    return abelian(o.count("abelian", 1));
  }
  if (!o.has("dim") || !o.has("brackets")) o.fail("expected 'abelian' or both 'dim' and 'brackets'");
  std::size_t d = o.count("dim", 1);
  LieAlgebra g(d, "custom");
  const Json& br = array_at(o["brackets"], o.at("brackets"));
  for (std::size_t i = 0; i < br.size(); ++i) {
    std::string p = idx(o.at("brackets"), i);
    if (!br[i].is_array() || br[i].size() != 4) throw ScenarioError(p + ": expected [a, b, l, coefficient]");
    std::size_t e[3];
    for (int t = 0; t < 3; ++t) {
      if (!br[i][t].is_number_integer() || br[i][t].get<long long>() < 0 || br[i][t].get<std::size_t>() >= d)
        throw ScenarioError(p + ": basis index out of range");
      e[t] = br[i][t].get<std::size_t>();
    }
    g.c[e[0]][e[1]][e[2]] += rational_at(br[i][3], p);
    g.c[e[1]][e[0]][e[2]] -= rational_at(br[i][3], p);
  }
  return g;
}

inline NamedForm form_at(const Json& j, const std::string& path) {
  Obj o(j, path, {}, {"covelocities", "vars", "k", "components"});
  if (o.has("covelocities")) {
    if (o.has("vars") || o.has("k") || o.has("components")) o.fail("'covelocities' excludes explicit components");
    Obj c(o["covelocities"], o.at("covelocities"), {"nq", "k"});
    std::size_t nq = c.count("nq", 1), k = c.count("k", 1);
    return {covelocities(nq, k), covelocity_names(nq, k)};
  }
  if (!o.has("vars") || !o.has("k") || !o.has("components")) o.fail("expected 'covelocities' or 'vars', 'k' and 'components'");
  auto names = names_at(o["vars"], o.at("vars"));
  std::size_t k = o.count("k", 1), n = names.size();
  ExprParser P(names);
  const Json& comps = array_at(o["components"], o.at("components"));
  if (comps.size() != k) o.fail("'components' must have k = " + std::to_string(k) + " entries");
  KForm w(n, 2, k);
  for (std::size_t s = 0; s < k; ++s) {
    std::string ps = idx(o.at("components"), s);
    const Json& terms = array_at(comps[s], ps);
    for (std::size_t t = 0; t < terms.size(); ++t) {
      std::string pt = idx(ps, t);
      if (!terms[t].is_array() || terms[t].size() != 3 || !terms[t][0].is_string() || !terms[t][1].is_string())
        throw ScenarioError(pt + ": expected [\"x\", \"y\", coefficient]");
      std::size_t a = var_index(P, terms[t][0].get<std::string>(), pt), b = var_index(P, terms[t][1].get<std::string>(), pt);
      w.add(s, {a, b}, poly_at(P, terms[t][2], pt));
    }
  }
  return {w, names};
}

inline PolyPoissonStruct structure_at(const Json& j, const std::string& path, const SamplePlan& plan) {
  Obj o(j, path, {}, {"polysymplectic", "lie_poisson", "bivector", "frame"});
  std::string kind = o.which({"polysymplectic", "lie_poisson", "bivector", "frame"});
  std::string p = o.at(kind.c_str());
  if (kind == "polysymplectic") {
    NamedForm w = form_at(o["polysymplectic"], p);
    PolyPoissonStruct pp = from_polysymplectic(w.form, plan);
    pp.names = w.names;
    return pp;
  }
  if (kind == "lie_poisson") {
    Obj l(o["lie_poisson"], p, {"algebra", "k"});
    LieAlgebra g = algebra_at(l["algebra"], l.at("algebra"));
    std::size_t k = l.count("k", 1);
    if (!g.antisymmetric() || !g.jacobi()) {
      // kept as data: the structure checks report the failure
      PolyPoissonStruct pp;
      std::size_t d = g.dim, n = k * d;
      pp.n = n;
      pp.k = k;
      pp.plan = plan;
      for (std::size_t a = 0; a < d; ++a) {
        CoSection s(n, 1, k);
        VectorField X(n);
        for (std::size_t jj = 0; jj < k; ++jj) {
          s.add(jj, {jj * d + a}, Poly::constant(n, 1));
          for (std::size_t b = 0; b < d; ++b)
            for (std::size_t l2 = 0; l2 < d; ++l2)
              if (g.c[a][b][l2] != 0) X[jj * d + b] -= g.c[a][b][l2] * Poly::variable(n, jj * d + l2);
        }
        pp.frame.push_back(s);
        pp.anchor.push_back(X);
      }
      return pp;
    }
    return lie_poisson_direct_sum(g, k, plan);
  }
  if (kind == "bivector") {
    Obj b(o["bivector"], p, {"vars", "matrix"});
    auto names = names_at(b["vars"], b.at("vars"));
    ExprParser P(names);
    std::size_t n = names.size();
    const Json& m = array_at(b["matrix"], b.at("matrix"));
    if (m.size() != n) b.fail("matrix must be " + std::to_string(n) + " x " + std::to_string(n));
    std::vector<std::vector<Poly>> pi;
    for (std::size_t i = 0; i < n; ++i) {
      auto row = polys_at(P, m[i], idx(b.at("matrix"), i));
      if (row.size() != n) b.fail("matrix must be " + std::to_string(n) + " x " + std::to_string(n));
      pi.push_back(row);
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t l = 0; l < n; ++l)
        if (!(pi[i][l] == -pi[l][i])) b.fail("matrix is not antisymmetric");
    PolyPoissonStruct pp = bivector_structure(pi, plan);
    pp.names = names;
    return pp;
  }
  Obj f(o["frame"], p, {"vars", "k", "elements"});
  auto names = names_at(f["vars"], f.at("vars"));
  ExprParser P(names);
  std::size_t n = names.size(), k = f.count("k", 1);
  PolyPoissonStruct pp;
  pp.n = n;
  pp.k = k;
  pp.plan = plan;
  pp.names = names;
  const Json& els = array_at(f["elements"], f.at("elements"));
  for (std::size_t e = 0; e < els.size(); ++e) {
    std::string pe = idx(f.at("elements"), e);
    Obj el(els[e], pe, {"form", "anchor"});
    const Json& slots = array_at(el["form"], el.at("form"));
    if (slots.size() != k) el.fail("'form' must have k = " + std::to_string(k) + " slots");
    CoSection s(n, 1, k);
    for (std::size_t jj = 0; jj < k; ++jj) add_one_form(s, jj, P, slots[jj], idx(el.at("form"), jj));
    pp.frame.push_back(s);
    pp.anchor.push_back(field_at(P, el["anchor"], el.at("anchor")));
  }
  return pp;
}

inline QuotientModel quotient_at(const Json& j, const std::string& path, const ExprParser& source) {
  Obj o(j, path, {"vars", "pi", "sigma"});
  auto names = names_at(o["vars"], o.at("vars"));
  ExprParser R(names);
  auto pi = polys_at(source, o["pi"], o.at("pi"));
  auto sigma = polys_at(R, o["sigma"], o.at("sigma"));
  if (pi.size() != names.size()) o.fail("'pi' must have one component per quotient variable");
  if (sigma.size() != source.nvars()) o.fail("'sigma' must have one component per source variable");
  return {PolyMap(source.nvars(), pi), PolyMap(names.size(), sigma)};
}

inline ActionData action_at(const Json& j, const std::string& path, const ExprParser& P) {
  Obj o(j, path, {"generators"}, {"algebra", "family"});
  ActionData a;
  const Json& gens = array_at(o["generators"], o.at("generators"));
  for (std::size_t i = 0; i < gens.size(); ++i) a.generators.push_back(field_at(P, gens[i], idx(o.at("generators"), i)));
  a.m = a.generators.size();
  a.algebra = o.has("algebra") ? algebra_at(o["algebra"], o.at("algebra")) : abelian(a.m);
  if (a.algebra.dim != a.m) o.fail("algebra dimension differs from the number of generators");
  if (o.has("family")) {
    Obj f(o["family"], o.at("family"), {"group_vars", "map"});
    auto gv = names_at(f["group_vars"], f.at("group_vars"));
    if (gv.size() != a.m) f.fail("one group variable per generator is required");
    auto all = P.names();
    all.insert(all.end(), gv.begin(), gv.end());
    ExprParser FP(all);
    auto comps = polys_at(FP, f["map"], f.at("map"));
    if (comps.size() != P.nvars()) f.fail("'map' must have one component per variable");
    a.family = PolyMap(all.size(), comps);
  }
  return a;
}

inline void sample_at(Scenario& sc, const Json& j, const SampleOverride& ov) {
  if (!j.is_null()) {
    Obj o(j, "sample", {}, {"seed", "count", "box", "avoid"});
    if (o.has("seed")) sc.sample.seed = o.count("seed");
    if (o.has("count")) sc.sample.count = o.count("count", 1);
    if (o.has("box")) sc.sample.box = static_cast<long>(o.count("box", 1));
  }
  if (ov.seed) sc.sample.seed = *ov.seed;
  if (ov.count) sc.sample.count = *ov.count;
  if (ov.box) sc.sample.box = *ov.box;
  if (sc.sample.count == 0) throw ScenarioError("sample.count: must be at least 1");
  if (sc.sample.box < 1) throw ScenarioError("sample.box: must be at least 1");
}

inline void conventions_at(Scenario& sc, const Json& j) {
  sc.conventions = default_conventions();
  if (j.is_null()) return;
  Obj o(j, "conventions", {}, {"canonical_symplectic", "coadjoint"});
  for (const char* key : {"canonical_symplectic", "coadjoint"}) {
    if (!o.has(key)) continue;
    std::string v = o.str(key);
    if (v != sc.conventions.at(key))
      throw ScenarioError(o.at(key) + ": unsupported convention '" + v + "' (supported: '" + sc.conventions.at(key) + "')");
  }
}

inline ReductionInput reduction_at(const Json& j, const SamplePlan& plan, std::size_t& n, std::size_t& k) {
  Obj o(j, "payload", {}, {"form", "action", "moment", "quotient", "level", "cotangent_group", "groupoid"});
  std::string mode = o.which({"form", "cotangent_group", "groupoid"});
  ReductionInput in;
  if (mode == "form") {
    in.omega = form_at(o["form"], o.at("form"));
    if (!o.has("action")) o.fail("missing field 'action'");
    ExprParser P(in.omega.names);
    in.action = action_at(o["action"], o.at("action"), P);
    if (o.has("moment")) {
      auto J = polys_at(P, o["moment"], o.at("moment"));
      std::size_t km = in.omega.form.k() * in.action->m;
      if (J.size() != km) o.fail("'moment' must have k * m = " + std::to_string(km) + " components");
      in.moment = MomentData{in.omega.form.k(), in.action->m, PolyMap(P.nvars(), J)};
    }
    if (o.has("quotient")) in.quotient = quotient_at(o["quotient"], o.at("quotient"), P);
    if (o.has("level")) {
      if (!in.moment) o.fail("'level' requires 'moment'");
      Obj l(o["level"], o.at("level"), {"zeta", "params", "psi", "residual"});
      LevelSetModel L;
      const Json& z = array_at(l["zeta"], l.at("zeta"));
      for (std::size_t i = 0; i < z.size(); ++i) L.zeta.push_back(rational_at(z[i], idx(l.at("zeta"), i)));
      if (L.zeta.size() != in.moment->J.codomain_dim()) l.fail("'zeta' must have one entry per moment component");
      ExprParser LP(names_at(l["params"], l.at("params")));
      auto psi = polys_at(LP, l["psi"], l.at("psi"));
      if (psi.size() != P.nvars()) l.fail("'psi' must have one component per variable");
      L.psi = PolyMap(LP.nvars(), psi);
      L.residual = quotient_at(l["residual"], l.at("residual"), LP);
      in.level = L;
    }
  } else {
    for (const char* key : {"action", "moment", "quotient", "level"})
      if (o.has(key)) o.fail("'" + std::string(key) + "' is only allowed with 'form'");
  }
  if (mode == "cotangent_group") {
    Obj c(o["cotangent_group"], o.at("cotangent_group"), {"algebra", "k"}, {"zeta", "drop"});
    LieAlgebra g = algebra_at(c["algebra"], c.at("algebra"));
    std::size_t kk = c.count("k", 1);
    CotangentGroup C;
    try {
      C = cotangent_left_multiplication(g, kk);
    } catch (const std::invalid_argument& e) {
      throw ScenarioError(c.at("algebra") + ": " + e.what());
    }
    std::vector<std::string> names;
    for (std::size_t i = 0; i < g.dim; ++i) names.push_back("x" + std::to_string(i + 1));
    for (std::size_t jj = 0; jj < kk; ++jj)
      for (std::size_t i = 0; i < g.dim; ++i) names.push_back("p" + std::to_string(jj + 1) + "_" + std::to_string(i + 1));
    in.omega = {C.omega, names};
    in.action = C.action;
    in.moment = C.moment;
    in.quotient = C.quotient;
    if (c.has("zeta") != c.has("drop")) c.fail("'zeta' and 'drop' go together");
    if (c.has("zeta")) {
      Point zeta;
      const Json& z = array_at(c["zeta"], c.at("zeta"));
      for (std::size_t i = 0; i < z.size(); ++i) zeta.push_back(rational_at(z[i], idx(c.at("zeta"), i)));
      if (zeta.size() != kk * g.dim) c.fail("'zeta' must have k * dim entries");
      std::vector<std::size_t> drop;
      const Json& d = array_at(c["drop"], c.at("drop"));
      for (std::size_t i = 0; i < d.size(); ++i) {
        if (!d[i].is_number_integer() || d[i].get<long long>() < 0 || d[i].get<std::size_t>() >= g.dim)
          throw ScenarioError(idx(c.at("drop"), i) + ": group coordinate index out of range");
        drop.push_back(d[i].get<std::size_t>());
      }
      in.level = cotangent_level(C, zeta, drop_coordinates(g.dim, drop));
    }
  }
  if (mode == "groupoid") {
    Obj g(o["groupoid"], o.at("groupoid"), {"fixture"}, {"nq", "k", "index", "form"});
    std::string fx = g.str("fixture");
    if (fx == "covelocity_translation") {
      if (!g.has("nq") || !g.has("k") || !g.has("index") || g.has("form")) g.fail("expected 'nq', 'k' and 'index'");
      std::size_t nq = g.count("nq", 2), kk = g.count("k", 1), i = g.count("index");
      if (i >= nq) g.fail("'index' out of range");
      in.groupoid = covelocity_translation(nq, kk, i, plan);
    } else if (fx == "pair_plane_translation") {
      if (!g.has("form") || g.has("nq") || g.has("k") || g.has("index")) g.fail("expected 'form' only");
      NamedForm w = form_at(g["form"], g.at("form"));
      try {
        in.groupoid = pair_plane_translation(w.form, plan);
      } catch (const std::invalid_argument& e) {
        throw ScenarioError(g.at("form") + ": " + e.what());
      }
    } else if (fx == "trivial_group") {
      if (!g.has("nq") || !g.has("k") || g.has("index") || g.has("form")) g.fail("expected 'nq' and 'k'");
      in.groupoid = trivial_group(build_covelocity(g.count("nq", 1), g.count("k", 1), plan));
    } else {
      throw ScenarioError(g.at("fixture") + ": unknown fixture '" + fx + "'");
    }
    in.omega = {in.groupoid->model.omega, in.groupoid->model.chart.names};
    in.action = in.groupoid->action;
    in.moment = in.groupoid->moment;
    in.level = in.groupoid->level;
  }
  n = in.omega.form.n();
  k = in.omega.form.k();
  return in;
}

inline GroupoidInput groupoid_at(const Json& j, const SamplePlan& plan) {
  Obj o(j, "payload", {"builder"}, {"form", "nq", "k", "algebra"});
  std::string b = o.str("builder");
  try {
    if (b == "pair") {
      if (!o.has("form") || o.has("nq") || o.has("k") || o.has("algebra")) o.fail("the pair builder takes 'form' only");
      return {build_pair(form_at(o["form"], o.at("form")).form, plan)};
    }
    if (b == "covelocity") {
      if (!o.has("nq") || !o.has("k") || o.has("form") || o.has("algebra")) o.fail("the covelocity builder takes 'nq' and 'k'");
      return {build_covelocity(o.count("nq", 1), o.count("k", 1), plan)};
    }
    if (b == "coadjoint") {
      if (!o.has("algebra") || !o.has("k") || o.has("form") || o.has("nq")) o.fail("the coadjoint builder takes 'algebra' and 'k'");
      return {build_coadjoint(algebra_at(o["algebra"], o.at("algebra")), o.count("k", 1), plan)};
    }
  } catch (const std::invalid_argument& e) {
    throw ScenarioError("payload: " + std::string(e.what()));
  }
  throw ScenarioError(o.at("builder") + ": unknown builder '" + b + "'");
}

// Builds the module inputs from the payload with the current sampling plan.
inline void compile_payload(Scenario& sc, const Json& p) {
  const SamplePlan& plan = sc.sample;
  sc.names.clear();
  try {
    if (sc.kind == "polysymplectic") {
      Obj o(p, "payload", {"form"});
      PolysymplecticInput in{form_at(o["form"], o.at("form"))};
      sc.n = in.w.form.n();
      sc.k = in.w.form.k();
      sc.names = in.w.names;
      sc.payload = in;
    } else if (sc.kind == "polypoisson") {
      Obj o(p, "payload", {"structure"});
      StructureInput in{structure_at(o["structure"], o.at("structure"), plan)};
      sc.n = in.pp.n;
      sc.k = in.pp.k;
      sc.names = in.pp.names;
      sc.payload = in;
    } else if (sc.kind == "foliation") {
      Obj o(p, "payload", {}, {"structure", "form", "generators", "annihilator"});
      FoliationInput in;
      if (o.which({"structure", "form"}) == "structure") {
        if (o.has("generators") || o.has("annihilator")) o.fail("'generators' and 'annihilator' go with 'form'");
        in.pp = structure_at(o["structure"], o.at("structure"), plan);
        sc.n = in.pp->n;
        sc.k = in.pp->k;
        sc.names = in.pp->names;
      } else {
        if (!o.has("generators")) o.fail("missing field 'generators'");
        in.w = form_at(o["form"], o.at("form"));
        ExprParser P(in.w->names);
        Distribution D{P.nvars(), {}, plan};
        const Json& g = array_at(o["generators"], o.at("generators"));
        for (std::size_t i = 0; i < g.size(); ++i) D.gens.push_back(field_at(P, g[i], idx(o.at("generators"), i)));
        in.D = D;
        if (o.has("annihilator")) {
          std::vector<KForm> ann;
          const Json& a = array_at(o["annihilator"], o.at("annihilator"));
          for (std::size_t i = 0; i < a.size(); ++i) {
            KForm f(P.nvars(), 1, 1);
            add_one_form(f, 0, P, a[i], idx(o.at("annihilator"), i));
            ann.push_back(f);
          }
          in.annihilator = ann;
        }
        sc.n = in.w->form.n();
        sc.k = in.w->form.k();
        sc.names = in.w->names;
      }
      sc.payload = in;
    } else if (sc.kind == "avcourant") {
      Obj o(p, "payload", {}, {"structure", "form"});
      AVInput in;
      if (o.which({"structure", "form"}) == "structure") {
        PolyPoissonStruct pp = structure_at(o["structure"], o.at("structure"), plan);
        sc.names = pp.names;
        in.L = graph(pp, false);
        in.from_structure = true;
      } else {
        NamedForm w = form_at(o["form"], o.at("form"));
        sc.names = w.names;
        in.L = form_graph(w.form, plan);
      }
      sc.n = in.L.n;
      sc.k = in.L.k;
      sc.payload = in;
    } else if (sc.kind == "groupoid") {
      GroupoidInput in = groupoid_at(p, plan);
      sc.n = in.M.chart.N;
      sc.k = in.M.omega.k();
      sc.names = in.M.chart.names;
      sc.payload = in;
    } else {
      ReductionInput in = reduction_at(p, plan, sc.n, sc.k);
      sc.names = in.omega.names;
      sc.payload = in;
    }
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(std::string("payload: ") + e.what());
  }
  if (sc.names.size() != sc.n) sc.names = default_names(sc.n);
}

}  // namespace detail

inline Scenario parse_scenario(const std::string& text, const SampleOverride& ov = {}) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ScenarioError(std::string("malformed document: ") + e.what());
  }
  using detail::Obj;
  Obj top(j, "", {"version", "name", "kind", "payload"}, {"sample", "conventions", "expect"});
  Scenario sc;
  if (!j["version"].is_number_integer() || j["version"].get<long long>() != kScenarioVersion)
    throw ScenarioError("version: unsupported scenario version (expected " + std::to_string(kScenarioVersion) + ")");
  sc.name = top.str("name");
  if (sc.name.empty()) throw ScenarioError("name: must not be empty");
  sc.kind = top.str("kind");
  const auto& kinds = scenario_kinds();
  if (std::find(kinds.begin(), kinds.end(), sc.kind) == kinds.end()) throw ScenarioError("kind: unknown kind '" + sc.kind + "'");
  detail::sample_at(sc, j.contains("sample") ? j["sample"] : Json(), ov);
  detail::conventions_at(sc, j.contains("conventions") ? j["conventions"] : Json());
  if (j.contains("expect")) {
    const Json& e = j["expect"];
    if (!e.is_object()) throw ScenarioError("expect: expected an object of check names to verdicts");
    for (auto it = e.begin(); it != e.end(); ++it) {
      auto v = it.value().is_string() ? verdict_from_name(it.value().get<std::string>()) : std::nullopt;
      if (!v) throw ScenarioError("expect." + it.key() + ": expected one of PASS, FAIL, WARN, ERROR");
      sc.expect[it.key()] = *v;
    }
  }
  const Json& p = j["payload"];
  detail::compile_payload(sc, p);
  if (j.contains("sample") && j["sample"].contains("avoid")) {
    ExprParser P(sc.names);
    sc.sample.avoid = detail::polys_at(P, j["sample"]["avoid"], "sample.avoid");
    for (std::size_t i = 0; i < sc.sample.avoid.size(); ++i)
      if (sc.sample.avoid[i].is_constant())
        throw ScenarioError(detail::idx("sample.avoid", i) + ": must be a non-constant polynomial");
    detail::compile_payload(sc, p);
  }
  return sc;
}

}  // namespace ppkit::cli

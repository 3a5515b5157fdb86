#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pvk/bundle.hpp"
#include "pvk/normalize.hpp"

namespace pvk {

using Json = nlohmann::json;

// ---------------------------------------------------------------- serializers

inline Json to_json(const Scalar& s) { return s.str(); }

inline Json to_json(const Poly& p) {
  Json out = Json::array();
  for (const auto& [m, c] : p.terms()) out.push_back({{"coeff", c.str()}, {"exps", m.e}});
  return out;
}

inline Json to_json(const PolyMatrix& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.size(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.size(); ++j) row.push_back(to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Json to_json(const ScalarMat& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j).str());
    rows.push_back(std::move(row));
  }
  return rows;
}

template <class V>
Json to_json(const MultiVector<V>& t) {
  Json comps = Json::array();
  for (const auto& [mask, v] : t.components()) {
    std::vector<int> idx = mask_indices(mask);
    comps.push_back({{"indices", idx}, {"value", to_json(v)}});
  }
  return {{"grade", t.grade()}, {"nvars", t.nvars()}, {"components", std::move(comps)}};
}

inline Json to_json(const OneForm& a) {
  Json comps = Json::array();
  for (int i = 0; i < a.nvars(); ++i) comps.push_back(to_json(a[i]));
  return comps;
}

// ------------------------------------------------------------------- parsing

namespace jio {

inline const Json& expect(const Json& j, const std::string& key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(where, "missing required key \"" + key + "\"");
  return *it;
}

inline int expect_int(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) throw SchemaError(where, "expected an integer");
  return j.get<int>();
}

inline Scalar parse_scalar(const Json& j, const std::string& where) {
  if (!j.is_string()) throw SchemaError(where, "scalars are strings like \"3/4\" or \"1/2+1/3i\"");
  try {
    return Scalar::parse(j.get<std::string>());
  } catch (const ParseError& e) {
    throw ParseError(std::string(e.what()) + " (at " + where + ")");
  }
}

inline Poly parse_poly(const Json& j, int nvars, const std::string& where) {
  if (!j.is_array()) throw SchemaError(where, "polynomial literal must be a list of monomials");
  Poly p(nvars);
  for (std::size_t t = 0; t < j.size(); ++t) {
    const Json& mono = j[t];
    std::string here = where + "/" + std::to_string(t);
    Scalar c = parse_scalar(expect(mono, "coeff", here), here + "/coeff");
    const Json& exps = expect(mono, "exps", here);
    if (!exps.is_array() || int(exps.size()) != nvars)
      throw SchemaError(here + "/exps", "expected " + std::to_string(nvars) + " exponents");
    Monomial m{std::vector<int>(std::size_t(nvars), 0)};
    for (int k = 0; k < nvars; ++k) {
      m.e[std::size_t(k)] = expect_int(exps[std::size_t(k)], here + "/exps");
      if (m.e[std::size_t(k)] < 0) throw SchemaError(here + "/exps", "negative exponent");
    }
    p += Poly::monomial(nvars, std::move(m), c);
  }
  return p;
}

inline PolyMatrix parse_poly_matrix(const Json& j, int size, int nvars, const std::string& where) {
  if (!j.is_array() || int(j.size()) != size)
    throw SchemaError(where, "expected " + std::to_string(size) + " matrix rows");
  PolyMatrix m(size, nvars);
  for (int r = 0; r < size; ++r) {
    const Json& row = j[std::size_t(r)];
    if (!row.is_array() || int(row.size()) != size)
      throw SchemaError(where + "/" + std::to_string(r),
                        "expected " + std::to_string(size) + " row entries");
    for (int c = 0; c < size; ++c)
      m(r, c) = parse_poly(row[std::size_t(c)], nvars,
                           where + "/" + std::to_string(r) + "/" + std::to_string(c));
  }
  return m;
}

inline ScalarMat parse_scalar_matrix(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw SchemaError(where, "expected a nonempty matrix");
  int rows = int(j.size());
  ScalarMat m(rows, rows);
  for (int r = 0; r < rows; ++r) {
    const Json& row = j[std::size_t(r)];
    if (!row.is_array() || int(row.size()) != rows)
      throw SchemaError(where + "/" + std::to_string(r), "matrix must be square");
    for (int c = 0; c < rows; ++c)
      m(r, c) = parse_scalar(row[std::size_t(c)],
                             where + "/" + std::to_string(r) + "/" + std::to_string(c));
  }
  return m;
}

inline LieAlgebra parse_algebra(const Json& j, const std::string& where) {
  if (j.is_string()) return LieAlgebra::preset(j.get<std::string>());
  if (!j.is_object()) throw SchemaError(where, "algebra must be a preset name or an object");
  int dim = expect_int(expect(j, "dim", where), where + "/dim");
  if (dim < 1 || dim > 16) throw SchemaError(where + "/dim", "dimension out of range");
  std::map<std::pair<int, int>, std::vector<std::pair<int, Scalar>>> br;
  const Json& brackets = expect(j, "brackets", where);
  if (!brackets.is_array()) throw SchemaError(where + "/brackets", "expected a list");
  for (std::size_t t = 0; t < brackets.size(); ++t) {
    std::string here = where + "/brackets/" + std::to_string(t);
    const Json& entry = brackets[t];
    if (!entry.is_array() || entry.size() != 3) throw SchemaError(here, "expected [i, j, terms]");
    int i = expect_int(entry[0], here);
    int jj = expect_int(entry[1], here);
    std::vector<std::pair<int, Scalar>> terms;
    for (std::size_t u = 0; u < entry[2].size(); ++u) {
      const Json& term = entry[2][u];
      if (!term.is_array() || term.size() != 2)
        throw SchemaError(here, "expected [k, coeff] pairs");
      terms.push_back({expect_int(term[0], here), parse_scalar(term[1], here)});
    }
    br[{i, jj}] = std::move(terms);
  }
  std::vector<std::string> names;
  if (j.contains("names"))
    for (const auto& nvar : j["names"]) names.push_back(nvar.get<std::string>());
  return LieAlgebra::from_structure_constants(dim, br, std::move(names));
}

}  // namespace jio

struct ProblemOptions {
  std::optional<int> cap;
  Field field = Field::Q;
  bool force = false;
  std::optional<std::vector<Scalar>> point;
  std::optional<std::string> module_name;
  std::optional<std::string> cocycle;
};

// A validated problem file: the algebra and Poisson structure it declares,
// and optionally the bundle datum.
struct Problem {
  std::optional<LieAlgebra> algebra;
  std::optional<PoissonStructure> poisson;
  std::optional<ConnectionData> bundle;
  std::optional<LieModule> module;
  ProblemOptions options;

  const LieAlgebra& need_algebra() const {
    if (!algebra) throw CrossRefError("/algebra", "this command needs a Lie algebra");
    return *algebra;
  }
  const PoissonStructure& need_poisson() const {
    if (!poisson) throw CrossRefError("/poisson", "this command needs a Poisson structure");
    return *poisson;
  }
  const ConnectionData& need_bundle() const {
    if (!bundle) throw CrossRefError("/bundle", "this command needs a bundle");
    return *bundle;
  }
};

inline Problem parse_problem(const Json& j) {
  if (!j.is_object()) throw SchemaError("/", "problem file must be a JSON object");
  Problem p;
  if (j.contains("options")) {
    const Json& o = j["options"];
    if (!o.is_object()) throw SchemaError("/options", "expected an object");
    if (o.contains("cap")) p.options.cap = jio::expect_int(o["cap"], "/options/cap");
    if (o.contains("field")) {
      std::string f = o["field"].get<std::string>();
      if (f != "Q" && f != "Qi") throw SchemaError("/options/field", "field must be Q or Qi");
      p.options.field = f == "Q" ? Field::Q : Field::Qi;
    }
    if (o.contains("force")) p.options.force = o["force"].get<bool>();
    if (o.contains("point")) {
      std::vector<Scalar> pt;
      for (std::size_t t = 0; t < o["point"].size(); ++t)
        pt.push_back(jio::parse_scalar(o["point"][t], "/options/point"));
      p.options.point = std::move(pt);
    }
    if (o.contains("module")) p.options.module_name = o["module"].get<std::string>();
    if (o.contains("cocycle")) p.options.cocycle = o["cocycle"].get<std::string>();
  }
  if (j.contains("algebra")) p.algebra = jio::parse_algebra(j["algebra"], "/algebra");
  if (j.contains("poisson")) {
    const Json& jp = j["poisson"];
    if (!jp.is_object()) throw SchemaError("/poisson", "expected an object");
    if (jp.contains("preset")) {
      LieAlgebra g = LieAlgebra::preset(jp["preset"].get<std::string>());
      if (p.algebra && p.algebra->dim() != g.dim())
        throw CrossRefError("/poisson/preset", "preset dimension differs from /algebra");
      p.poisson = PoissonStructure::from_lie_algebra(g);
      if (!p.algebra) p.algebra = std::move(g);
    } else if (jp.contains("bivector")) {
      // Either the plain entry list [[i, j, PolyLiteral], ...] or an object
      // {"nvars": n, "entries": [...]} when the variable count is not implied
      // by an algebra.
      const Json& jb = jp["bivector"];
      const Json& entries = jb.is_array() ? jb : jio::expect(jb, "entries", "/poisson/bivector");
      int nvars = -1;
      if (p.algebra)
        nvars = p.algebra->dim();
      else if (jb.is_object() && jb.contains("nvars"))
        nvars = jio::expect_int(jb["nvars"], "/poisson/bivector/nvars");
      else if (!entries.empty() && entries[0].is_array() && entries[0].size() == 3 &&
               !entries[0][2].empty())
        nvars = int(entries[0][2][0].value("exps", Json::array()).size());
      if (nvars < 1)
        throw SchemaError("/poisson/bivector",
                          "cannot infer the variable count; give an algebra or \"nvars\"");
      ScalarMultiVector pi = scalar_mv(nvars, 2);
      for (std::size_t t = 0; t < entries.size(); ++t) {
        std::string here = "/poisson/bivector/entries/" + std::to_string(t);
        const Json& e = entries[t];
        if (!e.is_array() || e.size() != 3) throw SchemaError(here, "expected [i, j, poly]");
        int a = jio::expect_int(e[0], here), b = jio::expect_int(e[1], here);
        if (a < 0 || b < 0 || a >= nvars || b >= nvars || a == b)
          throw SchemaError(here, "bad bivector indices");
        Poly v = jio::parse_poly(e[2], nvars, here);
        if (a > b) {
          std::swap(a, b);
          v = -v;
        }
        pi.set_component(mask_of({a, b}), pi.component(mask_of({a, b})) + v);
      }
      try {
        p.poisson = PoissonStructure(std::move(pi));
      } catch (const JacobiViolation& e) {
        throw JacobiViolation(e.i, e.j, e.k, std::string(e.what()) + " (at /poisson/bivector)");
      }
    } else {
      throw SchemaError("/poisson", "expected \"preset\" or \"bivector\"");
    }
  } else if (p.algebra) {
    p.poisson = PoissonStructure::from_lie_algebra(*p.algebra);
  }
  if (j.contains("bundle")) {
    const Json& jb = j["bundle"];
    if (!jb.is_object()) throw SchemaError("/bundle", "expected an object");
    if (!p.poisson) throw CrossRefError("/bundle", "a bundle needs a Poisson structure");
    Field field = p.options.field;
    if (jb.contains("field")) {
      std::string f = jb["field"].get<std::string>();
      if (f != "Q" && f != "Qi") throw SchemaError("/bundle/field", "field must be Q or Qi");
      field = f == "Q" ? Field::Q : Field::Qi;
    }
    std::optional<int> cap = p.options.cap;
    if (jb.contains("cap")) cap = jio::expect_int(jb["cap"], "/bundle/cap");
    if (jb.contains("representation")) {
      const Json& jr = jb["representation"];
      std::vector<ScalarMat> mats;
      if (jr.contains("module")) {
        p.module = LieModule::by_name(p.need_algebra(), jr["module"].get<std::string>());
      } else if (jr.contains("matrices")) {
        const Json& jm = jr["matrices"];
        if (int(jm.size()) != p.need_algebra().dim())
          throw CrossRefError("/bundle/representation/matrices",
                              "need one matrix per basis element");
        for (std::size_t t = 0; t < jm.size(); ++t)
          mats.push_back(jio::parse_scalar_matrix(jm[t], "/bundle/representation/matrices/" +
                                                             std::to_string(t)));
        try {
          p.module = LieModule(p.need_algebra(), std::move(mats));
        } catch (const ModuleValidationError& e) {
          throw ModuleValidationError(std::string(e.what()) +
                                      " (at /bundle/representation/matrices)");
        }
      } else {
        throw SchemaError("/bundle/representation", "expected \"module\" or \"matrices\"");
      }
      p.bundle = from_representation(*p.poisson, *p.module, field);
    } else if (jb.contains("canonical") && jb["canonical"].get<bool>()) {
      p.bundle = canonical_bundle(*p.poisson);
    } else if (jb.contains("xi")) {
      int rank = jio::expect_int(jio::expect(jb, "rank", "/bundle"), "/bundle/rank");
      if (rank < 1) throw SchemaError("/bundle/rank", "rank must be positive");
      const Json& jx = jb["xi"];
      if (!jx.is_array() || int(jx.size()) != p.poisson->nvars())
        throw CrossRefError("/bundle/xi", "need one component matrix per coordinate");
      std::vector<PolyMatrix> xi;
      for (std::size_t t = 0; t < jx.size(); ++t)
        xi.push_back(jio::parse_poly_matrix(jx[t], rank, p.poisson->nvars(),
                                            "/bundle/xi/" + std::to_string(t)));
      p.bundle = ConnectionData(*p.poisson, std::move(xi), field, cap);
    } else {
      throw SchemaError("/bundle", "expected \"xi\", \"representation\" or \"canonical\"");
    }
    if (field == Field::Q && p.bundle)
      for (const auto& x : p.bundle->components())
        for (int r = 0; r < x.size(); ++r)
          for (int c = 0; c < x.size(); ++c)
            if (!x(r, c).has_real_coefficients())
              throw CrossRefError("/bundle", "field Q bundle has non-real coefficients");
  }
  return p;
}

inline Problem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorClass::Validation, "cannot open problem file \"" + path + "\"");
  Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("invalid JSON in \"" + path + "\": " + e.what());
  }
  return parse_problem(j);
}

// ------------------------------------------------------------------- reports

// Canonical JSON: nlohmann::json orders keys, scalars are strings, no timing
// (identical inputs give byte-identical reports). The text format is the
// human-facing rendering and may include timing.
inline std::string emit_report(const Json& report, const std::string& format) {
  if (format == "json") return report.dump(2) + "\n";
  if (format != "text") throw Error(ErrorClass::Validation, "unknown format \"" + format + "\"");
  std::ostringstream out;
  auto walk = [&](auto&& self, const Json& j, const std::string& prefix) -> void {
    if (j.is_object()) {
      for (auto it = j.begin(); it != j.end(); ++it)
        self(self, it.value(), prefix.empty() ? it.key() : prefix + "." + it.key());
    } else if (j.is_array() && !j.empty() && (j[0].is_object() || j[0].is_array())) {
      for (std::size_t t = 0; t < j.size(); ++t)
        self(self, j[t], prefix + "[" + std::to_string(t) + "]");
    } else {
      out << prefix << ": " << (j.is_string() ? j.get<std::string>() : j.dump()) << "\n";
    }
  };
  walk(walk, report, "");
  return out.str();
}

}  // namespace pvk

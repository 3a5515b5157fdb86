// pvk: exact computations with Poisson vector bundles in polynomial
// trivializations. One problem file (or --algebra preset) per invocation;
// reports go to stdout as canonical JSON or readable text.
//
// Exit codes: 0 success, 1 validation failure, 2 mathematical obstruction,
// 3 internal invariant breach.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pvk/pvk.hpp"

namespace {

using namespace pvk;

int max_cap_limit() {
  if (const char* env = std::getenv("PVK_MAX_CAP")) {
    try {
      return std::max(1, std::stoi(env));
    } catch (...) {
      throw Error(ErrorClass::Validation, "PVK_MAX_CAP is not an integer");
    }
  }
  return 8;
}

void check_cap(int cap) {
  int limit = max_cap_limit();
  if (cap > limit)
    throw Error(ErrorClass::Validation,
                "degree cap " + std::to_string(cap) + " exceeds PVK_MAX_CAP (" +
                    std::to_string(limit) + ")");
}

struct Flags {
  std::string input;
  std::string algebra;
  std::string module_name;
  std::string cocycle;
  std::string point;
  std::string format = "json";
  int cap = -1;
  int max_degree = -1;  // default: the bundle's cap, else 4
  int k_min = 0, k_max = -1;
  int fiber = 1;
  bool force = false;
};

std::vector<Scalar> parse_point(const std::string& text, int nvars) {
  std::vector<Scalar> p;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    std::string tok = text.substr(start, comma == std::string::npos ? std::string::npos
                                                                    : comma - start);
    if (!tok.empty()) p.push_back(Scalar::parse(tok));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (int(p.size()) != nvars)
    throw Error(ErrorClass::Validation, "--point needs " + std::to_string(nvars) +
                                            " comma-separated rationals");
  return p;
}

Problem load(const Flags& f, bool need_bundle) {
  Problem p;
  if (!f.input.empty()) {
    p = load_problem(f.input);
  } else if (!f.algebra.empty()) {
    p.algebra = LieAlgebra::preset(f.algebra);
    p.poisson = PoissonStructure::from_lie_algebra(*p.algebra);
  } else {
    throw Error(ErrorClass::Validation, "need a problem file or --algebra <preset>");
  }
  if (f.cap >= 0) p.options.cap = f.cap;
  if (p.options.cap) check_cap(*p.options.cap);
  if (f.force) p.options.force = true;
  if (!f.module_name.empty()) p.options.module_name = f.module_name;
  if (!f.cocycle.empty()) p.options.cocycle = f.cocycle;
  if (need_bundle && !p.bundle) {
    std::string mname = p.options.module_name.value_or("adjoint");
    p.module = LieModule::by_name(p.need_algebra(), mname);
    ConnectionData xi = from_representation(p.need_poisson(), *p.module, p.options.field);
    if (p.options.cap)
      xi = ConnectionData(xi.poisson(), xi.components(), xi.field(), p.options.cap);
    p.bundle = std::move(xi);
  }
  if (need_bundle && p.bundle && p.bundle->cap()) check_cap(*p.bundle->cap());
  return p;
}

Json cap_json(const std::optional<int>& cap) { return cap ? Json(*cap) : Json(nullptr); }

Json cmd_check_mc(const Flags& f) {
  Problem p = load(f, true);
  MatrixMultiVector res = mc_residual(*p.bundle);
  Json payload{{"rank", p.bundle->rank()},
               {"cap", cap_json(p.bundle->cap())},
               {"residual_zero", res.is_zero()}};
  if (!res.is_zero()) payload["residual"] = to_json(res);
  return payload;
}

Json cmd_normalize(const Flags& f, int& exit_code) {
  Problem p = load(f, true);
  int d = f.max_degree > 0 ? f.max_degree : p.bundle->cap() ? *p.bundle->cap() : 4;
  check_cap(d);
  NormalizeResult res = formal_normalize(*p.bundle, d, p.options.force);
  Json payload{{"max_degree", d},
               {"degrees_cleared", res.degrees_cleared},
               {"semisimple", res.semisimple},
               {"unitary", res.unitary_path}};
  switch (res.status) {
    case NormalizeResult::Status::Ok: {
      payload["status"] = "ok";
      payload["phi"] = to_json(res.phi->matrix());
      Json xi0 = Json::array();
      for (const auto& m : res.xi0) xi0.push_back(to_json(m));
      payload["xi0"] = std::move(xi0);
      break;
    }
    case NormalizeResult::Status::Obstruction:
    case NormalizeResult::Status::UnitaryObstruction: {
      payload["status"] = res.status == NormalizeResult::Status::Obstruction
                              ? "obstruction"
                              : "unitary-obstruction";
      Json comps = Json::array();
      for (const auto& m : res.obstruction_cocycle) comps.push_back(to_json(m));
      payload["obstruction"] = {{"r", res.failed_degree},
                                {"cocycle", {{"degree", 1}, {"components", std::move(comps)}}}};
      exit_code = 2;
      break;
    }
    case NormalizeResult::Status::NotACocycle: {
      payload["status"] = "not-a-cocycle";
      payload["r"] = res.failed_degree;
      exit_code = 1;
      break;
    }
  }
  return payload;
}

Json cmd_char_class(const Flags& f) {
  Problem p = load(f, true);
  GlCocycle c = GlCocycle::by_name(p.options.cocycle.value_or("tr"));
  std::optional<int> ecap = p.options.cap;
  if (!ecap) ecap = p.bundle->cap() ? *p.bundle->cap() : 6;
  check_cap(*ecap);
  CharClassResult res = characteristic_class(*p.bundle, c, ecap);
  return Json{{"cocycle", c.name()},
              {"class", to_json(res.value)},
              {"closed", res.closed},
              {"exact_up_to_cap", res.exact_up_to_cap},
              {"exactness_cap", res.exactness_cap}};
}

Json cmd_modular(const Flags& f) {
  Problem p = load(f, false);
  ConnectionData can = canonical_bundle(p.need_poisson());
  int ecap = p.options.cap.value_or(6);
  check_cap(ecap);
  CharClassResult res = characteristic_class(can, GlCocycle::trace(), ecap);
  Json comps = Json::array();
  for (int i = 0; i < can.nvars(); ++i) comps.push_back(to_json(can.xi(i)(0, 0)));
  return Json{{"components", std::move(comps)},
              {"nonzero", !res.value.is_zero()},
              {"exact_up_to_cap", res.exact_up_to_cap},
              {"exactness_cap", res.exactness_cap}};
}

Json cmd_isotropy(const Flags& f) {
  Problem p = load(f, true);
  std::vector<Scalar> point;
  if (!f.point.empty())
    point = parse_point(f.point, p.bundle->nvars());
  else if (p.options.point)
    point = *p.options.point;
  else
    point.assign(std::size_t(p.bundle->nvars()), Scalar(0));
  if (int(point.size()) != p.bundle->nvars())
    throw Error(ErrorClass::Validation, "point has wrong dimension");
  IsotropyData iso = isotropy_representation(*p.bundle, point);
  Json pt = Json::array();
  for (const auto& c : point) pt.push_back(c.str());
  Json basis = Json::array();
  for (const auto& v : iso.conormal_basis) {
    Json row = Json::array();
    for (const auto& c : v) row.push_back(c.str());
    basis.push_back(std::move(row));
  }
  Json mats = Json::array();
  for (const auto& m : iso.matrices) mats.push_back(to_json(m));
  Json table = Json::array();
  for (const auto& row : iso.bracket_table) {
    Json r = Json::array();
    for (const auto& entry : row) {
      Json e = Json::array();
      for (const auto& c : entry) e.push_back(c.str());
      r.push_back(std::move(e));
    }
    table.push_back(std::move(r));
  }
  return Json{{"point", std::move(pt)},
              {"conormal_dim", int(iso.conormal_basis.size())},
              {"basis", std::move(basis)},
              {"matrices", std::move(mats)},
              {"bracket_table", std::move(table)},
              {"representation_verified", iso.representation_verified}};
}

Json cmd_ce(const Flags& f) {
  Problem p = load(f, false);
  const LieAlgebra& g = p.need_algebra();
  LieModule mod = p.module ? *p.module
                           : LieModule::by_name(g, p.options.module_name.value_or("trivial"));
  int kmin = f.k_min, kmax = f.k_max >= 0 ? f.k_max : std::min(g.dim(), 2);
  auto dims = ce_cohomology_dims(mod, kmin, kmax);
  Json dim_map = Json::object();
  for (int k = kmin; k <= kmax; ++k)
    dim_map[std::to_string(k)] = dims[std::size_t(k - kmin)];
  return Json{{"algebra_dim", g.dim()}, {"module_dim", mod.dim()}, {"dims", std::move(dim_map)}};
}

Json cmd_pcoh(const Flags& f) {
  Problem p = load(f, false);
  const PoissonStructure& pi = p.need_poisson();
  int cap = p.options.cap.value_or(2);
  check_cap(cap);
  int kmin = f.k_min, kmax = f.k_max >= 0 ? f.k_max : std::min(pi.nvars(), 2);
  auto dims = pi.cohomology_dims(cap, kmin, kmax);
  Json dim_map = Json::object();
  for (int k = kmin; k <= kmax; ++k)
    dim_map[std::to_string(k)] = dims[std::size_t(k - kmin)];
  return Json{{"cap", cap}, {"dims", std::move(dim_map)}};
}

Json cmd_homotopy(const Flags& f) {
  Problem p = load(f, true);
  ConnectionData sym = dilation_homotopy_symbolic(*p.bundle);
  bool zero = mc_residual(sym).is_zero();
  if (!zero)
    throw InternalError("dilation family of a flat datum has a nonzero residual");
  Json xi0 = Json::array();
  for (const auto& m : p.bundle->constant_part()) xi0.push_back(to_json(m));
  return Json{{"residual_zero_in_t", zero}, {"xi0", std::move(xi0)}};
}

Json cmd_homog_check(const Flags& f, int& exit_code) {
  Problem p = load(f, true);
  const ConnectionData& xi = *p.bundle;
  std::vector<std::string> cocycles;
  if (p.options.cocycle)
    cocycles.push_back(*p.options.cocycle);
  else
    cocycles = {"tr", "u2"};
  Json checks = Json::array();
  bool all_ok = true;
  for (int i = 0; i < xi.nvars(); ++i)
    for (const auto& cname : cocycles) {
      ScalarMultiVector xf = xi.poisson().sharp(OneForm::coordinate(xi.nvars(), i));
      HomogeneityReport rep = homogeneity_check(xi, xf, xi.xi(i), GlCocycle::by_name(cname));
      bool ok = rep.status == HomogeneityReport::Status::Ok;
      all_ok = all_ok && ok;
      checks.push_back({{"coordinate", i},
                        {"cocycle", cname},
                        {"der_xi_ok", rep.der_xi_ok},
                        {"identity_ok", rep.identity_ok}});
    }
  if (!all_ok) exit_code = 3;  // canonical witnesses; failure is internal
  return Json{{"checks", std::move(checks)}, {"all_ok", all_ok}};
}

Json cmd_product(const Flags& f) {
  Problem p = load(f, true);
  ConnectionData ext = product_extension(*p.bundle, f.fiber);
  bool flat = is_flat(ext);
  ConnectionData back = restrict_to_base(ext, f.fiber);
  bool roundtrip = true;
  for (int i = 0; i < p.bundle->nvars(); ++i)
    roundtrip = roundtrip && back.xi(i) == p.bundle->xi(i);
  return Json{{"fiber_half_dim", f.fiber},
              {"extension_flat", flat},
              {"roundtrip_ok", roundtrip},
              {"total_nvars", ext.nvars()}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pvk: exact computations with Poisson vector bundles"};
  app.require_subcommand(1);
  Flags f;

  auto add_common = [&](CLI::App* sub, bool with_input = true) {
    if (with_input) sub->add_option("input", f.input, "problem JSON file");
    sub->add_option("--algebra", f.algebra, "Lie algebra preset (sl2, so3, h3, aff1, abelian:n)");
    sub->add_option("--module", f.module_name, "module preset (trivial, standard, adjoint)");
    sub->add_option("--cap", f.cap, "degree cap");
    sub->add_option("--format", f.format, "output format: json or text")
        ->check(CLI::IsMember({"json", "text"}));
    sub->add_flag("--force", f.force, "bypass the semisimplicity gate");
    return sub;
  };

  auto* mc = add_common(app.add_subcommand("check-mc", "Maurer-Cartan flatness of the bundle"));
  auto* nrm = add_common(app.add_subcommand("normalize", "formal normalization to a constant datum"));
  nrm->add_option("--max-degree", f.max_degree, "degrees to clear (default: the cap, else 4)");
  auto* cls = add_common(app.add_subcommand("char-class", "secondary characteristic class"));
  cls->add_option("--cocycle", f.cocycle, "gl cocycle: tr, u2, u3");
  auto* mod = add_common(app.add_subcommand("modular", "modular class via the canonical bundle"));
  auto* iso = add_common(app.add_subcommand("isotropy", "conormal isotropy representation"));
  iso->add_option("--point", f.point, "evaluation point, comma-separated rationals");
  auto* ce = add_common(app.add_subcommand("ce", "Chevalley-Eilenberg cohomology dimensions"));
  ce->add_option("--kmin", f.k_min, "lowest degree");
  ce->add_option("--kmax", f.k_max, "highest degree");
  auto* pc = add_common(app.add_subcommand("pcoh", "Poisson cohomology dimensions (linear case)"));
  pc->add_option("--kmin", f.k_min, "lowest degree");
  pc->add_option("--kmax", f.k_max, "highest degree");
  auto* hom = add_common(app.add_subcommand("homotopy", "dilation homotopy with a symbolic parameter"));
  auto* hc = add_common(app.add_subcommand("homog-check", "homogeneity witness identities"));
  hc->add_option("--cocycle", f.cocycle, "gl cocycle: tr, u2, u3");
  auto* prod = add_common(app.add_subcommand("product", "symplectic product extension and restriction"));
  prod->add_option("--fiber", f.fiber, "fiber half-dimension (default 1)");

  CLI11_PARSE(app, argc, argv);

  std::string command;
  int exit_code = 0;
  Json report;
  auto started = std::chrono::steady_clock::now();
  try {
    Json payload;
    if (mc->parsed()) {
      command = "check-mc";
      payload = cmd_check_mc(f);
    } else if (nrm->parsed()) {
      command = "normalize";
      payload = cmd_normalize(f, exit_code);
    } else if (cls->parsed()) {
      command = "char-class";
      payload = cmd_char_class(f);
    } else if (mod->parsed()) {
      command = "modular";
      payload = cmd_modular(f);
    } else if (iso->parsed()) {
      command = "isotropy";
      payload = cmd_isotropy(f);
    } else if (ce->parsed()) {
      command = "ce";
      payload = cmd_ce(f);
    } else if (pc->parsed()) {
      command = "pcoh";
      payload = cmd_pcoh(f);
    } else if (hom->parsed()) {
      command = "homotopy";
      payload = cmd_homotopy(f);
    } else if (hc->parsed()) {
      command = "homog-check";
      payload = cmd_homog_check(f, exit_code);
    } else if (prod->parsed()) {
      command = "product";
      payload = cmd_product(f);
    }
    std::string status = exit_code == 0 ? "ok"
                         : exit_code == 2
                             ? "obstruction"
                             : exit_code == 1 ? "validation-error" : "internal-error";
    report = Json{{"command", command},
                  {"input", f.input.empty() ? Json(nullptr) : Json(f.input)},
                  {"status", status},
                  {"payload", payload}};
  } catch (const Error& e) {
    exit_code = int(e.error_class());
    std::string cls_name = e.error_class() == ErrorClass::Validation ? "validation"
                           : e.error_class() == ErrorClass::Obstruction ? "obstruction"
                                                                        : "internal";
    report = Json{{"command", command},
                  {"input", f.input.empty() ? Json(nullptr) : Json(f.input)},
                  {"status", "error"},
                  {"error", {{"class", cls_name}, {"message", e.what()}}}};
  } catch (const std::exception& e) {
    exit_code = 3;
    report = Json{{"command", command},
                  {"status", "error"},
                  {"error", {{"class", "internal"}, {"message", e.what()}}}};
  }

  if (f.format == "text") {
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - started)
                       .count();
    Json timed = report;
    timed["timing_ms"] = elapsed;
    std::cout << emit_report(timed, "text");
  } else {
    std::cout << emit_report(report, "json");
  }
  return exit_code;
}

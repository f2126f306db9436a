#include "geopmp/problem_io.hpp"

#include "geopmp/expr.hpp"

#include <json.hpp>

#include <fstream>
#include <memory>
#include <sstream>

namespace geopmp {

namespace {

using json = nlohmann::json;

[[noreturn]] void schema_error(const std::string& what) { throw ArgumentError("problem file: " + what); }

const json& require(const json& obj, const char* key)
{
  if (!obj.is_object() || !obj.contains(key)) schema_error(std::string("missing field '") + key + "'");
  return obj.at(key);
}

int read_dim(const json& obj, const char* key, int min)
{
  const json& v = require(obj, key);
  if (!v.is_number_integer() || v.get<long long>() < min || v.get<long long>() > 1000) {
    schema_error(std::string("field '") + key + "' must be an integer >= " + std::to_string(min));
  }
  return v.get<int>();
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b)
{
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

expr::Expression read_expression(const json& v, const std::vector<std::string>& vars,
                                 const std::string& where)
{
  if (v.is_number()) return expr::parse(v.dump(), vars);
  if (!v.is_string()) schema_error(where + " must be a string expression");
  try {
    return expr::parse(v.get<std::string>(), vars);
  } catch (const expr::ParseError& e) {
    throw expr::ParseError(where + ": " + e.what(), e.offset());
  } catch (const expr::UndeclaredVariableError& e) {
    throw ArgumentError(where + ": " + e.what());
  }
}

using ExprList = std::shared_ptr<const std::vector<expr::Expression>>;

ExprList read_expression_list(const json& v, std::size_t expected,
                              const std::vector<std::string>& vars, const std::string& where)
{
  if (!v.is_array()) schema_error(where + " must be an array");
  if (v.size() != expected) {
    schema_error(where + " has " + std::to_string(v.size()) + " entries, expected " +
                 std::to_string(expected));
  }
  auto out = std::make_shared<std::vector<expr::Expression>>();
  for (std::size_t i = 0; i < v.size(); ++i) {
    out->push_back(read_expression(v[i], vars, where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::vector<double> pack(std::initializer_list<const Vec*> parts)
{
  std::vector<double> buf;
  for (const Vec* p : parts) buf.insert(buf.end(), p->data(), p->data() + p->size());
  return buf;
}

Vec eval_list(const std::vector<expr::Expression>& list, const std::vector<double>& values)
{
  Vec out(static_cast<Eigen::Index>(list.size()));
  for (std::size_t i = 0; i < list.size(); ++i) out[i] = list[i].evaluate(values);
  return out;
}

LieAlgebra algebra_from_json(const json& a)
{
  const int dim = read_dim(a, "dim", 1);
  std::vector<StructureEntry> entries;
  if (a.contains("structure")) {
    const json& s = a.at("structure");
    if (!s.is_array()) schema_error("algebra.structure must be an array");
    for (const auto& e : s) {
      if (!e.is_array() || e.size() != 4 || !e[0].is_number_integer() ||
          !e[1].is_number_integer() || !e[2].is_number_integer() || !e[3].is_number()) {
        schema_error("algebra.structure entries must be [i, j, k, value]");
      }
      const int i = e[0].get<int>(), j = e[1].get<int>(), k = e[2].get<int>();
      if (i < 1 || j < 1 || k < 1 || i > dim || j > dim || k > dim) {
        schema_error("algebra.structure index out of range 1.." + std::to_string(dim));
      }
      entries.push_back({i - 1, j - 1, k - 1, e[3].get<double>()});
    }
  }
  std::vector<Mat> basis;
  if (a.contains("matrix_basis")) {
    const json& mb = a.at("matrix_basis");
    if (!mb.is_array() || mb.size() != static_cast<std::size_t>(dim)) {
      schema_error("algebra.matrix_basis must hold dim matrices");
    }
    for (const auto& m : mb) {
      if (!m.is_array() || m.empty()) schema_error("algebra.matrix_basis entries must be matrices");
      const auto rows = static_cast<Eigen::Index>(m.size());
      Mat out(rows, rows);
      for (Eigen::Index i = 0; i < rows; ++i) {
        const json& row = m[i];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != rows) {
          schema_error("algebra.matrix_basis matrices must be square");
        }
        for (Eigen::Index j = 0; j < rows; ++j) {
          if (!row[j].is_number()) schema_error("algebra.matrix_basis entries must be numbers");
          out(i, j) = row[j].get<double>();
        }
      }
      basis.push_back(out);
    }
  }
  std::vector<std::string> labels;
  if (a.contains("labels")) labels = a.at("labels").get<std::vector<std::string>>();
  return LieAlgebra::from_entries(dim, entries, basis, labels);
}

Symmetry symmetry_from_json(const json& act, const LieAlgebra& alg, int n)
{
  const auto xs = expr::numbered_names("x", n);
  const auto vars = concat(xs, expr::numbered_names("g", alg.dim()));
  Symmetry sym{alg, {}, {}, {}};
  auto field = [&](const char* key) -> std::function<Vec(const AlgebraElement&, const Vec&)> {
    if (!act.contains(key)) return {};
    ExprList list = read_expression_list(act.at(key), n, vars, std::string("action.") + key);
    return [list](const AlgebraElement& xi, const Vec& x) {
      return eval_list(*list, pack({&x, &xi.coeffs}));
    };
  };
  sym.infinitesimal_action = field("infinitesimal");
  sym.left_invariant_field = field("left_invariant");
  sym.finite_action = field("finite");
  if (!sym.infinitesimal_action) schema_error("action.infinitesimal is required");
  return sym;
}

ReducedProblem reduced_from_json(const json& red, const LieAlgebra& alg, int r,
                                 const std::string& name)
{
  const int s = red.contains("base_dim") ? read_dim(red, "base_dim", 0) : 0;
  const int d = alg.dim();
  const auto zs = expr::numbered_names("z", s);
  const auto us = expr::numbered_names("u", r);
  const auto zu = concat(zs, us);

  ExprList base = std::make_shared<std::vector<expr::Expression>>();
  if (s > 0 || red.contains("base_dynamics")) {
    base = read_expression_list(require(red, "base_dynamics"), s, zu, "reduced.base_dynamics");
  }
  ExprList vertical =
      read_expression_list(require(red, "algebra_dynamics"), d, zu, "reduced.algebra_dynamics");
  auto lag = std::make_shared<expr::Expression>(
      read_expression(require(red, "lagrangian"), zu, "reduced.lagrangian"));

  ReducedProblem::Curvature curvature;
  if (red.contains("curvature")) {
    const auto vars = concat(concat(concat(zs, expr::numbered_names("mu", d)),
                                    expr::numbered_names("v", s)),
                             expr::numbered_names("w", s));
    auto f = std::make_shared<expr::Expression>(
        read_expression(red.at("curvature"), vars, "reduced.curvature"));
    curvature = [f](const Vec& z, const Vec& mu, const Vec& v, const Vec& w) {
      return f->evaluate(pack({&z, &mu, &v, &w}));
    };
  }

  std::vector<Casimir> casimirs;
  if (red.contains("casimirs")) {
    const json& cs = red.at("casimirs");
    if (!cs.is_object()) schema_error("reduced.casimirs must be an object name -> expression");
    const auto mus = expr::numbered_names("mu", d);
    for (const auto& [cname, src] : cs.items()) {
      auto f = std::make_shared<expr::Expression>(
          read_expression(src, mus, "reduced.casimirs." + cname));
      casimirs.push_back({cname, [f](const CoalgebraElement& mu) {
                            return f->evaluate(std::span<const double>(mu.coeffs.data(),
                                                                       mu.coeffs.size()));
                          }});
    }
  }

  return ReducedProblem(
      name, s, alg, r,
      [lag](const Vec& z, const Vec& u) { return lag->evaluate(pack({&z, &u})); },
      [base](const Vec& z, const Vec& u) { return eval_list(*base, pack({&z, &u})); },
      [vertical](const Vec& z, const Vec& u) { return eval_list(*vertical, pack({&z, &u})); },
      curvature, {}, casimirs);
}

ProblemDefinition problem_from_json(const json& doc)
{
  if (!doc.is_object()) schema_error("top level must be an object");
  const std::string name = doc.value("name", std::string("problem"));
  ProblemDefinition out;
  std::optional<LieAlgebra> alg;
  if (doc.contains("algebra")) alg = algebra_from_json(doc.at("algebra"));

  const int r = read_dim(doc, "r", 0);
  if (doc.contains("n") || doc.contains("dynamics")) {
    const int n = read_dim(doc, "n", 1);
    const auto vars = concat(expr::numbered_names("x", n), expr::numbered_names("u", r));
    ExprList dyn = read_expression_list(require(doc, "dynamics"), n, vars, "dynamics");
    auto lag = std::make_shared<expr::Expression>(
        read_expression(require(doc, "lagrangian"), vars, "lagrangian"));
    std::optional<Symmetry> sym;
    if (doc.contains("action")) {
      if (!alg) schema_error("'action' requires 'algebra'");
      sym = symmetry_from_json(doc.at("action"), *alg, n);
    }
    out.full.emplace(
        name, n, r, [dyn](const Vec& x, const Vec& u) { return eval_list(*dyn, pack({&x, &u})); },
        [lag](const Vec& x, const Vec& u) { return lag->evaluate(pack({&x, &u})); },
        AnalyticDerivatives{}, sym);
  }
  if (doc.contains("reduced")) {
    if (!alg) schema_error("'reduced' requires 'algebra'");
    out.reduced.emplace(reduced_from_json(doc.at("reduced"), *alg, r, name));
  }
  if (!out.full && !out.reduced) schema_error("no full or reduced problem defined");
  return out;
}

json parse_json(std::istream& is)
{
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw ArgumentError(std::string("problem file: invalid JSON: ") + e.what());
  }
}

}  // namespace

ProblemDefinition parse_problem(std::istream& is)
{
  const json doc = parse_json(is);
  try {
    return problem_from_json(doc);
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("problem file: ") + e.what());
  }
}

ProblemDefinition load_problem(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open problem file '" + path + "'");
  return parse_problem(in);
}

LieAlgebra parse_algebra(std::istream& is)
{
  const json doc = parse_json(is);
  try {
    return algebra_from_json(doc);
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("algebra: ") + e.what());
  }
}

}  // namespace geopmp

#include "dowg/problem_json.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <type_traits>

namespace dowg {

namespace {

using nlohmann::json;

json piecewise_to_json(const DyadicPiecewiseConstant& pc) {
  return json{{"level", pc.level}, {"values", pc.values}};
}

json analytic_to_json(const AnalyticFn& fn) {
  if (fn.name.empty())
    throw std::invalid_argument("problem_to_json: analytic factor has no registry name");
  return json{{"name", fn.name}};
}

json coefficient_to_json(const CoefficientSpec& c) {
  return std::visit(
      [](const auto& alt) -> json {
        using T = std::decay_t<decltype(alt)>;
        if constexpr (std::is_same_v<T, AnalyticFn>) {
          json j = analytic_to_json(alt);
          j["type"] = "analytic";
          return j;
        } else if constexpr (std::is_same_v<T, DyadicPiecewiseConstant>) {
          json j = piecewise_to_json(alt);
          j["type"] = "piecewise";
          return j;
        } else {
          return json{{"type", "product"},
                      {"piecewise", piecewise_to_json(alt.piecewise)},
                      {"analytic", analytic_to_json(alt.analytic)}};
        }
      },
      c);
}

json source_to_json(const SourceSpec& s) {
  return std::visit(
      [](const auto& alt) -> json {
        using T = std::decay_t<decltype(alt)>;
        if constexpr (std::is_same_v<T, AnalyticFn>) {
          json j = analytic_to_json(alt);
          j["type"] = "analytic";
          return j;
        } else {
          return json{{"type", "product"},
                      {"piecewise", piecewise_to_json(alt.piecewise)},
                      {"analytic", analytic_to_json(alt.analytic)}};
        }
      },
      s);
}

DyadicPiecewiseConstant parse_piecewise(const json& j, bool require_positive) {
  DyadicPiecewiseConstant pc;
  pc.level = j.at("level").get<int>();
  if (pc.level < 0 || pc.level > 20)
    throw std::invalid_argument("problem json: piecewise level out of range [0, 20]");
  pc.values = j.at("values").get<std::vector<double>>();
  if (pc.values.size() != (std::size_t{1} << pc.level))
    throw std::invalid_argument("problem json: piecewise needs 2^level values");
  for (double v : pc.values) {
    if (!std::isfinite(v)) throw std::invalid_argument("problem json: non-finite piecewise value");
    if (require_positive && !(v > 0.0))
      throw std::invalid_argument("problem json: coefficient pieces must be positive");
  }
  return pc;
}

AnalyticFn parse_analytic(const json& j) {
  return named_analytic(j.at("name").get<std::string>());
}

CoefficientSpec parse_coefficient(const json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "analytic") return parse_analytic(j);
  if (type == "piecewise") return parse_piecewise(j, true);
  if (type == "product")
    return ProductFactor{parse_piecewise(j.at("piecewise"), true), parse_analytic(j.at("analytic"))};
  throw std::invalid_argument("problem json: unknown coefficient type \"" + type + "\"");
}

SourceSpec parse_source(const json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "analytic") return parse_analytic(j);
  if (type == "product")
    return ProductFactor{parse_piecewise(j.at("piecewise"), false),
                         parse_analytic(j.at("analytic"))};
  throw std::invalid_argument("problem json: unknown source type \"" + type + "\"");
}

}  // namespace

std::string problem_to_json_string(const ProblemSpec& problem) {
  json j;
  if (problem.builtin_id >= 1 && problem.builtin_id <= 6) {
    j = json{{"builtin", problem.builtin_id}};
  } else {
    j = json{{"name", problem.name},
             {"singular_at_zero", problem.singular_at_zero},
             {"coefficient", coefficient_to_json(problem.coefficient)},
             {"source", source_to_json(problem.source)}};
  }
  return j.dump(2) + "\n";
}

ProblemSpec problem_from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("problem json: parse failed: ") + e.what());
  }
  try {
    if (j.contains("builtin")) return builtin_example(j.at("builtin").get<int>());
    ProblemSpec p;
    p.name = j.value("name", std::string("custom"));
    p.singular_at_zero = j.value("singular_at_zero", false);
    p.coefficient = parse_coefficient(j.at("coefficient"));
    p.source = parse_source(j.at("source"));
    return p;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("problem json: bad document: ") + e.what());
  }
}

ProblemSpec load_problem_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return problem_from_json_string(buf.str());
}

void save_problem_file(const ProblemSpec& problem, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << problem_to_json_string(problem);
}

}  // namespace dowg

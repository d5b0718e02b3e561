#include <filesystem>
#include <fstream>
#include <sstream>

#include "orlicz_qha/errors.hpp"
#include "orlicz_qha/serialize.hpp"

namespace oqha {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double number(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw Error(ErrorCode::ParseError, std::string("Young function JSON: missing numeric field '") + key + "'");
  return j.at(key).get<double>();
}

std::vector<double> numbers(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array())
    throw Error(ErrorCode::ParseError, std::string("Young function JSON: missing array field '") + key + "'");
  std::vector<double> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number()) throw Error(ErrorCode::ParseError, std::string("non-numeric entry in '") + key + "'");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

nlohmann::json to_json(const YoungFunction& phi) {
  nlohmann::json j;
  std::visit(overloaded{
                 [&](const family::Power& f) { j = {{"family", "Power"}, {"p", f.p}}; },
                 [&](const family::PowerLog& f) { j = {{"family", "PowerLog"}, {"p", f.p}, {"a", f.a}}; },
                 [&](const family::PiecewisePower& f) {
                   j = {{"family", "PiecewisePower"}, {"p_low", f.p_low}, {"p_high", f.p_high}, {"breakpoint", f.breakpoint}};
                 },
                 [&](const family::Scaled& f) { j = {{"family", "Scaled"}, {"inner", to_json(f.inner)}, {"r", f.r}}; },
                 [&](const family::Sampled& f) {
                   j = {{"family", "Sampled"}, {"log_t", f.log_t}, {"log_value", f.log_value}};
                 },
                 [&](const family::InverseProduct& f) {
                   nlohmann::json factors = nlohmann::json::array();
                   for (const auto& [g, e] : f.factors) factors.push_back({{"phi", to_json(g)}, {"exponent", e}});
                   j = {{"family", "InverseProduct"}, {"s_power", f.s_power}, {"factors", factors}};
                 },
             },
             phi.family());
  return j;
}

YoungFunction young_from_json(const nlohmann::json& input) {
  if (!input.is_object()) throw Error(ErrorCode::ParseError, "Young function JSON must be an object");
  nlohmann::json j = input;
  if (j.contains("params")) {
    if (!j["params"].is_object()) throw Error(ErrorCode::ParseError, "'params' must be an object");
    for (auto& [k, v] : j["params"].items()) j[k] = v;
  }
  if (!j.contains("family") || !j["family"].is_string())
    throw Error(ErrorCode::ParseError, "Young function JSON needs a 'family' string");
  const std::string fam = j["family"].get<std::string>();
  YoungFunction out = YoungFunction::power(1.0);
  if (fam == "Power") {
    out = YoungFunction::power(number(j, "p"));
  } else if (fam == "PowerLog") {
    out = YoungFunction::power_log(number(j, "p"), number(j, "a"));
  } else if (fam == "PiecewisePower") {
    out = YoungFunction::piecewise_power(number(j, "p_low"), number(j, "p_high"), number(j, "breakpoint"));
  } else if (fam == "Scaled") {
    if (!j.contains("inner")) throw Error(ErrorCode::ParseError, "Scaled needs 'inner'");
    return YoungFunction::scaled(young_from_json(j["inner"]), number(j, "r"));
  } else if (fam == "Sampled") {
    if (j.contains("log_t"))
      out = YoungFunction::sampled_log(numbers(j, "log_t"), numbers(j, "log_value"));
    else
      out = YoungFunction::sampled(numbers(j, "t"), numbers(j, "value"));
  } else if (fam == "InverseProduct") {
    std::vector<std::pair<YoungFunction, double>> factors;
    if (!j.contains("factors") || !j["factors"].is_array()) throw Error(ErrorCode::ParseError, "InverseProduct needs 'factors'");
    for (const auto& f : j["factors"]) {
      if (!f.is_object() || !f.contains("phi")) throw Error(ErrorCode::ParseError, "factor needs 'phi'");
      factors.emplace_back(young_from_json(f["phi"]), number(f, "exponent"));
    }
    out = YoungFunction::inverse_product(number(j, "s_power"), std::move(factors));
  } else {
    throw Error(ErrorCode::ParseError, "unknown Young function family '" + fam + "'");
  }
  if (j.contains("r")) out = YoungFunction::scaled(out, number(j, "r"));
  return out;
}

YoungFunction parse_young(const std::string& text_or_path) {
  std::string text = text_or_path;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw Error(ErrorCode::ParseError, "empty Young function specification");
  if (text[first] != '{') {
    std::ifstream in(text_or_path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open Young function file '" + text_or_path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("invalid JSON: ") + e.what());
  }
  try {
    return young_from_json(j);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidArgument) throw Error(ErrorCode::ParseError, e.what());
    throw;
  }
}

}  // namespace oqha

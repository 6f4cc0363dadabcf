#include "tailbalance/io.hpp"

#include <charconv>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace tailbalance {

using nlohmann::json;

namespace {

double number_field(const json& doc, const char* field) {
  if (!doc.contains(field)) {
    throw std::invalid_argument(std::string("missing field '") + field + "'");
  }
  if (!doc.at(field).is_number()) {
    throw std::invalid_argument(std::string("field '") + field + "' must be a number");
  }
  return doc.at(field).get<double>();
}

Prior prior_field(const json& doc, double fallback) {
  return Prior(doc.contains("theta") ? number_field(doc, "theta") : fallback);
}

bool parse_double(std::string_view text, double& out) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  return res.ec == std::errc() && res.ptr == text.data() + text.size();
}

}  // namespace

AlphaSpec alpha_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("kind") || !doc.at("kind").is_string()) {
    throw std::invalid_argument("alpha spec needs a string field 'kind'");
  }
  const std::string kind = doc.at("kind").get<std::string>();
  if (kind == "linear") {
    return AlphaSpec::linear(prior_field(doc, 0.5), Ability(number_field(doc, "a")));
  }
  if (kind == "affine") {
    return AlphaSpec::affine(number_field(doc, "intercept"), number_field(doc, "slope"),
                             prior_field(doc, 0.5));
  }
  if (kind == "table") {
    if (!doc.contains("points") || !doc.at("points").is_array()) {
      throw std::invalid_argument("table alpha needs an array field 'points'");
    }
    std::vector<Knot> points;
    for (const json& p : doc.at("points")) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
        throw std::invalid_argument("field 'points' must hold [t, alpha] number pairs");
      }
      points.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    std::optional<Prior> prior;
    if (doc.contains("theta")) prior = Prior(number_field(doc, "theta"));
    return AlphaSpec::table(std::move(points), prior);
  }
  throw std::invalid_argument("field 'kind' must be linear, affine or table; got '" + kind + "'");
}

json to_json(const AlphaSpec& alpha) {
  return std::visit(
      [](const auto& k) -> json {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, AlphaSpec::Linear>) {
          return {{"kind", "linear"}, {"theta", k.prior.theta()}, {"a", k.a.value()}};
        } else if constexpr (std::is_same_v<K, AlphaSpec::Affine>) {
          return {{"kind", "affine"},
                  {"intercept", k.intercept},
                  {"slope", k.slope},
                  {"theta", k.prior.theta()}};
        } else {
          json pts = json::array();
          for (const auto& [t, v] : k.points) pts.push_back({t, v});
          return {{"kind", "table"}, {"points", pts}, {"theta", k.prior.theta()}};
        }
      },
      alpha.kind());
}

JuryConfig jury_from_json(const json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("jury config must be a JSON object");
  if (!doc.contains("abilities") || !doc.at("abilities").is_array()) {
    throw std::invalid_argument("missing array field 'abilities'");
  }
  JuryConfig config;
  for (const json& a : doc.at("abilities")) {
    if (!a.is_number()) throw std::invalid_argument("field 'abilities' must hold numbers");
    config.abilities.emplace_back(a.get<double>());
  }
  config.prior = prior_field(doc, 0.5);
  if (doc.contains("tie_break")) {
    if (!doc.at("tie_break").is_string()) {
      throw std::invalid_argument("field 'tie_break' must be a string");
    }
    config.tie_break = tie_break_from_string(doc.at("tie_break").get<std::string>());
  }
  if (doc.contains("trials")) {
    if (!doc.at("trials").is_number_integer()) {
      throw std::invalid_argument("field 'trials' must be an integer");
    }
    config.trials = doc.at("trials").get<std::int64_t>();
  }
  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_integer()) {
      throw std::invalid_argument("field 'seed' must be an integer");
    }
    config.seed = doc.at("seed").get<std::uint64_t>();
  }
  config.validate(false);
  return config;
}

json to_json(const JuryConfig& config) {
  json abilities = json::array();
  for (const Ability& a : config.abilities) abilities.push_back(a.value());
  return {{"abilities", abilities},
          {"theta", config.prior.theta()},
          {"tie_break", std::string(to_string(config.tie_break))},
          {"trials", config.trials},
          {"seed", config.seed}};
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::vector<Knot> read_knots_csv(std::istream& in) {
  std::vector<Knot> knots;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#' || line == "\r") continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected t,value");
    }
    const auto next = line.find(',', comma + 1);
    const std::string_view row(line);
    double t = 0.0;
    double v = 0.0;
    const bool ok = parse_double(row.substr(0, comma), t) &&
                    parse_double(row.substr(comma + 1, next == std::string::npos
                                                           ? std::string_view::npos
                                                           : next - comma - 1),
                                 v);
    if (!ok) {
      if (knots.empty()) continue;  // column header
      throw std::invalid_argument("line " + std::to_string(line_no) + ": not numeric");
    }
    knots.emplace_back(t, v);
  }
  if (knots.empty()) throw std::invalid_argument("no numeric rows in CSV table");
  return knots;
}

}  // namespace tailbalance

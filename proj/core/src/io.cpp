#include "pacing/io.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace pacing {

namespace {

using nlohmann::json;

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("invalid JSON: ") + e.what());
  }
}

const json& field(const json& doc, const char* name) {
  if (!doc.is_object() || !doc.contains(name)) {
    throw FormatError(std::string("missing field \"") + name + "\"");
  }
  return doc.at(name);
}

double number(const json& value, const char* what) {
  if (!value.is_number()) throw FormatError(std::string(what) + " must be a number");
  return value.get<double>();
}

Vector vector_from(const json& arr, const char* what) {
  if (!arr.is_array()) throw FormatError(std::string(what) + " must be an array");
  Vector out(arr.size());
  for (std::size_t k = 0; k < arr.size(); ++k) out(k) = number(arr[k], what);
  return out;
}

Matrix matrix_from(const json& arr, const char* what) {
  if (!arr.is_array() || arr.empty() || !arr.front().is_array()) {
    throw FormatError(std::string(what) + " must be a nonempty array of rows");
  }
  const std::size_t cols = arr.front().size();
  Matrix out(arr.size(), cols);
  for (std::size_t r = 0; r < arr.size(); ++r) {
    if (!arr[r].is_array() || arr[r].size() != cols) {
      throw FormatError(std::string(what) + " rows must have equal length");
    }
    for (std::size_t c = 0; c < cols; ++c) out(r, c) = number(arr[r][c], what);
  }
  return out;
}

json to_json(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

json to_json(const Matrix& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) rows.push_back(to_json(Vector(m.row(r).transpose())));
  return rows;
}

json valuation_to_json(const ConcaveValuation& v) {
  switch (v.kind()) {
    case ConcaveValuation::Kind::linear:
      return {{"kind", "linear"}, {"c", v.scale()}};
    case ConcaveValuation::Kind::shifted_power:
      return {{"kind", "shifted_power"}, {"c", v.scale()}, {"s", v.shift()},
              {"a", v.exponent()}};
    case ConcaveValuation::Kind::piecewise_linear: {
      json points = json::array();
      for (const auto& [x, y] : v.points()) points.push_back({x, y});
      return {{"kind", "pwl"}, {"points", points}};
    }
  }
  return {};
}

ConcaveValuation valuation_from(const json& doc) {
  if (doc.is_number()) return ConcaveValuation::linear(doc.get<double>());
  if (!doc.is_object()) throw FormatError("valuation must be a number or object");
  const json& kind = field(doc, "kind");
  if (!kind.is_string()) throw FormatError("valuation kind must be a string");
  const std::string k = kind.get<std::string>();
  if (k == "linear") return ConcaveValuation::linear(number(field(doc, "c"), "c"));
  if (k == "shifted_power") {
    return ConcaveValuation::shifted_power(number(field(doc, "c"), "c"),
                                           number(field(doc, "s"), "s"),
                                           number(field(doc, "a"), "a"));
  }
  if (k == "pwl") {
    const json& pts = field(doc, "points");
    if (!pts.is_array()) throw FormatError("pwl points must be an array");
    std::vector<ConcaveValuation::Point> points;
    for (const auto& p : pts) {
      if (!p.is_array() || p.size() != 2) throw FormatError("pwl point must be [x, y]");
      points.emplace_back(number(p[0], "pwl x"), number(p[1], "pwl y"));
    }
    return ConcaveValuation::piecewise_linear(std::move(points));
  }
  throw FormatError("unknown valuation kind \"" + k + "\"");
}

std::vector<std::string> names_from(const json& arr, const char* what) {
  if (!arr.is_array()) throw FormatError(std::string(what) + " must be an array");
  std::vector<std::string> out;
  for (const auto& e : arr) {
    if (e.is_string()) {
      out.push_back(e.get<std::string>());
    } else if (e.is_number_integer()) {
      out.push_back(std::to_string(e.get<long long>()));
    } else {
      throw FormatError(std::string(what) + " entries must be names");
    }
  }
  return out;
}

std::string name_of(const json& e) {
  if (e.is_string()) return e.get<std::string>();
  if (e.is_number_integer()) return std::to_string(e.get<long long>());
  throw FormatError("triplet entries must be element names");
}

}  // namespace

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path);
  out << text;
}

MarketInstance parse_instance(const std::string& text) {
  const json doc = parse_json(text);
  return MarketInstance(vector_from(field(doc, "budgets"), "budgets"),
                        matrix_from(field(doc, "values"), "values"));
}

std::string dump_instance(const MarketInstance& instance) {
  return json{{"budgets", to_json(instance.budgets())},
              {"values", to_json(instance.values())}}
      .dump();
}

Outcome parse_outcome(const std::string& text) {
  const json doc = parse_json(text);
  Outcome out;
  out.x = matrix_from(field(doc, "x"), "x");
  out.b = matrix_from(field(doc, "b"), "b");
  if (doc.contains("p") && !doc.at("p").is_null()) out.p = vector_from(doc.at("p"), "p");
  return out;
}

std::string dump_outcome(const Outcome& outcome) {
  json doc{{"x", to_json(outcome.x)}, {"b", to_json(outcome.b)}};
  if (outcome.p) doc["p"] = to_json(*outcome.p);
  return doc.dump();
}

std::string dump_fppe(const FppeOutcome& fppe) {
  return json{{"x", to_json(fppe.x)},
              {"b", to_json(fppe.b)},
              {"p", to_json(fppe.p)},
              {"alpha", to_json(fppe.alpha)},
              {"gap", fppe.gap},
              {"residuals", std::vector<double>(fppe.residuals.begin(),
                                                fppe.residuals.end())}}
      .dump();
}

FppeOutcome parse_fppe(const std::string& text) {
  const json doc = parse_json(text);
  FppeOutcome out;
  out.x = matrix_from(field(doc, "x"), "x");
  out.p = vector_from(field(doc, "p"), "p");
  out.alpha = vector_from(field(doc, "alpha"), "alpha");
  out.b = doc.contains("b") ? matrix_from(doc.at("b"), "b")
                            : Matrix(out.x * out.p.asDiagonal());
  return out;
}

OnlineInstance parse_online_instance(const std::string& text) {
  const json doc = parse_json(text);
  const Vector budgets = vector_from(field(doc, "budgets"), "budgets");
  const Matrix values = matrix_from(field(doc, "values"), "values");
  const json& intervals = field(doc, "interval");
  const json& horizon = field(doc, "T");
  if (!horizon.is_number_integer()) throw FormatError("T must be an integer");
  if (!intervals.is_array() || intervals.size() != static_cast<std::size_t>(budgets.size()) ||
      values.rows() != budgets.size()) {
    throw FormatError("budgets, values and interval must list the same buyers");
  }
  std::vector<OnlineBuyer> buyers;
  for (int i = 0; i < budgets.size(); ++i) {
    const json& iv = intervals[i];
    if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number_integer() ||
        !iv[1].is_number_integer()) {
      throw FormatError("interval entries must be [s, t] integer pairs");
    }
    buyers.push_back({budgets(i), iv[0].get<int>(), iv[1].get<int>(),
                      values.row(i).transpose()});
  }
  return OnlineInstance(horizon.get<int>(), static_cast<int>(values.cols()),
                        std::move(buyers));
}

std::string dump_online_instance(const OnlineInstance& instance) {
  json budgets = json::array(), values = json::array(), intervals = json::array();
  for (const auto& b : instance.all_buyers()) {
    budgets.push_back(b.budget);
    values.push_back(to_json(b.values));
    intervals.push_back({b.arrival, b.departure});
  }
  return json{{"T", instance.horizon()},
              {"budgets", budgets},
              {"values", values},
              {"interval", intervals}}
      .dump();
}

std::string trace_csv(const OnlineTrace& trace) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "round,buyer,good,x,p,spend\n";
  for (const auto& round : trace.rounds) {
    for (int i : round.active) {
      for (int j = 0; j < round.outcome.p.size(); ++j) {
        out << round.round << ',' << i << ',' << j << ','
            << round.outcome.x(i, j) << ',' << round.outcome.p(j) << ','
            << round.outcome.b(i, j) << '\n';
      }
    }
  }
  return out.str();
}

ThreeDTwoMatching parse_3d2m(const std::string& text) {
  const json doc = parse_json(text);
  std::array<std::vector<std::string>, 3> sets{
      names_from(field(doc, "E1"), "E1"), names_from(field(doc, "E2"), "E2"),
      names_from(field(doc, "E3"), "E3")};
  const json& s = field(doc, "S");
  if (!s.is_array()) throw FormatError("S must be an array of triplets");
  std::vector<ThreeDTwoMatching::Triplet> triplets;
  for (const auto& t : s) {
    if (!t.is_array() || t.size() != 3) throw FormatError("triplets need three names");
    ThreeDTwoMatching::Triplet idx{};
    for (int k = 0; k < 3; ++k) {
      const std::string name = name_of(t[k]);
      const auto it = std::find(sets[k].begin(), sets[k].end(), name);
      if (it == sets[k].end()) {
        throw FormatError("triplet names unknown element \"" + name + "\"");
      }
      idx[k] = static_cast<int>(it - sets[k].begin());
    }
    triplets.push_back(idx);
  }
  return ThreeDTwoMatching(sets[0], sets[1], sets[2], std::move(triplets));
}

std::string dump_3d2m(const ThreeDTwoMatching& tdm) {
  json s = json::array();
  for (const auto& t : tdm.triplets()) {
    s.push_back({tdm.set(0)[t[0]], tdm.set(1)[t[1]], tdm.set(2)[t[2]]});
  }
  return json{{"E1", tdm.set(0)}, {"E2", tdm.set(1)}, {"E3", tdm.set(2)}, {"S", s}}
      .dump();
}

ConcaveMarket parse_concave_market(const std::string& text) {
  const json doc = parse_json(text);
  const Vector budgets = vector_from(field(doc, "budgets"), "budgets");
  const json& values = field(doc, "values");
  if (!values.is_array()) throw FormatError("values must be an array of rows");
  std::vector<std::vector<ConcaveValuation>> grid;
  for (const auto& row : values) {
    if (!row.is_array()) throw FormatError("values rows must be arrays");
    std::vector<ConcaveValuation> parsed;
    for (const auto& cell : row) parsed.push_back(valuation_from(cell));
    grid.push_back(std::move(parsed));
  }
  return ConcaveMarket(budgets, std::move(grid));
}

std::string dump_concave_market(const ConcaveMarket& market) {
  json values = json::array();
  for (const auto& row : market.valuations()) {
    json r = json::array();
    for (const auto& v : row) r.push_back(valuation_to_json(v));
    values.push_back(r);
  }
  return json{{"budgets", to_json(market.budgets())}, {"values", values}}.dump();
}

}  // namespace pacing

#include "permuton/json_io.hpp"

#include "permuton/error.hpp"

namespace permuton {

namespace {

const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ValidationError(std::string("missing JSON field '") + key + "'");
  return j.at(key);
}

template <class T>
T get(const json& j, const char* key) {
  try {
    return require(j, key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad JSON field '") + key + "': " + e.what());
  }
}

}  // namespace

json to_json(const PatternDistribution& p) {
  json probs = json::object();
  for (const auto& [pi, w] : p.entries()) probs[pi.to_string()] = w;
  return {{"n", p.n()}, {"probs", probs}};
}

PatternDistribution distribution_from_json(const json& j) {
  const int n = get<int>(j, "n");
  std::map<std::uint64_t, double> probs;
  for (const auto& [key, value] : require(j, "probs").items()) {
    const Permutation pi = Permutation::parse(key);
    if (pi.size() != n) throw ValidationError("pattern " + key + " has wrong length");
    probs[pi.rank()] += value.get<double>();
  }
  return PatternDistribution(n, std::move(probs));
}

json to_json(const PermutationLaw& law) {
  json weights = json::object();
  for (std::size_t i = 0; i < law.support().size(); ++i) weights[law.support()[i].to_string()] = law.probabilities()[i];
  return {{"d", law.d()}, {"weights", weights}};
}

PermutationLaw law_from_json(const json& j) {
  const int d = get<int>(j, "d");
  const json& w = require(j, "weights");
  if (w.is_string()) {
    const auto s = w.get<std::string>();
    if (s == "uniform") return PermutationLaw::uniform(d);
    throw ValidationError("unknown law shorthand '" + s + "'");
  }
  std::vector<std::pair<Permutation, double>> entries;
  for (const auto& [key, value] : w.items()) entries.emplace_back(Permutation::parse(key), value.get<double>());
  return PermutationLaw(d, std::move(entries));
}

json to_json(const PiecewiseAffineMap& f) {
  json pieces = json::array();
  for (const auto& p : f.pieces())
    pieces.push_back({{"dom", {p.lo, p.hi}}, {"slope", p.slope}, {"icpt", p.intercept}});
  return pieces;
}

PiecewiseAffineMap map_from_json(const json& j) {
  if (!j.is_array()) throw ValidationError("pieces must be an array");
  std::vector<AffinePiece> pieces;
  for (const auto& p : j) {
    const auto dom = get<std::vector<double>>(p, "dom");
    if (dom.size() != 2) throw ValidationError("piece domain needs two endpoints");
    pieces.push_back({dom[0], dom[1], get<double>(p, "slope"), get<double>(p, "icpt")});
  }
  return PiecewiseAffineMap(std::move(pieces));
}

json to_json(const PermutonModel& mu) {
  return std::visit(
      [](const auto& m) -> json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LebesguePermuton>) {
          return {{"type", "lebesgue"}};
        } else if constexpr (std::is_same_v<T, BlockPermuton>) {
          return {{"type", "block"}, {"pi", m.pi().to_string()}, {"weights", m.weights()}};
        } else if constexpr (std::is_same_v<T, FunctionPermuton>) {
          return {{"type", "function"}, {"pieces", to_json(m.f)}};
        } else if constexpr (std::is_same_v<T, GridDensityPermuton>) {
          const int g = m.resolution();
          json rows = json::array();
          for (int i = 0; i < g; ++i) {
            std::vector<double> row(g);
            for (int jj = 0; jj < g; ++jj) row[jj] = m.density(i, jj);
            rows.push_back(row);
          }
          return {{"type", "grid"}, {"m", g}, {"density", rows}};
        } else {
          return {{"type", "tree"},
                  {"seed", m.handle.seed()},
                  {"law", to_json(m.handle.law())},
                  {"gap_mode", to_string(m.handle.mode())},
                  {"truncation_depth", m.truncation_depth}};
        }
      },
      mu);
}

PermutonModel model_from_json(const json& j) {
  const auto type = get<std::string>(j, "type");
  if (type == "lebesgue") return LebesguePermuton{};
  if (type == "block") {
    std::optional<std::vector<double>> weights;
    if (j.contains("weights")) weights = get<std::vector<double>>(j, "weights");
    return BlockPermuton(Permutation::parse(get<std::string>(j, "pi")), std::move(weights));
  }
  if (type == "function") {
    if (j.contains("preset")) {
      const auto p = get<std::string>(j, "preset");
      if (p == "identity") return FunctionPermuton{PiecewiseAffineMap::identity()};
      if (p == "doubling") return FunctionPermuton{PiecewiseAffineMap::doubling()};
      if (p == "tent") return FunctionPermuton{PiecewiseAffineMap::tent()};
      throw ValidationError("unknown map preset '" + p + "'");
    }
    return FunctionPermuton{map_from_json(require(j, "pieces"))};
  }
  if (type == "grid") {
    const int m = get<int>(j, "m");
    const auto rows = get<std::vector<std::vector<double>>>(j, "density");
    if (static_cast<int>(rows.size()) != m) throw ValidationError("grid density needs m rows");
    std::vector<double> flat;
    for (const auto& r : rows) {
      if (static_cast<int>(r.size()) != m) throw ValidationError("grid density needs m columns");
      flat.insert(flat.end(), r.begin(), r.end());
    }
    return GridDensityPermuton(m, std::move(flat));
  }
  if (type == "tree") {
    const auto mode = j.contains("gap_mode") ? gap_mode_from_string(get<std::string>(j, "gap_mode")) : GapMode::Equal;
    TreePermuton t{TreeRealizationHandle(get<std::uint64_t>(j, "seed"), law_from_json(require(j, "law")), mode)};
    if (j.contains("truncation_depth")) t.truncation_depth = get<int>(j, "truncation_depth");
    return t;
  }
  throw ValidationError("unknown model type '" + type + "'");
}

json to_json(const FourierLimit& L) {
  json coeffs = json::array();
  for (int r = -L.R; r <= L.R; ++r) {
    const auto c = L.coefficient(r);
    coeffs.push_back({{"r", r}, {"re", c.real()}, {"im", c.imag()}});
  }
  return {{"eta", L.eta},
          {"coeffs", coeffs},
          {"tail_bound", L.tail_bound},
          {"truncation_bound", L.truncation_bound},
          {"coefficient_radius", L.coefficient_radius}};
}

json to_json(const FallingFactorialRoots& r) {
  auto pairs = [](const std::vector<std::complex<double>>& v) {
    json a = json::array();
    for (const auto& z : v) a.push_back({{"re", z.real()}, {"im", z.imag()}});
    return a;
  };
  return {{"d", r.d}, {"roots", pairs(r.roots)}, {"exponents", pairs(r.exponents)}};
}

}  // namespace permuton

#include "replboost/domain_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "replboost/random_tape.hpp"

namespace replboost {

using nlohmann::json;

Problem problem_from_json(const json& j) {
  try {
    auto points = j.at("points").get<std::vector<std::vector<double>>>();
    auto probs = j.at("probs").get<std::vector<double>>();
    auto labels = j.at("labels").get<std::vector<Label>>();
    std::vector<FeatureRange> ranges;
    if (j.contains("ranges")) {
      for (const auto& r : j.at("ranges")) {
        ranges.push_back({r.at(0).get<double>(), r.at(1).get<double>()});
      }
    }
    auto domain = std::make_shared<const Domain>(std::move(points), std::move(ranges));
    return Problem(domain, TargetFunction(std::move(labels)), FiniteDistribution(std::move(probs)));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kConfiguration, std::string("malformed domain: ") + e.what());
  }
}

json problem_to_json(const Problem& problem) {
  const Domain& d = *problem.domain;
  json points = json::array();
  for (PointId i = 0; i < d.size(); ++i) {
    auto f = d.features(i);
    points.push_back(std::vector<double>(f.begin(), f.end()));
  }
  json ranges = json::array();
  for (const auto& r : d.ranges()) ranges.push_back({r.lo, r.hi});
  return {{"points", std::move(points)},
          {"probs", problem.dist.probs()},
          {"labels", problem.target.labels()},
          {"ranges", std::move(ranges)}};
}

Problem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kConfiguration, "cannot open domain file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kConfiguration, "'" + path + "' is not valid JSON: " + e.what());
  }
  return problem_from_json(j);
}

void save_problem(const Problem& problem, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kConfiguration, "cannot write '" + path + "'");
  out << problem_to_json(problem).dump(2) << '\n';
}

namespace {

bool parse_row(const std::string& line, std::vector<double>& values) {
  values.clear();
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    std::size_t used = 0;
    try {
      values.push_back(std::stod(cell, &used));
    } catch (const std::exception&) {
      return false;
    }
    while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
    if (used != cell.size()) return false;
  }
  return !values.empty();
}

}  // namespace

Problem load_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kConfiguration, "cannot open dataset '" + path + "'");
  std::map<std::vector<double>, std::pair<Label, std::uint64_t>> rows;
  std::vector<std::vector<double>> order;
  std::vector<double> values;
  std::string line;
  std::size_t lineno = 0;
  std::size_t width = 0;
  std::uint64_t n = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!parse_row(line, values)) {
      if (n == 0 && lineno == 1) continue;  // header
      throw Error(ErrorKind::kConfiguration, path + ":" + std::to_string(lineno) + ": bad row");
    }
    if (width == 0) width = values.size();
    if (values.size() != width || width < 2) {
      throw Error(ErrorKind::kConfiguration, path + ":" + std::to_string(lineno) + ": bad width");
    }
    const double y = values.back();
    if (y != 1.0 && y != -1.0) {
      throw Error(ErrorKind::kConfiguration,
                  path + ":" + std::to_string(lineno) + ": label must be -1 or +1");
    }
    values.pop_back();
    auto [it, fresh] = rows.try_emplace(values, static_cast<Label>(y), 0);
    if (fresh) order.push_back(values);
    if (it->second.first != static_cast<Label>(y)) {
      throw Error(ErrorKind::kConfiguration,
                  path + ":" + std::to_string(lineno) + ": conflicting label for a repeated row");
    }
    ++it->second.second;
    ++n;
  }
  if (n == 0) throw Error(ErrorKind::kConfiguration, "dataset '" + path + "' has no rows");
  std::vector<Label> labels;
  std::vector<double> weights;
  for (const auto& p : order) {
    labels.push_back(rows.at(p).first);
    weights.push_back(static_cast<double>(rows.at(p).second));
  }
  auto domain = std::make_shared<const Domain>(std::move(order));
  return Problem(domain, TargetFunction(std::move(labels)), FiniteDistribution::from_weights(weights));
}

Problem generate_margin_domain(const MarginDomainSpec& spec) {
  if (spec.size == 0 || spec.dimension == 0 || spec.stumps == 0 || spec.resolution < 2) {
    throw Error(ErrorKind::kConfiguration, "margin domain needs positive size, dimension, stumps");
  }
  if (!(spec.margin > 0.0 && spec.margin < 0.5)) {
    throw Error(ErrorKind::kConfiguration, "margin must lie in (0, 1/2)");
  }
  Rng rng = RandomTape(spec.seed).derive("gen-domain", 0).stream();
  const auto r = spec.resolution;

  std::vector<Hypothesis> stumps;
  std::vector<double> weights;
  for (std::size_t i = 0; i < spec.stumps; ++i) {
    const auto feature = static_cast<std::uint32_t>(rng.below(spec.dimension));
    const double k = static_cast<double>(1 + rng.below(r - 1));
    const int polarity = rng.below(2) == 0 ? -1 : 1;
    stumps.push_back(Hypothesis::stump(feature, k / static_cast<double>(r), polarity));
    weights.push_back(0.5 + rng.uniform());
  }
  double wsum = 0.0;
  for (double w : weights) wsum += w;
  for (double& w : weights) w /= wsum;

  std::vector<std::vector<double>> points;
  std::vector<Label> labels;
  const std::uint64_t max_attempts = 10000 * static_cast<std::uint64_t>(spec.size) + 100000;
  std::vector<double> x(spec.dimension);
  for (std::uint64_t attempt = 0; points.size() < spec.size; ++attempt) {
    if (attempt == max_attempts) {
      throw Error(ErrorKind::kConfiguration, "margin too large: could not place enough points");
    }
    for (double& v : x) v = rng.uniform();
    double f = 0.0;
    for (std::size_t i = 0; i < stumps.size(); ++i) f += weights[i] * stumps[i].predict(x);
    if (std::abs(f) < 2.0 * spec.margin) continue;
    points.push_back(x);
    labels.push_back(f > 0.0 ? 1 : -1);
  }
  std::vector<double> mass(spec.size);
  for (double& m : mass) m = 0.5 + rng.uniform();
  std::vector<FeatureRange> ranges(spec.dimension, FeatureRange{0.0, 1.0});
  auto domain = std::make_shared<const Domain>(std::move(points), std::move(ranges));
  return Problem(domain, TargetFunction(std::move(labels)), FiniteDistribution::from_weights(mass));
}

Problem bernoulli_problem(double mean) {
  if (!(mean >= 0.0 && mean <= 1.0)) {
    throw Error(ErrorKind::kConfiguration, "Bernoulli mean must lie in [0,1]");
  }
  auto domain = std::make_shared<const Domain>(std::vector<std::vector<double>>{{0.0}, {1.0}});
  return Problem(domain, TargetFunction({-1, 1}), FiniteDistribution({1.0 - mean, mean}));
}

}  // namespace replboost

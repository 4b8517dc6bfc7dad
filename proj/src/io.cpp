#include "funcest/io.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace funcest {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RadiusSchedule parse_radius(const json& j, const char* key) {
  if (!j.is_object()) throw ConfigError(std::string(key) + " must be an object {c, gamma}");
  return {j.at("c").get<double>(), j.at("gamma").get<double>()};
}

std::vector<double> numbers(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("truth.") + key + " is required");
  return j.at(key).get<std::vector<double>>();
}

Truth parse_truth(ModelKind model, const json& t) {
  try {
    switch (model) {
      case ModelKind::gsm: return SeqVector(numbers(t, "theta"));
      case ModelKind::density:
        return PiecewiseDensity(GridFunction(numbers(t, "heights")),
                                t.value("sup_bound", PiecewiseDensity::kDefaultSupBound));
      case ModelKind::causal:
        return CausalModel(GridFunction(numbers(t, "mu")), GridFunction(numbers(t, "pi")),
                           GridFunction(numbers(t, "eta")), t.value("margin", CausalModel::kDefaultMargin));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid truth: ") + e.what());
  }
  throw ConfigError("invalid truth");
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  ExperimentConfig c;
  try {
    const json j = json::parse(json_text);
    c.model = parse_model(j.at("model").get<std::string>());
    c.estimators = j.at("estimators").get<std::vector<std::string>>();
    c.n_grid = j.at("n_grid").get<std::vector<std::int64_t>>();
    c.radius = parse_radius(j.at("radius"), "radius");
    if (j.contains("s_radius")) c.s_radius = parse_radius(j.at("s_radius"), "s_radius");
    c.replications = j.value("replications", c.replications);
    c.seed = j.value("seed", c.seed);
    c.output = j.value("output", std::string());
    c.workers = j.value("workers", c.workers);
    if (j.contains("pilot")) {
      const json& p = j.at("pilot");
      c.pilot_mode = parse_pilot_mode(p.value("mode", std::string("fixed-axis")));
      c.pilot_k = p.value("k", c.pilot_k);
      c.pilot_axis = p.value("axis", c.pilot_axis);
    }
    if (j.contains("truncation")) c.truncation = j.at("truncation").get<std::size_t>();
    if (j.contains("tail")) {
      const auto tail = j.at("tail").get<std::string>();
      if (tail == "bias_consistent") {
        c.tail = HigherOrderTail::bias_consistent;
      } else if (tail == "literal") {
        c.tail = HigherOrderTail::literal;
      } else {
        throw ConfigError("tail must be bias_consistent or literal");
      }
    }
    c.delta = j.value("delta", c.delta);
    c.fitter_cells = j.value("fitter_cells", c.fitter_cells);
    c.margin = j.value("margin", c.margin);
    c.truth = parse_truth(c.model, j.at("truth"));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::string text;
  try {
    text = slurp(path);
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
  return parse_config(text);
}

void write_risk_csv(std::ostream& os, const RiskReport& report) {
  os << "model,estimator,n,r,s,mse,mse_se,bias,bias_se,var,reps,seed\n";
  for (const auto& row : report.rows) {
    os << row.model << ',' << row.estimator << ',' << row.n << ',' << format_double(row.r) << ','
       << format_double(row.s) << ',' << format_double(row.mse) << ',' << format_double(row.mse_se) << ','
       << format_double(row.bias) << ',' << format_double(row.bias_se) << ',' << format_double(row.var) << ','
       << row.reps << ',' << row.seed << '\n';
  }
}

void write_lb_csv_header(std::ostream& os) {
  os << "construction,params,separation,claimed_separation,divergence_kind,divergence,budget,pass\n";
}

void write_lb_csv_row(std::ostream& os, const LBInstance& inst) {
  os << inst.construction << ',';
  for (std::size_t i = 0; i < inst.params.size(); ++i) {
    if (i > 0) os << ';';
    os << inst.params[i].first << '=' << format_double(inst.params[i].second);
  }
  os << ',' << format_double(inst.separation) << ',' << format_double(inst.claimed_separation) << ','
     << to_string(inst.divergence_kind) << ',' << format_double(inst.divergence) << ','
     << format_double(inst.budget) << ',' << (inst.passed() ? "pass" : "fail") << '\n';
}

std::vector<double> read_numbers(const std::string& path) {
  std::string text = slurp(path);
  for (char& ch : text) {
    if (ch == ',' || ch == ';') ch = ' ';
  }
  std::istringstream in(text);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) {
    double v = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
      throw std::invalid_argument("read_numbers: bad number '" + tok + "' in " + path);
    }
    out.push_back(v);
  }
  return out;
}

PiecewiseDensity read_density(const std::string& path, double sup_bound) {
  const auto v = read_numbers(path);
  if (v.empty()) throw std::invalid_argument("read_density: empty file");
  const auto cells = static_cast<std::size_t>(v[0]);
  if (static_cast<double>(cells) != v[0] || cells == 0 || v.size() != cells + 1) {
    throw std::invalid_argument("read_density: expected N followed by N heights");
  }
  return PiecewiseDensity(std::vector<double>(v.begin() + 1, v.end()), sup_bound);
}

void write_density(std::ostream& os, const PiecewiseDensity& f) {
  os << f.cells();
  for (double h : f.heights().values()) os << ',' << format_double(h);
  os << '\n';
}

std::vector<Observation> read_causal_sample(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<Observation> out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first && line.find_first_of("xay") != std::string::npos) {
      first = false;
      continue;
    }
    first = false;
    for (char& ch : line) {
      if (ch == ',') ch = ' ';
    }
    std::istringstream ls(line);
    Observation o;
    if (!(ls >> o.x >> o.a >> o.y) || (o.a != 0 && o.a != 1) || (o.y != 0 && o.y != 1)) {
      throw std::invalid_argument("read_causal_sample: bad row '" + line + "'");
    }
    out.push_back(o);
  }
  return out;
}

void write_causal_sample(std::ostream& os, const std::vector<Observation>& obs) {
  os << "x,a,y\n";
  for (const auto& o : obs) os << format_double(o.x) << ',' << o.a << ',' << o.y << '\n';
}

NuisancePilots read_pilots(const std::string& path, double margin) {
  const auto v = read_numbers(path);
  if (v.empty() || v.size() % 2 != 0) throw std::invalid_argument("read_pilots: expected pi_hat,mu_hat rows");
  std::vector<double> pi, mu;
  for (std::size_t i = 0; i < v.size(); i += 2) {
    pi.push_back(v[i]);
    mu.push_back(v[i + 1]);
  }
  return NuisancePilots(GridFunction(std::move(pi)), GridFunction(std::move(mu)), margin);
}

}  // namespace funcest

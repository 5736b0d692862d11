#include "config.hpp"

#include <cmath>
#include <sstream>

namespace phasorctl::cli {

Node::Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {
  require(j.is_object(), ErrorCode::Configuration, "'" + path_ + "' must be an object");
}

bool Node::has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

const json& Node::raw(const std::string& key) {
  require(j_.contains(key), ErrorCode::Configuration, "missing key '" + child_path(key) + "'");
  used_.insert(key);
  return j_.at(key);
}

void Node::finish() {
  for (auto it = j_.begin(); it != j_.end(); ++it) {
    if (!used_.count(it.key())) {
      fail(ErrorCode::Configuration, "unknown key '" + child_path(it.key()) + "'");
    }
  }
}

void apply_override(json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  require(eq != std::string::npos && eq > 0, ErrorCode::Configuration,
          "override '" + assignment + "' is not of the form key=value");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  json* cur = &config;
  std::istringstream ps(path);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ps, part, '.')) parts.push_back(part);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const std::string& p = parts[i];
    const bool index = !p.empty() && p.find_first_not_of("0123456789") == std::string::npos;
    if (index && cur->is_array()) {
      const auto at = std::stoul(p);
      require(at < cur->size(), ErrorCode::Configuration, "override index out of range in '" + path + "'");
      cur = &(*cur)[at];
    } else {
      require(cur->is_object() || cur->is_null(), ErrorCode::Configuration,
              "override path '" + path + "' crosses a non-object");
      cur = &(*cur)[p];
    }
  }
  *cur = value;
}

Eigen::MatrixXd PeriodicSpec::at(double t, double omega) const {
  Eigen::MatrixXd m = constant;
  for (const auto& [k, c] : cos) m += c * std::cos(k * omega * t);
  for (const auto& [k, s] : sin) m += s * std::sin(k * omega * t);
  return m;
}

PeriodicSpec periodic_from_json(const json& j, const std::string& path) {
  PeriodicSpec spec;
  if (j.is_number()) {
    spec.constant = Eigen::MatrixXd::Constant(1, 1, j.get<double>());
    return spec;
  }
  if (j.is_array()) {
    spec.constant = io::matrix_from_json(j);
    return spec;
  }
  Node node(j, path);
  spec.constant = io::matrix_from_json(node.raw("constant"));
  for (const char* which : {"cos", "sin"}) {
    if (!node.has(which)) continue;
    for (const auto& term : node.raw(which)) {
      Node t(term, node.child_path(which));
      const int k = t.get<int>("k");
      require(k >= 1, ErrorCode::Configuration, "harmonic index must be >= 1 in '" + path + "'");
      Eigen::MatrixXd m = io::matrix_from_json(t.raw("matrix"));
      require(m.rows() == spec.rows() && m.cols() == spec.cols(), ErrorCode::DimensionMismatch,
              "harmonic term shape differs from the constant term in '" + path + "'");
      (std::string(which) == "cos" ? spec.cos : spec.sin).emplace_back(k, std::move(m));
      t.finish();
    }
  }
  node.finish();
  return spec;
}

RectifierParams plant_from_json(const json& j, const std::string& path) {
  Node node(j, path);
  RectifierParams p;
  p.R = node.get("R", p.R);
  p.L = node.get("L", p.L);
  p.C = node.get("C", p.C);
  p.R_L = node.get("R_L", p.R_L);
  p.v_in_amplitude = node.get("v_in_amplitude", p.v_in_amplitude);
  p.f = node.get("f", p.f);
  node.finish();
  p.validate();
  return p;
}

EquilibriumSpec equilibrium_from_json(const json& j, const std::string& path, int h) {
  Node node(j, path);
  EquilibriumSpec s;
  if (node.has("weights")) {
    auto w = node.get<std::vector<double>>("weights");
    require(w.size() == 4, ErrorCode::Configuration, "weights need four entries [w0, w1, w2, w3]");
    s.w0 = w[0];
    s.w1 = w[1];
    s.w2 = w[2];
    s.w3 = w[3];
  }
  s.v_ref = node.get("v_ref", s.v_ref);
  s.free_harmonics = node.get("free_harmonics", s.free_harmonics);
  s.max_iterations = node.get("max_iterations", s.max_iterations);
  s.gradient_tolerance = node.get("gradient_tolerance", s.gradient_tolerance);
  s.max_step = node.get("max_step", s.max_step);
  if (node.has("seed")) {
    // seed phasors s_k for k = 0..K as [re, im] pairs
    const auto& seed = node.raw("seed");
    require(seed.is_array() && !seed.empty(), ErrorCode::Configuration,
            "seed lists [re, im] pairs for k = 0, 1, ...");
    PhasorVector g(1, h);
    for (std::size_t k = 0; k < seed.size() && static_cast<int>(k) <= h; ++k) {
      const auto& p = seed[k];
      require(p.is_array() && p.size() == 2, ErrorCode::Configuration, "seed entries are [re, im]");
      const cplx v(p[0].get<double>(), k == 0 ? 0.0 : p[1].get<double>());
      g.at(static_cast<int>(k))[0] = v;
      g.at(-static_cast<int>(k))[0] = std::conj(v);
    }
    s.initial_guess = g;
  }
  node.finish();
  s.validate();
  return s;
}

BankAction action_from_json(const json& j, const std::string& path) {
  Node node(j, path);
  BankAction a;
  a.kind = action_from_name(node.get<std::string>("kind"));
  a.channel = node.get<int>("channel");
  a.harmonic = node.get("harmonic", 0);
  a.gain = node.get<double>("gain");
  node.finish();
  return a;
}

Disturbance disturbance_from_json(const json& j, const std::string& path) {
  Node node(j, path);
  Disturbance d;
  d.start_time = node.get("start_time", 0.0);
  d.channel = channel_from_name(node.get<std::string>("channel"));
  for (const auto& term : node.raw("terms")) {
    Node t(term, node.child_path("terms"));
    Disturbance::Term x;
    x.k = t.get<int>("k");
    x.sin = t.get("sin", 0.0);
    x.cos = t.get("cos", 0.0);
    require(x.k >= 0, ErrorCode::Configuration, "disturbance harmonics must be >= 0");
    t.finish();
    d.terms.push_back(x);
  }
  node.finish();
  return d;
}

Scenario scenario_from_json(const json& j, const std::string& path, int n) {
  Node node(j, path);
  Scenario s;
  s.name = node.get<std::string>("name");
  s.duration = node.get<double>("duration");
  s.steps_per_period = node.get("steps_per_period", s.steps_per_period);
  if (node.has("initial_state")) {
    auto v = node.get<std::vector<double>>("initial_state");
    require(static_cast<int>(v.size()) == n, ErrorCode::DimensionMismatch,
            "initial_state of '" + s.name + "' has the wrong length");
    s.initial_state = Eigen::Map<Eigen::VectorXd>(v.data(), n);
  } else {
    s.initial_state = Eigen::VectorXd::Zero(n);
  }
  if (node.has("initial_bank")) {
    auto v = node.get<std::vector<double>>("initial_bank");
    s.initial_bank = Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  }
  if (node.has("disturbances")) {
    for (const auto& d : node.raw("disturbances")) {
      s.disturbances.push_back(disturbance_from_json(d, node.child_path("disturbances")));
    }
  }
  s.record_phasors = node.get("record_phasors", s.record_phasors);
  s.saturate = node.get("saturate", s.saturate);
  s.open_loop = node.get("open_loop", s.open_loop);
  node.finish();
  return s;
}

SynthesisSpec synthesis_from_node(Node& node) {
  SynthesisSpec s;
  if (node.has("plant")) s.plant = plant_from_json(node.raw("plant"), node.child_path("plant"));
  s.h = node.get("h", s.h);
  s.N = node.get("N", s.N);
  s.config().validate();
  if (node.has("equilibrium")) {
    s.equilibrium = equilibrium_from_json(node.raw("equilibrium"), node.child_path("equilibrium"), s.h);
  }
  auto q = node.get("Q", std::vector<double>{1.0, 1e-2});
  require(q.size() == 2, ErrorCode::DimensionMismatch, "Q lists the diagonal weights of (i, v_dc)");
  s.q_diag = Eigen::Map<Eigen::VectorXd>(q.data(), 2);
  s.gamma = node.get("gamma", s.gamma);
  if (node.has("bank")) {
    for (const auto& a : node.raw("bank")) s.bank.push_back(action_from_json(a, node.child_path("bank")));
  }
  s.eta1 = node.get("eta1", s.eta1);
  s.eta2 = node.get("eta2", s.eta2);
  return s;
}

}  // namespace phasorctl::cli

#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "phasorctl/errors.hpp"
#include "phasorctl/io.hpp"

namespace phasorctl::cli {

using io::json;

/// Read-only view of a JSON object that records which keys were consumed so
/// that leftovers can be rejected as unknown.
class Node {
 public:
  Node(const json& j, std::string path);
  Node(const Node&) = delete;
  Node& operator=(const Node&) = delete;

  bool has(const std::string& key) const;
  const json& raw(const std::string& key);

  template <class T>
  T get(const std::string& key) {
    return convert<T>(raw(key), key);
  }
  template <class T>
  T get(const std::string& key, T fallback) {
    return has(key) ? get<T>(key) : fallback;
  }

  std::string child_path(const std::string& key) const { return path_ + "." + key; }

  /// Throws Configuration naming the first unconsumed key.
  void finish();

 private:
  template <class T>
  T convert(const json& v, const std::string& key) const {
    try {
      return v.get<T>();
    } catch (const json::exception&) {
      fail(ErrorCode::Configuration, "wrong type for '" + child_path(key) + "'");
    }
  }

  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

/// Applies "a.b.c=value" (value parsed as JSON, else taken as a string).
void apply_override(json& config, const std::string& assignment);

/// Periodic matrix function sum_k C_k cos(kwt) + S_k sin(kwt). Accepts a plain
/// matrix (constant) or {"constant", "cos": [{k, matrix}], "sin": [...]}.
struct PeriodicSpec {
  Eigen::MatrixXd constant;
  std::vector<std::pair<int, Eigen::MatrixXd>> cos;
  std::vector<std::pair<int, Eigen::MatrixXd>> sin;

  Eigen::MatrixXd at(double t, double omega) const;
  Eigen::Index rows() const { return constant.rows(); }
  Eigen::Index cols() const { return constant.cols(); }
};
PeriodicSpec periodic_from_json(const json& j, const std::string& path);

RectifierParams plant_from_json(const json& j, const std::string& path);
EquilibriumSpec equilibrium_from_json(const json& j, const std::string& path, int h);
BankAction action_from_json(const json& j, const std::string& path);
Disturbance disturbance_from_json(const json& j, const std::string& path);
Scenario scenario_from_json(const json& j, const std::string& path, int n);

/// Everything needed to go from plant parameters to a controller.
struct SynthesisSpec {
  RectifierParams plant;
  int h = 5;
  int N = 512;
  EquilibriumSpec equilibrium;
  Eigen::VectorXd q_diag;  // diagonal of the constant state weight
  double gamma = 1e-4;
  std::vector<BankAction> bank;
  double eta1 = 0.0;
  double eta2 = 0.0;

  PhasorConfig config() const { return {1.0 / plant.f, h, N}; }
};
/// Reads the synthesis keys of an object node; the caller finishes the node.
SynthesisSpec synthesis_from_node(Node& node);

}  // namespace phasorctl::cli

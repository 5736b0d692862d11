#include "phasorctl/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "phasorctl/errors.hpp"

namespace phasorctl::io {

namespace {

void dump_value(const json& j, std::string& out, int indent) {
  const std::string pad(2 * (indent + 1), ' ');
  const std::string close(2 * indent, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + json(it.key()).dump() + ": ";
        dump_value(it.value(), out, indent + 1);
      }
      out += "\n" + close + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // arrays of scalars stay on one line
      bool flat = true;
      for (const auto& v : j) flat = flat && !v.is_structured();
      if (flat) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          dump_value(j[i], out, indent + 1);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        dump_value(j[i], out, indent + 1);
      }
      out += "\n" + close + "]";
      return;
    }
    case json::value_t::number_float: {
      double v = j.get<double>();
      if (v == 0.0) v = 0.0;  // no signed zero
      if (!std::isfinite(v)) {
        out += "null";
        return;
      }
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out += buf;
      return;
    }
    default:
      out += j.dump();
  }
}

json cplx_pair(cplx z) { return json::array({z.real(), z.imag()}); }

cplx pair_cplx(const json& j) {
  require(j.is_array() && j.size() == 2, ErrorCode::Configuration,
          "complex values are [re, im] pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

template <class F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    fail(ErrorCode::Configuration, std::string("malformed ") + what + ": " + e.what());
  }
}

json rows_of(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(x);
  return a;
}

}  // namespace

std::string dump(const json& j) {
  std::string out;
  dump_value(j, out, 0);
  out += "\n";
  return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorCode::Io, "cannot open " + tmp.string() + " for writing");
    f << content;
    f.flush();
    if (!f) fail(ErrorCode::Io, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(ErrorCode::Io, "cannot rename " + tmp.string() + ": " + ec.message());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::Io, "cannot read " + path.string());
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

json read_json(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::Configuration, path.string() + ": " + e.what());
  }
}

json to_json(const PhasorConfig& c) {
  return {{"period", c.period}, {"h", c.truncation}, {"N", c.samples_per_period}};
}

PhasorConfig config_from_json(const json& j) {
  return guarded("phasor config", [&] {
    PhasorConfig c{j.at("period").get<double>(), j.at("h").get<int>(), j.at("N").get<int>()};
    c.validate();
    return c;
  });
}

json to_json(const PhasorVector& x) {
  json coeffs = json::array();
  for (int k = -x.truncation(); k <= x.truncation(); ++k) {
    json block = json::array();
    for (int i = 0; i < x.dim(); ++i) block.push_back(cplx_pair(x.at(k)[i]));
    coeffs.push_back(std::move(block));
  }
  return {{"n", x.dim()}, {"h", x.truncation()}, {"coeffs", coeffs}};
}

PhasorVector phasors_from_json(const json& j) {
  return guarded("phasor vector", [&] {
    const int n = j.at("n").get<int>();
    const int h = j.at("h").get<int>();
    const auto& coeffs = j.at("coeffs");
    require(n > 0 && h >= 0 && coeffs.size() == static_cast<std::size_t>(2 * h + 1),
            ErrorCode::DimensionMismatch, "phasor vector needs 2h+1 coefficient blocks");
    PhasorVector x(n, h);
    for (int k = -h; k <= h; ++k) {
      const auto& block = coeffs[k + h];
      require(block.size() == static_cast<std::size_t>(n), ErrorCode::DimensionMismatch,
              "phasor block has wrong dimension");
      for (int i = 0; i < n; ++i) x.at(k)[i] = pair_cplx(block[i]);
    }
    return x;
  });
}

json to_json(const PhasorTrajectory& traj) {
  json values = json::array();
  for (const auto& v : traj.values) values.push_back(to_json(v)["coeffs"]);
  return {{"config", to_json(traj.config)},
          {"n", traj.dim()},
          {"times", vector_json(traj.times)},
          {"coeffs", values}};
}

PhasorTrajectory trajectory_from_json(const json& j) {
  return guarded("phasor trajectory", [&] {
    PhasorTrajectory t;
    t.config = config_from_json(j.at("config"));
    t.times = j.at("times").get<std::vector<double>>();
    const int n = j.at("n").get<int>();
    for (const auto& c : j.at("coeffs")) {
      t.values.push_back(
          phasors_from_json({{"n", n}, {"h", t.config.truncation}, {"coeffs", c}}));
    }
    t.validate();
    return t;
  });
}

json matrix_to_json(const Eigen::MatrixXd& m) { return rows_of(m); }

Eigen::MatrixXd matrix_from_json(const json& j) {
  return guarded("matrix", [&] {
    require(j.is_array(), ErrorCode::Configuration, "matrices are lists of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = rows ? static_cast<Eigen::Index>(j[0].size()) : 0;
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      require(static_cast<Eigen::Index>(j[r].size()) == cols, ErrorCode::DimensionMismatch,
              "ragged matrix rows");
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
    }
    return m;
  });
}

json to_json(const ToeplitzOperator& op) {
  json blocks = json::array();
  for (int k = -op.band(); k <= op.band(); ++k) {
    blocks.push_back({{"k", k}, {"re", rows_of(op.block(k).real())}, {"im", rows_of(op.block(k).imag())}});
  }
  return {{"n", op.rows()}, {"m", op.cols()}, {"h", op.truncation()}, {"period", op.period()},
          {"blocks", blocks}};
}

ToeplitzOperator toeplitz_from_json(const json& j) {
  return guarded("Toeplitz operator", [&] {
    ToeplitzOperator op(j.at("n").get<int>(), j.at("m").get<int>(), j.at("h").get<int>(),
                        j.at("period").get<double>());
    for (const auto& b : j.at("blocks")) {
      const int k = b.at("k").get<int>();
      require(std::abs(k) <= op.band(), ErrorCode::DimensionMismatch, "block index out of band");
      Eigen::MatrixXd re = matrix_from_json(b.at("re"));
      Eigen::MatrixXd im = matrix_from_json(b.at("im"));
      require(re.rows() == op.rows() && re.cols() == op.cols() && im.rows() == re.rows() &&
                  im.cols() == re.cols(),
              ErrorCode::DimensionMismatch, "block shape differs from operator");
      op.block(k) = re.cast<cplx>() + cplx(0.0, 1.0) * im.cast<cplx>();
    }
    return op;
  });
}

json to_json(const BilinearAffineSystem& sys) {
  return {{"A_ind", rows_of(sys.A_ind)},
          {"A_dep", rows_of(sys.A_dep)},
          {"B_ind", rows_of(sys.B_ind)},
          {"B_dep", rows_of(sys.B_dep)},
          {"bounds", json::array({sys.bounds.lo, sys.bounds.hi})},
          {"period", sys.period},
          {"w", to_json(sys.w)}};
}

BilinearAffineSystem system_from_json(const json& j) {
  return guarded("system", [&] {
    BilinearAffineSystem s;
    s.A_ind = matrix_from_json(j.at("A_ind"));
    s.A_dep = matrix_from_json(j.at("A_dep"));
    s.B_ind = matrix_from_json(j.at("B_ind"));
    s.B_dep = matrix_from_json(j.at("B_dep"));
    s.bounds = {j.at("bounds")[0].get<double>(), j.at("bounds")[1].get<double>()};
    s.period = j.at("period").get<double>();
    s.w = phasors_from_json(j.at("w"));
    s.validate();
    return s;
  });
}

json to_json(const EquilibriumResult& r) {
  return {{"s_e", to_json(r.s)},
          {"S_e", to_json(r.S)},
          {"X_e", to_json(r.X)},
          {"J_star", r.J},
          {"residual", r.residual},
          {"gradient_norm", r.gradient_norm},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"s_range", json::array({r.s_min, r.s_max})},
          {"within_bounds", r.within_bounds}};
}

json to_json(const Metrics& m) {
  return {{"v_dc_mean", m.v_dc_mean},
          {"current_harmonics", vector_json(m.current_harmonics)},
          {"voltage_harmonics", vector_json(m.voltage_harmonics)},
          {"current_phase_error", m.current_phase_error},
          {"settling_time", m.settling_time},
          {"final_phasors", to_json(m.final_phasors)},
          {"input_phasor", cplx_pair(m.input_phasor)}};
}

json to_json(const ForwardingController& c) {
  const auto& b = c.base;
  json bank = json::array();
  for (const auto& a : c.bank) {
    bank.push_back({{"kind", action_name(a.kind)},
                    {"channel", a.channel},
                    {"harmonic", a.harmonic},
                    {"gain", a.gain}});
  }
  json j = {{"config", to_json(b.config)},
            {"bounds", json::array({b.bounds.lo, b.bounds.hi})},
            {"A_dep", rows_of(b.A_dep)},
            {"B_dep", rows_of(b.B_dep)},
            {"W", to_json(b.W)},
            {"s_e", to_json(b.s_e)},
            {"S_e", to_json(b.S_e)},
            {"X_e", to_json(b.X_e)},
            {"P", to_json(b.P)},
            {"Gamma", to_json(b.Gamma)},
            {"Q", to_json(b.Q)},
            {"lyapunov_residual", b.lyapunov_residual},
            {"lyapunov_defect", b.lyapunov_defect},
            {"hurwitz_margin", b.hurwitz_margin},
            {"bank", bank},
            {"eta1", c.eta1},
            {"eta2", c.eta2}};
  if (c.has_bank()) {
    j["O"] = to_json(c.O);
    j["LC"] = to_json(c.LC);
    j["M"] = to_json(c.M);
    j["sylvester_residual"] = c.sylvester_residual;
    j["sylvester_defect"] = c.sylvester_defect;
  }
  return j;
}

ForwardingController controller_from_json(const json& j) {
  return guarded("controller bundle", [&] {
    ForwardingController c;
    auto& b = c.base;
    b.config = config_from_json(j.at("config"));
    b.bounds = {j.at("bounds")[0].get<double>(), j.at("bounds")[1].get<double>()};
    b.A_dep = matrix_from_json(j.at("A_dep"));
    b.B_dep = matrix_from_json(j.at("B_dep"));
    b.W = phasors_from_json(j.at("W"));
    b.s_e = phasors_from_json(j.at("s_e"));
    b.S_e = toeplitz_from_json(j.at("S_e"));
    b.X_e = phasors_from_json(j.at("X_e"));
    b.P = toeplitz_from_json(j.at("P"));
    b.Gamma = toeplitz_from_json(j.at("Gamma"));
    b.Q = toeplitz_from_json(j.at("Q"));
    b.lyapunov_residual = j.at("lyapunov_residual").get<double>();
    b.lyapunov_defect = j.at("lyapunov_defect").get<double>();
    b.hurwitz_margin = j.at("hurwitz_margin").get<double>();
    for (const auto& a : j.at("bank")) {
      c.bank.push_back({action_from_name(a.at("kind").get<std::string>()),
                        a.at("channel").get<int>(), a.at("harmonic").get<int>(),
                        a.at("gain").get<double>()});
    }
    c.eta1 = j.at("eta1").get<double>();
    c.eta2 = j.at("eta2").get<double>();
    if (c.has_bank()) {
      c.O = toeplitz_from_json(j.at("O"));
      c.LC = toeplitz_from_json(j.at("LC"));
      c.M = toeplitz_from_json(j.at("M"));
      c.M_dense = c.M.dense();
      c.sylvester_residual = j.at("sylvester_residual").get<double>();
      c.sylvester_defect = j.at("sylvester_defect").get<double>();
    }
    c.realise();
    return c;
  });
}

std::string signal_csv(const SampledSignal& s) {
  require(s.is_real(), ErrorCode::Parameter, "CSV export needs a real signal");
  std::string out = "t";
  for (int i = 0; i < s.dim(); ++i) out += ",x" + std::to_string(i + 1);
  out += "\n";
  char buf[64];
  for (int c = 0; c < s.count(); ++c) {
    std::snprintf(buf, sizeof buf, "%.17g", s.time(c));
    out += buf;
    for (int i = 0; i < s.dim(); ++i) {
      std::snprintf(buf, sizeof buf, ",%.17g", s.re()(i, c));
      out += buf;
    }
    out += "\n";
  }
  return out;
}

SampledSignal signal_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ls, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      require(rows.empty(), ErrorCode::Configuration, "non-numeric CSV row after the header");
      continue;
    }
    require(row.size() >= 2, ErrorCode::DimensionMismatch, "CSV rows need time and values");
    require(rows.empty() || row.size() == rows.front().size(), ErrorCode::DimensionMismatch,
            "ragged CSV rows");
    rows.push_back(std::move(row));
  }
  require(rows.size() >= 2, ErrorCode::DimensionMismatch, "CSV signal needs two samples");
  const double dt = rows[1][0] - rows[0][0];
  const int dim = static_cast<int>(rows.front().size()) - 1;
  SampledSignal s(dim, rows[0][0], dt, static_cast<int>(rows.size()), true);
  for (std::size_t c = 0; c < rows.size(); ++c) {
    require(std::abs(rows[c][0] - s.time(static_cast<int>(c))) <= 1e-9 * dt * (1.0 + c),
            ErrorCode::Configuration, "CSV time column is not uniform");
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v[i] = rows[c][i + 1];
    s.set(static_cast<int>(c), v);
  }
  return s;
}

std::string trace_csv(const SimTrace& tr) {
  const int n = tr.x.dim();
  const auto q = tr.z.rows();
  std::string out = "t";
  if (n == 2) {
    out += ",i,v_dc";
  } else {
    for (int i = 0; i < n; ++i) out += ",x" + std::to_string(i + 1);
  }
  out += ",s_pre,s_post";
  for (Eigen::Index i = 0; i < q; ++i) out += ",z" + std::to_string(i + 1);
  out += "\n";
  char buf[64];
  for (std::size_t c = 0; c < tr.size(); ++c) {
    std::snprintf(buf, sizeof buf, "%.17g", tr.times[c]);
    out += buf;
    const auto ci = static_cast<Eigen::Index>(c);
    for (int i = 0; i < n; ++i) {
      std::snprintf(buf, sizeof buf, ",%.17g", tr.x.re()(i, ci));
      out += buf;
    }
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g", tr.s_pre[c], tr.s_post[c]);
    out += buf;
    for (Eigen::Index i = 0; i < q; ++i) {
      std::snprintf(buf, sizeof buf, ",%.17g", tr.z(i, ci));
      out += buf;
    }
    out += "\n";
  }
  return out;
}

}  // namespace phasorctl::io

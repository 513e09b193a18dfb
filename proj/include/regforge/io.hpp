#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "regforge/closedloop.hpp"

namespace regforge::io {

using nlohmann::json;

// ---------------------------------------------------------------------------
// matrix <-> json

inline json to_json(const Mat& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Mat mat_from_json(const json& j) {
  if (!j.is_array() || j.empty())
    throw InvalidConfig("matrix json: expected non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Mat M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(j[i].size()) != cols)
      throw InvalidConfig("matrix json: ragged rows");
    for (Eigen::Index jj = 0; jj < cols; ++jj)
      M(i, jj) = j[i][static_cast<size_t>(jj)].get<double>();
  }
  return M;
}

inline json to_json(const CMat& M) {
  return json{{"re", to_json(Mat(M.real()))}, {"im", to_json(Mat(M.imag()))}};
}

inline CMat cmat_from_json(const json& j) {
  const Mat re = mat_from_json(j.at("re"));
  const Mat im = mat_from_json(j.at("im"));
  return re.cast<Complex>() + Complex(0, 1) * im.cast<Complex>();
}

// ---------------------------------------------------------------------------
// config schema

inline Profile profile_from_json(const json& j) {
  if (j.is_number()) return Profile::constant(j.get<double>());
  if (j.is_array()) return Profile::sampled(j.get<std::vector<double>>());
  if (j.is_object()) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "constant") return Profile::constant(j.at("value").get<double>());
    if (type == "gaussian")
      return Profile::gaussian(j.value("amplitude", 1.0),
                               j.at("center").get<double>(),
                               j.at("width").get<double>());
    if (type == "samples")
      return Profile::sampled(j.at("values").get<std::vector<double>>());
    throw InvalidConfig("profile: unknown type '" + type + "'");
  }
  throw InvalidConfig("profile: expected number, array, or object");
}

inline json to_json(const Profile& p) {
  switch (p.kind) {
    case Profile::Kind::Constant:
      return json{{"type", "constant"}, {"value", p.scale * p.value}};
    case Profile::Kind::Gaussian:
      return json{{"type", "gaussian"},
                  {"amplitude", p.scale * p.amplitude},
                  {"center", p.center},
                  {"width", p.width}};
    case Profile::Kind::Samples: {
      std::vector<double> v = p.samples;
      for (double& x : v) x *= p.scale;
      return json{{"type", "samples"}, {"values", v}};
    }
  }
  throw InvalidConfig("profile: bad kind");
}

inline PlantConfig plant_from_json(const json& j) {
  PlantConfig cfg;
  if (j.contains("domain")) {
    cfg.domain_a = j["domain"].at(0).get<double>();
    cfg.domain_b = j["domain"].at(1).get<double>();
  }
  cfg.n_grid = j.value("n_grid", 50);
  if (j.contains("conductivity")) cfg.conductivity = profile_from_json(j["conductivity"]);
  if (j.contains("reaction")) cfg.reaction = profile_from_json(j["reaction"]);
  if (j.contains("input_weight")) {
    cfg.input_weight[0] = j["input_weight"].at(0).get<double>();
    cfg.input_weight[1] = j["input_weight"].at(1).get<double>();
  }
  if (j.contains("output_weight")) {
    cfg.output_weight[0] = j["output_weight"].at(0).get<double>();
    cfg.output_weight[1] = j["output_weight"].at(1).get<double>();
  }
  if (j.contains("disturbance")) {
    const json& d = j["disturbance"];
    if (d.contains("distributed"))
      for (const auto& pj : d["distributed"])
        cfg.dist_distributed.push_back(profile_from_json(pj));
    if (d.contains("boundary"))
      for (const auto& bj : d["boundary"])
        cfg.dist_boundary.push_back({bj.at(0).get<double>(), bj.at(1).get<double>()});
  }
  return cfg;
}

inline json to_json(const PlantConfig& cfg) {
  json j;
  j["domain"] = {cfg.domain_a, cfg.domain_b};
  j["n_grid"] = cfg.n_grid;
  j["conductivity"] = to_json(cfg.conductivity);
  j["reaction"] = to_json(cfg.reaction);
  j["input_weight"] = {cfg.input_weight[0], cfg.input_weight[1]};
  j["output_weight"] = {cfg.output_weight[0], cfg.output_weight[1]};
  json dist;
  dist["distributed"] = json::array();
  for (const auto& p : cfg.dist_distributed)
    dist["distributed"].push_back(to_json(p));
  dist["boundary"] = json::array();
  for (const auto& b : cfg.dist_boundary) dist["boundary"].push_back({b[0], b[1]});
  j["disturbance"] = dist;
  return j;
}

inline ExoSignalSpec signals_from_json(const json& j) {
  ExoSignalSpec s;
  s.frequencies = j.at("frequencies").get<std::vector<double>>();
  auto vecs = [](const json& arr) {
    std::vector<Vec> out;
    for (const auto& row : arr) {
      const auto v = row.get<std::vector<double>>();
      out.push_back(Eigen::Map<const Vec>(v.data(),
                                          static_cast<Eigen::Index>(v.size())));
    }
    return out;
  };
  if (j.contains("reference")) {
    s.ref_amplitudes = vecs(j["reference"].at("amplitudes"));
    s.ref_phases = j["reference"].value("phases", std::vector<double>(
                                                      s.frequencies.size(), 0.0));
  }
  if (j.contains("disturbance")) {
    s.dist_amplitudes = vecs(j["disturbance"].at("amplitudes"));
    s.dist_phases = j["disturbance"].value(
        "phases", std::vector<double>(s.frequencies.size(), 0.0));
  }
  return s;
}

inline json to_json(const ExoSignalSpec& s) {
  auto amps = [](const std::vector<Vec>& vs) {
    json arr = json::array();
    for (const auto& v : vs) {
      json row = json::array();
      for (Eigen::Index i = 0; i < v.size(); ++i) row.push_back(v(i));
      arr.push_back(std::move(row));
    }
    return arr;
  };
  return json{{"frequencies", s.frequencies},
              {"reference", {{"amplitudes", amps(s.ref_amplitudes)},
                             {"phases", s.ref_phases}}},
              {"disturbance", {{"amplitudes", amps(s.dist_amplitudes)},
                               {"phases", s.dist_phases}}}};
}

struct DesignOptions {
  double q_weight = 1.0;
  double r_weight = 1.0;
  double im_q_weight = 4.0;   // weights for the (G1, B1) gain
  double im_r_weight = 1.0;
  std::optional<int> hk_truncation;  // rank-N H_K when present
  double stab_floor = 1e-6;
  double tz_tol = 1e-8;
};

struct SimulationOptions {
  double t_final = 30.0;
  double dt = 0.0;  // 0 means the default 1e-3 * t_final
  double resolved_dt() const { return dt > 0.0 ? dt : 1e-3 * t_final; }
};

struct OutputPaths {
  std::string controller = "controller.json";
  std::string trajectory = "trajectory.csv";
  std::string metrics = "metrics.json";
  std::string report = "report.json";
};

struct RunConfig {
  PlantConfig plant;
  ExoSignalSpec signals;
  DesignOptions design;
  SimulationOptions simulation;
  OutputPaths output;
};

inline RunConfig config_from_json(const json& j) {
  RunConfig cfg;
  cfg.plant = plant_from_json(j.at("plant"));
  cfg.signals = signals_from_json(j.at("signals"));
  if (j.contains("design")) {
    const json& d = j["design"];
    cfg.design.q_weight = d.value("q_weight", 1.0);
    cfg.design.r_weight = d.value("r_weight", 1.0);
    cfg.design.im_q_weight = d.value("im_q_weight", cfg.design.im_q_weight);
    cfg.design.im_r_weight = d.value("im_r_weight", 1.0);
    if (d.contains("hk_truncation") && !d["hk_truncation"].is_null())
      cfg.design.hk_truncation = d["hk_truncation"].get<int>();
    cfg.design.stab_floor = d.value("stab_floor", 1e-6);
    cfg.design.tz_tol = d.value("tz_tol", 1e-8);
  }
  if (j.contains("simulation")) {
    const json& s = j["simulation"];
    cfg.simulation.t_final = s.value("t_final", 30.0);
    cfg.simulation.dt = s.value("dt", 0.0);
  }
  if (j.contains("output")) {
    const json& o = j["output"];
    cfg.output.controller = o.value("controller", cfg.output.controller);
    cfg.output.trajectory = o.value("trajectory", cfg.output.trajectory);
    cfg.output.metrics = o.value("metrics", cfg.output.metrics);
    cfg.output.report = o.value("report", cfg.output.report);
  }
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidConfig("config parse error in " + path + ": " + e.what());
  }
  try {
    return config_from_json(j);
  } catch (const json::exception& e) {
    throw InvalidConfig("config schema error in " + path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// plant hash: FNV-1a 64 over the canonical (sorted-key) JSON dump

inline std::string plant_hash(const PlantConfig& cfg) {
  const std::string dump = to_json(cfg).dump();
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

// ---------------------------------------------------------------------------
// controller file

inline constexpr int kControllerSchemaVersion = 1;

inline json controller_to_json(const ControllerRealization& c) {
  json j;
  j["schema_version"] = kControllerSchemaVersion;
  j["plant_hash"] = c.plant_hash;
  j["frequencies"] = c.internal_model.frequencies;
  j["p"] = c.internal_model.p;
  // internal-model block ordering: zero block first, ascending frequencies
  j["block_ordering"] = "zero_then_ascending";
  j["certificates"] = {{"im_abscissa", c.im_abscissa}};
  j["matrices"] = {{"G1", to_json(c.internal_model.G1)},
                   {"G2", to_json(c.internal_model.G2)},
                   {"L", to_json(c.L)},
                   {"K0", to_json(c.K0)},
                   {"K1", to_json(c.K1)},
                   {"K2", to_json(c.K2)},
                   {"HK", to_json(c.HK)}};
  j["plant"] = {{"A", to_json(c.plant.A)},     {"B", to_json(c.plant.B)},
                {"Bd", to_json(c.plant.Bd)},   {"C", to_json(c.plant.C)},
                {"D", to_json(c.plant.D)},     {"Dd", to_json(c.plant.Dd)},
                {"weights", to_json(Mat(c.plant.weights))},
                {"domain", {c.plant.domain_a, c.plant.domain_b}}};
  return j;
}

inline ControllerRealization controller_from_json(const json& j) {
  if (j.value("schema_version", -1) != kControllerSchemaVersion)
    throw InvalidConfig("controller file: unsupported schema version");
  StateSpaceModel plant;
  const json& pj = j.at("plant");
  plant.A = mat_from_json(pj.at("A"));
  plant.B = mat_from_json(pj.at("B"));
  plant.Bd = mat_from_json(pj.at("Bd"));
  plant.C = mat_from_json(pj.at("C"));
  plant.D = mat_from_json(pj.at("D"));
  plant.Dd = mat_from_json(pj.at("Dd"));
  plant.weights = mat_from_json(pj.at("weights")).col(0);
  plant.domain_a = pj.at("domain").at(0).get<double>();
  plant.domain_b = pj.at("domain").at(1).get<double>();

  InternalModel im;
  im.frequencies = j.at("frequencies").get<std::vector<double>>();
  im.p = j.at("p").get<int>();
  im.G1 = mat_from_json(j.at("matrices").at("G1"));
  im.G2 = mat_from_json(j.at("matrices").at("G2"));

  ControllerRealization c = assemble_controller(
      im, mat_from_json(j.at("matrices").at("L")),
      mat_from_json(j.at("matrices").at("K0")),
      mat_from_json(j.at("matrices").at("K1")),
      mat_from_json(j.at("matrices").at("HK")), plant);
  c.plant_hash = j.value("plant_hash", "");
  c.im_abscissa = j.at("certificates").value("im_abscissa", 0.0);
  // the stored K2 must agree with the assembly identity K2 = K0 + K1 HK
  const Mat K2_stored = mat_from_json(j.at("matrices").at("K2"));
  if ((K2_stored - c.K2).norm() > 1e-12 * std::max(1.0, K2_stored.norm()))
    throw InvalidConfig("controller file: K2 inconsistent with K0 + K1 HK");
  return c;
}

inline void save_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidConfig("cannot write file: " + path);
  out << j.dump(2) << "\n";
}

inline json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidConfig("parse error in " + path + ": " + e.what());
  }
  return j;
}

// ---------------------------------------------------------------------------
// trajectory CSV (shortest round-trip decimal via to_chars)

inline std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

inline void write_trajectory_csv(const SimResult& sim, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidConfig("cannot write file: " + path);
  out << "t,y,y_ref,e,u\n";
  for (size_t i = 0; i < sim.t.size(); ++i) {
    out << format_double(sim.t[i]);
    auto emit = [&](const Vec& v) {
      for (Eigen::Index k = 0; k < v.size(); ++k)
        out << "," << format_double(v(k));
    };
    emit(sim.y[i]);
    emit(sim.y_ref[i]);
    emit(sim.e[i]);
    emit(sim.u[i]);
    out << "\n";
  }
}

inline json metrics_to_json(const SimResult& sim) {
  return json{{"terminal_error_sup", sim.terminal_error_sup},
              {"fitted_decay_rate", sim.fitted_decay_rate},
              {"weighted_integral", sim.weighted_integral},
              {"samples", sim.t.size()}};
}

}  // namespace regforge::io

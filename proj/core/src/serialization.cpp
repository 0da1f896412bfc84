#include "maisac/serialization.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace maisac {

namespace {

using nlohmann::json;

json vec_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json cplx_to_json(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

json cvec_to_json(const Eigen::VectorXcd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(cplx_to_json(v(i)));
  return out;
}

json mat_to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

json cmat_to_json(const Eigen::MatrixXcd& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(cplx_to_json(m(r, c)));
    out.push_back(row);
  }
  return out;
}

Eigen::VectorXd vec_from_json(const json& j) {
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = j[i].get<double>();
  return v;
}

std::complex<double> cplx_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2)
    throw std::invalid_argument("complex values must be [re, im] pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

Eigen::VectorXcd cvec_from_json(const json& j) {
  Eigen::VectorXcd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = cplx_from_json(j[i]);
  return v;
}

Eigen::MatrixXd mat_from_json(const json& j, Eigen::Index rows, Eigen::Index cols) {
  if (static_cast<Eigen::Index>(j.size()) != rows)
    throw std::invalid_argument("matrix row count mismatch");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(j[r].size()) != cols)
      throw std::invalid_argument("matrix column count mismatch");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

Eigen::MatrixXcd cmat_from_json(const json& j, Eigen::Index rows, Eigen::Index cols) {
  if (static_cast<Eigen::Index>(j.size()) != rows)
    throw std::invalid_argument("matrix row count mismatch");
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(j[r].size()) != cols)
      throw std::invalid_argument("matrix column count mismatch");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = cplx_from_json(j[r][c]);
  }
  return m;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << contents;
  if (!out) throw std::runtime_error("short write: " + path);
}

std::string config_to_json(const ScenarioConfig& cfg) {
  json j;
  j["n_tx"] = cfg.n_tx;
  j["n_rx"] = cfg.n_rx;
  j["n_users"] = cfg.n_users;
  j["n_clutters"] = cfg.n_clutters;
  j["n_paths"] = cfg.n_paths;
  j["wavelength"] = cfg.wavelength;
  j["tx_range"] = json::array({cfg.tx_range[0], cfg.tx_range[1]});
  j["rx_range"] = json::array({cfg.rx_range[0], cfg.rx_range[1]});
  j["min_spacing"] = cfg.min_spacing;
  j["power_budget"] = cfg.power_budget;
  j["noise_power"] = cfg.noise_power;
  j["weight_comm"] = cfg.weight_comm;
  j["weight_sense"] = cfg.weight_sense;
  j["array_separation"] = cfg.array_separation;
  j["array_angle"] = cfg.array_angle;
  j["antenna_gain"] = cfg.antenna_gain;
  j["seed"] = cfg.seed;
  return j.dump(2) + "\n";
}

ScenarioConfig config_from_json_text(const std::string& text,
                                     const ScenarioConfig& defaults) {
  const json j = json::parse(text);
  if (!j.is_object())
    throw std::invalid_argument("config JSON must be an object");
  ScenarioConfig cfg = defaults;
  for (const auto& [key, value] : j.items()) {
    if (key == "n_tx") cfg.n_tx = value.get<int>();
    else if (key == "n_rx") cfg.n_rx = value.get<int>();
    else if (key == "n_users") cfg.n_users = value.get<int>();
    else if (key == "n_clutters") cfg.n_clutters = value.get<int>();
    else if (key == "n_paths") cfg.n_paths = value.get<int>();
    else if (key == "wavelength") cfg.wavelength = value.get<double>();
    else if (key == "tx_range" || key == "rx_range") {
      if (!value.is_array() || value.size() != 2)
        throw std::invalid_argument(key + " must be [min, max]");
      auto& range = key == "tx_range" ? cfg.tx_range : cfg.rx_range;
      range = {value[0].get<double>(), value[1].get<double>()};
    }
    else if (key == "min_spacing") cfg.min_spacing = value.get<double>();
    else if (key == "power_budget") cfg.power_budget = value.get<double>();
    else if (key == "noise_power") cfg.noise_power = value.get<double>();
    else if (key == "weight_comm") cfg.weight_comm = value.get<double>();
    else if (key == "weight_sense") cfg.weight_sense = value.get<double>();
    else if (key == "array_separation") cfg.array_separation = value.get<double>();
    else if (key == "array_angle") cfg.array_angle = value.get<double>();
    else if (key == "antenna_gain") cfg.antenna_gain = value.get<double>();
    else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
    else throw std::invalid_argument("unknown config key: " + key);
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig load_config(const std::string& path, const ScenarioConfig& defaults) {
  return config_from_json_text(read_text_file(path), defaults);
}

void save_config(const ScenarioConfig& cfg, const std::string& path) {
  write_text_file(path, config_to_json(cfg));
}

std::string scenario_to_json(const Scenario& scen) {
  json j;
  j["user_angles"] = mat_to_json(scen.user_angles);
  j["user_gains"] = cmat_to_json(scen.user_gains);
  j["user_distances"] = vec_to_json(scen.user_distances);
  j["target_angle"] = scen.target_angle;
  j["target_distance"] = scen.target_distance;
  j["clutter_angles"] = vec_to_json(scen.clutter_angles);
  j["clutter_distances"] = vec_to_json(scen.clutter_distances);
  j["rcs_target"] = cplx_to_json(scen.rcs_target);
  j["rcs_clutters"] = cvec_to_json(scen.rcs_clutters);
  j["path_loss_users"] = vec_to_json(scen.path_loss_users);
  j["path_loss_target"] = scen.path_loss_target;
  j["path_loss_clutters"] = vec_to_json(scen.path_loss_clutters);
  return j.dump(2) + "\n";
}

Scenario scenario_from_json_text(const std::string& text,
                                 const ScenarioConfig& cfg) {
  const json j = json::parse(text);
  Scenario scen;
  scen.user_angles = mat_from_json(j.at("user_angles"), cfg.n_users, cfg.n_paths);
  scen.user_gains = cmat_from_json(j.at("user_gains"), cfg.n_users, cfg.n_paths);
  scen.user_distances = vec_from_json(j.at("user_distances"));
  scen.target_angle = j.at("target_angle").get<double>();
  scen.target_distance = j.at("target_distance").get<double>();
  scen.clutter_angles = vec_from_json(j.at("clutter_angles"));
  scen.clutter_distances = vec_from_json(j.at("clutter_distances"));
  scen.rcs_target = cplx_from_json(j.at("rcs_target"));
  scen.rcs_clutters = cvec_from_json(j.at("rcs_clutters"));
  scen.path_loss_users = vec_from_json(j.at("path_loss_users"));
  scen.path_loss_target = j.at("path_loss_target").get<double>();
  scen.path_loss_clutters = vec_from_json(j.at("path_loss_clutters"));
  scen.validate(cfg);
  return scen;
}

std::uint64_t scenario_hash(const Scenario& scen) {
  return fnv1a64(scenario_to_json(scen));
}

std::string solution_to_json(const IsacSolution& sol) {
  json j;
  j["layout"]["tx_positions"] = vec_to_json(sol.layout.tx_positions);
  j["layout"]["rx_positions"] = vec_to_json(sol.layout.rx_positions);
  j["precoder"] = cmat_to_json(sol.bf.precoder);
  j["combiner"] = cvec_to_json(sol.bf.combiner);
  j["aux"]["mu"] = vec_to_json(sol.aux.mu);
  j["aux"]["xi_c"] = cvec_to_json(sol.aux.xi_c);
  j["aux"]["xi_s"] = cvec_to_json(sol.aux.xi_s);
  j["objective_value"] = sol.objective_value;
  j["comm_sum_rate"] = sol.comm_sum_rate;
  j["sensing_mi"] = sol.sensing_mi;
  j["transmit_power"] = sol.bf.transmit_power();
  j["converged"] = sol.converged;
  json trace = json::array();
  for (const PositionTraceRow& row : sol.trace) {
    json r;
    r["iteration"] = row.iteration;
    r["objective_value"] = row.objective_value;
    r["step_x"] = row.step_x;
    r["step_y"] = row.step_y;
    r["solver_iterations"] = row.solver_iterations;
    trace.push_back(r);
  }
  j["trace"] = trace;
  return j.dump(2) + "\n";
}

std::string position_trace_to_csv(const std::vector<PositionTraceRow>& trace) {
  std::string out = "iteration,objective_value,step_x,step_y,solver_iterations\n";
  for (const PositionTraceRow& r : trace) {
    out += std::to_string(r.iteration);
    out += ',';
    out += format_double(r.objective_value);
    out += ',';
    out += format_double(r.step_x);
    out += ',';
    out += format_double(r.step_y);
    out += ',';
    out += std::to_string(r.solver_iterations);
    out += '\n';
  }
  return out;
}

std::string solver_trace_to_csv(const std::vector<SolverTraceRow>& trace) {
  std::string out = "iteration,surrogate_value,objective_value,power,tau\n";
  for (const SolverTraceRow& r : trace) {
    out += std::to_string(r.iteration);
    out += ',';
    out += format_double(r.surrogate_value);
    out += ',';
    out += format_double(r.objective_value);
    out += ',';
    out += format_double(r.power);
    out += ',';
    out += format_double(r.tau);
    out += '\n';
  }
  return out;
}

}  // namespace maisac

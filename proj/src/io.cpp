#include "wbc/io.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace wbc::io {

namespace {

using nlohmann::json;

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

Dmc parse_matrix(const json& j, const std::string& key, int input_size) {
  if (!j.contains(key)) throw ParseError("channel file: missing matrix '" + key + "'");
  const json& m = j.at(key);
  if (!m.is_array() || static_cast<int>(m.size()) != input_size)
    throw ParseError("channel file: '" + key + "' must have one row per input symbol");
  std::vector<std::vector<double>> rows;
  for (std::size_t r = 0; r < m.size(); ++r) {
    const json& row = m[r];
    if (!row.is_array() || row.empty())
      throw ParseError("channel file: '" + key + "' row " + std::to_string(r) + " is not a vector");
    std::vector<double> vals;
    double sum = 0.0;
    for (const json& v : row) {
      double d = v.get<double>();
      if (d < -1e-12)
        throw ParseError("channel file: '" + key + "' row " + std::to_string(r) + " has a negative entry");
      vals.push_back(d);
      sum += d;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw ParseError("channel file: '" + key + "' row " + std::to_string(r) + " sums to " +
                       std::to_string(sum));
    rows.push_back(std::move(vals));
  }
  try {
    return Dmc::from_rows(rows);
  } catch (const std::exception& e) {
    throw ParseError("channel file: '" + key + "': " + e.what());
  }
}

WiretapBc parse_channel(const json& j) {
  if (!j.contains("input_size")) throw ParseError("channel file: missing input_size");
  int nx = j.at("input_size").get<int>();
  if (nx < 1) throw ParseError("channel file: input_size must be >= 1");
  return WiretapBc(parse_matrix(j, "y1", nx), parse_matrix(j, "y2", nx), parse_matrix(j, "z", nx));
}

JointPmf parse_joint(const json& j) {
  if (!j.contains("axes") || !j.contains("table"))
    throw ParseError("aux joint: needs 'axes' and 'table'");
  std::vector<Axis> axes;
  for (const json& a : j.at("axes"))
    axes.push_back({a.at("name").get<std::string>(), a.at("size").get<int>()});
  std::vector<double> table = j.at("table").get<std::vector<double>>();
  try {
    return JointPmf(std::move(axes), std::move(table));
  } catch (const std::exception& e) {
    throw ParseError(std::string("aux joint: ") + e.what());
  }
}

}  // namespace

WiretapBc load_channel(const std::string& path) { return parse_channel(load_json(path)); }

sim::SimConfig load_sim_config(const std::string& path) {
  json j = load_json(path);
  if (!j.contains("channel")) throw ParseError("sim config: missing channel");
  if (!j.contains("aux")) throw ParseError("sim config: missing aux joint");
  auto get = [&j](const char* key, double dflt) {
    return j.contains(key) ? j.at(key).get<double>() : dflt;
  };
  sim::SimConfig cfg{parse_channel(j.at("channel")), parse_joint(j.at("aux"))};
  cfg.n = j.contains("n") ? j.at("n").get<int>() : 0;
  cfg.t0 = get("t0", 0.0);
  cfg.t1 = get("t1", 0.0);
  cfg.t2 = get("t2", 0.0);
  cfg.r01 = get("r01", 0.0);
  cfg.r02 = get("r02", 0.0);
  cfg.rbar0 = get("rbar0", cfg.r01 + cfg.r02);
  cfg.rbar1 = get("rbar1", 0.0);
  cfg.rbar2 = get("rbar2", 0.0);
  cfg.rtilde1 = get("rtilde1", 0.0);
  cfg.rtilde2 = get("rtilde2", 0.0);
  cfg.trials = j.contains("trials") ? j.at("trials").get<int>() : 0;
  cfg.seed = j.contains("seed") ? j.at("seed").get<std::uint64_t>() : 0;
  cfg.delta_coefficient = get("delta_coefficient", 1.0);
  return cfg;
}

std::string fmt12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace wbc::io

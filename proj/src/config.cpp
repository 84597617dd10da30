#include "qb/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace qb {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream stream(s);
  std::string token;
  while (std::getline(stream, token, sep)) {
    token = trim(token);
    if (!token.empty()) out.push_back(token);
  }
  return out;
}

double parse_double(const Config& c, const std::string& key) {
  const std::string& v = c.get(key);
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw config_error("key '" + key + "' is not a number: '" + v + "'");
  }
}

int parse_int(const Config& c, const std::string& key) {
  const std::string& v = c.get(key);
  try {
    std::size_t pos = 0;
    const int x = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw config_error("key '" + key + "' is not an integer: '" + v + "'");
  }
}

}  // namespace

void Config::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries_)
    if (k == key) {
      v = value;
      return;
    }
  entries_.emplace_back(key, value);
}

bool Config::has(const std::string& key) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const auto& e) { return e.first == key; });
}

const std::string& Config::get(const std::string& key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return v;
  throw config_error("missing required config key '" + key + "'");
}

std::string Config::get_or(const std::string& key,
                           const std::string& fallback) const {
  return has(key) ? get(key) : fallback;
}

std::string Config::render() const {
  std::string out;
  for (const auto& [k, v] : entries_) {
    out += k;
    out += " = ";
    out += v;
    out += '\n';
  }
  return out;
}

Config Config::parse(const std::string& text) {
  Config c;
  std::stringstream stream(text);
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw config_error("line " + std::to_string(line_no) +
                         ": expected 'key = value', got '" + t + "'");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw config_error("line " + std::to_string(line_no) + ": empty key");
    if (c.has(key))
      throw config_error("line " + std::to_string(line_no) +
                         ": duplicate key '" + key + "'");
    c.set(key, value);
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

namespace {

const std::set<std::string> kKnownKeys = {
    "engine",
    "lattice.n_sites",
    "lattice.delta_a",
    "lattice.delta_b",
    "lattice.gamma_a",
    "lattice.gamma_b",
    "lattice.coupling",
    "lattice.gamma_collective",
    "integrator.dt",
    "integrator.t_end",
    "integrator.sample_every",
    "observables",
    "initial_state.type",
    "initial_state.amplitudes",
    "initial_state.sites",
    "output.path",
    "output.format",
};

std::vector<std::string> normalize_observables(const std::string& raw, int n) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  const auto push = [&](std::string name) {
    if (name.rfind("sigma_z_", 0) == 0) name = "sz_" + name.substr(8);
    else if (name.rfind("sigma_x_", 0) == 0) name = "sx_" + name.substr(8);
    if (seen.insert(name).second) out.push_back(name);
  };
  for (const std::string& token : split(raw, ',')) {
    if (token == "sz_all") {
      for (int j = 1; j <= n; ++j) push("sz_" + std::to_string(j));
    } else if (token == "sx_all") {
      for (int j = 1; j <= n; ++j) push("sx_" + std::to_string(j));
    } else {
      push(token);
    }
  }
  if (out.empty()) throw config_error("observables list is empty");
  return out;
}

}  // namespace

RunConfig RunConfig::from_config(const Config& config) {
  for (const auto& [k, v] : config.entries())
    if (!kKnownKeys.count(k)) throw config_error("unknown config key '" + k + "'");

  RunConfig rc;
  rc.engine = config.get("engine");
  if (rc.engine != "single-excitation" && rc.engine != "cumulant" &&
      rc.engine != "oracle")
    throw validation_error("unknown engine '" + rc.engine + "'");

  rc.lattice.n_sites = parse_int(config, "lattice.n_sites");
  rc.lattice.delta_a =
      config.has("lattice.delta_a") ? parse_double(config, "lattice.delta_a") : 1.0;
  rc.lattice.delta_b = parse_double(config, "lattice.delta_b");
  rc.lattice.gamma_a = parse_double(config, "lattice.gamma_a");
  rc.lattice.gamma_b = parse_double(config, "lattice.gamma_b");
  rc.lattice.coupling = parse_double(config, "lattice.coupling");
  rc.lattice.gamma_collective =
      config.has("lattice.gamma_collective")
          ? parse_double(config, "lattice.gamma_collective")
          : 0.0;
  rc.lattice.validate();

  rc.integrator.dt = parse_double(config, "integrator.dt");
  rc.integrator.t_end = parse_double(config, "integrator.t_end");
  rc.integrator.sample_every =
      config.has("integrator.sample_every")
          ? parse_int(config, "integrator.sample_every")
          : 1;
  rc.integrator.validate();

  rc.observables =
      normalize_observables(config.get("observables"), rc.lattice.n_sites);

  const std::string type = config.get("initial_state.type");
  if (type == "fully-charged") {
    rc.initial_state.kind = InitialState::Kind::fully_charged;
  } else if (type == "ground") {
    rc.initial_state.kind = InitialState::Kind::ground;
  } else if (type == "pure-1x") {
    rc.initial_state.kind = InitialState::Kind::pure_1x;
    for (const std::string& token :
         split(config.get("initial_state.amplitudes"), ',')) {
      try {
        rc.initial_state.amplitudes.push_back(std::stod(token));
      } catch (const std::exception&) {
        throw config_error("initial_state.amplitudes: bad number '" + token + "'");
      }
    }
    if (rc.initial_state.amplitudes.size() !=
        2 * static_cast<std::size_t>(rc.lattice.n_sites + 1))
      throw config_error(
          "initial_state.amplitudes must hold 2(N+1) values (re,im pairs for "
          "|g> then each site)");
  } else if (type == "two-site") {
    rc.initial_state.kind = InitialState::Kind::two_site;
    const auto sites = split(config.get("initial_state.sites"), ',');
    if (sites.size() != 2)
      throw config_error("initial_state.sites must hold exactly two sites");
    try {
      rc.initial_state.site1 = std::stoi(sites[0]);
      rc.initial_state.site2 = std::stoi(sites[1]);
    } catch (const std::exception&) {
      throw config_error("initial_state.sites: expected two integers");
    }
  } else {
    throw validation_error("unknown initial state type '" + type + "'");
  }

  if (rc.engine == "single-excitation" &&
      rc.initial_state.kind == InitialState::Kind::fully_charged)
    throw validation_error(
        "fully-charged is outside the single-excitation sector; use the "
        "cumulant or oracle engine");
  if (rc.engine == "cumulant" &&
      (rc.initial_state.kind == InitialState::Kind::pure_1x ||
       rc.initial_state.kind == InitialState::Kind::two_site))
    throw validation_error(
        "the cumulant engine tracks populations and correlations only; use "
        "fully-charged/ground, or the single-excitation or oracle engine for "
        "pure states");

  rc.output_path = config.get_or("output.path", "");
  rc.output_format = config.get_or("output.format", "csv");
  if (rc.output_format != "csv" && rc.output_format != "json")
    throw validation_error("output.format must be csv or json");
  return rc;
}

}  // namespace qb

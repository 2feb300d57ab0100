#include "noma/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace noma {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = std::string::npos;
  }
  if (used != value.size())
    throw std::invalid_argument("config key " + key + ": bad numeric value '" + value + "'");
  return v;
}

long long parse_int(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(value, &used);
  } catch (const std::exception&) {
    used = std::string::npos;
  }
  if (used != value.size())
    throw std::invalid_argument("config key " + key + ": bad integer value '" + value + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(value, &used);
  } catch (const std::exception&) {
    used = std::string::npos;
  }
  if (used != value.size())
    throw std::invalid_argument("config key " + key + ": bad unsigned value '" + value + "'");
  return v;
}

}  // namespace

void ScenarioConfig::validate() const {
  require(q_count >= 2, "q_count must be >= 2");
  require(lambda >= 0.0, "lambda must be nonnegative");
  require(k_max >= 0, "k_max must be nonnegative");
  require(block_bits >= 1, "block_bits must be >= 1");
  require(slots >= 1, "slots must be >= 1");
  if (delta_db) require(*delta_db > 0.0, "delta_db must be positive");
  if (gammaQ_db) require(*gammaQ_db > gamma1_db, "gammaQ_db must exceed gamma1_db");
  if (delta_db && gammaQ_db) {
    const double implied = gamma1_db + *delta_db * static_cast<double>(q_count - 1);
    require(std::abs(implied - *gammaQ_db) <= 1e-9,
            "delta_db and gammaQ_db disagree on the top level");
  }
}

PowerLevelGrid ScenarioConfig::grid_for(Index q) const {
  validate();
  if (gammaQ_db) return build_snr_grid_endpoints(gamma1_db, *gammaQ_db, q);
  require(delta_db.has_value(), "grid spacing unspecified: set delta_db or gammaQ_db");
  return build_snr_grid(gamma1_db, *delta_db, q);
}

ScenarioConfig parse_scenario_config(const std::string& text) {
  ScenarioConfig cfg;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key=value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": empty key or value");
    if (key == "gamma1_db")
      cfg.gamma1_db = parse_double(key, value);
    else if (key == "delta_db")
      cfg.delta_db = parse_double(key, value);
    else if (key == "gammaQ_db")
      cfg.gammaQ_db = parse_double(key, value);
    else if (key == "q_count")
      cfg.q_count = static_cast<Index>(parse_int(key, value));
    else if (key == "lambda")
      cfg.lambda = parse_double(key, value);
    else if (key == "k_max")
      cfg.k_max = static_cast<int>(parse_int(key, value));
    else if (key == "block_bits")
      cfg.block_bits = static_cast<int>(parse_int(key, value));
    else if (key == "modulation")
      cfg.modulation = modulation_from_string(value);
    else if (key == "seed")
      cfg.seed = parse_u64(key, value);
    else if (key == "slots")
      cfg.slots = parse_int(key, value);
    else
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": unknown key '" +
                                  key + "'");
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig load_scenario_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_config(buf.str());
}

}  // namespace noma

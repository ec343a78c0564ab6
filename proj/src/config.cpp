#include "hbct/config.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "hbct/errors.hpp"
#include "hbct/rng.hpp"

namespace hbct {

namespace {

constexpr std::string_view kCfgPrefix = "# cfg: ";

std::string trim(std::string_view s) {
  size_t begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return "";
  size_t end = s.find_last_not_of(" \t\r");
  return std::string(s.substr(begin, end - begin + 1));
}

std::string fmt_double(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.12g", v);
  return buffer;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t consumed = 0;
    const double parsed = std::stod(value, &consumed);
    if (consumed != value.size()) throw std::invalid_argument("trailing characters");
    return parsed;
  } catch (const std::exception&) {
    throw ValidationError("config key '" + key + "': malformed number '" + value + "'");
  }
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    size_t consumed = 0;
    const long long parsed = std::stoll(value, &consumed);
    if (consumed != value.size()) throw std::invalid_argument("trailing characters");
    if (parsed < INT32_MIN || parsed > INT32_MAX) throw std::out_of_range("int range");
    return static_cast<int>(parsed);
  } catch (const std::exception&) {
    throw ValidationError("config key '" + key + "': malformed integer '" + value + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    size_t consumed = 0;
    const unsigned long long parsed = std::stoull(value, &consumed);
    if (consumed != value.size()) throw std::invalid_argument("trailing characters");
    return parsed;
  } catch (const std::exception&) {
    throw ValidationError("config key '" + key + "': malformed unsigned integer '" + value +
                          "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "on" || value == "true" || value == "1") return true;
  if (value == "off" || value == "false" || value == "0") return false;
  throw ValidationError("config key '" + key + "': expected on/off (got '" + value + "')");
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream stream(value);
  std::string item;
  while (std::getline(stream, item, ',')) {
    const std::string trimmed = trim(item);
    if (trimmed.empty()) {
      throw ValidationError("config key '" + key + "': empty list element");
    }
    out.push_back(parse_double(key, trimmed));
  }
  if (out.empty()) throw ValidationError("config key '" + key + "': empty list");
  return out;
}

std::string join_list(const std::vector<double>& values) {
  std::string out;
  for (size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ",";
    out += fmt_double(values[i]);
  }
  return out;
}

}  // namespace

SystemParams RunConfig::to_params() const {
  SystemParams params;
  params.num_hops = hops;
  params.block_duration = block_duration;
  params.pt_power = db_to_linear(pt_db);
  params.interference_threshold = db_to_linear(ip_db);
  params.harvest_efficiency = zeta;
  params.noise_power = sigma2;
  params.bandwidth_hz = bandwidth_hz;
  if (backscatter_rates_bps.empty()) {
    params.backscatter_rates_bps.assign(static_cast<size_t>(hops),
                                        deployment_backscatter_rate_bps(hops));
  } else {
    params.backscatter_rates_bps = backscatter_rates_bps;
  }
  params.pt_position = pt_position;
  params.pr_position = pr_position;
  params.source_position = source_position;
  params.destination_position = destination_position;
  params.path_loss_exponent = alpha;
  params.reference_distance = d0;
  params.fading = fading;
  return validate_params(params);
}

SearchOptions RunConfig::to_search_options() const {
  SearchOptions opts;
  opts.restarts = restarts;
  opts.max_evaluations = max_evals;
  opts.simplex_tolerance = nm_tol;
  opts.seed = derive_seed(seed, 0x5EA7C4ull);
  return opts;
}

std::vector<double> RunConfig::resolved_sweep_values() const {
  if (!sweep_values.empty()) return sweep_values;
  std::vector<double> values;
  switch (sweep_kind) {
    case SweepKind::kPtPowerDb:
      for (int db = 10; db <= 50; db += 2) values.push_back(db);
      break;
    case SweepKind::kHops:
      for (int k = 1; k <= 5; ++k) values.push_back(k);
      break;
    case SweepKind::kIpcDb:
      for (int db = -30; db <= 15; db += 5) values.push_back(db);
      break;
  }
  return values;
}

void apply_key(RunConfig& config, const std::string& key, const std::string& value) {
  if (key == "hops") config.hops = parse_int(key, value);
  else if (key == "block_duration") config.block_duration = parse_double(key, value);
  else if (key == "pt_db") config.pt_db = parse_double(key, value);
  else if (key == "ip_db") config.ip_db = parse_double(key, value);
  else if (key == "zeta") config.zeta = parse_double(key, value);
  else if (key == "sigma2") config.sigma2 = parse_double(key, value);
  else if (key == "bandwidth_hz") config.bandwidth_hz = parse_double(key, value);
  else if (key == "backscatter_rates_bps") config.backscatter_rates_bps = parse_list(key, value);
  else if (key == "alpha") config.alpha = parse_double(key, value);
  else if (key == "d0") config.d0 = parse_double(key, value);
  else if (key == "pt_x") config.pt_position.x = parse_double(key, value);
  else if (key == "pt_y") config.pt_position.y = parse_double(key, value);
  else if (key == "pr_x") config.pr_position.x = parse_double(key, value);
  else if (key == "pr_y") config.pr_position.y = parse_double(key, value);
  else if (key == "source_x") config.source_position.x = parse_double(key, value);
  else if (key == "source_y") config.source_position.y = parse_double(key, value);
  else if (key == "dest_x") config.destination_position.x = parse_double(key, value);
  else if (key == "dest_y") config.destination_position.y = parse_double(key, value);
  else if (key == "fading") config.fading = parse_bool(key, value);
  else if (key == "seed") config.seed = parse_u64(key, value);
  else if (key == "trials") config.trials = parse_int(key, value);
  else if (key == "sweep_kind") config.sweep_kind = sweep_kind_from_string(value);
  else if (key == "sweep_values") config.sweep_values = parse_list(key, value);
  else if (key == "restarts") config.restarts = parse_int(key, value);
  else if (key == "max_evals") config.max_evals = parse_int(key, value);
  else if (key == "nm_tol") config.nm_tol = parse_double(key, value);
  else if (key == "grid_resolution") config.grid_resolution = parse_int(key, value);
  else if (key == "threads") config.threads = parse_int(key, value);
  else if (key == "out") config.out = value;
  else throw ValidationError("unknown config key '" + key + "'");
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig config;
  std::stringstream stream(text);
  std::string line;
  bool first = true;
  bool embedded = false;
  while (std::getline(stream, line)) {
    if (first) {
      first = false;
      if (trim(line) == kOutputSentinel) {
        embedded = true;
        continue;
      }
    }
    if (embedded) {
      if (line.rfind(kCfgPrefix, 0) == 0) {
        const std::string assignment = trim(line.substr(kCfgPrefix.size()));
        const size_t eq = assignment.find('=');
        if (eq == std::string::npos) {
          throw ValidationError("embedded config: missing '=' in '" + assignment + "'");
        }
        apply_key(config, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
      }
      continue;
    }
    const size_t hash = line.find('#');
    const std::string stripped = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (stripped.empty()) continue;
    const size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("config: expected key=value, got '" + stripped + "'");
    }
    apply_key(config, trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
  }
  return config;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw ValidationError("config file '" + path + "' cannot be opened");
  std::stringstream buffer;
  buffer << file.rdbuf();
  return parse_config_text(buffer.str());
}

std::string canonical_config(const RunConfig& config, bool embeddable) {
  std::ostringstream out;
  out << "hops=" << config.hops << "\n";
  out << "block_duration=" << fmt_double(config.block_duration) << "\n";
  out << "pt_db=" << fmt_double(config.pt_db) << "\n";
  out << "ip_db=" << fmt_double(config.ip_db) << "\n";
  out << "zeta=" << fmt_double(config.zeta) << "\n";
  out << "sigma2=" << fmt_double(config.sigma2) << "\n";
  out << "bandwidth_hz=" << fmt_double(config.bandwidth_hz) << "\n";
  std::vector<double> rates = config.backscatter_rates_bps;
  if (rates.empty() && config.hops >= 1 && config.hops <= 5) {
    rates.assign(static_cast<size_t>(config.hops),
                 deployment_backscatter_rate_bps(config.hops));
  }
  out << "backscatter_rates_bps=" << join_list(rates) << "\n";
  out << "alpha=" << fmt_double(config.alpha) << "\n";
  out << "d0=" << fmt_double(config.d0) << "\n";
  out << "pt_x=" << fmt_double(config.pt_position.x) << "\n";
  out << "pt_y=" << fmt_double(config.pt_position.y) << "\n";
  out << "pr_x=" << fmt_double(config.pr_position.x) << "\n";
  out << "pr_y=" << fmt_double(config.pr_position.y) << "\n";
  out << "source_x=" << fmt_double(config.source_position.x) << "\n";
  out << "source_y=" << fmt_double(config.source_position.y) << "\n";
  out << "dest_x=" << fmt_double(config.destination_position.x) << "\n";
  out << "dest_y=" << fmt_double(config.destination_position.y) << "\n";
  out << "fading=" << (config.fading ? "on" : "off") << "\n";
  out << "seed=" << config.seed << "\n";
  out << "trials=" << config.trials << "\n";
  out << "sweep_kind=" << to_string(config.sweep_kind) << "\n";
  out << "sweep_values=" << join_list(config.resolved_sweep_values()) << "\n";
  out << "restarts=" << config.restarts << "\n";
  out << "max_evals=" << config.max_evals << "\n";
  out << "nm_tol=" << fmt_double(config.nm_tol) << "\n";
  out << "grid_resolution=" << config.grid_resolution << "\n";
  if (!embeddable) {
    out << "threads=" << config.threads << "\n";
    out << "out=" << config.out << "\n";
  }
  return out.str();
}

std::vector<std::string> config_preamble(const RunConfig& config) {
  std::vector<std::string> lines;
  lines.emplace_back(kOutputSentinel);
  std::stringstream body(canonical_config(config, /*embeddable=*/true));
  std::string line;
  while (std::getline(body, line)) {
    lines.push_back(std::string(kCfgPrefix) + line);
  }
  return lines;
}

}  // namespace hbct

#include "pcvx/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace pcvx {

std::string allocator_name(Allocator a) {
  switch (a) {
    case Allocator::kRl: return "rl";
    case Allocator::kExhaustive: return "exhaustive";
    case Allocator::kRandom: return "random";
  }
  return "?";
}

Allocator parse_allocator(const std::string& name) {
  if (name == "rl") return Allocator::kRl;
  if (name == "exhaustive") return Allocator::kExhaustive;
  if (name == "random") return Allocator::kRandom;
  throw std::runtime_error("unknown allocator '" + name + "' (expected rl|exhaustive|random)");
}

namespace {

struct Value {
  enum class Kind { kNumber, kList, kString } kind;
  double number = 0.0;
  std::vector<double> list;
  std::string text;
  int line = 0;
};

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& token, int line) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(token, &used);
  } catch (const std::exception&) {
    throw std::runtime_error("config line " + std::to_string(line) + ": bad number '" + token + "'");
  }
  if (used != token.size())
    throw std::runtime_error("config line " + std::to_string(line) + ": bad number '" + token + "'");
  return value;
}

Value parse_value(std::string raw, int line) {
  Value v;
  v.line = line;
  raw = trim(raw);
  if (raw.empty())
    throw std::runtime_error("config line " + std::to_string(line) + ": missing value");
  if (raw.front() == '"') {
    if (raw.size() < 2 || raw.back() != '"')
      throw std::runtime_error("config line " + std::to_string(line) + ": unterminated string");
    v.kind = Value::Kind::kString;
    v.text = raw.substr(1, raw.size() - 2);
    return v;
  }
  if (raw.front() == '[') {
    if (raw.back() != ']')
      throw std::runtime_error("config line " + std::to_string(line) + ": unterminated list");
    v.kind = Value::Kind::kList;
    std::stringstream ss(raw.substr(1, raw.size() - 2));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      v.list.push_back(parse_number(item, line));
    }
    return v;
  }
  if (std::isdigit(static_cast<unsigned char>(raw.front())) || raw.front() == '-' ||
      raw.front() == '+' || raw.front() == '.') {
    v.kind = Value::Kind::kNumber;
    v.number = parse_number(raw, line);
    return v;
  }
  v.kind = Value::Kind::kString;
  v.text = raw;
  return v;
}

class KeyTable {
 public:
  explicit KeyTable(const std::string& text) {
    std::stringstream ss(text);
    std::string line;
    std::string section;
    int number = 0;
    while (std::getline(ss, line)) {
      ++number;
      const std::size_t hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          throw std::runtime_error("config line " + std::to_string(number) + ": bad section header");
        section = trim(line.substr(1, line.size() - 2));
        if (section.empty())
          throw std::runtime_error("config line " + std::to_string(number) + ": empty section name");
        continue;
      }
      const std::size_t eq = line.find('=');
      if (eq == std::string::npos)
        throw std::runtime_error("config line " + std::to_string(number) + ": expected key = value");
      const std::string key = trim(line.substr(0, eq));
      if (key.empty())
        throw std::runtime_error("config line " + std::to_string(number) + ": empty key");
      const std::string full = section.empty() ? key : section + "." + key;
      if (values_.count(full))
        throw std::runtime_error("config line " + std::to_string(number) + ": duplicate key '" +
                                 full + "'");
      values_.emplace(full, parse_value(line.substr(eq + 1), number));
    }
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  double number(const std::string& key, double fallback) {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    consumed_.insert(key);
    if (it->second.kind != Value::Kind::kNumber)
      throw std::runtime_error("config line " + std::to_string(it->second.line) + ": '" + key +
                               "' must be a number");
    return it->second.number;
  }

  int integer(const std::string& key, int fallback) {
    const double v = number(key, fallback);
    if (std::abs(v - std::round(v)) > 1e-9)
      throw std::runtime_error("config: '" + key + "' must be an integer");
    return static_cast<int>(std::llround(v));
  }

  std::uint64_t unsigned64(const std::string& key, std::uint64_t fallback) {
    const double v = number(key, static_cast<double>(fallback));
    if (v < 0.0 || std::abs(v - std::round(v)) > 1e-9)
      throw std::runtime_error("config: '" + key + "' must be a nonnegative integer");
    return static_cast<std::uint64_t>(std::llround(v));
  }

  std::vector<double> list(const std::string& key, std::vector<double> fallback) {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    consumed_.insert(key);
    if (it->second.kind != Value::Kind::kList)
      throw std::runtime_error("config line " + std::to_string(it->second.line) + ": '" + key +
                               "' must be a [..] list");
    return it->second.list;
  }

  std::string text(const std::string& key, std::string fallback) {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    consumed_.insert(key);
    if (it->second.kind != Value::Kind::kString)
      throw std::runtime_error("config line " + std::to_string(it->second.line) + ": '" + key +
                               "' must be a string");
    return it->second.text;
  }

  void reject_unknown() const {
    for (const auto& [key, value] : values_)
      if (!consumed_.count(key))
        throw std::runtime_error("config line " + std::to_string(value.line) + ": unknown key '" +
                                 key + "'");
  }

 private:
  std::map<std::string, Value> values_;
  std::set<std::string> consumed_;
};

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  KeyTable keys(text);
  ExperimentConfig cfg;

  EnvConfig& env = cfg.env;
  env.num_v2n = keys.integer("env.num_v2n", env.num_v2n);
  env.num_platoons = keys.integer("env.num_platoons", env.num_platoons);
  env.members_per_platoon = keys.integer("env.members_per_platoon", env.members_per_platoon);
  env.bandwidth_hz = keys.number("env.bandwidth_hz", env.bandwidth_hz);
  env.v2n_power_dbm = keys.number("env.v2n_power_dbm", env.v2n_power_dbm);
  env.power_levels_dbm = keys.list("env.power_levels_dbm", env.power_levels_dbm);
  env.bs_noise_figure_db = keys.number("env.bs_noise_figure_db", env.bs_noise_figure_db);
  env.vehicle_noise_dbm = keys.number("env.vehicle_noise_dbm", env.vehicle_noise_dbm);
  env.latency_ms = keys.number("env.latency_ms", env.latency_ms);
  env.step_ms = keys.number("env.step_ms", env.step_ms);
  env.payload_bits = 8.0 * keys.number("env.payload_bytes", env.payload_bits / 8.0);

  ChannelConfig& ch = env.channel;
  ch.carrier_ghz = keys.number("channel.carrier_ghz", ch.carrier_ghz);
  ch.v2n_shadow_std_db = keys.number("channel.v2n_shadow_std_db", ch.v2n_shadow_std_db);
  ch.v2v_shadow_std_db = keys.number("channel.v2v_shadow_std_db", ch.v2v_shadow_std_db);
  ch.v2n_min_distance_m = keys.number("channel.v2n_min_distance_m", ch.v2n_min_distance_m);
  ch.v2v_min_distance_m = keys.number("channel.v2v_min_distance_m", ch.v2v_min_distance_m);
  ch.road_length_m = keys.number("channel.road_length_m", ch.road_length_m);
  ch.lane_count = keys.integer("channel.lane_count", ch.lane_count);
  ch.lane_width_m = keys.number("channel.lane_width_m", ch.lane_width_m);
  ch.road_offset_m = keys.number("channel.road_offset_m", ch.road_offset_m);
  ch.vehicle_length_m = keys.number("channel.vehicle_length_m", ch.vehicle_length_m);
  ch.vehicle_gap_m = keys.number("channel.vehicle_gap_m", ch.vehicle_gap_m);
  ch.speed_min_kmh = keys.number("channel.speed_min_kmh", ch.speed_min_kmh);
  ch.speed_max_kmh = keys.number("channel.speed_max_kmh", ch.speed_max_kmh);

  RewardWeights& rw = cfg.reward;
  rw.w_c = keys.number("reward.w_c", rw.w_c);
  rw.w_d = keys.number("reward.w_d", rw.w_d);
  rw.w_t = keys.number("reward.w_t", rw.w_t);
  rw.fixed_utility = keys.number("reward.fixed_utility", rw.fixed_utility);

  TrainConfig& tr = cfg.train;
  tr.episodes = keys.integer("train.episodes", tr.episodes);
  tr.gamma = keys.number("train.gamma", tr.gamma);
  tr.learning_rate = keys.number("train.learning_rate", tr.learning_rate);
  tr.rmsprop_decay = keys.number("train.rmsprop_decay", tr.rmsprop_decay);
  tr.batch_size = keys.integer("train.batch_size", tr.batch_size);
  tr.buffer_capacity = keys.unsigned64("train.buffer_capacity", tr.buffer_capacity);
  tr.target_sync_period = keys.integer("train.target_sync_period", tr.target_sync_period);
  tr.updates_per_episode = keys.integer("train.updates_per_episode", tr.updates_per_episode);
  tr.reward_scale = keys.number("train.reward_scale", tr.reward_scale);
  {
    std::vector<double> hidden(tr.hidden_sizes.begin(), tr.hidden_sizes.end());
    hidden = keys.list("train.hidden_sizes", hidden);
    tr.hidden_sizes.clear();
    for (double h : hidden) {
      if (h < 1.0 || std::abs(h - std::round(h)) > 1e-9)
        throw std::runtime_error("config: train.hidden_sizes must be positive integers");
      tr.hidden_sizes.push_back(static_cast<int>(std::llround(h)));
    }
  }
  tr.epsilon.start = keys.number("train.epsilon_start", tr.epsilon.start);
  tr.epsilon.end = keys.number("train.epsilon_end", tr.epsilon.end);
  tr.epsilon.decay_fraction = keys.number("train.epsilon_decay_fraction", tr.epsilon.decay_fraction);

  cfg.eval_episodes = keys.integer("eval.episodes", cfg.eval_episodes);
  cfg.payload_sweep_bytes = keys.list("eval.payload_sweep_bytes", cfg.payload_sweep_bytes);
  cfg.exhaustive_cap = keys.unsigned64("eval.exhaustive_cap", cfg.exhaustive_cap);

  cfg.seed = keys.unsigned64("experiment.seed", cfg.seed);
  cfg.output_dir = keys.text("experiment.output_dir", cfg.output_dir);
  {
    std::string names;
    for (Allocator a : cfg.allocators) names += (names.empty() ? "" : ",") + allocator_name(a);
    names = keys.text("experiment.allocators", names);
    cfg.allocators.clear();
    std::stringstream ss(names);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) cfg.allocators.push_back(parse_allocator(item));
    }
    if (cfg.allocators.empty()) throw std::runtime_error("config: empty allocator list");
  }

  keys.reject_unknown();
  cfg.env.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

std::string default_config_text() {
  const ExperimentConfig cfg;
  std::ostringstream out;
  out.precision(10);
  auto list = [](const std::vector<double>& v) {
    std::ostringstream s;
    s << "[";
    for (std::size_t i = 0; i < v.size(); ++i) s << (i ? ", " : "") << v[i];
    s << "]";
    return s.str();
  };
  out << "# pcvx experiment configuration (all values shown are the defaults)\n\n";
  out << "[env]\n";
  out << "num_v2n = " << cfg.env.num_v2n << "              # M: V2N links / sub-bands\n";
  out << "num_platoons = " << cfg.env.num_platoons << "\n";
  out << "members_per_platoon = " << cfg.env.members_per_platoon << "\n";
  out << "bandwidth_hz = " << cfg.env.bandwidth_hz << "\n";
  out << "v2n_power_dbm = " << cfg.env.v2n_power_dbm << "\n";
  out << "power_levels_dbm = " << list(cfg.env.power_levels_dbm) << "\n";
  out << "bs_noise_figure_db = " << cfg.env.bs_noise_figure_db << "\n";
  out << "vehicle_noise_dbm = " << cfg.env.vehicle_noise_dbm << "\n";
  out << "latency_ms = " << cfg.env.latency_ms << "\n";
  out << "step_ms = " << cfg.env.step_ms << "\n";
  out << "payload_bytes = " << cfg.env.payload_bits / 8.0 << "   # training payload\n";
  out << "\n[channel]\n";
  out << "carrier_ghz = " << cfg.env.channel.carrier_ghz << "\n";
  out << "v2n_shadow_std_db = " << cfg.env.channel.v2n_shadow_std_db << "\n";
  out << "v2v_shadow_std_db = " << cfg.env.channel.v2v_shadow_std_db << "\n";
  out << "v2n_min_distance_m = " << cfg.env.channel.v2n_min_distance_m << "\n";
  out << "v2v_min_distance_m = " << cfg.env.channel.v2v_min_distance_m << "\n";
  out << "road_length_m = " << cfg.env.channel.road_length_m << "\n";
  out << "lane_count = " << cfg.env.channel.lane_count << "\n";
  out << "lane_width_m = " << cfg.env.channel.lane_width_m << "\n";
  out << "road_offset_m = " << cfg.env.channel.road_offset_m << "\n";
  out << "vehicle_length_m = " << cfg.env.channel.vehicle_length_m << "\n";
  out << "vehicle_gap_m = " << cfg.env.channel.vehicle_gap_m << "\n";
  out << "speed_min_kmh = " << cfg.env.channel.speed_min_kmh << "\n";
  out << "speed_max_kmh = " << cfg.env.channel.speed_max_kmh << "\n";
  out << "\n[reward]\n";
  out << "w_c = " << cfg.reward.w_c << "\n";
  out << "w_d = " << cfg.reward.w_d << "\n";
  out << "w_t = " << cfg.reward.w_t << "\n";
  out << "fixed_utility = " << cfg.reward.fixed_utility << "\n";
  out << "\n[train]\n";
  out << "episodes = " << cfg.train.episodes << "\n";
  out << "gamma = " << cfg.train.gamma << "\n";
  out << "learning_rate = " << cfg.train.learning_rate << "\n";
  out << "rmsprop_decay = " << cfg.train.rmsprop_decay << "\n";
  out << "batch_size = " << cfg.train.batch_size << "\n";
  out << "buffer_capacity = " << cfg.train.buffer_capacity << "\n";
  out << "target_sync_period = " << cfg.train.target_sync_period << "\n";
  out << "updates_per_episode = " << cfg.train.updates_per_episode << "\n";
  out << "reward_scale = " << cfg.train.reward_scale << "\n";
  {
    std::vector<double> hidden(cfg.train.hidden_sizes.begin(), cfg.train.hidden_sizes.end());
    out << "hidden_sizes = " << list(hidden) << "\n";
  }
  out << "epsilon_start = " << cfg.train.epsilon.start << "\n";
  out << "epsilon_end = " << cfg.train.epsilon.end << "\n";
  out << "epsilon_decay_fraction = " << cfg.train.epsilon.decay_fraction << "\n";
  out << "\n[eval]\n";
  out << "episodes = " << cfg.eval_episodes << "\n";
  out << "payload_sweep_bytes = " << list(cfg.payload_sweep_bytes) << "\n";
  out << "exhaustive_cap = " << cfg.exhaustive_cap << "\n";
  out << "\n[experiment]\n";
  out << "seed = " << cfg.seed << "\n";
  out << "output_dir = \"" << cfg.output_dir << "\"\n";
  {
    std::string names;
    for (Allocator a : cfg.allocators) names += (names.empty() ? "" : ",") + allocator_name(a);
    out << "allocators = \"" << names << "\"\n";
  }
  return out.str();
}

}  // namespace pcvx

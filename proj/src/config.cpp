#include "pa3c/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "pa3c/errors.hpp"

namespace pa3c {

namespace {

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("invalid value '" + text + "' for " + key);
  }
  return value;
}

double parse_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid value '" + text + "' for " + key);
  }
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("invalid boolean '" + text + "' for " + key);
}

struct Field {
  std::function<void(RunConfig&, const std::string& key, const std::string& value)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename T>
Field int_field(T RunConfig::*member) {
  return {[member](RunConfig& c, const std::string& k, const std::string& v) { c.*member = parse_number<T>(k, v); },
          [member](const RunConfig& c) { return std::to_string(c.*member); }};
}

template <typename Owner, typename T>
Field nested_int(Owner RunConfig::*owner, T Owner::*member) {
  return {[=](RunConfig& c, const std::string& k, const std::string& v) { (c.*owner).*member = parse_number<T>(k, v); },
          [=](const RunConfig& c) { return std::to_string((c.*owner).*member); }};
}

template <typename Owner>
Field nested_double(Owner RunConfig::*owner, double Owner::*member) {
  return {[=](RunConfig& c, const std::string& k, const std::string& v) { (c.*owner).*member = parse_double(k, v); },
          [=](const RunConfig& c) { return format_double((c.*owner).*member); }};
}

// section.key -> accessor, in file order.
const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = [] {
    std::vector<std::pair<std::string, Field>> t;
    t.emplace_back("run.seed", int_field(&RunConfig::seed));
    t.emplace_back("run.workers", int_field(&RunConfig::workers));
    t.emplace_back("run.situations",
                   Field{[](RunConfig& c, const std::string&, const std::string& v) {
                           try {
                             c.situations = SituationConfig::from_name(v);
                           } catch (const std::invalid_argument& e) {
                             throw ConfigError(e.what());
                           }
                         },
                         [](const RunConfig& c) { return std::string(c.situations.label()); }});
    t.emplace_back("run.encoding",
                   Field{[](RunConfig& c, const std::string&, const std::string& v) {
                           try {
                             c.encoding = parse_encoding(v);
                           } catch (const std::invalid_argument& e) {
                             throw ConfigError(e.what());
                           }
                         },
                         [](const RunConfig& c) { return std::string(to_string(c.encoding)); }});
    t.emplace_back("run.output_dir",
                   Field{[](RunConfig& c, const std::string&, const std::string& v) { c.output_dir = v; },
                         [](const RunConfig& c) { return c.output_dir; }});
    t.emplace_back("run.checkpoint_interval", int_field(&RunConfig::checkpoint_interval));
    t.emplace_back("run.time_limit_seconds",
                   Field{[](RunConfig& c, const std::string& k, const std::string& v) {
                           c.time_limit_seconds = parse_double(k, v);
                         },
                         [](const RunConfig& c) { return format_double(c.time_limit_seconds); }});
    t.emplace_back("run.cpu_limit_seconds",
                   Field{[](RunConfig& c, const std::string& k, const std::string& v) {
                           c.cpu_limit_seconds = parse_double(k, v);
                         },
                         [](const RunConfig& c) { return format_double(c.cpu_limit_seconds); }});

    t.emplace_back("generation.min_rooms", nested_int(&RunConfig::generation, &GenerationConfig::min_rooms));
    t.emplace_back("generation.max_rooms", nested_int(&RunConfig::generation, &GenerationConfig::max_rooms));
    t.emplace_back("generation.room_probability",
                   nested_double(&RunConfig::generation, &GenerationConfig::room_probability));
    t.emplace_back("generation.min_room_height",
                   nested_int(&RunConfig::generation, &GenerationConfig::min_room_height));
    t.emplace_back("generation.min_room_width",
                   nested_int(&RunConfig::generation, &GenerationConfig::min_room_width));
    t.emplace_back("generation.extra_corridor_probability",
                   nested_double(&RunConfig::generation, &GenerationConfig::extra_corridor_probability));
    t.emplace_back("generation.auto_descend",
                   Field{[](RunConfig& c, const std::string& k, const std::string& v) {
                           c.generation.auto_descend = parse_bool(k, v);
                         },
                         [](const RunConfig& c) {
                           return std::string(c.generation.auto_descend ? "true" : "false");
                         }});

    t.emplace_back("a3c.gamma", nested_double(&RunConfig::hp, &Hyperparams::gamma));
    t.emplace_back("a3c.entropy_beta", nested_double(&RunConfig::hp, &Hyperparams::entropy_beta));
    t.emplace_back("a3c.t_max", nested_int(&RunConfig::hp, &Hyperparams::t_max));
    t.emplace_back("a3c.initial_lr", nested_double(&RunConfig::hp, &Hyperparams::initial_lr));
    t.emplace_back("a3c.max_global_steps", nested_int(&RunConfig::hp, &Hyperparams::max_global_steps));
    t.emplace_back("a3c.rms_decay", nested_double(&RunConfig::hp, &Hyperparams::rms_decay));
    t.emplace_back("a3c.rms_momentum", nested_double(&RunConfig::hp, &Hyperparams::rms_momentum));
    t.emplace_back("a3c.rms_epsilon", nested_double(&RunConfig::hp, &Hyperparams::rms_epsilon));
    t.emplace_back("a3c.clip_norm", nested_double(&RunConfig::hp, &Hyperparams::clip_norm));
    t.emplace_back("a3c.value_weight", nested_double(&RunConfig::hp, &Hyperparams::value_weight));

    t.emplace_back("network.conv1_filters", int_field(&RunConfig::conv1_filters));
    t.emplace_back("network.conv2_filters", int_field(&RunConfig::conv2_filters));
    t.emplace_back("network.dense_units", int_field(&RunConfig::dense_units));
    t.emplace_back("network.lstm_units", int_field(&RunConfig::lstm_units));

    t.emplace_back("rewards.door_use", nested_double(&RunConfig::rewards, &RewardConfig::door_use));
    t.emplace_back("rewards.door_discovery",
                   nested_double(&RunConfig::rewards, &RewardConfig::door_discovery));
    t.emplace_back("rewards.descend", nested_double(&RunConfig::rewards, &RewardConfig::descend));
    t.emplace_back("rewards.blocked", nested_double(&RunConfig::rewards, &RewardConfig::blocked));

    t.emplace_back("eval.episodes", int_field(&RunConfig::eval_episodes));
    t.emplace_back("eval.argmax",
                   Field{[](RunConfig& c, const std::string& k, const std::string& v) {
                           c.eval_argmax = parse_bool(k, v);
                         },
                         [](const RunConfig& c) {
                           return std::string(c.eval_argmax ? "true" : "false");
                         }});
    return t;
  }();
  return table;
}

const Field& field(const std::string& key) {
  for (const auto& [name, f] : fields()) {
    if (name == key) return f;
  }
  throw ConfigError("unknown config key '" + key + "'");
}

void set_field(RunConfig& config, const std::string& key, const std::string& value) {
  field(key).set(config, key, value);
}

}  // namespace

NetworkSpec RunConfig::network_spec() const {
  NetworkSpec spec = NetworkSpec::standard(encoding);
  spec.conv1_filters = conv1_filters;
  spec.conv2_filters = conv2_filters;
  spec.dense_units = dense_units;
  spec.lstm_units = lstm_units;
  return spec;
}

TrainConfig RunConfig::train_config() const {
  TrainConfig t;
  t.situations = situations;
  t.encoding = encoding;
  t.network = network_spec();
  t.hp = hp;
  t.generation = generation;
  t.rewards = rewards;
  t.workers = workers;
  t.seed = seed;
  t.checkpoint_interval = checkpoint_interval;
  t.time_limit_seconds = time_limit_seconds;
  t.cpu_limit_seconds = cpu_limit_seconds;
  t.output_dir = output_dir;
  return t;
}

void RunConfig::validate() const {
  train_config().validate();
  for (int v : {conv1_filters, conv2_filters, dense_units, lstm_units}) {
    if (v < 1) throw ConfigError("network widths must be positive");
  }
  if (eval_episodes < 1) throw ConfigError("eval.episodes must be positive");
}

RunConfig parse_config(std::istream& in, RunConfig base) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax error: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("config key '" + section + "' outside a section");
    for (const auto& [key, value] : body) {
      set_field(base, section + "." + key, value.get_value<std::string>());
    }
  }
  base.validate();
  return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config(in, std::move(base));
}

void write_config(std::ostream& out, const RunConfig& config) {
  std::string current;
  for (const auto& [name, f] : fields()) {
    const auto dot = name.find('.');
    const std::string section = name.substr(0, dot);
    if (section != current) {
      if (!current.empty()) out << '\n';
      out << '[' << section << "]\n";
      current = section;
    }
    out << name.substr(dot + 1) << " = " << f.get(config) << '\n';
  }
}

void save_config(const std::filesystem::path& path, const RunConfig& config) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  write_config(out, config);
}

void apply_override(RunConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override must look like section.key=value");
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  set_field(config, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

}  // namespace pa3c

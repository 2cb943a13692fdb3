#include "fhc/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <system_error>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace fhc {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& text) {
  const std::string s = trim(text);
  T value{};
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || end != s.data() + s.size() || s.empty())
    throw ConfigError("cannot parse '" + text + "' as a number");
  return value;
}

template <typename T>
std::vector<T> parse_list(const std::string& text) {
  std::vector<T> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(parse_number<T>(item));
  }
  return out;
}

std::string format(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

template <typename T>
std::string format(T v) requires std::is_integral_v<T> {
  return std::to_string(v);
}

template <typename T>
std::string format_list(std::span<const T> values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? ", " : "") + format(values[i]);
  return out;
}

struct Field {
  std::string section;
  std::string key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename Access>
Field scalar(std::string section, std::string key, Access access) {
  return {std::move(section), std::move(key),
          [access](RunConfig& c, const std::string& v) {
            auto& ref = access(c);
            ref = parse_number<std::remove_reference_t<decltype(ref)>>(v);
          },
          [access](const RunConfig& c) { return format(access(c)); }};
}

Field set_field(std::string key, int which) {
  return {"sets", key,
          [which](RunConfig& c, const std::string& v) {
            const auto& s = c.env.sets;
            std::vector<int> q(s.modulation().begin(), s.modulation().end());
            std::vector<int> b(s.bitwidth().begin(), s.bitwidth().end());
            std::vector<int> r(s.granularity().begin(), s.granularity().end());
            (which == 0 ? q : which == 1 ? b : r) = parse_list<int>(v);
            try {
              c.env.sets = ConfigSets(q, b, r);
            } catch (const std::invalid_argument& e) {
              throw ConfigError(e.what());
            }
          },
          [which](const RunConfig& c) {
            const auto& s = c.env.sets;
            return format_list(which == 0 ? s.modulation() : which == 1 ? s.bitwidth() : s.granularity());
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back(scalar("run", "seed", [](auto& c) -> auto& { return c.seed; }));
    f.push_back(scalar("run", "checkpoint_every", [](auto& c) -> auto& { return c.checkpoint_every; }));

    f.push_back(scalar("system", "bandwidth_hz", [](auto& c) -> auto& { return c.env.system.bandwidth_hz; }));
    f.push_back(scalar("system", "scs_index_mu", [](auto& c) -> auto& { return c.env.system.scs_index_mu; }));
    f.push_back(scalar("system", "n_prb_max", [](auto& c) -> auto& { return c.env.system.n_prb_max; }));
    f.push_back(scalar("system", "n_re_per_prb_slot", [](auto& c) -> auto& { return c.env.system.n_re_per_prb_slot; }));
    f.push_back(scalar("system", "n_ant", [](auto& c) -> auto& { return c.env.system.n_ant; }));
    f.push_back(scalar("system", "n_layers", [](auto& c) -> auto& { return c.env.system.n_layers; }));
    f.push_back(scalar("system", "t_slot_s", [](auto& c) -> auto& { return c.env.system.t_slot_s; }));
    f.push_back(scalar("system", "t_symb_s", [](auto& c) -> auto& { return c.env.system.t_symb_s; }));
    f.push_back(scalar("system", "c_fh_bps", [](auto& c) -> auto& { return c.env.system.c_fh_bps; }));
    f.push_back(scalar("system", "k_cells", [](auto& c) -> auto& { return c.env.system.k_cells; }));

    f.push_back(set_field("q", 0));
    f.push_back(set_field("b_w", 1));
    f.push_back(set_field("r_w", 2));

    f.push_back(scalar("traffic", "mean_prb", [](auto& c) -> auto& { return c.env.traffic.mean_prb; }));
    f.push_back(scalar("traffic", "sigma_prb", [](auto& c) -> auto& { return c.env.traffic.sigma_prb; }));

    f.push_back(scalar("latency", "alpha_burst", [](auto& c) -> auto& { return c.env.latency.alpha_burst; }));
    f.push_back(scalar("latency", "d_proc_s", [](auto& c) -> auto& { return c.env.latency.d_proc_s; }));
    f.push_back(scalar("latency", "jitter_max_s", [](auto& c) -> auto& { return c.env.latency.jitter_max_s; }));

    f.push_back(scalar("reward", "lambda", [](auto& c) -> auto& { return c.env.reward.lambda; }));
    f.push_back(scalar("reward", "d", [](auto& c) -> auto& { return c.env.reward.d; }));
    f.push_back(scalar("reward", "tau_max_s", [](auto& c) -> auto& { return c.env.reward.tau_max_s; }));
    f.push_back(scalar("reward", "delta", [](auto& c) -> auto& { return c.env.reward.delta; }));

    f.push_back(scalar("env", "decision_interval", [](auto& c) -> auto& { return c.env.decision_interval; }));
    f.push_back(scalar("env", "episode_length", [](auto& c) -> auto& { return c.env.episode_length; }));

    f.push_back({"network", "hidden",
                 [](RunConfig& c, const std::string& v) { c.net.hidden_dims = parse_list<std::size_t>(v); },
                 [](const RunConfig& c) { return format_list(std::span<const std::size_t>(c.net.hidden_dims)); }});

    f.push_back(scalar("train", "gamma", [](auto& c) -> auto& { return c.train.gamma; }));
    f.push_back(scalar("train", "total_steps", [](auto& c) -> auto& { return c.train.total_steps; }));
    f.push_back(scalar("train", "batch_size", [](auto& c) -> auto& { return c.train.batch_size; }));
    f.push_back(scalar("train", "warmup", [](auto& c) -> auto& { return c.train.warmup; }));
    f.push_back(scalar("train", "updates_per_step", [](auto& c) -> auto& { return c.train.updates_per_step; }));
    f.push_back(scalar("train", "kappa", [](auto& c) -> auto& { return c.train.kappa; }));
    f.push_back(scalar("train", "eval_every", [](auto& c) -> auto& { return c.train.eval_every; }));
    f.push_back({"train", "optimizer",
                 [](RunConfig& c, const std::string& v) {
                   const std::string s = trim(v);
                   if (s == "adam") c.train.optimizer.kind = OptimizerKind::adam;
                   else if (s == "sgd") c.train.optimizer.kind = OptimizerKind::sgd;
                   else throw ConfigError("optimizer must be adam or sgd, got '" + v + "'");
                 },
                 [](const RunConfig& c) {
                   return std::string(c.train.optimizer.kind == OptimizerKind::adam ? "adam" : "sgd");
                 }});
    f.push_back(scalar("train", "learning_rate", [](auto& c) -> auto& { return c.train.optimizer.learning_rate; }));
    f.push_back(scalar("train", "adam_beta1", [](auto& c) -> auto& { return c.train.optimizer.beta1; }));
    f.push_back(scalar("train", "adam_beta2", [](auto& c) -> auto& { return c.train.optimizer.beta2; }));
    f.push_back(scalar("train", "adam_epsilon", [](auto& c) -> auto& { return c.train.optimizer.epsilon; }));
    f.push_back(scalar("train", "temperature", [](auto& c) -> auto& { return c.train.exploration.temperature; }));
    f.push_back(scalar("train", "temperature_decay", [](auto& c) -> auto& { return c.train.exploration.decay; }));
    f.push_back(scalar("train", "temperature_floor", [](auto& c) -> auto& { return c.train.exploration.floor; }));
    f.push_back(scalar("train", "replay_capacity", [](auto& c) -> auto& { return c.train.replay.capacity; }));
    f.push_back(scalar("train", "per_alpha", [](auto& c) -> auto& { return c.train.replay.alpha; }));
    f.push_back(scalar("train", "per_beta_start", [](auto& c) -> auto& { return c.train.replay.beta_start; }));
    f.push_back(scalar("train", "per_beta_end", [](auto& c) -> auto& { return c.train.replay.beta_end; }));
    f.push_back(scalar("train", "per_eps", [](auto& c) -> auto& { return c.train.replay.priority_eps; }));

    f.push_back(scalar("eval", "episodes", [](auto& c) -> auto& { return c.eval.episodes; }));
    f.push_back(scalar("eval", "episode_length", [](auto& c) -> auto& { return c.eval.episode_length; }));
    f.push_back(scalar("eval", "steady_window", [](auto& c) -> auto& { return c.eval.steady_window; }));
    f.push_back({"eval", "network",
                 [](RunConfig& c, const std::string& v) {
                   const std::string s = trim(v);
                   if (s == "target") c.eval.network = EvalNetwork::target;
                   else if (s == "online") c.eval.network = EvalNetwork::online;
                   else throw ConfigError("eval.network must be target or online, got '" + v + "'");
                 },
                 [](const RunConfig& c) {
                   return std::string(c.eval.network == EvalNetwork::target ? "target" : "online");
                 }});

    f.push_back({"sweep", "mean_prb",
                 [](RunConfig& c, const std::string& v) { c.sweep_mean_prb = parse_list<double>(v); },
                 [](const RunConfig& c) { return format_list(std::span<const double>(c.sweep_mean_prb)); }});
    return f;
  }();
  return table;
}

const Field& find_field(const std::string& section, const std::string& key) {
  for (const auto& f : fields())
    if (f.section == section && f.key == key) return f;
  throw ConfigError("unknown key '" + section + "." + key + "'");
}

void set_value(RunConfig& cfg, const std::string& section, const std::string& key, const std::string& value) {
  const Field& f = find_field(section, key);
  try {
    f.set(cfg, value);
  } catch (const ConfigError& e) {
    throw ConfigError(section + "." + key + ": " + e.what());
  }
}

void apply_overrides(RunConfig& cfg, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    const auto dot = o.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq)
      throw ConfigError("override '" + o + "' is not of the form section.key=value");
    set_value(cfg, trim(o.substr(0, dot)), trim(o.substr(dot + 1, eq - dot - 1)), o.substr(eq + 1));
  }
}

}  // namespace

DerivedSeeds derive_seeds(std::uint64_t seed) {
  auto at = [seed](std::uint64_t stream) { return make_stream(seed, 100 + stream)(); };
  return {at(1), at(2), at(3), at(4), at(5), at(6)};
}

void resolve(RunConfig& cfg) {
  const DerivedSeeds s = derive_seeds(cfg.seed);
  cfg.env.traffic.seed = s.traffic;
  cfg.env.latency.seed = s.latency;
  cfg.net.init_seed = s.init;
  cfg.train.seed = s.train;
  cfg.env.traffic.n_prb_max = cfg.env.system.n_prb_max;
  cfg.env.reward.gamma = cfg.train.gamma;
  if (cfg.env.system.k_cells > 0)
    cfg.net.input_dim = kFeaturesPerCell * static_cast<std::size_t>(cfg.env.system.k_cells);
  cfg.net.output_dim = kDeltaCount;
  try {
    cfg.env.validate();
    cfg.net.validate();
    cfg.train.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (cfg.eval.episode_length <= 0) throw ConfigError("eval.episode_length must be positive");
  for (double m : cfg.sweep_mean_prb)
    if (!(m > 0 && m <= cfg.env.system.n_prb_max))
      throw ConfigError("sweep.mean_prb entries must lie in (0, n_prb_max]");
}

EnvConfig evaluation_env(const RunConfig& cfg) {
  const DerivedSeeds s = derive_seeds(cfg.seed);
  EnvConfig env = cfg.env;
  env.traffic.seed = s.eval_traffic;
  env.latency.seed = s.eval_latency;
  env.episode_length = cfg.eval.episode_length;
  return env;
}

RunConfig parse_config(std::istream& in, const std::string& source, const std::vector<std::string>& overrides) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(source + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  RunConfig cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ConfigError(source + ": key '" + section + "' outside a section");
    for (const auto& [key, value] : body) {
      try {
        set_value(cfg, section, key, value.data());
      } catch (const ConfigError& e) {
        throw ConfigError(source + ": " + e.what());
      }
    }
  }
  apply_overrides(cfg, overrides);
  resolve(cfg);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config(in, path.string(), overrides);
}

RunConfig default_config(const std::vector<std::string>& overrides) {
  std::istringstream empty;
  return parse_config(empty, "<defaults>", overrides);
}

std::string manifest_text(const RunConfig& cfg, const std::vector<std::string>& overrides) {
  std::ostringstream out;
  out << "# fhc run manifest\n";
  for (const auto& o : overrides) out << "# override: " << o << "\n";
  const DerivedSeeds s = derive_seeds(cfg.seed);
  out << "# derived seeds: traffic=" << s.traffic << " latency=" << s.latency << " init=" << s.init
      << " train=" << s.train << " eval_traffic=" << s.eval_traffic << " eval_latency=" << s.eval_latency
      << "\n";
  std::string section;
  for (const auto& f : fields()) {
    if (f.section != section) {
      out << (section.empty() ? "" : "\n") << "[" << f.section << "]\n";
      section = f.section;
    }
    out << f.key << " = " << f.get(cfg) << "\n";
  }
  return out.str();
}

}  // namespace fhc

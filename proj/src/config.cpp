#include "sentrack/config.hpp"

#include <boost/algorithm/string/trim.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <functional>

#include "sentrack/error.hpp"

namespace sentrack {

namespace {

double to_double(const std::string& key, const std::string& v) {
  double out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ValidationError("config key " + key + ": expected a number, got '" + v + "'");
  return out;
}

template <class Int>
Int to_int(const std::string& key, const std::string& v) {
  Int out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ValidationError("config key " + key + ": expected an integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  throw ValidationError("config key " + key + ": expected true or false, got '" + v + "'");
}

using Setter = std::function<void(Settings&, const std::string& key, const std::string& value)>;

template <class F>
Setter dbl(F field) {
  return [field](Settings& s, const std::string& k, const std::string& v) { field(s) = to_double(k, v); };
}
template <class F>
Setter integer(F field) {
  return [field](Settings& s, const std::string& k, const std::string& v) { field(s) = to_int<int>(k, v); };
}
template <class F>
Setter flag(F field) {
  return [field](Settings& s, const std::string& k, const std::string& v) { field(s) = to_bool(k, v); };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto c = [](Settings& s) -> Constants& { return s.tracker.constants; };
    t["constants.xBoundary"] = dbl([c](Settings& s) -> double& { return c(s).x_boundary; });
    t["constants.nextTo"] = dbl([c](Settings& s) -> double& { return c(s).next_to; });
    t["constants.deltaStatic"] = dbl([c](Settings& s) -> double& { return c(s).delta_static; });
    t["constants.deltaJump"] = dbl([c](Settings& s) -> double& { return c(s).delta_jump; });
    t["constants.deltaQuick"] = dbl([c](Settings& s) -> double& { return c(s).delta_quick; });
    t["constants.deltaSlow"] = dbl([c](Settings& s) -> double& { return c(s).delta_slow; });
    t["constants.deltaClosing"] = dbl([c](Settings& s) -> double& { return c(s).delta_closing; });
    t["constants.deltaDirection"] = dbl([c](Settings& s) -> double& { return c(s).delta_direction; });
    t["constants.deltaHue"] = dbl([c](Settings& s) -> double& { return c(s).delta_hue; });
    t["constants.carry_horizontal"] = flag([c](Settings& s) -> bool& { return c(s).carry_horizontal; });

    t["tracker.top_k"] = integer([](Settings& s) -> int& { return s.tracker.top_k; });
    t["tracker.mu_f"] = dbl([](Settings& s) -> double& { return s.tracker.mu_f; });
    t["tracker.s_f"] = dbl([](Settings& s) -> double& { return s.tracker.s_f; });
    t["tracker.mu_g"] = dbl([](Settings& s) -> double& { return s.tracker.mu_g; });
    t["tracker.s_g"] = dbl([](Settings& s) -> double& { return s.tracker.s_g; });
    t["tracker.distinct_detections"] = flag([](Settings& s) -> bool& { return s.tracker.distinct_detections; });

    t["generation.beam_width"] = integer([](Settings& s) -> int& { return s.generation.beam_width; });
    t["generation.contraction_threshold"] =
        dbl([](Settings& s) -> double& { return s.generation.contraction_threshold; });
    t["generation.max_words"] = integer([](Settings& s) -> int& { return s.generation.max_words; });
    t["generation.np_recursion"] = flag([](Settings& s) -> bool& { return s.generation.np_recursion; });

    t["noise.box_jitter"] = dbl([](Settings& s) -> double& { return s.noise.box_jitter; });
    t["noise.score_sigma"] = dbl([](Settings& s) -> double& { return s.noise.score_sigma; });
    t["noise.fp_rate"] = dbl([](Settings& s) -> double& { return s.noise.fp_rate; });
    t["noise.misclass_rate"] = dbl([](Settings& s) -> double& { return s.noise.misclass_rate; });
    t["noise.hue_jitter"] = dbl([](Settings& s) -> double& { return s.noise.hue_jitter; });

    t["run.seed"] = [](Settings& s, const std::string& k, const std::string& v) {
      s.seed = to_int<std::uint64_t>(k, v);
    };
    t["run.jobs"] = integer([](Settings& s) -> int& { return s.jobs; });
    t["run.folds"] = integer([](Settings& s) -> int& { return s.folds; });
    t["run.lexicon"] = [](Settings& s, const std::string&, const std::string& v) { s.lexicon = v; };
    t["run.overlay"] = [](Settings& s, const std::string&, const std::string& v) {
      s.overlay = v == "off" ? std::string() : v;
    };
    return t;
  }();
  return table;
}

}  // namespace

ConfigMap read_config_file(const std::filesystem::path& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  ConfigMap out;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ParseError("config " + path.string() + ": key '" + section + "' outside a section");
    for (const auto& [key, value] : body) out[section + "." + key] = value.get_value<std::string>();
  }
  return out;
}

std::pair<std::string, std::string> parse_assignment(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0 || text.find('.') > eq)
    throw ValidationError("expected section.key=value, got '" + text + "'");
  return {boost::algorithm::trim_copy(text.substr(0, eq)), boost::algorithm::trim_copy(text.substr(eq + 1))};
}

void apply_config(Settings& s, const ConfigMap& entries) {
  const auto& table = setters();
  for (const auto& [key, value] : entries) {
    auto it = table.find(key);
    if (it == table.end()) throw ValidationError("unknown config key '" + key + "'");
    it->second(s, key, value);
  }
  s.tracker.validate();
  s.generation.validate();
  s.noise.validate();
  if (s.folds < 2) throw ValidationError("run.folds must be >= 2");
  if (s.jobs < 0) throw ValidationError("run.jobs must be >= 0");
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& [k, _] : setters()) out.push_back(k);
  return out;
}

}  // namespace sentrack

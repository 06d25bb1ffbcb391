#include "estrace/config.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <sstream>

#include "estrace/bbob.hpp"
#include "estrace/errors.hpp"
#include "estrace/rng.hpp"
#include "estrace/sampling.hpp"
#include "estrace/variants.hpp"

namespace estrace {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

long long parse_integer(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError("bad integer '" + s + "' for " + what);
  }
}

std::size_t parse_count(const std::string& s, const std::string& what) {
  const auto v = parse_integer(s, what);
  if (v < 0) throw ConfigError(what + " must be non-negative");
  return static_cast<std::size_t>(v);
}

bool parse_bool(const std::string& s, const std::string& what) {
  std::string v = s;
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("bad boolean '" + s + "' for " + what);
}

}  // namespace

std::vector<std::string> parse_string_list(std::string_view text) {
  std::vector<std::string> out;
  std::stringstream in{std::string(text)};
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<int> parse_int_list(std::string_view text) {
  std::vector<int> out;
  for (const auto& item : parse_string_list(text)) {
    const auto dash = item.find('-', 1);
    if (dash != std::string::npos) {
      const auto lo = parse_integer(trim(item.substr(0, dash)), "range"), hi = parse_integer(trim(item.substr(dash + 1)), "range");
      if (hi < lo) throw ConfigError("empty range '" + item + "'");
      for (auto v = lo; v <= hi; ++v) out.push_back(static_cast<int>(v));
    } else {
      out.push_back(static_cast<int>(parse_integer(item, "list")));
    }
  }
  return out;
}

void ExperimentConfig::validate() const {
  if (variants.empty()) throw ConfigError("no variants configured");
  std::set<std::string> seen;
  for (const auto& v : variants) {
    const auto& variant = cma::variant_by_name(v);
    if (!seen.insert(v).second) throw ConfigError("variant listed twice: " + v);
    if (variant.config.base_sampler == cma::BaseSampler::sobol && dim > sampling::Sobol::kMaxDim)
      throw ConfigError("Sobol variant supports at most 21 dimensions");
  }
  if (fids.empty()) throw ConfigError("no fids configured");
  std::set<int> fid_set;
  for (int f : fids) {
    if (f < 1 || f > 24) throw ConfigError("fid out of range: " + std::to_string(f));
    if (!fid_set.insert(f).second) throw ConfigError("fid listed twice: " + std::to_string(f));
  }
  if (dim < 2) throw ConfigError("dim must be >= 2");
  if (runs == 0) throw ConfigError("runs must be positive");
  if (generations == 0) throw ConfigError("generations must be positive");
  if (lengths.empty()) throw ConfigError("no lengths configured");
  for (auto L : lengths)
    if (L < 3 || L > generations) throw ConfigError("length " + std::to_string(L) + " outside [3, generations]");
  if (trees == 0 || boruta_trees == 0) throw ConfigError("tree counts must be positive");
  if (folds < 2) throw ConfigError("folds must be >= 2");
  if (!(boruta_alpha > 0.0 && boruta_alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (catalog != "selected" && catalog != "consensus") throw ConfigError("catalog must be 'selected' or 'consensus'");
}

ExperimentConfig default_config() {
  ExperimentConfig c;
  c.variants = cma::variant_names();
  for (int f = 1; f <= 24; ++f) c.fids.push_back(f);
  return c;
}

void apply_preset(ExperimentConfig& c, std::string_view preset) {
  if (preset == "paper") {
    const auto d = default_config();
    c.runs = d.runs;
    c.fids = d.fids;
  } else if (preset == "desk") {
    c.runs = 20;
    c.fids = {1, 2, 5, 8, 13, 21};
  } else {
    throw ConfigError("unknown preset '" + std::string(preset) + "'");
  }
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig c) {
  if (!std::filesystem::exists(path)) throw ConfigError("config file not found: " + path.string());
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  static const std::set<std::string> known = {
      "experiment.variants", "experiment.fids",  "experiment.dim",         "experiment.runs",
      "experiment.lengths",  "experiment.generations", "experiment.master_seed", "experiment.transform_seed",
      "experiment.output_dir", "experiment.jobs", "learn.trees",           "learn.folds",
      "learn.stratified",    "learn.catalog",    "select.max_iter",        "select.trees",
      "select.alpha",        "groups.mersmann"};
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("key outside a section: " + section);
    for (const auto& [key, value] : body) {
      const auto full = section + "." + key;
      if (!known.count(full)) throw ConfigError("unknown config key: " + full);
      const auto v = trim(value.data());
      if (full == "experiment.variants") c.variants = parse_string_list(v);
      else if (full == "experiment.fids") c.fids = parse_int_list(v);
      else if (full == "experiment.dim") c.dim = static_cast<int>(parse_integer(v, full));
      else if (full == "experiment.runs") c.runs = parse_count(v, full);
      else if (full == "experiment.lengths") {
        c.lengths.clear();
        for (int L : parse_int_list(v)) {
          if (L < 0) throw ConfigError("negative length");
          c.lengths.push_back(static_cast<std::size_t>(L));
        }
      } else if (full == "experiment.generations") c.generations = parse_count(v, full);
      else if (full == "experiment.master_seed") c.master_seed = static_cast<std::uint64_t>(parse_count(v, full));
      else if (full == "experiment.transform_seed") c.transform_seed = static_cast<std::uint64_t>(parse_count(v, full));
      else if (full == "experiment.output_dir") c.output_dir = v;
      else if (full == "experiment.jobs") c.jobs = parse_count(v, full);
      else if (full == "learn.trees") c.trees = parse_count(v, full);
      else if (full == "learn.folds") c.folds = parse_count(v, full);
      else if (full == "learn.stratified") c.stratified = parse_bool(v, full);
      else if (full == "learn.catalog") c.catalog = v;
      else if (full == "select.max_iter") c.boruta_max_iter = parse_count(v, full);
      else if (full == "select.trees") c.boruta_trees = parse_count(v, full);
      else if (full == "select.alpha") {
        try {
          c.boruta_alpha = std::stod(v);
        } catch (const std::logic_error&) {
          throw ConfigError("bad alpha '" + v + "'");
        }
      } else if (full == "groups.mersmann") {
        std::filesystem::path p = v;
        if (p.is_relative()) p = path.parent_path() / p;
        c.mersmann_groups = p;
      }
    }
  }
  return c;
}

void apply_environment(ExperimentConfig& c) {
  if (const char* out = std::getenv("ESTRACE_OUT"); out && *out) c.output_dir = out;
}

std::string describe_generation(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "dim=" << c.dim << ";generations=" << c.generations << ";master_seed=" << c.master_seed
     << ";transform_seed=" << c.transform_seed;
  return os.str();
}

std::string config_digest(const ExperimentConfig& c) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash_string(describe_generation(c))));
  return buf;
}

}  // namespace estrace

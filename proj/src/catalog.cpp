#include <array>
#include <charconv>
#include <string>
#include <utility>

#include "estrace/errors.hpp"
#include "estrace/tsfeat.hpp"

namespace estrace::tsfeat {

namespace {

constexpr std::array<std::string_view, kNumFunctions> kFunctionNames = {
    "absolute_sum_of_changes", "approximate_entropy", "autocorrelation",     "change_quantiles",
    "cid_ce",                  "energy_ratio_by_chunks", "fft_aggregated",   "fft_coefficient",
    "index_mass_quantile",     "mean",                "median",              "minimum",
    "number_crossing_m",       "number_peaks",        "partial_autocorrelation", "quantile",
    "range_count",             "sum_values"};

std::string num(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string num(int v) { return std::to_string(v); }

std::string flag(bool b) { return b ? "true" : "false"; }

std::string_view aggregate_name(Aggregate a) { return a == Aggregate::mean ? "mean" : "var"; }

std::string_view spectrum_name(SpectrumStat s) {
  switch (s) {
    case SpectrumStat::centroid: return "centroid";
    case SpectrumStat::variance: return "variance";
    case SpectrumStat::skew: return "skew";
    case SpectrumStat::kurtosis: return "kurtosis";
  }
  return "?";
}

std::string_view part_name(CoefficientPart c) {
  switch (c) {
    case CoefficientPart::real: return "real";
    case CoefficientPart::imag: return "imag";
    case CoefficientPart::abs: return "abs";
    case CoefficientPart::angle: return "angle";
  }
  return "?";
}

// Ordered (key, value) pairs of the parameters a function reads.
std::vector<std::pair<std::string, std::string>> param_pairs(Function f, const Params& p) {
  switch (f) {
    case Function::approximate_entropy: return {{"m", num(p.m)}, {"r", num(p.r)}};
    case Function::autocorrelation:
    case Function::partial_autocorrelation: return {{"lag", num(p.lag)}};
    case Function::change_quantiles:
      return {{"f_agg", std::string(aggregate_name(p.f_agg))},
              {"isabs", flag(p.isabs)},
              {"ql", num(p.ql)},
              {"qh", num(p.qh)}};
    case Function::cid_ce: return {{"normalize", flag(p.normalize)}};
    case Function::energy_ratio_by_chunks:
      return {{"num_segments", num(p.num_segments)}, {"segment_focus", num(p.segment_focus)}};
    case Function::fft_aggregated: return {{"aggtype", std::string(spectrum_name(p.aggtype))}};
    case Function::fft_coefficient: return {{"coeff", num(p.coeff)}, {"attr", std::string(part_name(p.attr))}};
    case Function::index_mass_quantile:
    case Function::quantile: return {{"q", num(p.q)}};
    case Function::number_crossing_m: return {{"m", num(p.crossing)}};
    case Function::number_peaks: return {{"n", num(p.n)}};
    case Function::range_count: return {{"lower", num(p.lower)}, {"upper", num(p.upper)}};
    default: return {};
  }
}

double parse_double(std::string_view s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw InputError("bad numeric parameter '" + std::string(s) + "'");
  return v;
}

int parse_int(std::string_view s) {
  int v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw InputError("bad integer parameter '" + std::string(s) + "'");
  return v;
}

bool parse_flag(std::string_view s) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw InputError("bad flag '" + std::string(s) + "'");
}

void assign(Function f, Params& p, std::string_view key, std::string_view value) {
  auto bad = [&] { return InputError("unexpected parameter '" + std::string(key) + "'"); };
  switch (f) {
    case Function::approximate_entropy:
      if (key == "m") p.m = parse_int(value);
      else if (key == "r") p.r = parse_double(value);
      else throw bad();
      return;
    case Function::autocorrelation:
    case Function::partial_autocorrelation: p.lag = parse_int(value); return;
    case Function::change_quantiles:
      if (key == "f_agg") {
        if (value == "mean") p.f_agg = Aggregate::mean;
        else if (value == "var") p.f_agg = Aggregate::var;
        else throw InputError("bad f_agg '" + std::string(value) + "'");
      } else if (key == "isabs") p.isabs = parse_flag(value);
      else if (key == "ql") p.ql = parse_double(value);
      else if (key == "qh") p.qh = parse_double(value);
      else throw bad();
      return;
    case Function::cid_ce: p.normalize = parse_flag(value); return;
    case Function::energy_ratio_by_chunks:
      if (key == "num_segments") p.num_segments = parse_int(value);
      else if (key == "segment_focus") p.segment_focus = parse_int(value);
      else throw bad();
      return;
    case Function::fft_aggregated:
      for (auto s : {SpectrumStat::centroid, SpectrumStat::variance, SpectrumStat::skew, SpectrumStat::kurtosis})
        if (spectrum_name(s) == value) {
          p.aggtype = s;
          return;
        }
      throw InputError("bad aggtype '" + std::string(value) + "'");
    case Function::fft_coefficient:
      if (key == "coeff") {
        p.coeff = parse_int(value);
        return;
      }
      for (auto c : {CoefficientPart::real, CoefficientPart::imag, CoefficientPart::abs, CoefficientPart::angle})
        if (part_name(c) == value) {
          p.attr = c;
          return;
        }
      throw InputError("bad attr '" + std::string(value) + "'");
    case Function::index_mass_quantile:
    case Function::quantile: p.q = parse_double(value); return;
    case Function::number_crossing_m: p.crossing = parse_double(value); return;
    case Function::number_peaks: p.n = parse_int(value); return;
    case Function::range_count:
      if (key == "lower") p.lower = parse_double(value);
      else if (key == "upper") p.upper = parse_double(value);
      else throw bad();
      return;
    default: throw bad();
  }
}

std::vector<std::string_view> split_double_underscore(std::string_view s) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find("__", start);
    if (pos == std::string_view::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 2;
  }
}

FeatureSpec spec(Function f, Channel c, Params p = {}) { return {f, c, p}; }

}  // namespace

bool FeatureSpec::operator==(const FeatureSpec& o) const {
  return function == o.function && channel == o.channel && render_params(function, params) == render_params(o.function, o.params);
}

std::string_view function_name(Function f) { return kFunctionNames[static_cast<std::size_t>(f)]; }

Function function_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kFunctionNames.size(); ++i)
    if (kFunctionNames[i] == name) return static_cast<Function>(i);
  throw InputError("unknown feature function '" + std::string(name) + "'");
}

std::string render_params(Function f, const Params& p) {
  std::string out;
  for (const auto& [k, v] : param_pairs(f, p)) {
    if (!out.empty()) out += "__";
    out += k + "_" + v;
  }
  return out;
}

std::string feature_name(const FeatureSpec& s) {
  std::string out = std::string(channel_name(s.channel)) + "__" + std::string(function_name(s.function));
  const auto params = render_params(s.function, s.params);
  if (!params.empty()) out += "__" + params;
  return out;
}

FeatureSpec parse_feature_name(std::string_view name) {
  const auto parts = split_double_underscore(name);
  if (parts.size() < 2) throw InputError("malformed feature name '" + std::string(name) + "'");
  FeatureSpec s;
  s.channel = channel_from_name(parts[0]);
  s.function = function_from_name(parts[1]);
  const auto expected = param_pairs(s.function, s.params);
  if (parts.size() - 2 != expected.size())
    throw InputError("wrong parameter count in feature name '" + std::string(name) + "'");
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const auto& key = expected[i].first;
    const auto token = parts[i + 2];
    if (token.size() <= key.size() + 1 || token.substr(0, key.size()) != key || token[key.size()] != '_')
      throw InputError("expected parameter '" + key + "' in feature name '" + std::string(name) + "'");
    assign(s.function, s.params, key, token.substr(key.size() + 1));
  }
  return s;
}

std::vector<FeatureSpec> selected_catalog() {
  using F = Function;
  using C = Channel;
  auto cq = [](bool isabs, double ql, double qh) {
    Params p;
    p.f_agg = Aggregate::mean;
    p.isabs = isabs;
    p.ql = ql;
    p.qh = qh;
    return p;
  };
  Params apen;
  apen.m = 2;
  apen.r = 0.1;
  Params lag1;
  lag1.lag = 1;
  Params raw_cid;
  raw_cid.normalize = false;
  Params chunks;
  chunks.num_segments = 10;
  chunks.segment_focus = 0;
  Params centroid;
  centroid.aggtype = SpectrumStat::centroid;
  Params coeff0;
  coeff0.coeff = 0;
  coeff0.attr = CoefficientPart::abs;
  Params q01;
  q01.q = 0.1;
  Params cross1;
  cross1.crossing = 1.0;
  Params peaks1;
  peaks1.n = 1;
  Params unit_range;
  unit_range.lower = -1.0;
  unit_range.upper = 1.0;

  return {
      spec(F::absolute_sum_of_changes, C::pc_norm),
      spec(F::approximate_entropy, C::ps_norm, apen),
      spec(F::autocorrelation, C::ps_norm, lag1),
      spec(F::change_quantiles, C::pc_norm, cq(false, 0.5, 0.6)),
      spec(F::change_quantiles, C::ps_mean, cq(true, 0.4, 0.6)),
      spec(F::change_quantiles, C::ps_norm, cq(false, 0.4, 0.6)),
      spec(F::change_quantiles, C::sigma, cq(false, 0.2, 0.6)),
      spec(F::cid_ce, C::ps_norm, raw_cid),
      spec(F::energy_ratio_by_chunks, C::v_norm, chunks),
      spec(F::energy_ratio_by_chunks, C::v_mean, chunks),
      spec(F::fft_aggregated, C::v_mean, centroid),
      spec(F::fft_coefficient, C::pc_norm, coeff0),
      spec(F::index_mass_quantile, C::v_norm, q01),
      spec(F::index_mass_quantile, C::v_mean, q01),
      spec(F::mean, C::pc_norm),
      spec(F::median, C::v_norm),
      spec(F::median, C::v_mean),
      spec(F::median, C::pc_norm),
      spec(F::median, C::ps_norm),
      spec(F::minimum, C::v_norm),
      spec(F::minimum, C::v_mean),
      spec(F::number_crossing_m, C::ps_norm, cross1),
      spec(F::number_peaks, C::sigma, peaks1),
      spec(F::partial_autocorrelation, C::ps_norm, lag1),
      spec(F::quantile, C::v_norm, q01),
      spec(F::quantile, C::v_mean, q01),
      spec(F::quantile, C::pc_norm, q01),
      spec(F::quantile, C::ps_norm, q01),
      spec(F::quantile, C::sigma, q01),
      spec(F::range_count, C::pc_norm, unit_range),
      spec(F::range_count, C::ps_norm, unit_range),
      spec(F::sum_values, C::pc_norm),
  };
}

std::vector<FeatureSpec> raw_grid(Channel c) {
  using F = Function;
  std::vector<FeatureSpec> out;
  out.push_back(spec(F::absolute_sum_of_changes, c));
  for (double r : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    Params p;
    p.m = 2;
    p.r = r;
    out.push_back(spec(F::approximate_entropy, c, p));
  }
  for (int lag = 1; lag <= 9; ++lag) {
    Params p;
    p.lag = lag;
    out.push_back(spec(F::autocorrelation, c, p));
  }
  std::vector<std::pair<double, double>> corridors;
  const std::array<double, 6> qs = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  for (std::size_t i = 0; i < qs.size(); ++i)
    for (std::size_t j = i + 1; j < qs.size(); ++j) corridors.emplace_back(qs[i], qs[j]);
  corridors.emplace_back(0.5, 0.6);
  for (auto [ql, qh] : corridors)
    for (bool isabs : {false, true})
      for (auto agg : {Aggregate::mean, Aggregate::var}) {
        Params p;
        p.ql = ql;
        p.qh = qh;
        p.isabs = isabs;
        p.f_agg = agg;
        out.push_back(spec(F::change_quantiles, c, p));
      }
  for (bool normalize : {false, true}) {
    Params p;
    p.normalize = normalize;
    out.push_back(spec(F::cid_ce, c, p));
  }
  for (int focus = 0; focus < 10; ++focus) {
    Params p;
    p.num_segments = 10;
    p.segment_focus = focus;
    out.push_back(spec(F::energy_ratio_by_chunks, c, p));
  }
  for (auto s : {SpectrumStat::centroid, SpectrumStat::variance, SpectrumStat::skew, SpectrumStat::kurtosis}) {
    Params p;
    p.aggtype = s;
    out.push_back(spec(F::fft_aggregated, c, p));
  }
  for (int k = 0; k < 10; ++k)
    for (auto part : {CoefficientPart::real, CoefficientPart::imag, CoefficientPart::abs, CoefficientPart::angle}) {
      Params p;
      p.coeff = k;
      p.attr = part;
      out.push_back(spec(F::fft_coefficient, c, p));
    }
  for (int i = 1; i <= 9; ++i) {
    Params p;
    p.q = i / 10.0;
    out.push_back(spec(F::index_mass_quantile, c, p));
  }
  out.push_back(spec(F::mean, c));
  out.push_back(spec(F::median, c));
  out.push_back(spec(F::minimum, c));
  for (double m : {-1.0, 0.0, 1.0}) {
    Params p;
    p.crossing = m;
    out.push_back(spec(F::number_crossing_m, c, p));
  }
  for (int n : {1, 3, 5, 10, 50}) {
    Params p;
    p.n = n;
    out.push_back(spec(F::number_peaks, c, p));
  }
  for (int lag = 1; lag <= 9; ++lag) {
    Params p;
    p.lag = lag;
    out.push_back(spec(F::partial_autocorrelation, c, p));
  }
  for (double q : {0.1, 0.2, 0.3, 0.4, 0.6, 0.7, 0.8, 0.9}) {
    Params p;
    p.q = q;
    out.push_back(spec(F::quantile, c, p));
  }
  for (auto [lo, hi] : {std::pair{-1.0, 1.0}, std::pair{0.0, 1e12}, std::pair{-1e12, 0.0}}) {
    Params p;
    p.lower = lo;
    p.upper = hi;
    out.push_back(spec(F::range_count, c, p));
  }
  out.push_back(spec(F::sum_values, c));
  return out;
}

std::vector<FeatureSpec> raw_catalog() {
  std::vector<FeatureSpec> out;
  for (auto c : kAllChannels) {
    auto grid = raw_grid(c);
    out.insert(out.end(), grid.begin(), grid.end());
  }
  return out;
}

}  // namespace estrace::tsfeat

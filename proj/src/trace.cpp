#include "estrace/trace.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "estrace/errors.hpp"

namespace estrace {

namespace {

constexpr std::array<std::string_view, kNumChannels> kChannelNames = {
    "sigma", "f_best", "v_norm", "ps_norm", "pc_norm", "v_mean", "ps_mean", "pc_mean"};

constexpr std::string_view kTraceHeader = "generation,sigma,f_best,v_norm,ps_norm,pc_norm,v_mean,ps_mean,pc_mean";

}  // namespace

std::string_view channel_name(Channel c) { return kChannelNames[static_cast<std::size_t>(c)]; }

Channel channel_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kNumChannels; ++i)
    if (kChannelNames[i] == name) return kAllChannels[i];
  throw InputError("unknown channel: " + std::string(name));
}

double TracePoint::operator[](Channel c) const {
  switch (c) {
    case Channel::sigma: return sigma;
    case Channel::f_best: return f_best;
    case Channel::v_norm: return v_norm;
    case Channel::ps_norm: return ps_norm;
    case Channel::pc_norm: return pc_norm;
    case Channel::v_mean: return v_mean;
    case Channel::ps_mean: return ps_mean;
    case Channel::pc_mean: return pc_mean;
  }
  return 0.0;
}

std::vector<double> Trace::series(Channel c, std::size_t length) const {
  const std::size_t n = length == 0 ? points.size() : std::min(length, points.size());
  std::vector<double> out(n);
  for (std::size_t t = 0; t < n; ++t) out[t] = points[t][c];
  return out;
}

TracePoint record(const cma::AlgorithmState& state) {
  TracePoint p;
  p.sigma = state.sigma;
  p.f_best = state.f_best;
  p.v_norm = state.D.norm();
  p.ps_norm = state.p_sigma.norm();
  p.pc_norm = state.p_c.norm();
  p.v_mean = state.D.mean();
  p.ps_mean = state.p_sigma.mean();
  p.pc_mean = state.p_c.mean();
  return p;
}

double target_precision(int index) { return std::pow(10.0, 2.0 - (index - 1) / 5.0); }

int count_targets_hit(double f_best_final, double f_opt) {
  if (f_best_final < f_opt) throw AccountingError("f_best below f_opt: objective accounting is broken");
  const double precision = f_best_final - f_opt;
  int hits = 0;
  for (int x = 0; x < kNumTargets; ++x)
    if (precision <= target_precision(x)) ++hits;
  return hits;
}

Trace run_trace(const std::string& variant_name, const cma::ModularConfig& config, int fid, int dim,
                std::size_t run, std::uint64_t seed, std::size_t generations, std::uint64_t transform_seed) {
  auto problem = bbob::make_problem(fid, dim, transform_seed);
  cma::ModularConfig cfg = config;
  cfg.budget_generations = std::max(cfg.budget_generations, generations);
  auto state = cma::initialize(cfg, static_cast<std::size_t>(dim), seed);
  Rng rng(seed);

  Trace trace;
  trace.meta = {variant_name, fid, dim, run, seed, transform_seed, problem.f_opt()};
  trace.points.reserve(generations);
  for (std::size_t g = 0; g < generations; ++g) {
    cma::step(state, cfg, problem, rng);
    trace.points.push_back(record(state));
  }
  trace.targets_hit = count_targets_hit(state.f_best, problem.f_opt());
  return trace;
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_trace_csv(const std::filesystem::path& path, const Trace& trace) {
  std::ofstream out(path);
  if (!out) throw MissingInputError("cannot write " + path.string());
  out << kTraceHeader << '\n';
  for (std::size_t t = 0; t < trace.points.size(); ++t) {
    out << (t + 1);
    for (auto c : kAllChannels) out << ',' << format_double(trace.points[t][c]);
    out << '\n';
  }
  if (!out) throw MissingInputError("failed writing " + path.string());
}

std::vector<TracePoint> read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingInputError("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) throw InputError("bad trace header in " + path.string());
  std::vector<TracePoint> points;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::array<double, kNumChannels + 1> v{};
    std::size_t k = 0;
    while (std::getline(row, cell, ',')) {
      if (k > kNumChannels) throw InputError("too many columns in " + path.string());
      v[k++] = std::strtod(cell.c_str(), nullptr);
    }
    if (k != kNumChannels + 1) throw InputError("short row in " + path.string());
    points.push_back({v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8]});
  }
  return points;
}

std::string trace_stem(std::string_view variant, int fid, std::size_t run) {
  return std::string(variant) + "_" + std::to_string(fid) + "_" + std::to_string(run);
}

}  // namespace estrace

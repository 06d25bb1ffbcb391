#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "estrace/cma.hpp"

namespace estrace {

/// The eight recorded series, in recording order.
enum class Channel { sigma, f_best, v_norm, ps_norm, pc_norm, v_mean, ps_mean, pc_mean };
inline constexpr std::size_t kNumChannels = 8;
inline constexpr std::array<Channel, kNumChannels> kAllChannels = {
    Channel::sigma,   Channel::f_best,  Channel::v_norm,  Channel::ps_norm,
    Channel::pc_norm, Channel::v_mean,  Channel::ps_mean, Channel::pc_mean};

std::string_view channel_name(Channel c);
Channel channel_from_name(std::string_view name);  // throws InputError

struct TracePoint {
  double sigma = 0.0;
  double f_best = 0.0;
  double v_norm = 0.0;
  double ps_norm = 0.0;
  double pc_norm = 0.0;
  double v_mean = 0.0;
  double ps_mean = 0.0;
  double pc_mean = 0.0;

  double operator[](Channel c) const;
  bool operator==(const TracePoint&) const = default;
};

struct TraceMeta {
  std::string variant;
  int fid = 0;
  int dim = 0;
  std::size_t run = 0;
  std::uint64_t seed = 0;
  std::uint64_t transform_seed = 0;
  double f_opt = 0.0;

  bool operator==(const TraceMeta&) const = default;
};

struct Trace {
  std::vector<TracePoint> points;
  TraceMeta meta;
  int targets_hit = 0;

  /// Values of one channel over the first `length` generations (all when 0).
  std::vector<double> series(Channel c, std::size_t length = 0) const;
};

/// Snapshot of the eight channels from the current state.
TracePoint record(const cma::AlgorithmState& state);

inline constexpr int kNumTargets = 52;

/// Target precision with index x in [0, 51]: 10^(2 - (x - 1) / 5).
double target_precision(int index);

/// Number of the 52 precision targets reached by f_best_final. Throws
/// AccountingError if f_best_final < f_opt.
int count_targets_hit(double f_best_final, double f_opt);

/// Runs one variant on one BBOB instance for `generations` generations and
/// records a point after every generation.
Trace run_trace(const std::string& variant_name, const cma::ModularConfig& config, int fid, int dim,
                std::size_t run, std::uint64_t seed, std::size_t generations, std::uint64_t transform_seed = 1);

/// Renders with 17 significant digits so that parsing recovers the exact double.
std::string format_double(double value);

/// Trace CSV: header `generation,sigma,f_best,v_norm,ps_norm,pc_norm,v_mean,ps_mean,pc_mean`.
void write_trace_csv(const std::filesystem::path& path, const Trace& trace);
std::vector<TracePoint> read_trace_csv(const std::filesystem::path& path);

/// File stem `{variant}_{fid}_{run}`.
std::string trace_stem(std::string_view variant, int fid, std::size_t run);

}  // namespace estrace

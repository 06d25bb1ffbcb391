#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "estrace/cma.hpp"

namespace estrace::cma {

/// A named single-module variant. `id` follows the conventional numbering
/// 1 (Standard) .. 12 (ThresholdConvergence).
struct Variant {
  int id;
  std::string name;
  ModularConfig config;
};

/// The twelve variants, in id order.
const std::vector<Variant>& variants();

/// Looks up a variant by name (case-sensitive). Throws ConfigError if unknown.
const Variant& variant_by_name(std::string_view name);

/// Names of all variants in id order.
std::vector<std::string> variant_names();

}  // namespace estrace::cma

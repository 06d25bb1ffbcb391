#include "estrace/variants.hpp"

#include "estrace/errors.hpp"

namespace estrace::cma {

namespace {

std::vector<Variant> build() {
  std::vector<Variant> out;
  const auto add = [&](std::string name, auto tweak) {
    ModularConfig c;
    tweak(c);
    out.push_back({static_cast<int>(out.size()) + 1, std::move(name), c});
  };
  add("Standard", [](ModularConfig&) {});
  add("Active", [](ModularConfig& c) { c.active = true; });
  add("Mirrored", [](ModularConfig& c) { c.mirrored = Mirroring::mirrored; });
  add("MirroredPairwise", [](ModularConfig& c) { c.mirrored = Mirroring::pairwise; });
  add("Orthogonal", [](ModularConfig& c) { c.orthogonal = true; });
  add("Elitist", [](ModularConfig& c) { c.elitist = true; });
  add("EqualWeights", [](ModularConfig& c) { c.weights = Weighting::equal; });
  add("MSR", [](ModularConfig& c) { c.step_size_rule = StepSizeRule::msr; });
  add("TPA", [](ModularConfig& c) { c.step_size_rule = StepSizeRule::tpa; });
  add("Halton", [](ModularConfig& c) { c.base_sampler = BaseSampler::halton; });
  add("Sobol", [](ModularConfig& c) { c.base_sampler = BaseSampler::sobol; });
  add("ThresholdConvergence", [](ModularConfig& c) { c.threshold_convergence = true; });
  return out;
}

}  // namespace

const std::vector<Variant>& variants() {
  static const std::vector<Variant> all = build();
  return all;
}

const Variant& variant_by_name(std::string_view name) {
  for (const auto& v : variants())
    if (v.name == name) return v;
  throw ConfigError("unknown variant: " + std::string(name));
}

std::vector<std::string> variant_names() {
  std::vector<std::string> out;
  for (const auto& v : variants()) out.push_back(v.name);
  return out;
}

}  // namespace estrace::cma

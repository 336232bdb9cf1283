#pragma once

#include <map>
#include <string>

#include "dtfsc/bench.hpp"
#include "dtfsc/synth.hpp"

namespace fixtures {

/// Synthesised controllers are cached per benchmark name for the process.
inline const dtfsc::SynthResult& synthesized(const std::string& name) {
  static std::map<std::string, dtfsc::SynthResult> cache;
  auto it = cache.find(name);
  if (it == cache.end()) it = cache.emplace(name, dtfsc::synthesize(dtfsc::make_benchmark(name))).first;
  return it->second;
}

inline const dtfsc::Pomdp& model(const std::string& name) {
  static std::map<std::string, dtfsc::Pomdp> cache;
  auto it = cache.find(name);
  if (it == cache.end()) it = cache.emplace(name, dtfsc::make_benchmark(name)).first;
  return it->second;
}

/// Benchmarks whose synthesis succeeds; refuel-7-7 is covered by the
/// acceptance binary only.
inline std::vector<std::string> solvable_benchmarks() {
  return {"maze", "obstacle-6", "obstacle-8", "refuel-6-8", "line"};
}

}  // namespace fixtures

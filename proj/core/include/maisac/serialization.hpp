#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "maisac/position_opt.hpp"

namespace maisac {

/// Shortest exact decimal for a double via "%.17g"; byte-stable for a given
/// value, used everywhere a file must be reproducible.
std::string format_double(double v);

/// FNV-1a, 64-bit, over raw bytes.
std::uint64_t fnv1a64(std::string_view bytes);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& contents);

/// JSON round-trip for ScenarioConfig.  Field names match the struct members
/// exactly; unknown keys are rejected (typos should fail loudly), missing
/// keys keep the value from `defaults`.  The result is validated.
std::string config_to_json(const ScenarioConfig& cfg);
ScenarioConfig config_from_json_text(const std::string& text,
                                     const ScenarioConfig& defaults = ScenarioConfig{});
ScenarioConfig load_config(const std::string& path,
                           const ScenarioConfig& defaults = ScenarioConfig{});
void save_config(const ScenarioConfig& cfg, const std::string& path);

/// JSON round-trip for a sampled environment (complex values as [re, im]
/// pairs, matrices as row-major arrays of arrays).  Keys are sorted, so the
/// text form is canonical and hashable.
std::string scenario_to_json(const Scenario& scen);
Scenario scenario_from_json_text(const std::string& text,
                                 const ScenarioConfig& cfg);

/// Hash of the canonical JSON form; equal hashes across two runs certify the
/// runs consumed the same sampled environment (paired-seed discipline).
std::uint64_t scenario_hash(const Scenario& scen);

/// Full solution record: layout, beamformers (re/im), aux variables,
/// objective decomposition, and the per-outer-iteration trace.
std::string solution_to_json(const IsacSolution& sol);

/// CSV with one row per outer position iteration.
std::string position_trace_to_csv(const std::vector<PositionTraceRow>& trace);

/// CSV with one row per beamforming iteration.
std::string solver_trace_to_csv(const std::vector<SolverTraceRow>& trace);

}  // namespace maisac

#pragma once

#include <string>
#include <vector>

#include "dsum/engine.hpp"
#include "dsum/paper_cases.hpp"

namespace dsum {

inline constexpr const char* kToolVersion = "dsum 1.0.0";

std::string describe_config(const EngineConfig& cfg, const SlackConfig& slack);

// Self-contained verification report: problem echo, engine config, symbolic
// and ladder evidence, classification.  Byte-identical for identical inputs.
std::string render_report(const Problem& p, const GrowthVerdict& v, const EngineConfig& cfg,
                          const std::vector<std::string>& stage_history = {});

std::string render_json(const Problem& p, const GrowthVerdict& v, const EngineConfig& cfg,
                        const std::vector<std::string>& stage_history = {});

std::string render_estimate_report(const EstimateReport& rep, const EngineConfig& cfg);
std::string render_estimate_json(const EstimateReport& rep, const EngineConfig& cfg);

std::string format_double(double v);

} // namespace dsum

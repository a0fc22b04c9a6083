#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "copyguard/agents/agents.hpp"
#include "copyguard/agents/candles.hpp"
#include "copyguard/agents/llm.hpp"
#include "copyguard/curve/bonding_curve.hpp"
#include "copyguard/detect/detectors.hpp"
#include "copyguard/features/features.hpp"
#include "copyguard/pipeline/pipeline.hpp"
#include "copyguard/sim/dataset.hpp"

namespace copyguard::cli {

struct SimulateConfig {
    std::size_t n_coins = 300;
    std::map<sim::ScenarioKind, double> mix{
        {sim::ScenarioKind::Benign, 0.40},        {sim::ScenarioKind::BundleBot, 0.15},
        {sim::ScenarioKind::GradualBundle, 0.15}, {sim::ScenarioKind::SniperBot, 0.10},
        {sim::ScenarioKind::BumpBot, 0.10},       {sim::ScenarioKind::CommentBot, 0.10}};
    sim::DatasetParams dataset;  // dataset.base carries the scenario knobs
};

struct RunConfig {
    std::uint64_t seed = 42;
    std::size_t workers = 0;
    bool strict_ingest = true;

    curve::CurveParams curve = curve::CurveParams::defaults();
    detect::DetectionConfig detection;

    features::TerminalValuation valuation = features::TerminalValuation::LastPrice;
    std::string usd_prices;  // empty: amounts stay in SOL
    features::ConditionParams conditions;
    features::SplitFractions split;

    pipeline::AgentMode mode = pipeline::AgentMode::Rule;
    agents::RuleAgentParams rule;
    agents::Bucketing bucketing;
    agents::MechanicalityParams mech;
    agents::CommentRuleParams comment_rule;
    bool attach_image = false;

    agents::HttpChatConfig chat;
    agents::LlmOptions llm;

    double threshold_step = 0.01;

    SimulateConfig simulate;

    std::vector<double> threshold_grid() const;
    // Every effective value in a fixed key order; hashed into manifests.
    nlohmann::ordered_json canonical() const;
    void validate() const;  // Error(InvalidConfig)
};

// Starts from the defaults and applies the document on top. Unknown keys,
// wrong types and out-of-range values are Error(InvalidConfig) naming the key.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& yaml_text);

// A scenario spec file holds the same keys as the `simulate` section.
SimulateConfig load_simulate_spec(const std::filesystem::path& path, const RunConfig& base);

}  // namespace copyguard::cli

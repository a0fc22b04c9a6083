#pragma once

#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "copyguard/agents/agents.hpp"
#include "copyguard/agents/candles.hpp"
#include "copyguard/chain/model.hpp"
#include "copyguard/features/features.hpp"

namespace copyguard::agents {

struct PromptBundle {
    std::string system;
    std::string user;
    std::optional<std::vector<unsigned char>> image_png;  // candlestick render for the coin agent

    // Error(InvalidConfig) if a `{slot}` placeholder is left unfilled. Builders
    // validate before splicing in free text, which may contain braces.
    void validate() const { validate_except({}); }
    void validate_except(std::initializer_list<std::string_view> pending) const;
};

// Raw templates with `{slot}` placeholders.
std::string_view comment_instruction();
std::string_view wallet_template();
std::string_view coin_template();
std::string_view timing_template();

// Replaces every `{name}` with its value; unknown names are left in place.
std::string fill(std::string_view tmpl, std::span<const std::pair<std::string, std::string>> slots);

PromptBundle comment_prompt(std::string_view comment);
PromptBundle wallet_prompt(const features::FeatureVector& f);
// `comments` are those posted before the trader's entry; candles as of entry
// (null: no trades yet). With `attach_image` the chart is sent as PNG, else as a text table.
PromptBundle coin_prompt(const features::FeatureVector& f, std::span<const chain::CommentRecord> comments,
                         const CandlestickSeries* candles, bool attach_image);
PromptBundle timing_prompt(const features::FeatureVector& f);

// Reminder appended when a reply could not be parsed.
std::string_view format_reminder();

// "2025-01-17 15:06:36" in UTC.
std::string utc_timestamp(std::int64_t ts);

}  // namespace copyguard::agents

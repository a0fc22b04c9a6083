#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "copyguard/common/decimal.hpp"
#include "copyguard/econ/copier.hpp"

namespace copyguard::cli {

inline constexpr std::string_view kTradeHeader = "step,side,token_qty";

// Signed quantities in step order. Steps must strictly increase; side is buy
// or sell; token_qty > 0. Error(MalformedRow) naming the line otherwise.
std::vector<Decimal> read_trade_csv(std::istream& in);

std::string return_report_json(const econ::ReturnReport& r);
std::string return_report_summary(const econ::ReturnReport& r);

}  // namespace copyguard::cli

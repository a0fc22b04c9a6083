#include "trades.hpp"

#include <charconv>
#include <cstdio>
#include <optional>

#include <nlohmann/json.hpp>

#include "copyguard/common/csv.hpp"
#include "copyguard/common/error.hpp"
#include "copyguard/common/real.hpp"

namespace copyguard::cli {

namespace {

Error bad(std::size_t line, const std::string& what) {
    return Error(ErrorCode::MalformedRow, "trades line " + std::to_string(line) + ": " + what);
}

}  // namespace

std::vector<Decimal> read_trade_csv(std::istream& in) {
    csv::Reader rd(in);
    std::vector<std::string> f;
    if (!rd.next(f) || f != csv::split_header(kTradeHeader))
        throw Error(ErrorCode::MalformedRow, "trade file header must be `" + std::string(kTradeHeader) + "`");
    std::vector<Decimal> out;
    std::optional<long long> last;
    while (rd.next(f)) {
        if (f.size() == 1 && f[0].empty()) continue;
        if (f.size() != 3) throw bad(rd.line(), "expected 3 fields");
        long long step = 0;
        const auto* b = f[0].data();
        const auto r = std::from_chars(b, b + f[0].size(), step);
        if (r.ec != std::errc() || r.ptr != b + f[0].size()) throw bad(rd.line(), "bad step `" + f[0] + "`");
        if (last && step <= *last) throw bad(rd.line(), "steps must strictly increase");
        last = step;
        const auto q = Decimal::try_parse(f[2]);
        if (!q || !q->is_positive()) throw bad(rd.line(), "token_qty must be a positive decimal");
        if (f[1] == "buy") out.push_back(*q);
        else if (f[1] == "sell") out.push_back(-*q);
        else throw bad(rd.line(), "side must be buy or sell");
    }
    if (out.empty()) throw Error(ErrorCode::InvalidSequence, "trade file has no trades");
    return out;
}

std::string return_report_json(const econ::ReturnReport& r) {
    nlohmann::ordered_json pen = nlohmann::ordered_json::array();
    Real sum = 0;
    for (const auto& p : r.penalty_per_buy) {
        pen.push_back(to_double(p));
        sum += p;
    }
    nlohmann::ordered_json j;
    j["x_in_smart"] = to_string(r.x_in_smart);
    j["x_out_smart"] = to_string(r.x_out_smart);
    j["x_in_copier"] = to_string(r.x_in_copier);
    j["x_out_copier"] = to_string(r.x_out_copier);
    j["r_smart"] = to_double(r.r_smart);
    j["r_copier"] = to_double(r.r_copier);
    j["penalty_per_buy"] = std::move(pen);
    j["mean_penalty"] = r.penalty_per_buy.empty()
                            ? nlohmann::ordered_json(nullptr)
                            : nlohmann::ordered_json(to_double(sum / Real(r.penalty_per_buy.size())));
    j["truncated_sells"] = r.truncated_sells;
    j["residual_smart"] = to_string(r.residual_smart);
    j["residual_copier"] = to_string(r.residual_copier);
    j["liquidated"] = r.liquidated;
    return j.dump(2) + "\n";
}

std::string return_report_summary(const econ::ReturnReport& r) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "r_smart=%.6f r_copier=%.6f gap=%.6f buys=%zu truncated_sells=%zu",
                  to_double(r.r_smart), to_double(r.r_copier), to_double(r.r_smart - r.r_copier),
                  r.penalty_per_buy.size(), r.truncated_sells.size());
    return buf;
}

}  // namespace copyguard::cli

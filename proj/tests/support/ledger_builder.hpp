#pragma once

#include <map>
#include <string>
#include <vector>

#include "copyguard/chain/ingest.hpp"

namespace cgtest {

// Small fluent helper for hand-written ledgers.
class LedgerBuilder {
public:
    explicit LedgerBuilder(std::string coin = "coin") : coin_(std::move(coin)) {}

    LedgerBuilder& create(const std::string& who, std::uint64_t block, std::int64_t ts = -1) {
        return add(copyguard::chain::TxKind::Create, who, block, "0", "0", ts);
    }
    LedgerBuilder& buy(const std::string& who, std::uint64_t block, const std::string& qty,
                       const std::string& sol = "1", std::int64_t ts = -1) {
        return add(copyguard::chain::TxKind::Buy, who, block, qty, sol, ts);
    }
    LedgerBuilder& sell(const std::string& who, std::uint64_t block, const std::string& qty,
                        const std::string& sol = "1", std::int64_t ts = -1) {
        return add(copyguard::chain::TxKind::Sell, who, block, qty, sol, ts);
    }
    LedgerBuilder& comment(const std::string& who, std::int64_t ts, const std::string& text) {
        comments_.push_back(copyguard::chain::make_comment(coin_, who, ts, text));
        return *this;
    }

    copyguard::chain::CoinLedger build() const {
        auto r = copyguard::chain::assemble_ledgers(rows_);
        auto l = r.ledgers.at(0);
        l.comments = comments_;
        return l;
    }

private:
    LedgerBuilder& add(copyguard::chain::TxKind kind, const std::string& who, std::uint64_t block,
                       const std::string& qty, const std::string& sol, std::int64_t ts) {
        copyguard::chain::TxRecord tx;
        tx.coin = coin_;
        tx.block = block;
        tx.index_in_block = next_index_[block]++;
        tx.kind = kind;
        tx.trader = who;
        tx.token_qty = copyguard::Decimal::parse(qty);
        tx.sol_amount = copyguard::Decimal::parse(sol);
        tx.timestamp = ts >= 0 ? ts : static_cast<std::int64_t>(block);
        rows_.push_back(tx);
        return *this;
    }

    std::string coin_;
    std::vector<copyguard::chain::TxRecord> rows_;
    std::vector<copyguard::chain::CommentRecord> comments_;
    std::map<std::uint64_t, std::uint32_t> next_index_;
};

}  // namespace cgtest

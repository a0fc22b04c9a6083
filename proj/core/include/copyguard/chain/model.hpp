#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "copyguard/common/decimal.hpp"

namespace copyguard::chain {

enum class TxKind { Create, Buy, Sell, Transfer };

std::string_view to_string(TxKind kind);
std::optional<TxKind> parse_tx_kind(std::string_view text);

/// One on-chain action against a coin.
struct TxRecord {
    std::string coin;
    std::uint64_t block = 0;
    std::uint32_t index_in_block = 0;
    TxKind kind = TxKind::Buy;
    std::string trader;
    Decimal token_qty;   // meme-coin units
    Decimal sol_amount;  // fee-inclusive SOL cash flow
    std::int64_t timestamp = 0;

    bool is_trade() const { return kind == TxKind::Buy || kind == TxKind::Sell; }

    bool operator==(const TxRecord&) const = default;
};

inline bool ordering_less(const TxRecord& a, const TxRecord& b) {
    if (a.block != b.block) return a.block < b.block;
    return a.index_in_block < b.index_in_block;
}

// True when the text contains `#` followed by at least six digits.
bool references_other_wallet(std::string_view text);

struct CommentRecord {
    std::string coin;
    std::string wallet;
    std::int64_t timestamp = 0;
    std::string text;
    bool references_other_wallet = false;

    bool operator==(const CommentRecord&) const = default;
};

CommentRecord make_comment(std::string coin, std::string wallet, std::int64_t timestamp,
                           std::string text);

/// All activity for one coin. Immutable once ingestion finishes.
struct CoinLedger {
    std::string coin;
    std::optional<std::string> creator;        // unset when no Create row was seen
    std::optional<std::uint64_t> launch_block;
    std::optional<std::int64_t> launch_ts;
    std::vector<TxRecord> txs;                 // sorted by (block, index_in_block)
    std::vector<CommentRecord> comments;       // sorted by timestamp

    bool creator_known() const { return creator.has_value() && launch_block.has_value(); }

    // Launch timestamp, or the first transaction's timestamp when unknown.
    std::optional<std::int64_t> start_ts() const;

    bool operator==(const CoinLedger&) const = default;
};

// Copy of `ledger` keeping only transactions and comments with timestamp < cutoff.
CoinLedger truncated_before(const CoinLedger& ledger, std::int64_t cutoff_ts);

const CoinLedger* find_ledger(std::span<const CoinLedger> ledgers, std::string_view coin);

}  // namespace copyguard::chain

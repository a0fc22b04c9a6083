#include "copyguard/chain/model.hpp"

#include <algorithm>
#include <cctype>

namespace copyguard::chain {

std::string_view to_string(TxKind kind) {
    switch (kind) {
        case TxKind::Create: return "create";
        case TxKind::Buy: return "buy";
        case TxKind::Sell: return "sell";
        case TxKind::Transfer: return "transfer";
    }
    return "unknown";
}

std::optional<TxKind> parse_tx_kind(std::string_view text) {
    if (text == "create") return TxKind::Create;
    if (text == "buy") return TxKind::Buy;
    if (text == "sell") return TxKind::Sell;
    if (text == "transfer") return TxKind::Transfer;
    return std::nullopt;
}

bool references_other_wallet(std::string_view text) {
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '#') continue;
        std::size_t run = 0;
        while (i + 1 + run < text.size() &&
               std::isdigit(static_cast<unsigned char>(text[i + 1 + run]))) {
            ++run;
        }
        if (run >= 6) return true;
    }
    return false;
}

CommentRecord make_comment(std::string coin, std::string wallet, std::int64_t timestamp,
                           std::string text) {
    CommentRecord c;
    c.coin = std::move(coin);
    c.wallet = std::move(wallet);
    c.timestamp = timestamp;
    c.references_other_wallet = references_other_wallet(text);
    c.text = std::move(text);
    return c;
}

std::optional<std::int64_t> CoinLedger::start_ts() const {
    if (launch_ts) return launch_ts;
    if (!txs.empty()) return txs.front().timestamp;
    return std::nullopt;
}

CoinLedger truncated_before(const CoinLedger& ledger, std::int64_t cutoff_ts) {
    CoinLedger out;
    out.coin = ledger.coin;
    out.creator = ledger.creator;
    out.launch_block = ledger.launch_block;
    out.launch_ts = ledger.launch_ts;
    for (const auto& tx : ledger.txs) {
        if (tx.timestamp < cutoff_ts) out.txs.push_back(tx);
    }
    for (const auto& c : ledger.comments) {
        if (c.timestamp < cutoff_ts) out.comments.push_back(c);
    }
    return out;
}

const CoinLedger* find_ledger(std::span<const CoinLedger> ledgers, std::string_view coin) {
    auto it = std::lower_bound(ledgers.begin(), ledgers.end(), coin,
                               [](const CoinLedger& l, std::string_view c) { return l.coin < c; });
    if (it != ledgers.end() && it->coin == coin) return &*it;
    return nullptr;
}

}  // namespace copyguard::chain

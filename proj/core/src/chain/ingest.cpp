#include "copyguard/chain/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

#include "copyguard/common/csv.hpp"

namespace copyguard::chain {

namespace {

using json = nlohmann::json;

struct RawRow {
    std::size_t row = 0;
    std::string coin, block, index, kind, trader, qty, sol, ts;
};

template <class Int>
bool parse_int(std::string_view s, Int& out) {
    if (s.empty()) return false;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size();
}

[[noreturn]] void row_error(ErrorCode code, std::size_t row, const std::string& what) {
    throw Error(code, "row " + std::to_string(row) + ": " + what);
}

TxRecord validate(const RawRow& r) {
    TxRecord tx;
    if (r.coin.empty()) row_error(ErrorCode::MalformedRow, r.row, "empty coin");
    if (r.trader.empty()) row_error(ErrorCode::MalformedRow, r.row, "empty trader");
    tx.coin = r.coin;
    tx.trader = r.trader;
    if (!parse_int(r.block, tx.block))
        row_error(ErrorCode::MalformedRow, r.row, "bad block '" + r.block + "'");
    if (!parse_int(r.index, tx.index_in_block))
        row_error(ErrorCode::MalformedRow, r.row, "bad index_in_block '" + r.index + "'");
    if (!parse_int(r.ts, tx.timestamp))
        row_error(ErrorCode::MalformedRow, r.row, "bad timestamp '" + r.ts + "'");
    auto kind = parse_tx_kind(r.kind);
    if (!kind) row_error(ErrorCode::MalformedRow, r.row, "bad kind '" + r.kind + "'");
    tx.kind = *kind;
    auto qty = Decimal::try_parse(r.qty);
    if (!qty || qty->is_negative())
        row_error(ErrorCode::MalformedRow, r.row, "bad token_qty '" + r.qty + "'");
    auto sol = Decimal::try_parse(r.sol);
    if (!sol || sol->is_negative())
        row_error(ErrorCode::MalformedRow, r.row, "bad sol_amount '" + r.sol + "'");
    tx.token_qty = *qty;
    tx.sol_amount = *sol;
    if (tx.kind == TxKind::Create && !tx.token_qty.is_zero())
        row_error(ErrorCode::MalformedRow, r.row, "create row must carry token_qty = 0");
    if (tx.is_trade() && !tx.token_qty.is_positive())
        row_error(ErrorCode::MalformedRow, r.row, "buy/sell must carry token_qty > 0");
    return tx;
}

// Collects rows; in lenient mode a bad row becomes a diagnostic.
struct RowSink {
    const IngestOptions& opts;
    std::vector<TxRecord> rows;
    std::vector<Diagnostic> diagnostics;

    void add(const RawRow& r) {
        try {
            rows.push_back(validate(r));
        } catch (const Error& e) {
            if (opts.strict) throw;
            diagnostics.push_back({e.code(), r.row, r.coin, e.what()});
        }
    }
};

bool blank(const std::vector<std::string>& f) { return f.size() == 1 && f[0].empty(); }

void check_header(const std::vector<std::string>& fields, std::string_view expected) {
    auto want = csv::split_header(expected);
    if (fields != want) {
        std::string got;
        for (std::size_t i = 0; i < fields.size(); ++i) got += (i ? "," : "") + fields[i];
        throw Error(ErrorCode::MalformedRow,
                    "row 1: header mismatch, expected '" + std::string(expected) + "' got '" + got + "'");
    }
}

std::string json_field(const json& obj, const char* key, std::size_t row) {
    auto it = obj.find(key);
    if (it == obj.end()) row_error(ErrorCode::MalformedRow, row, std::string("missing field ") + key);
    if (it->is_string()) return it->get<std::string>();
    if (it->is_number_integer() || it->is_number_unsigned()) return it->dump();
    if (it->is_number_float()) {
        // Shortest round-trip text; Decimal::parse rejects anything finer than 1e-9.
        return it->dump();
    }
    row_error(ErrorCode::MalformedRow, row, std::string("field ") + key + " has wrong type");
}

void read_csv_rows(std::istream& in, RowSink& sink) {
    csv::Reader reader(in);
    std::vector<std::string> f;
    bool header = false;
    while (reader.next(f)) {
        if (blank(f)) continue;
        if (!header) {
            check_header(f, kTransactionsHeader);
            header = true;
            continue;
        }
        RawRow r;
        r.row = reader.line();
        if (f.size() != 8) {
            if (sink.opts.strict)
                row_error(ErrorCode::MalformedRow, r.row,
                          "expected 8 fields, got " + std::to_string(f.size()));
            sink.diagnostics.push_back({ErrorCode::MalformedRow, r.row, f.empty() ? "" : f[0],
                                        "row " + std::to_string(r.row) + ": wrong field count"});
            continue;
        }
        r.coin = f[0];
        r.block = f[1];
        r.index = f[2];
        r.kind = f[3];
        r.trader = f[4];
        r.qty = f[5];
        r.sol = f[6];
        r.ts = f[7];
        sink.add(r);
    }
}

void read_jsonl_rows(std::istream& in, RowSink& sink) {
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        RawRow r;
        r.row = row;
        try {
            json obj = json::parse(line);
            if (!obj.is_object()) row_error(ErrorCode::MalformedRow, row, "not a JSON object");
            r.coin = json_field(obj, "coin", row);
            r.block = json_field(obj, "block", row);
            r.index = json_field(obj, "index_in_block", row);
            r.kind = json_field(obj, "kind", row);
            r.trader = json_field(obj, "trader", row);
            r.qty = json_field(obj, "token_qty", row);
            r.sol = json_field(obj, "sol_amount", row);
            r.ts = json_field(obj, "timestamp", row);
        } catch (const json::exception& e) {
            if (sink.opts.strict) row_error(ErrorCode::MalformedRow, row, e.what());
            sink.diagnostics.push_back({ErrorCode::MalformedRow, row, "",
                                        "row " + std::to_string(row) + ": " + e.what()});
            continue;
        } catch (const Error& e) {
            if (sink.opts.strict) throw;
            sink.diagnostics.push_back({e.code(), row, r.coin, e.what()});
            continue;
        }
        sink.add(r);
    }
}

IngestResult assemble(std::vector<TxRecord> rows, bool strict, std::vector<Diagnostic> diags) {
    std::map<std::string, std::vector<TxRecord>> by_coin;
    for (auto& tx : rows) by_coin[tx.coin].push_back(std::move(tx));

    IngestResult out;
    out.diagnostics = std::move(diags);
    for (auto& [coin, txs] : by_coin) {
        std::stable_sort(txs.begin(), txs.end(), ordering_less);

        CoinLedger ledger;
        ledger.coin = coin;
        for (std::size_t i = 0; i < txs.size(); ++i) {
            if (i > 0 && txs[i].block == txs[i - 1].block &&
                txs[i].index_in_block == txs[i - 1].index_in_block) {
                std::string msg = "coin " + coin + ": duplicate ordering key (" +
                                  std::to_string(txs[i].block) + ", " +
                                  std::to_string(txs[i].index_in_block) + ")";
                if (strict) throw Error(ErrorCode::DuplicateOrderingKey, msg);
                out.diagnostics.push_back({ErrorCode::DuplicateOrderingKey, 0, coin, msg});
                continue;
            }
            const auto& tx = txs[i];
            if (tx.kind == TxKind::Create) {
                if (ledger.creator) {
                    std::string msg = "coin " + coin + ": duplicate create row";
                    if (strict) throw Error(ErrorCode::DuplicateCreate, msg);
                    out.diagnostics.push_back({ErrorCode::DuplicateCreate, 0, coin, msg});
                    continue;
                }
                ledger.creator = tx.trader;
                ledger.launch_block = tx.block;
                ledger.launch_ts = tx.timestamp;
            }
            ledger.txs.push_back(tx);
        }
        if (!ledger.creator) {
            out.diagnostics.push_back({ErrorCode::MissingCreate, 0, coin,
                                       "coin " + coin +
                                           ": no create row; excluded from bundle/sniper detection"});
        }
        out.ledgers.push_back(std::move(ledger));
    }
    return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::MissingInput, "cannot open " + path.string());
    return in;
}

}  // namespace

IngestResult ingest_transactions(std::istream& in, TxFormat format, const IngestOptions& opts) {
    RowSink sink{opts, {}, {}};
    if (format == TxFormat::Csv)
        read_csv_rows(in, sink);
    else
        read_jsonl_rows(in, sink);
    return assemble(std::move(sink.rows), opts.strict, std::move(sink.diagnostics));
}

IngestResult ingest_transactions(const std::filesystem::path& path, TxFormat format,
                                 const IngestOptions& opts) {
    auto in = open_input(path);
    return ingest_transactions(in, format, opts);
}

IngestResult assemble_ledgers(std::vector<TxRecord> rows) {
    return assemble(std::move(rows), true, {});
}

std::vector<Diagnostic> ingest_comments(std::istream& in, std::vector<CoinLedger>& ledgers,
                                        const IngestOptions& opts) {
    std::vector<Diagnostic> diags;
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < ledgers.size(); ++i) index[ledgers[i].coin] = i;

    csv::Reader reader(in);
    std::vector<std::string> f;
    bool header = false;
    std::vector<bool> touched(ledgers.size(), false);
    while (reader.next(f)) {
        if (blank(f)) continue;
        if (!header) {
            check_header(f, kCommentsHeader);
            header = true;
            continue;
        }
        const std::size_t row = reader.line();
        try {
            if (f.size() != 4)
                row_error(ErrorCode::MalformedRow, row,
                          "expected 4 fields, got " + std::to_string(f.size()));
            std::int64_t ts = 0;
            if (!parse_int(f[2], ts)) row_error(ErrorCode::MalformedRow, row, "bad timestamp");
            if (f[0].empty() || f[1].empty())
                row_error(ErrorCode::MalformedRow, row, "empty coin or wallet");
            if (f[3].empty()) row_error(ErrorCode::MalformedRow, row, "empty comment text");
            auto it = index.find(f[0]);
            if (it == index.end()) {
                diags.push_back({ErrorCode::MissingInput, row, f[0],
                                 "row " + std::to_string(row) + ": comment for unknown coin " + f[0]});
                continue;
            }
            ledgers[it->second].comments.push_back(make_comment(f[0], f[1], ts, f[3]));
            touched[it->second] = true;
        } catch (const Error& e) {
            if (opts.strict) throw;
            diags.push_back({e.code(), row, f.empty() ? "" : f[0], e.what()});
        }
    }
    for (std::size_t i = 0; i < ledgers.size(); ++i) {
        if (!touched[i]) continue;
        std::stable_sort(ledgers[i].comments.begin(), ledgers[i].comments.end(),
                         [](const CommentRecord& a, const CommentRecord& b) {
                             return a.timestamp < b.timestamp;
                         });
    }
    return diags;
}

std::vector<Diagnostic> ingest_comments(const std::filesystem::path& path,
                                        std::vector<CoinLedger>& ledgers,
                                        const IngestOptions& opts) {
    auto in = open_input(path);
    return ingest_comments(in, ledgers, opts);
}

void write_transactions_csv(std::ostream& out, const std::vector<CoinLedger>& ledgers) {
    out << kTransactionsHeader << '\n';
    std::vector<std::string> f(8);
    for (const auto& l : ledgers) {
        for (const auto& tx : l.txs) {
            f[0] = tx.coin;
            f[1] = std::to_string(tx.block);
            f[2] = std::to_string(tx.index_in_block);
            f[3] = std::string(to_string(tx.kind));
            f[4] = tx.trader;
            f[5] = tx.token_qty.to_string();
            f[6] = tx.sol_amount.to_string();
            f[7] = std::to_string(tx.timestamp);
            csv::write_row(out, f);
        }
    }
}

void write_comments_csv(std::ostream& out, const std::vector<CoinLedger>& ledgers) {
    out << kCommentsHeader << '\n';
    std::vector<std::string> f(4);
    for (const auto& l : ledgers) {
        for (const auto& c : l.comments) {
            f[0] = c.coin;
            f[1] = c.wallet;
            f[2] = std::to_string(c.timestamp);
            f[3] = c.text;
            csv::write_row(out, f);
        }
    }
}

void write_transactions_jsonl(std::ostream& out, const std::vector<CoinLedger>& ledgers) {
    for (const auto& l : ledgers) {
        for (const auto& tx : l.txs) {
            json obj = {{"coin", tx.coin},
                        {"block", tx.block},
                        {"index_in_block", tx.index_in_block},
                        {"kind", to_string(tx.kind)},
                        {"trader", tx.trader},
                        {"token_qty", tx.token_qty.to_string()},
                        {"sol_amount", tx.sol_amount.to_string()},
                        {"timestamp", tx.timestamp}};
            out << obj.dump() << '\n';
        }
    }
}

TxFormat format_from_path(const std::filesystem::path& path) {
    auto ext = path.extension().string();
    if (ext == ".jsonl" || ext == ".json" || ext == ".ndjson") return TxFormat::Jsonl;
    return TxFormat::Csv;
}

}  // namespace copyguard::chain

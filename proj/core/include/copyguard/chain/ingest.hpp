#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "copyguard/chain/model.hpp"
#include "copyguard/common/error.hpp"

namespace copyguard::chain {

inline constexpr std::string_view kTransactionsHeader =
    "coin,block,index_in_block,kind,trader,token_qty,sol_amount,timestamp";
inline constexpr std::string_view kCommentsHeader = "coin,wallet,timestamp,text";

enum class TxFormat { Csv, Jsonl };

struct Diagnostic {
    ErrorCode code;
    std::size_t row = 0;  // 0 when the diagnostic concerns a whole coin
    std::string coin;
    std::string message;
};

struct IngestOptions {
    // strict: the first malformed row aborts ingestion.
    // lenient: malformed rows are dropped and reported as diagnostics.
    bool strict = true;
};

struct IngestResult {
    std::vector<CoinLedger> ledgers;  // sorted by coin id
    std::vector<Diagnostic> diagnostics;
};

IngestResult ingest_transactions(std::istream& in, TxFormat format, const IngestOptions& opts = {});
IngestResult ingest_transactions(const std::filesystem::path& path, TxFormat format,
                                 const IngestOptions& opts = {});

// Attaches comments to matching ledgers; rows for unknown coins become warnings.
std::vector<Diagnostic> ingest_comments(std::istream& in, std::vector<CoinLedger>& ledgers,
                                        const IngestOptions& opts = {});
std::vector<Diagnostic> ingest_comments(const std::filesystem::path& path,
                                        std::vector<CoinLedger>& ledgers,
                                        const IngestOptions& opts = {});

// Builds ledgers from already-parsed rows (used by the simulator).
IngestResult assemble_ledgers(std::vector<TxRecord> rows);

void write_transactions_csv(std::ostream& out, const std::vector<CoinLedger>& ledgers);
void write_comments_csv(std::ostream& out, const std::vector<CoinLedger>& ledgers);
void write_transactions_jsonl(std::ostream& out, const std::vector<CoinLedger>& ledgers);

TxFormat format_from_path(const std::filesystem::path& path);

}  // namespace copyguard::chain

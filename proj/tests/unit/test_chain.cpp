#include <gtest/gtest.h>

#include <sstream>

#include "copyguard/chain/ingest.hpp"
#include "gen.hpp"

using namespace copyguard;
using namespace copyguard::chain;

namespace {

std::string header() { return std::string(kTransactionsHeader) + "\n"; }

IngestResult ingest_csv(const std::string& text, bool strict = true) {
    std::istringstream in(text);
    return ingest_transactions(in, TxFormat::Csv, IngestOptions{strict});
}

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorCode::Io;
}

}  // namespace

TEST(Ingest, ThreeRowsOneCoin) {
    auto r = ingest_csv(header() +
                        "c1,12,0,buy,B,5,0.1,1012\n"
                        "c1,10,0,create,A,0,0.02,1000\n"
                        "c1,10,1,buy,B,10,0.3,1000\n");
    ASSERT_EQ(r.ledgers.size(), 1u);
    const auto& l = r.ledgers[0];
    EXPECT_EQ(l.launch_block, 10u);
    EXPECT_EQ(l.creator, "A");
    EXPECT_EQ(l.txs.size(), 3u);
    EXPECT_EQ(l.txs[0].kind, TxKind::Create);
    EXPECT_EQ(l.txs[2].block, 12u);
    EXPECT_TRUE(r.diagnostics.empty());
}

TEST(Ingest, EmptyFile) {
    EXPECT_TRUE(ingest_csv("").ledgers.empty());
    EXPECT_TRUE(ingest_csv(header()).ledgers.empty());
}

TEST(Ingest, DuplicateCreateNamesCoin) {
    try {
        ingest_csv(header() + "zz,10,0,create,A,0,0,1\nzz,11,0,create,A,0,0,2\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DuplicateCreate);
        EXPECT_NE(std::string(e.what()).find("zz"), std::string::npos);
    }
}

TEST(Ingest, DuplicateOrderingKey) {
    EXPECT_EQ(code_of([] { ingest_csv(header() + "c,10,0,create,A,0,0,1\nc,10,0,buy,B,1,1,1\n"); }),
              ErrorCode::DuplicateOrderingKey);
}

TEST(Ingest, MalformedRowsCarryRowNumber) {
    try {
        ingest_csv(header() + "c,10,0,create,A,0,0,1\nc,11,0,buy,B,0,1,1\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MalformedRow);
        EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos) << e.what();
    }
    EXPECT_EQ(code_of([] { ingest_csv(header() + "c,10,0,mint,A,0,0,1\n"); }), ErrorCode::MalformedRow);
    EXPECT_EQ(code_of([] { ingest_csv(header() + "c,-1,0,buy,A,1,0,1\n"); }), ErrorCode::MalformedRow);
    EXPECT_EQ(code_of([] { ingest_csv(header() + "c,1,0,create,A,5,0,1\n"); }), ErrorCode::MalformedRow);
    EXPECT_EQ(code_of([] { ingest_csv("coin,block\n"); }), ErrorCode::MalformedRow);
}

TEST(Ingest, LenientModeKeepsGoodRows) {
    auto r = ingest_csv(header() + "c,10,0,create,A,0,0,1\nc,11,0,buy,B,x,1,1\nc,12,0,buy,B,1,1,1\n",
                        false);
    ASSERT_EQ(r.ledgers.size(), 1u);
    EXPECT_EQ(r.ledgers[0].txs.size(), 2u);
    ASSERT_EQ(r.diagnostics.size(), 1u);
    EXPECT_EQ(r.diagnostics[0].row, 3u);
}

TEST(Ingest, MissingCreateIsWarning) {
    auto r = ingest_csv(header() + "c,11,0,buy,B,1,1,1\n");
    ASSERT_EQ(r.ledgers.size(), 1u);
    EXPECT_FALSE(r.ledgers[0].creator_known());
    ASSERT_EQ(r.diagnostics.size(), 1u);
    EXPECT_EQ(r.diagnostics[0].code, ErrorCode::MissingCreate);
}

TEST(Ingest, JsonlAcceptsNumbersAndStrings) {
    std::istringstream in(
        R"({"coin":"c","block":10,"index_in_block":0,"kind":"create","trader":"A","token_qty":0,"sol_amount":"0.02","timestamp":5})"
        "\n\n"
        R"({"coin":"c","block":10,"index_in_block":1,"kind":"buy","trader":"B","token_qty":"1000.5","sol_amount":0.25,"timestamp":5})"
        "\n");
    auto r = ingest_transactions(in, TxFormat::Jsonl);
    ASSERT_EQ(r.ledgers.size(), 1u);
    EXPECT_EQ(r.ledgers[0].txs[1].token_qty, Decimal::parse("1000.5"));
    EXPECT_EQ(r.ledgers[0].txs[1].sol_amount, Decimal::parse("0.25"));
}

TEST(Comments, AttachAndFlagReferences) {
    auto r = ingest_csv(header() + "c,10,0,create,A,0,0,1\n");
    std::istringstream in(std::string(kCommentsHeader) +
                          "\nc,W1,20,\"#88857219 show screenshot\"\n"
                          "c,W2,15,TO THE MOON!!!\n"
                          "nope,W3,16,hello\n");
    auto warnings = ingest_comments(in, r.ledgers);
    ASSERT_EQ(warnings.size(), 1u);
    EXPECT_EQ(warnings[0].coin, "nope");
    const auto& cs = r.ledgers[0].comments;
    ASSERT_EQ(cs.size(), 2u);
    EXPECT_EQ(cs[0].text, "TO THE MOON!!!");
    EXPECT_FALSE(cs[0].references_other_wallet);
    EXPECT_TRUE(cs[1].references_other_wallet);
}

TEST(Comments, ReferencePattern) {
    EXPECT_TRUE(references_other_wallet("#123456"));
    EXPECT_FALSE(references_other_wallet("#12345"));
    EXPECT_FALSE(references_other_wallet("123456789"));
    EXPECT_TRUE(references_other_wallet("ok #1 then #9999999"));
}

TEST(Ingest, RoundTripProperty) {
    cgtest::Gen g(2024);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<TxRecord> rows;
        const int coins = static_cast<int>(g.integer(1, 4));
        for (int c = 0; c < coins; ++c) {
            const std::string coin = "coin" + std::to_string(c);
            const std::uint64_t b0 = static_cast<std::uint64_t>(g.integer(0, 1000));
            if (g.coin(0.8)) rows.push_back({coin, b0, 0, TxKind::Create, "creator", {}, g.decimal(0, 1), 1000});
            const int n = static_cast<int>(g.integer(0, 30));
            for (int i = 0; i < n; ++i) {
                TxRecord tx;
                tx.coin = coin;
                tx.block = b0 + static_cast<std::uint64_t>(i / 3);
                tx.index_in_block = static_cast<std::uint32_t>(i % 3 + 1);
                tx.kind = g.coin(0.1) ? TxKind::Transfer : (g.coin() ? TxKind::Buy : TxKind::Sell);
                tx.trader = "w" + std::to_string(g.integer(0, 5));
                tx.token_qty = g.decimal(1, 1'000'000);
                tx.sol_amount = g.decimal(0, 10);
                tx.timestamp = 1000 + i;
                rows.push_back(tx);
            }
        }
        auto first = assemble_ledgers(rows);
        std::ostringstream out;
        write_transactions_csv(out, first.ledgers);
        auto second = ingest_csv(out.str());
        ASSERT_EQ(first.ledgers, second.ledgers);

        std::ostringstream jout;
        write_transactions_jsonl(jout, first.ledgers);
        std::istringstream jin(jout.str());
        EXPECT_EQ(ingest_transactions(jin, TxFormat::Jsonl).ledgers, first.ledgers);

        for (const auto& l : second.ledgers) {
            for (std::size_t i = 0; i < l.txs.size(); ++i) {
                if (l.txs[i].is_trade()) EXPECT_TRUE(l.txs[i].token_qty.is_positive());
                if (i > 0) EXPECT_TRUE(ordering_less(l.txs[i - 1], l.txs[i]));
            }
        }
    }
}

TEST(Ingest, CommentsRoundTrip) {
    auto r = ingest_csv(header() + "c,10,0,create,A,0,0,1\n");
    r.ledgers[0].comments.push_back(make_comment("c", "W", 3, "line one\nline \"two\", #1234567"));
    r.ledgers[0].comments.push_back(make_comment("c", "V", 4, "LFG"));
    std::ostringstream out;
    write_comments_csv(out, r.ledgers);
    auto copy = ingest_csv(header() + "c,10,0,create,A,0,0,1\n");
    std::istringstream in(out.str());
    ingest_comments(in, copy.ledgers);
    EXPECT_EQ(copy.ledgers, r.ledgers);
}

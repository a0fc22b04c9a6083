#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "copyguard/chain/model.hpp"
#include "copyguard/curve/bonding_curve.hpp"
#include "copyguard/detect/detectors.hpp"

namespace copyguard::agents {

struct Bucketing {
    enum class Mode { PerBlock, Seconds } mode = Mode::PerBlock;
    std::int64_t seconds = 60;
};

struct Bar {
    std::int64_t start_ts = 0;
    std::uint64_t first_block = 0;
    double open = 0, high = 0, low = 0, close = 0;
    double volume = 0;  // SOL traded in the bucket
    std::size_t trades = 0;
};

struct MechanicalityParams {
    double w_equal = 0.4, w_cv = 0.3, w_run = 0.3;
    double body_tolerance = 0.05;  // relative difference for "equal" bodies
};

struct CandlestickSeries {
    Bucketing bucketing;
    std::vector<Bar> bars;
    double mechanicality = 0;
};

// The first bar opens at its first trade, later bars at the previous close,
// so a single-trade bucket after the first still has a body. Error(EmptyLedger) without trades.
CandlestickSeries build_candles(const chain::CoinLedger& ledger, const Bucketing& bucketing,
                                const curve::CurveParams& params, const detect::DetectionConfig& cfg,
                                const MechanicalityParams& mp = {});

// Score in [0, 1]: equal consecutive up-bodies, low spread of up-bodies,
// longest rising run. Fewer than two bars score 0.
double mechanicality(const std::vector<Bar>& bars, const MechanicalityParams& mp = {});

// Compact text table for prompts without an image part.
std::string candles_table(const CandlestickSeries& s, std::size_t max_rows = 40);

// PNG bytes (8-bit RGB).
std::vector<unsigned char> render_png(const CandlestickSeries& s, int width = 640, int height = 360);

}  // namespace copyguard::agents

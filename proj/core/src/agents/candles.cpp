#include "copyguard/agents/candles.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "copyguard/common/error.hpp"

namespace copyguard::agents {

CandlestickSeries build_candles(const chain::CoinLedger& ledger, const Bucketing& bucketing,
                                const curve::CurveParams& params, const detect::DetectionConfig& cfg,
                                const MechanicalityParams& mp) {
    std::vector<const chain::TxRecord*> trades;
    for (const auto& tx : ledger.txs)
        if (tx.is_trade()) trades.push_back(&tx);
    if (trades.empty()) throw Error(ErrorCode::EmptyLedger, "coin " + ledger.coin + ": no trades for candles");
    if (bucketing.mode == Bucketing::Mode::Seconds && bucketing.seconds <= 0)
        throw Error(ErrorCode::InvalidConfig, "candle bucket seconds must be positive");

    const auto path = detect::price_path(ledger, params, cfg);
    CandlestickSeries s;
    s.bucketing = bucketing;
    double prev_close = 0;
    const std::int64_t origin = ledger.start_ts().value_or(trades.front()->timestamp);
    std::int64_t current_key = 0;
    for (std::size_t i = 0; i < trades.size(); ++i) {
        const auto& pt = path.points[i];
        const double px = to_double(pt.price);
        const std::int64_t key = bucketing.mode == Bucketing::Mode::PerBlock
                                     ? static_cast<std::int64_t>(pt.block)
                                     : (pt.timestamp - origin) / bucketing.seconds;
        if (s.bars.empty() || key != current_key) {
            prev_close = s.bars.empty() ? px : s.bars.back().close;
            Bar b;
            b.start_ts = bucketing.mode == Bucketing::Mode::PerBlock ? pt.timestamp : origin + key * bucketing.seconds;
            b.first_block = pt.block;
            b.open = b.high = b.low = prev_close;
            s.bars.push_back(b);
            current_key = key;
        }
        Bar& b = s.bars.back();
        b.close = px;
        b.high = std::max(b.high, px);
        b.low = std::min(b.low, px);
        b.volume += trades[i]->sol_amount.to_double();
        ++b.trades;
    }
    s.mechanicality = mechanicality(s.bars, mp);
    return s;
}

double mechanicality(const std::vector<Bar>& bars, const MechanicalityParams& mp) {
    const std::size_t n = bars.size();
    if (n < 2) return 0.0;
    std::vector<double> body(n);
    for (std::size_t i = 0; i < n; ++i) body[i] = bars[i].open > 0 ? bars[i].close / bars[i].open - 1.0 : 0.0;

    std::size_t equal_pairs = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (body[i] <= 0 || body[i + 1] <= 0) continue;
        if (std::abs(body[i] - body[i + 1]) <= mp.body_tolerance * std::max(body[i], body[i + 1])) ++equal_pairs;
    }
    const double equal = static_cast<double>(equal_pairs) / static_cast<double>(n - 1);

    std::vector<double> up;
    for (double b : body)
        if (b > 0) up.push_back(b);
    double regular = 0.0;
    if (up.size() >= 2) {
        double m = 0;
        for (double u : up) m += u;
        m /= static_cast<double>(up.size());
        double ss = 0;
        for (double u : up) ss += (u - m) * (u - m);
        const double cv = std::sqrt(ss / static_cast<double>(up.size() - 1)) / m;
        regular = 1.0 - std::min(1.0, cv);
    }

    std::size_t run = 0, best = 0;
    for (double b : body) {
        run = b > 0 ? run + 1 : 0;
        best = std::max(best, run);
    }
    const double run_share = static_cast<double>(best) / static_cast<double>(n);

    const double wsum = mp.w_equal + mp.w_cv + mp.w_run;
    if (!(wsum > 0)) throw Error(ErrorCode::InvalidConfig, "mechanicality weights must have a positive sum");
    return std::clamp((mp.w_equal * equal + mp.w_cv * regular + mp.w_run * run_share) / wsum, 0.0, 1.0);
}

std::string candles_table(const CandlestickSeries& s, std::size_t max_rows) {
    std::string out = "bar,open,high,low,close,volume_sol\n";
    const std::size_t n = s.bars.size();
    const std::size_t from = n > max_rows ? n - max_rows : 0;
    char line[256];
    for (std::size_t i = from; i < n; ++i) {
        const auto& b = s.bars[i];
        std::snprintf(line, sizeof line, "%zu,%.4e,%.4e,%.4e,%.4e,%.3f\n", i, b.open, b.high, b.low, b.close, b.volume);
        out += line;
    }
    return out;
}

namespace {

struct Canvas {
    int w, h;
    std::vector<unsigned char> px;
    Canvas(int w_, int h_) : w(w_), h(h_), px(static_cast<std::size_t>(w_ * h_ * 3), 255) {}
    void set(int x, int y, const unsigned char c[3]) {
        if (x < 0 || y < 0 || x >= w || y >= h) return;
        auto* p = &px[static_cast<std::size_t>((y * w + x) * 3)];
        p[0] = c[0];
        p[1] = c[1];
        p[2] = c[2];
    }
    void rect(int x0, int y0, int x1, int y1, const unsigned char c[3]) {
        if (y0 > y1) std::swap(y0, y1);
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x) set(x, y, c);
    }
};

void append_png(png_structp png, png_bytep data, png_size_t len) {
    auto* out = static_cast<std::vector<unsigned char>*>(png_get_io_ptr(png));
    out->insert(out->end(), data, data + len);
}

}  // namespace

std::vector<unsigned char> render_png(const CandlestickSeries& s, int width, int height) {
    if (width < 16 || height < 16) throw Error(ErrorCode::InvalidConfig, "chart size too small");
    Canvas cv(width, height);
    static const unsigned char green[3] = {38, 166, 91}, red[3] = {214, 69, 65}, grey[3] = {120, 120, 120};
    if (!s.bars.empty()) {
        double lo = s.bars.front().low, hi = s.bars.front().high;
        for (const auto& b : s.bars) {
            lo = std::min(lo, b.low);
            hi = std::max(hi, b.high);
        }
        if (hi <= lo) hi = lo * 1.01 + 1e-12;
        const int pad = 8;
        auto y_of = [&](double p) {
            return pad + static_cast<int>(std::lround((hi - p) / (hi - lo) * (height - 2 * pad - 1)));
        };
        const double slot = static_cast<double>(width - 2 * pad) / static_cast<double>(s.bars.size());
        const int half = std::max(0, static_cast<int>(slot * 0.35));
        for (std::size_t i = 0; i < s.bars.size(); ++i) {
            const auto& b = s.bars[i];
            const int x = pad + static_cast<int>(slot * (static_cast<double>(i) + 0.5));
            cv.rect(x, y_of(b.high), x, y_of(b.low), grey);
            cv.rect(x - half, y_of(b.open), x + half, y_of(b.close), b.close >= b.open ? green : red);
        }
    }

    std::vector<unsigned char> out;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw Error(ErrorCode::Io, "png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info || setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error(ErrorCode::Io, "PNG encoding failed");
    }
    png_set_write_fn(png, &out, append_png, nullptr);
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < height; ++y) png_write_row(png, &cv.px[static_cast<std::size_t>(y * width * 3)]);
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

}  // namespace copyguard::agents

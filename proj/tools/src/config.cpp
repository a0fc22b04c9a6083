#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "copyguard/common/error.hpp"

namespace copyguard::cli {

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& what) {
    throw Error(ErrorCode::InvalidConfig, "config `" + key + "`: " + what);
}

// One mapping node; every key must be consumed before finish().
class Section {
public:
    Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
        if (node_ && !node_.IsNull() && !node_.IsMap()) bad(path_.empty() ? "<root>" : path_, "expected a mapping");
    }

    std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

    YAML::Node take(const std::string& k) {
        seen_.insert(k);
        if (!node_ || !node_.IsMap()) return YAML::Node();
        return node_[k];
    }

    template <class T>
    void get(const std::string& k, T& out) {
        const auto n = take(k);
        if (!n || n.IsNull()) return;
        if (!n.IsScalar()) bad(key(k), "expected a scalar");
        try {
            out = n.as<T>();
        } catch (const YAML::Exception&) {
            bad(key(k), "cannot read `" + n.Scalar() + "`");
        }
    }

    void get_decimal(const std::string& k, Decimal& out) {
        std::string s;
        get(k, s);
        if (s.empty()) return;
        const auto d = Decimal::try_parse(s);
        if (!d) bad(key(k), "not a decimal: `" + s + "`");
        out = *d;
    }

    Section sub(const std::string& k) { return Section(take(k), key(k)); }

    // Keys of a free-form mapping (the scenario mix).
    std::vector<std::string> keys() const {
        std::vector<std::string> out;
        if (node_ && node_.IsMap())
            for (const auto& kv : node_) out.push_back(kv.first.as<std::string>());
        return out;
    }

    void finish() const {
        if (!node_ || !node_.IsMap()) return;
        for (const auto& kv : node_) {
            const auto k = kv.first.as<std::string>();
            if (!seen_.count(k)) bad(key(k), "unknown key");
        }
    }

private:
    YAML::Node node_;
    std::string path_;
    std::set<std::string> seen_;
};

template <class T>
void get_non_negative(Section& s, const std::string& k, T& out) {
    long long v = static_cast<long long>(out);
    s.get(k, v);
    if (v < 0) bad(s.key(k), "must be >= 0");
    out = static_cast<T>(v);
}

void read_simulate(Section s, SimulateConfig& c) {
    get_non_negative(s, "n_coins", c.n_coins);
    if (auto m = s.sub("mix"); !m.keys().empty()) {
        std::map<sim::ScenarioKind, double> mix;
        for (const auto& k : m.keys()) {
            const auto kind = sim::parse_scenario_kind(k);
            if (!kind) bad(m.key(k), "unknown scenario kind");
            double w = 0;
            m.get(k, w);
            mix[*kind] = w;
        }
        c.mix = std::move(mix);
    }
    auto& d = c.dataset;
    auto ds = s.sub("dataset");
    get_non_negative(ds, "pool_size", d.pool_size);
    ds.get("skilled_frac", d.skilled_frac);
    ds.get("mean_participants", d.mean_participants);
    ds.get("turn_min", d.turn_min);
    ds.get("turn_max", d.turn_max);
    ds.get("gap_min", d.gap_min);
    ds.get("gap_max", d.gap_max);
    ds.get("tail_blocks", d.tail_blocks);
    ds.finish();
    auto& b = d.base;
    auto sc = s.sub("scenario");
    sc.get("n_controlled_wallets", b.n_controlled_wallets);
    sc.get("flip_count", b.flip_count);
    sc.get("gradual_span_blocks", b.gradual_span_blocks);
    sc.get("sniper_delay_blocks", b.sniper_delay_blocks);
    sc.get("comment_bot_count", b.comment_bot_count);
    sc.get("organic_comment_count", b.organic_comment_count);
    sc.get("exit_blocks", b.exit_blocks);
    sc.get("dump_lead_min", b.dump_lead_min);
    sc.get("dump_lead_max", b.dump_lead_max);
    sc.get("controlled_budget_sol", b.controlled_budget_sol);
    sc.get("sniper_budget_sol", b.sniper_budget_sol);
    sc.get("gradual_buy_sol", b.gradual_buy_sol);
    sc.get("bump_trade_sol", b.bump_trade_sol);
    sc.get("retail_size_mu", b.retail_size_mu);
    sc.get("retail_size_sigma", b.retail_size_sigma);
    sc.get("attention_boost", b.attention_boost);
    sc.finish();
    s.finish();
}

// Knobs the scenarios share with detection and the curve.
void link_simulation(RunConfig& c) {
    auto& b = c.simulate.dataset.base;
    b.curve = c.curve;
    b.sniper_window_K = c.detection.sniper_window_K;
    b.bump_xi = c.detection.bump_threshold_xi.to_double();
    b.bump_epsilon = c.detection.bump_epsilon.to_double();
    b.comment_min_count = c.detection.comment_bot_min_count;
    b.dump_fraction = c.detection.dump_fraction;
    c.simulate.dataset.workers = c.workers;
}

void read_root(const YAML::Node& root, RunConfig& c) {
    Section r(root, "");
    r.get("seed", c.seed);
    get_non_negative(r, "workers", c.workers);
    r.get("strict_ingest", c.strict_ingest);

    {
        auto s = r.sub("curve");
        Decimal x = c.curve.x_virtual, y = c.curve.y_virtual, fee = c.curve.fee_rate;
        s.get_decimal("x_virtual", x);
        s.get_decimal("y_virtual", y);
        s.get_decimal("fee_rate", fee);
        s.finish();
        c.curve = curve::CurveParams::make(x, y, fee);
    }
    {
        auto s = r.sub("detection");
        auto& d = c.detection;
        s.get("sniper_window_k", d.sniper_window_K);
        s.get_decimal("bump_threshold_xi", d.bump_threshold_xi);
        s.get_decimal("bump_epsilon", d.bump_epsilon);
        s.get("comment_bot_min_count", d.comment_bot_min_count);
        s.get("curve_replay", d.curve_replay);
        std::string proxy;
        s.get("liquidity_proxy", proxy);
        if (proxy == "deposited_sol") d.liquidity_proxy = detect::LiquidityProxy::DepositedSol;
        else if (proxy == "price") d.liquidity_proxy = detect::LiquidityProxy::Price;
        else if (!proxy.empty()) bad(s.key("liquidity_proxy"), "expected deposited_sol or price");
        s.get("dump_fraction", d.dump_fraction);
        s.finish();
    }
    {
        auto s = r.sub("features");
        std::string val;
        s.get("terminal_valuation", val);
        if (val == "last_price") c.valuation = features::TerminalValuation::LastPrice;
        else if (val == "zero") c.valuation = features::TerminalValuation::Zero;
        else if (!val.empty()) bad(s.key("terminal_valuation"), "expected last_price or zero");
        s.get("usd_prices", c.usd_prices);
        s.get("t_stat_cut", c.conditions.t_stat_cut);
        s.get("std_cut", c.conditions.std_cut);
        s.get("low_percentile", c.conditions.low_pct);
        s.get("high_percentile", c.conditions.high_pct);
        s.finish();
    }
    {
        auto s = r.sub("split");
        s.get("train", c.split.train);
        s.get("val", c.split.val);
        s.get("test", c.split.test);
        s.finish();
    }
    {
        auto s = r.sub("agents");
        std::string mode;
        s.get("mode", mode);
        if (!mode.empty()) {
            const auto m = pipeline::parse_agent_mode(mode);
            if (!m) bad(s.key("mode"), "expected rule, llm or hybrid");
            c.mode = *m;
        }
        s.get("mechanicality_cut", c.rule.mechanicality_cut);
        std::string bucketing;
        s.get("bucketing", bucketing);
        if (bucketing == "per_block") c.bucketing.mode = agents::Bucketing::Mode::PerBlock;
        else if (bucketing == "seconds") c.bucketing.mode = agents::Bucketing::Mode::Seconds;
        else if (!bucketing.empty()) bad(s.key("bucketing"), "expected per_block or seconds");
        s.get("bucket_seconds", c.bucketing.seconds);
        s.get("attach_image", c.attach_image);
        auto cr = s.sub("comment_rule");
        cr.get("caps_ratio", c.comment_rule.caps_ratio);
        cr.get("max_length", c.comment_rule.max_length);
        if (auto n = cr.take("hype_terms"); n && !n.IsNull()) {
            if (!n.IsSequence()) bad(cr.key("hype_terms"), "expected a list");
            c.comment_rule.hype_terms.clear();
            for (const auto& t : n) c.comment_rule.hype_terms.push_back(t.as<std::string>());
        }
        cr.finish();
        s.finish();
    }
    {
        auto s = r.sub("llm");
        s.get("endpoint", c.chat.endpoint);
        s.get("path", c.chat.path);
        s.get("api_key_env", c.chat.api_key_env);
        s.get("timeout_seconds", c.chat.timeout_seconds);
        s.get("model", c.llm.model);
        s.get("max_retries", c.llm.max_retries);
        long long backoff = c.llm.backoff.count();
        s.get("backoff_ms", backoff);
        c.llm.backoff = std::chrono::milliseconds(backoff);
        get_non_negative(s, "max_in_flight", c.llm.max_in_flight);
        s.finish();
    }
    {
        auto s = r.sub("ensemble");
        s.get("threshold_step", c.threshold_step);
        s.finish();
    }
    read_simulate(r.sub("simulate"), c.simulate);
    r.finish();
}

YAML::Node parse_yaml(const std::string& text, const std::string& what) {
    try {
        return YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw Error(ErrorCode::InvalidConfig, what + ": " + e.what());
    }
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw Error(ErrorCode::MissingInput, "cannot read " + p.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

std::vector<double> RunConfig::threshold_grid() const {
    const auto n = static_cast<int>(std::lround(1.0 / threshold_step));
    std::vector<double> g;
    for (int i = 0; i <= n; ++i) g.push_back(i / static_cast<double>(n));
    return g;
}

void RunConfig::validate() const {
    detection.validate();
    if (std::abs(split.train + split.val + split.test - 1.0) > 1e-9 || split.train < 0 || split.val < 0 ||
        split.test < 0)
        bad("split", "fractions must be non-negative and sum to 1");
    if (!(threshold_step > 0 && threshold_step <= 0.5)) bad("ensemble.threshold_step", "must be in (0, 0.5]");
    const double n = 1.0 / threshold_step;
    if (std::abs(n - std::round(n)) > 1e-9) bad("ensemble.threshold_step", "must divide 1 evenly");
    if (!(rule.mechanicality_cut >= 0 && rule.mechanicality_cut <= 1))
        bad("agents.mechanicality_cut", "must be in [0, 1]");
    if (bucketing.seconds <= 0) bad("agents.bucket_seconds", "must be > 0");
    if (!(conditions.low_pct >= 0 && conditions.low_pct <= conditions.high_pct && conditions.high_pct <= 100))
        bad("features", "percentiles must satisfy 0 <= low <= high <= 100");
    if (llm.max_retries < 0) bad("llm.max_retries", "must be >= 0");
    if (llm.max_in_flight == 0) bad("llm.max_in_flight", "must be >= 1");
    if (llm.backoff.count() < 0) bad("llm.backoff_ms", "must be >= 0");
    if (chat.timeout_seconds <= 0) bad("llm.timeout_seconds", "must be > 0");
    if (simulate.n_coins == 0) bad("simulate.n_coins", "must be > 0");
    double total = 0;
    for (const auto& [k, w] : simulate.mix) {
        if (w < 0) bad("simulate.mix." + std::string(sim::to_string(k)), "must be >= 0");
        total += w;
    }
    if (!(total > 0)) bad("simulate.mix", "weights must sum to a positive value");
    const auto& d = simulate.dataset;
    if (d.turn_min > d.turn_max || d.gap_min > d.gap_max || d.turn_min < 1 || d.gap_min < 1)
        bad("simulate.dataset", "ranges must satisfy 1 <= min <= max");
    if (!(d.skilled_frac >= 0 && d.skilled_frac <= 1)) bad("simulate.dataset.skilled_frac", "must be in [0, 1]");
    if (d.pool_size == 0) bad("simulate.dataset.pool_size", "must be > 0");
}

nlohmann::ordered_json RunConfig::canonical() const {
    using nlohmann::ordered_json;
    ordered_json mix = ordered_json::object();
    for (const auto& [k, w] : simulate.mix) mix[std::string(sim::to_string(k))] = w;
    const auto& d = simulate.dataset;
    const auto& b = d.base;
    ordered_json j;
    j["seed"] = seed;
    j["workers"] = workers;
    j["strict_ingest"] = strict_ingest;
    j["curve"] = {{"x_virtual", curve.x_virtual.to_string()},
                  {"y_virtual", curve.y_virtual.to_string()},
                  {"fee_rate", curve.fee_rate.to_string()}};
    j["detection"] = {
        {"sniper_window_k", detection.sniper_window_K},
        {"bump_threshold_xi", detection.bump_threshold_xi.to_string()},
        {"bump_epsilon", detection.bump_epsilon.to_string()},
        {"comment_bot_min_count", detection.comment_bot_min_count},
        {"curve_replay", detection.curve_replay},
        {"liquidity_proxy",
         detection.liquidity_proxy == detect::LiquidityProxy::DepositedSol ? "deposited_sol" : "price"},
        {"dump_fraction", detection.dump_fraction}};
    j["features"] = {{"terminal_valuation",
                      valuation == features::TerminalValuation::LastPrice ? "last_price" : "zero"},
                     {"usd_prices", usd_prices},
                     {"t_stat_cut", conditions.t_stat_cut},
                     {"std_cut", conditions.std_cut},
                     {"low_percentile", conditions.low_pct},
                     {"high_percentile", conditions.high_pct}};
    j["split"] = {{"train", split.train}, {"val", split.val}, {"test", split.test}};
    j["agents"] = {
        {"mode", std::string(pipeline::to_string(mode))},
        {"mechanicality_cut", rule.mechanicality_cut},
        {"bucketing", bucketing.mode == agents::Bucketing::Mode::PerBlock ? "per_block" : "seconds"},
        {"bucket_seconds", bucketing.seconds},
        {"attach_image", attach_image},
        {"comment_rule",
         {{"caps_ratio", comment_rule.caps_ratio},
          {"max_length", comment_rule.max_length},
          {"hype_terms", comment_rule.hype_terms}}}};
    j["llm"] = {{"endpoint", chat.endpoint},
                {"path", chat.path},
                {"api_key_env", chat.api_key_env},
                {"timeout_seconds", chat.timeout_seconds},
                {"model", llm.model},
                {"max_retries", llm.max_retries},
                {"backoff_ms", llm.backoff.count()},
                {"max_in_flight", llm.max_in_flight}};
    j["ensemble"] = {{"threshold_step", threshold_step}};
    j["simulate"] = {
        {"n_coins", simulate.n_coins},
        {"mix", std::move(mix)},
        {"dataset",
         {{"pool_size", d.pool_size},
          {"skilled_frac", d.skilled_frac},
          {"mean_participants", d.mean_participants},
          {"turn_min", d.turn_min},
          {"turn_max", d.turn_max},
          {"gap_min", d.gap_min},
          {"gap_max", d.gap_max},
          {"tail_blocks", d.tail_blocks}}},
        {"scenario",
         {{"n_controlled_wallets", b.n_controlled_wallets},
          {"flip_count", b.flip_count},
          {"gradual_span_blocks", b.gradual_span_blocks},
          {"sniper_delay_blocks", b.sniper_delay_blocks},
          {"comment_bot_count", b.comment_bot_count},
          {"organic_comment_count", b.organic_comment_count},
          {"exit_blocks", b.exit_blocks},
          {"dump_lead_min", b.dump_lead_min},
          {"dump_lead_max", b.dump_lead_max},
          {"controlled_budget_sol", b.controlled_budget_sol},
          {"sniper_budget_sol", b.sniper_budget_sol},
          {"gradual_buy_sol", b.gradual_buy_sol},
          {"bump_trade_sol", b.bump_trade_sol},
          {"retail_size_mu", b.retail_size_mu},
          {"retail_size_sigma", b.retail_size_sigma},
          {"attention_boost", b.attention_boost}}}};
    return j;
}

RunConfig parse_config(const std::string& text) {
    RunConfig c;
    read_root(parse_yaml(text, "config"), c);
    link_simulation(c);
    c.validate();
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    try {
        return parse_config(slurp(path));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::InvalidConfig)
            throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
        throw;
    }
}

SimulateConfig load_simulate_spec(const std::filesystem::path& path, const RunConfig& base) {
    RunConfig c = base;
    try {
        read_simulate(Section(parse_yaml(slurp(path), "scenario spec"), ""), c.simulate);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::InvalidConfig)
            throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
        throw;
    }
    link_simulation(c);
    c.validate();
    return c.simulate;
}

}  // namespace copyguard::cli

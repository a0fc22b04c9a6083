#include "app.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "config.hpp"
#include "copyguard/chain/ingest.hpp"
#include "copyguard/common/error.hpp"
#include "copyguard/common/real.hpp"
#include "copyguard/econ/copier.hpp"
#include "copyguard/ensemble/ensemble.hpp"
#include "copyguard/ensemble/io.hpp"
#include "copyguard/pipeline/pipeline.hpp"
#include "manifest.hpp"
#include "trades.hpp"

namespace copyguard::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out = "out";

    std::string tx, comments, detections, features_path, verdicts, scores, spec, trades, mode, split = "test";
    std::optional<std::size_t> n;
    bool lenient = false;
    bool liquidate = false;
    std::string initial_sol = "0";
};

struct Context {
    Options opt;
    RunConfig cfg;
    std::ostream& out;
    std::string subcommand;
    std::vector<fs::path> inputs, outputs;

    std::size_t workers() const { return cfg.workers; }
};

bool has_extension(const std::string& p) { return fs::path(p).has_extension(); }

// A directory for multi-file subcommands; a file path when it has an extension.
fs::path out_dir(const Context& c) {
    const fs::path p = has_extension(c.opt.out) ? fs::path(c.opt.out).parent_path() : fs::path(c.opt.out);
    const fs::path dir = p.empty() ? fs::path(".") : p;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
    return dir;
}

fs::path artifact(const Context& c, const char* default_name) {
    if (has_extension(c.opt.out)) {
        out_dir(c);
        return c.opt.out;
    }
    return out_dir(c) / default_name;
}

// Explicit paths must exist; defaults fall back to the working directory.
fs::path input(const Context& c, const std::string& flag_value, const char* default_name, const char* produced_by) {
    const fs::path p = flag_value.empty() ? out_dir(c) / default_name : fs::path(flag_value);
    if (!fs::exists(p)) {
        std::string msg = "missing input: " + p.string();
        if (produced_by) msg += " (expected output of `copyguard " + std::string(produced_by) + "`)";
        throw Error(ErrorCode::MissingInput, msg);
    }
    return p;
}

std::optional<fs::path> optional_input(const Context& c, const std::string& flag_value, const char* default_name) {
    if (!flag_value.empty()) return input(c, flag_value, default_name, nullptr);
    const fs::path p = out_dir(c) / default_name;
    if (fs::exists(p)) return p;
    return std::nullopt;
}

std::ofstream open_out(Context& c, const fs::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error(ErrorCode::Io, "cannot write " + p.string());
    c.outputs.push_back(p);
    return f;
}

void write_text(Context& c, const fs::path& p, const std::string& text) {
    auto f = open_out(c, p);
    f << text;
}

void finish(Context& c, const fs::path& dir) {
    Manifest m{c.subcommand, c.cfg.seed, c.cfg.canonical(), c.inputs, c.outputs};
    m.write(dir / ("manifest_" + c.subcommand + ".json"));
}

std::vector<chain::CoinLedger> load_ledgers(Context& c, const fs::path& tx, const std::optional<fs::path>& comments,
                                            std::vector<chain::Diagnostic>* diags = nullptr) {
    chain::IngestOptions io{c.cfg.strict_ingest};
    auto res = chain::ingest_transactions(tx, chain::format_from_path(tx), io);
    c.inputs.push_back(tx);
    if (comments) {
        auto d = chain::ingest_comments(*comments, res.ledgers, io);
        res.diagnostics.insert(res.diagnostics.end(), d.begin(), d.end());
        c.inputs.push_back(*comments);
    }
    if (diags) *diags = std::move(res.diagnostics);
    return std::move(res.ledgers);
}

std::vector<chain::CoinLedger> ledgers_from_flags(Context& c) {
    const auto tx = input(c, c.opt.tx, "transactions.csv", "simulate");
    return load_ledgers(c, tx, optional_input(c, c.opt.comments, "comments.csv"));
}

pipeline::AgentMode mode_of(const Context& c) {
    if (c.opt.mode.empty()) return c.cfg.mode;
    const auto m = pipeline::parse_agent_mode(c.opt.mode);
    if (!m) throw Error(ErrorCode::InvalidConfig, "--mode must be rule, llm or hybrid");
    return *m;
}

pipeline::AgentInputs agent_inputs(const Context& c, std::span<const chain::CoinLedger> ledgers) {
    pipeline::AgentInputs in;
    in.ledgers = ledgers;
    in.curve = c.cfg.curve;
    in.detection = c.cfg.detection;
    in.bucketing = c.cfg.bucketing;
    in.mech = c.cfg.mech;
    in.rule = c.cfg.rule;
    in.attach_image = c.cfg.attach_image;
    in.workers = c.cfg.workers;
    return in;
}

std::vector<features::TraderSample> load_features(Context& c) {
    const auto p = input(c, c.opt.features_path, "features.csv", "features");
    c.inputs.push_back(p);
    return features::import_features(p);
}

std::vector<features::TraderSample> of_split(std::span<const features::TraderSample> s, features::Split split) {
    std::vector<features::TraderSample> out;
    for (const auto& x : s)
        if (x.split == split) out.push_back(x);
    return out;
}

std::vector<ensemble::VerdictRecord> produce_verdicts(Context& c, std::span<const features::TraderSample> samples,
                                                      std::span<const chain::CoinLedger> ledgers) {
    const auto in = agent_inputs(c, ledgers);
    if (mode_of(c) == pipeline::AgentMode::Rule) {
        const auto train = of_split(samples, features::Split::Train);
        const auto th = features::fit_conditions(train, c.cfg.conditions);
        return pipeline::rule_verdicts(samples, th, in);
    }
    agents::HttpChatClient client(c.cfg.chat);
    return pipeline::llm_verdicts(samples, in, client, c.cfg.llm);
}

// --- subcommands ---------------------------------------------------------

void cmd_ingest(Context& c) {
    const auto tx = input(c, c.opt.tx, "transactions.csv", nullptr);
    std::optional<fs::path> comments;
    if (!c.opt.comments.empty()) comments = input(c, c.opt.comments, "comments.csv", nullptr);
    if (c.opt.lenient) c.cfg.strict_ingest = false;
    std::vector<chain::Diagnostic> diags;
    const auto ledgers = load_ledgers(c, tx, comments, &diags);
    const auto dir = out_dir(c);
    {
        auto f = open_out(c, dir / "ingested_transactions.csv");
        chain::write_transactions_csv(f, ledgers);
    }
    {
        auto f = open_out(c, dir / "ingested_comments.csv");
        chain::write_comments_csv(f, ledgers);
    }
    {
        auto f = open_out(c, dir / "diagnostics.jsonl");
        for (const auto& d : diags)
            f << ordered_json{{"code", std::string(to_string(d.code))},
                              {"row", d.row},
                              {"coin", d.coin},
                              {"message", d.message}}
                     .dump()
              << '\n';
    }
    std::size_t n_tx = 0, n_comments = 0;
    for (const auto& l : ledgers) {
        n_tx += l.txs.size();
        n_comments += l.comments.size();
    }
    c.out << "ingested " << ledgers.size() << " coins, " << n_tx << " transactions, " << n_comments
          << " comments, " << diags.size() << " diagnostics\n";
    finish(c, dir);
}

void cmd_simulate(Context& c) {
    SimulateConfig sc = c.cfg.simulate;
    if (!c.opt.spec.empty()) {
        const auto p = input(c, c.opt.spec, "spec.yaml", nullptr);
        sc = load_simulate_spec(p, c.cfg);
        c.inputs.push_back(p);
    }
    if (c.opt.n) sc.n_coins = *c.opt.n;
    if (sc.n_coins == 0) throw Error(ErrorCode::InvalidConfig, "--n must be > 0");
    const auto ds = sim::generate_dataset(sc.n_coins, sc.mix, c.cfg.seed, sc.dataset);
    const auto dir = out_dir(c);
    sim::write_dataset(ds, dir);
    for (const char* f : {"transactions.csv", "comments.csv", "truth.jsonl", "labels.csv"})
        c.outputs.push_back(dir / f);
    c.out << "simulated " << ds.scenarios.size() << " coins, " << ds.labels.size() << " trader samples\n";
    finish(c, dir);
}

void cmd_detect(Context& c) {
    const auto ledgers = ledgers_from_flags(c);
    std::unique_ptr<detect::CommentClassifier> classifier;
    std::unique_ptr<agents::HttpChatClient> client;
    if (mode_of(c) == pipeline::AgentMode::Llm) {
        client = std::make_unique<agents::HttpChatClient>(c.cfg.chat);
        classifier = std::make_unique<agents::LlmCommentClassifier>(*client, c.cfg.llm);
    } else {
        classifier = std::make_unique<agents::RuleCommentClassifier>(c.cfg.comment_rule);
    }
    const auto reports = detect::detect_all(ledgers, c.cfg.detection, c.cfg.curve, classifier.get(), c.workers());
    const auto path = artifact(c, "detect.jsonl");
    {
        auto f = open_out(c, path);
        for (const auto& r : reports) f << detect::to_json_line(r) << '\n';
    }
    std::size_t flagged[4] = {};
    for (const auto& r : reports) {
        flagged[0] += r.flags.bundle == detect::Tri::True;
        flagged[1] += r.flags.sniper == detect::Tri::True;
        flagged[2] += r.flags.bump;
        flagged[3] += r.flags.comment == detect::Tri::True;
    }
    c.out << "detected " << reports.size() << " coins: bundle " << flagged[0] << ", sniper " << flagged[1]
          << ", bump " << flagged[2] << ", comment " << flagged[3] << "\n";
    finish(c, out_dir(c));
}

std::vector<detect::CoinReport> load_reports(Context& c) {
    const auto p = input(c, c.opt.detections, "detect.jsonl", "detect");
    c.inputs.push_back(p);
    std::ifstream f(p, std::ios::binary);
    std::vector<detect::CoinReport> out;
    std::string line;
    while (std::getline(f, line))
        if (!line.empty()) out.push_back(detect::report_from_json_line(line));
    return out;
}

void cmd_features(Context& c) {
    const auto ledgers = ledgers_from_flags(c);
    const auto reports = load_reports(c);
    features::FeatureOptions fo;
    fo.detection = c.cfg.detection;
    fo.valuation = c.cfg.valuation;
    fo.workers = c.workers();
    if (!c.cfg.usd_prices.empty()) {
        const fs::path p = c.cfg.usd_prices;
        if (!fs::exists(p)) throw Error(ErrorCode::MissingInput, "missing input: " + p.string() + " (usd_prices)");
        fo.usd = features::UsdPrices::load(p);
        c.inputs.push_back(p);
    }
    auto samples = features::build_samples(ledgers, reports, fo);
    features::split_chronological(samples, c.cfg.split);
    const auto path = artifact(c, "features.csv");
    {
        auto f = open_out(c, path);
        features::export_features(f, samples);
    }
    // informational; agents refit from the feature file
    const auto train = of_split(samples, features::Split::Train);
    try {
        const auto th = features::fit_conditions(train, c.cfg.conditions);
        write_text(c, out_dir(c) / "thresholds.json", features::thresholds_to_json(th) + "\n");
    } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateTrainingSet) throw;
        c.out << "warning: no condition thresholds: " << e.what() << "\n";
    }
    std::size_t pos = 0;
    for (const auto& s : samples) pos += s.label;
    c.out << "features for " << samples.size() << " samples (" << pos << " profitable)\n";
    finish(c, out_dir(c));
}

void cmd_agents(Context& c) {
    const auto samples = load_features(c);
    const auto ledgers = ledgers_from_flags(c);
    const auto verdicts = produce_verdicts(c, samples, ledgers);
    const auto path = artifact(c, "verdicts.jsonl");
    {
        auto f = open_out(c, path);
        ensemble::write_verdicts(f, verdicts);
    }
    c.out << "wrote " << verdicts.size() << " verdicts (" << pipeline::to_string(mode_of(c)) << " mode)\n";
    finish(c, out_dir(c));
}

// Joined samples from a verdict file or, without one, from agents run inline.
struct Evidence {
    std::vector<features::TraderSample> samples;
    std::vector<chain::CoinLedger> ledgers;  // empty when no transaction file is around
    std::vector<ensemble::Sample> joined;
    std::optional<std::vector<ensemble::ScoreRecord>> scores;
};

Evidence gather(Context& c, bool allow_scores) {
    Evidence e;
    e.samples = load_features(c);
    if (!c.opt.verdicts.empty() && !c.opt.scores.empty())
        throw Error(ErrorCode::InvalidConfig, "--verdicts and --scores are exclusive");
    if (!c.opt.scores.empty()) {
        if (!allow_scores) throw Error(ErrorCode::InvalidConfig, "this subcommand needs agent verdicts, not scores");
        const auto p = input(c, c.opt.scores, "scores.csv", nullptr);
        c.inputs.push_back(p);
        std::ifstream f(p, std::ios::binary);
        e.scores = ensemble::read_scores(f);
    }
    if (auto tx = optional_input(c, c.opt.tx, "transactions.csv"))
        e.ledgers = load_ledgers(c, *tx, optional_input(c, c.opt.comments, "comments.csv"));
    if (e.scores) return e;
    std::vector<ensemble::VerdictRecord> verdicts;
    if (!c.opt.verdicts.empty()) {
        const auto p = input(c, c.opt.verdicts, "verdicts.jsonl", "agents");
        c.inputs.push_back(p);
        std::ifstream f(p, std::ios::binary);
        verdicts = ensemble::read_verdicts(f);
    } else {
        if (e.ledgers.empty())
            throw Error(ErrorCode::MissingInput,
                        "missing input: " + (out_dir(c) / "transactions.csv").string() +
                            " (needed to run agents inline; or pass --verdicts)");
        verdicts = produce_verdicts(c, e.samples, e.ledgers);
    }
    e.joined = ensemble::join_verdicts(e.samples, verdicts);
    return e;
}

struct Scored {
    ensemble::EvalReport validation, test;
    std::optional<ensemble::ModelRun> run;
    std::optional<ensemble::EconomicsResult> economics;
};

Scored score(Context& c, Evidence& e) {
    const auto grid = c.cfg.threshold_grid();
    Scored s;
    if (e.scores) {
        auto v = ensemble::join_scores(e.samples, *e.scores, features::Split::Val);
        auto t = ensemble::join_scores(e.samples, *e.scores, features::Split::Test);
        s.validation = ensemble::evaluate_scores("validation", v.scores, v.labels, grid);
        s.test = ensemble::evaluate_scores("test", t.scores, t.labels, grid);
        if (!s.validation.sweep.empty()) s.test.threshold = ensemble::best_f1_threshold(s.validation.sweep);
        return s;
    }
    const auto val = ensemble::of_split(e.joined, features::Split::Val);
    const auto test = ensemble::of_split(e.joined, features::Split::Test);
    ensemble::EconomicsContext ec{e.ledgers, c.cfg.curve};
    auto run = ensemble::run_model(val, test, std::nullopt, e.ledgers.empty() ? nullptr : &ec, grid, c.workers());
    s.validation = run.validation;
    s.test = run.test;
    s.economics = run.economics;
    s.run = std::move(run);
    return s;
}

void write_plots(Context& c, const fs::path& dir, const ensemble::EvalReport& r) {
    {
        auto f = open_out(c, dir / "prec_f1_vs_threshold.csv");
        ensemble::write_sweep_csv(f, r.sweep);
    }
    {
        auto f = open_out(c, dir / "roc.csv");
        ensemble::write_roc_csv(f, r.roc);
    }
}

std::string fmt(std::optional<double> v) {
    if (!v) return "undefined";
    std::ostringstream ss;
    ss.precision(4);
    ss << std::fixed << *v;
    return ss.str();
}

void cmd_evaluate(Context& c) {
    auto e = gather(c, true);
    const auto s = score(c, e);
    const auto dir = out_dir(c);
    if (s.run) {
        write_text(c, dir / "report.json", ensemble::model_run_json(*s.run));
        if (s.economics) write_text(c, dir / "selection_economics.json", ensemble::economics_json(*s.economics));
    } else {
        ordered_json j{{"source", "scores"},
                       {"validation", ordered_json::parse(ensemble::report_json(s.validation))},
                       {"test", ordered_json::parse(ensemble::report_json(s.test))}};
        write_text(c, dir / "report.json", j.dump(2) + "\n");
    }
    write_plots(c, dir, s.test);
    c.out << "validation AUC " << fmt(s.validation.auc) << ", test AUC " << fmt(s.test.auc);
    if (s.run) {
        const auto& w = s.run->fit.weights.w;
        c.out << ", weights " << fmt(w[0]) << "/" << fmt(w[1]) << "/" << fmt(w[2]);
    }
    c.out << "\n";
    finish(c, dir);
}

void cmd_report(Context& c) {
    auto e = gather(c, true);
    const auto s = score(c, e);
    const auto split = features::parse_split(c.opt.split);
    if (!split || *split == features::Split::Train)
        throw Error(ErrorCode::InvalidConfig, "--split must be val or test");
    const auto dir = out_dir(c);
    write_plots(c, dir, *split == features::Split::Val ? s.validation : s.test);
    c.out << "plot data for the " << c.opt.split << " split written to " << dir.string() << "\n";
    finish(c, dir);
}

std::optional<double> pct(std::optional<double> delta, std::optional<double> base) {
    if (!delta || !base || *base == 0) return std::nullopt;
    return *delta / *base * 100.0;
}

void cmd_ablate(Context& c) {
    auto e = gather(c, false);
    const auto grid = c.cfg.threshold_grid();
    const auto val = ensemble::of_split(e.joined, features::Split::Val);
    const auto test = ensemble::of_split(e.joined, features::Split::Test);
    ensemble::EconomicsContext ec{e.ledgers, c.cfg.curve};
    const auto* ecp = e.ledgers.empty() ? nullptr : &ec;
    const auto full = ensemble::run_model(val, test, std::nullopt, ecp, grid, c.workers());
    std::vector<ensemble::AblationResult> rows;
    for (auto k : agents::kAllAgents) rows.push_back(ensemble::ablate(k, full, val, test, ecp, grid, c.workers()));
    const auto dir = out_dir(c);
    write_text(c, dir / "ablation.json", ensemble::ablation_json(full, rows));
    {
        auto f = open_out(c, dir / "ablation.csv");
        f << "ablation,auc,auc_change_pct,smart_money_gross_return,smart_money_change_pct,copier_gross_return,"
             "copier_change_pct,w_wallet,w_coin,w_timing\n";
        auto opt = [](std::optional<double> v) {
            if (!v) return std::string();
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.6f", *v);
            return std::string(buf);
        };
        auto line = [&](const std::string& name, const ensemble::ModelRun& m, std::optional<double> dauc,
                        std::optional<double> dsm, std::optional<double> dcp) {
            f << name << ',' << opt(m.test.auc) << ',' << opt(dauc) << ',' << opt(m.test.smart_money_gross_return)
              << ',' << opt(dsm) << ',' << opt(m.test.copier_gross_return) << ',' << opt(dcp) << ','
              << opt(m.fit.weights.w[0]) << ',' << opt(m.fit.weights.w[1]) << ',' << opt(m.fit.weights.w[2]) << '\n';
        };
        line("full", full, std::nullopt, std::nullopt, std::nullopt);
        for (const auto& r : rows)
            line("without_" + std::string(agents::to_string(r.dropped)), r.run, pct(r.delta_test_auc, full.test.auc),
                 pct(r.delta_smart_money_gross_return, full.test.smart_money_gross_return),
                 pct(r.delta_copier_gross_return, full.test.copier_gross_return));
    }
    c.out << "full test AUC " << fmt(full.test.auc);
    for (const auto& r : rows)
        c.out << ", without " << agents::to_string(r.dropped) << " " << fmt(r.run.test.auc);
    c.out << "\n";
    finish(c, dir);
}

void cmd_economics(Context& c) {
    const auto p = input(c, c.opt.trades, "trades.csv", nullptr);
    c.inputs.push_back(p);
    std::ifstream f(p, std::ios::binary);
    const auto trades = read_trade_csv(f);
    const auto x0 = Decimal::try_parse(c.opt.initial_sol);
    if (!x0 || x0->is_negative()) throw Error(ErrorCode::InvalidConfig, "--initial-sol must be a decimal >= 0");
    econ::TradeSeq seq;
    seq.trades = trades;
    seq.initial_state = curve::CurveState::fresh(c.cfg.curve);
    if (x0->is_positive()) seq.initial_state = curve::deposit(seq.initial_state, to_real(*x0));
    econ::CopierOptions co;
    co.liquidate_residual = c.opt.liquidate;
    const auto rep = econ::replay_with_copier(seq, co);
    const auto path = artifact(c, "economics.json");
    write_text(c, path, return_report_json(rep));
    c.out << return_report_summary(rep) << "\n";
    finish(c, out_dir(c));
}

ordered_json error_json(const std::string& code, const std::string& category, const std::string& message,
                        const std::string& sub) {
    return ordered_json{
        {"error", {{"code", code}, {"category", category}, {"message", message}, {"subcommand", sub}}}};
}

int exit_code(ErrorCategory cat) {
    switch (cat) {
        case ErrorCategory::Input: return 2;
        case ErrorCategory::External: return 3;
        case ErrorCategory::Internal: return 4;
    }
    return 4;
}

std::string_view category_name(ErrorCategory cat) {
    switch (cat) {
        case ErrorCategory::Input: return "input";
        case ErrorCategory::External: return "external";
        case ErrorCategory::Internal: return "internal";
    }
    return "internal";
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"copyguard: meme-coin copy-trading analysis pipeline", "copyguard"};
    app.fallthrough();
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));
    app.add_option("--config", o.config_path, "YAML config; defaults apply to missing keys");
    app.add_option("--seed", o.seed, "Master seed (overrides the config)");
    app.add_option("--out", o.out, "Output directory, or a file path for single-artifact subcommands")
        ->capture_default_str();

    std::vector<std::pair<CLI::App*, std::function<void(Context&)>>> subs;
    auto add = [&](const char* name, const char* help, std::function<void(Context&)> fn) {
        auto* s = app.add_subcommand(name, help);
        subs.emplace_back(s, std::move(fn));
        return s;
    };
    auto tx_flags = [&](CLI::App* s) {
        s->add_option("--tx", o.tx, "Transactions CSV or JSONL (default <out>/transactions.csv)");
        s->add_option("--comments", o.comments, "Comments CSV (default <out>/comments.csv when present)");
    };
    auto evidence_flags = [&](CLI::App* s, bool scores) {
        tx_flags(s);
        s->add_option("--features", o.features_path, "Feature CSV (default <out>/features.csv)");
        s->add_option("--verdicts", o.verdicts, "Verdict JSONL; without it the agents run inline");
        if (scores) s->add_option("--scores", o.scores, "External score CSV `wallet,coin,score`");
        s->add_option("--mode", o.mode, "Agent mode for inline runs: rule, llm or hybrid");
    };

    auto* ingest = add("ingest", "Validate and normalize transaction and comment files", cmd_ingest);
    tx_flags(ingest);
    ingest->add_flag("--lenient", o.lenient, "Drop malformed rows instead of failing");

    auto* simulate = add("simulate", "Generate a seeded synthetic corpus", cmd_simulate);
    simulate->add_option("--spec", o.spec, "Scenario spec YAML (same keys as the config's simulate section)");
    simulate->add_option("--n", o.n, "Number of coins");
    simulate->add_option("--out-dir", o.out, "Alias for --out");

    auto* det = add("detect", "Run the bot detectors per coin", cmd_detect);
    tx_flags(det);
    det->add_option("--mode", o.mode, "Comment classifier: rule/hybrid offline, llm via the chat endpoint");

    auto* feat = add("features", "Build trader samples, labels and chronological splits", cmd_features);
    tx_flags(feat);
    feat->add_option("--detect", o.detections, "Detection JSONL (default <out>/detect.jsonl)");

    auto* ag = add("agents", "Run the wallet, coin and timing agents", cmd_agents);
    tx_flags(ag);
    ag->add_option("--features", o.features_path, "Feature CSV (default <out>/features.csv)");
    ag->add_option("--mode", o.mode, "rule, llm or hybrid");

    evidence_flags(add("evaluate", "Fit ensemble weights and report metrics", cmd_evaluate), true);
    evidence_flags(add("ablate", "Refit with each agent removed", cmd_ablate), false);
    auto* rep = add("report", "Write threshold-sweep and ROC plot data", cmd_report);
    evidence_flags(rep, true);
    rep->add_option("--split", o.split, "val or test")->capture_default_str();

    auto* eco = add("economics", "Leader/copier replay of a trade sequence", cmd_economics);
    eco->add_option("--trades", o.trades, "CSV `step,side,token_qty`")->required();
    eco->add_option("--initial-sol", o.initial_sol, "SOL already deposited on the curve")->capture_default_str();
    eco->add_flag("--liquidate", o.liquidate, "Sell residual holdings at the end");

    std::string sub_name;
    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << error_json("Usage", "input", e.what(), "").dump() << '\n';
        return 2;
    }

    for (auto& [s, fn] : subs) {
        if (!s->parsed()) continue;
        sub_name = s->get_name();
        try {
            Context c{o, o.config_path.empty() ? parse_config("") : load_config(o.config_path), out, sub_name, {}, {}};
            if (o.seed) c.cfg.seed = *o.seed;
            fn(c);
            return 0;
        } catch (const Error& e) {
            const auto cat = category(e.code());
            err << error_json(std::string(to_string(e.code())), std::string(category_name(cat)), e.what(), sub_name)
                       .dump()
                << '\n';
            return exit_code(cat);
        } catch (const std::exception& e) {
            err << error_json("InvariantViolation", "internal", e.what(), sub_name).dump() << '\n';
            return 4;
        }
    }
    return 2;
}

}  // namespace copyguard::cli

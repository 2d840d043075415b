#include "crevtax/cli/commands.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "crevtax/digest.hpp"
#include "crevtax/errors.hpp"
#include "crevtax/predictions_io.hpp"
#include "crevtax/report.hpp"
#include "crevtax/wilcoxon.hpp"

namespace crevtax::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

void write_file(const fs::path& path, std::string_view content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
    if (!out) throw Error("write failed for " + path.string());
}

void write_json(const fs::path& path, const ojson& j) { write_file(path, j.dump(2) + "\n"); }

std::string file_digest(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CorpusError(CorpusError::Kind::Io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return sha256_hex(ss.str());
}

std::string_view policy_name(UnparseablePolicy p) {
    return p == UnparseablePolicy::Incorrect ? "incorrect" : "false_positive";
}

std::string spec_label(const PromptSpec& spec) {
    return fmt::format("{}/{}", to_string(spec.strategy), to_string(spec.context));
}

std::string run_label(std::span<const Prediction> preds) {
    if (preds.empty()) return "empty";
    const auto& p = preds.front();
    if (p.spec) return fmt::format("{} {}", p.model_id, spec_label(*p.spec));
    return p.model_id.empty() ? std::string("imported") : p.model_id;
}

std::size_t unparseable_count(std::span<const Prediction> preds) {
    std::size_t n = 0;
    for (const auto& p : preds) n += p.category ? 0 : 1;
    return n;
}

std::vector<double> as_vector(const ClassWeights& w) { return {w.begin(), w.end()}; }

struct Evaluation {
    ConfusionCounts counts;
    WeightedSummary summary;
    double group_accuracy = 0.0;
};

Evaluation evaluate(const Corpus& corpus, std::span<const Prediction> preds, UnparseablePolicy policy,
                    bool local_weights) {
    Evaluation e;
    e.counts = confusion(corpus, preds, policy);
    e.summary = local_weights ? weighted_summary(e.counts) : weighted_summary(e.counts, as_vector(class_weights(corpus)));
    const auto groups = group_labels(corpus, preds, policy);
    e.group_accuracy = micro_accuracy(groups.gold, groups.pred);
    return e;
}

FoldAssignment make_folds(const Corpus& corpus, std::size_t k, std::uint64_t seed, bool plain) {
    return plain ? plain_kfold(corpus, k, seed) : stratified_kfold(corpus, k, seed);
}

WeightedSummary fold_summary(const LabelVectors& labels, const std::vector<std::size_t>& members) {
    std::vector<int> g, p;
    g.reserve(members.size());
    p.reserve(members.size());
    for (auto i : members) {
        g.push_back(labels.gold[i]);
        p.push_back(labels.pred[i]);
    }
    return weighted_summary(confusion_counts(g, p, kCategoryCount));
}

std::array<double, 4> metric_values(const WeightedSummary& s) { return {s.f1, s.precision, s.recall, s.micro_accuracy}; }

WeightedSummary mean_summary(std::span<const WeightedSummary> runs) {
    WeightedSummary m;
    if (runs.empty()) return m;
    for (const auto& s : runs) {
        m.f1 += s.f1;
        m.precision += s.precision;
        m.recall += s.recall;
        m.micro_accuracy += s.micro_accuracy;
    }
    const auto n = static_cast<double>(runs.size());
    m.f1 /= n;
    m.precision /= n;
    m.recall /= n;
    m.micro_accuracy /= n;
    return m;
}

struct ClassifyResult {
    CorpusRun run;
    std::string run_digest;
};

ClassifyResult classify_into(const RunConfig& config, const Inputs& inputs, const PromptTemplate& tmpl,
                             std::shared_ptr<ResponseCache> cache, const fs::path& dir) {
    ClassifierContext ctx(inputs.taxonomy, config.spec, tmpl);
    auto gateway = make_gateway(config, inputs, config.spec.strategy, std::move(cache));
    CorpusRunOptions opts;
    opts.parallelism = config.parallelism;
    opts.max_consecutive_failures = config.max_consecutive_failures;

    ClassifyResult r{classify_corpus(inputs.corpus, ctx, gateway, opts), config.digest()};

    std::ostringstream preds;
    write_predictions(preds, r.run.predictions, r.run_digest);
    write_file(dir / "predictions.jsonl", preds.str());

    ojson manifest;
    manifest["config_digest"] = r.run_digest;
    manifest["seed"] = config.seed;
    manifest["config"] = config.to_json();
    manifest["run"] = r.run.manifest.to_json();
    write_json(dir / "manifest.json", manifest);

    const auto stats = gateway.cache_stats();
    ojson timing;
    timing["config_digest"] = r.run_digest;
    timing["started"] = r.run.timing.started;
    timing["finished"] = r.run.timing.finished;
    timing["wall_seconds"] = r.run.timing.wall_seconds;
    timing["parallelism"] = config.parallelism;
    timing["cache"] = {{"entries", stats.entries},
                       {"hits", stats.hits},
                       {"misses", stats.misses},
                       {"total_latency_ms", stats.total_latency_ms}};
    write_json(dir / "timing.json", timing);
    return r;
}

PromptTemplate load_template(const RunConfig& config) {
    if (config.template_system.empty() && config.template_user.empty()) return PromptTemplate::canonical();
    return PromptTemplate::load(config.template_system, config.template_user);
}

bool over_threshold(const RunConfig& config, std::size_t unparseable, std::size_t total) {
    if (total == 0) return false;
    return static_cast<double>(unparseable) / static_cast<double>(total) > config.max_unparseable_rate;
}

}  // namespace

std::string_view to_string(BackendChoice b) noexcept {
    switch (b) {
        case BackendChoice::Remote: return "remote";
        case BackendChoice::Mock: return "mock";
        case BackendChoice::Replay: return "replay";
        case BackendChoice::Oracle: return "oracle";
    }
    return "mock";
}

std::optional<BackendChoice> backend_from_string(std::string_view s) {
    for (auto b : {BackendChoice::Remote, BackendChoice::Mock, BackendChoice::Replay, BackendChoice::Oracle})
        if (to_string(b) == s) return b;
    return std::nullopt;
}

ojson RunConfig::to_json() const {
    ojson j;
    j["corpus"] = corpus.generic_string();
    j["definitions"] = definitions.generic_string();
    j["spec"] = spec.to_json();
    j["template_system"] = template_system.generic_string();
    j["template_user"] = template_user.generic_string();
    j["backend"] = std::string(to_string(backend));
    j["mock_script"] = mock_script.generic_string();
    j["model_id"] = backend == BackendChoice::Mock || backend == BackendChoice::Oracle ? Gateway::mock_config().model_id
                                                                                        : model.model_id;
    j["endpoint_url"] = model.endpoint_url;
    j["decoding"] = model.decoding_json();
    j["max_retries"] = model.max_retries;
    j["max_consecutive_failures"] = max_consecutive_failures;
    j["seed"] = seed;
    j["unparseable_policy"] = std::string(policy_name(unparseable));
    j["max_unparseable_rate"] = max_unparseable_rate;
    j["keep_codeless"] = keep_codeless;
    return j;
}

std::string RunConfig::digest() const { return config_digest(to_json()); }

std::string config_digest(const ojson& inputs) { return sha256_hex(inputs.dump()); }

Inputs load_inputs(const RunConfig& config) {
    if (config.corpus.empty()) throw Error("no corpus given (--corpus)");
    auto taxonomy = config.definitions.empty() ? Taxonomy::builtin() : Taxonomy::load(config.definitions);
    auto corpus = load_corpus(config.corpus, taxonomy);
    if (!config.keep_codeless) corpus = filter_with_code(corpus);
    if (corpus.empty()) throw CorpusError(CorpusError::Kind::EmptyCorpus, "no items left after loading " + config.corpus.string());
    return {std::move(taxonomy), std::move(corpus)};
}

std::shared_ptr<MockSource> oracle_source(const Corpus& corpus, const Taxonomy& taxonomy, Strategy strategy) {
    std::unordered_map<std::string, CategoryId> gold;
    for (const auto& item : corpus.items()) gold.emplace(item.id, item.gold);
    return std::make_shared<MockSource>([gold = std::move(gold), &taxonomy, strategy](const ChatRequest& req)
                                            -> std::optional<std::string> {
        const auto it = gold.find(req.tag.comment_id);
        if (it == gold.end()) return std::nullopt;
        if (strategy == Strategy::Hierarchical && req.tag.step == 1)
            return taxonomy.group(group_of(it->second)).display_name + "$";
        return taxonomy.category(it->second).display_name + "$";
    });
}

std::shared_ptr<ResponseCache> open_cache(const RunConfig& config) {
    if (config.cache.empty()) {
        if (config.backend == BackendChoice::Replay) throw Error("the replay backend needs --cache");
        return nullptr;
    }
    if (config.backend == BackendChoice::Replay && !fs::exists(config.cache))
        throw Error("cache file " + config.cache.string() + " does not exist");
    if (config.cache.has_parent_path()) fs::create_directories(config.cache.parent_path());
    return std::make_shared<ResponseCache>(config.cache);
}

Gateway make_gateway(const RunConfig& config, const Inputs& inputs, Strategy strategy, std::shared_ptr<ResponseCache> cache) {
    auto mock_model = [&] {
        auto m = Gateway::mock_config();
        m.temperature = config.model.temperature;
        m.max_tokens = config.model.max_tokens;
        m.stop_sequences = config.model.stop_sequences;
        return m;
    };
    switch (config.backend) {
        case BackendChoice::Remote: return Gateway::remote(config.model, std::move(cache));
        case BackendChoice::Replay: return Gateway::replay(std::move(cache), config.model);
        case BackendChoice::Oracle:
            return Gateway::mock(oracle_source(inputs.corpus, inputs.taxonomy, strategy), mock_model(), std::move(cache));
        case BackendChoice::Mock:
            if (config.mock_script.empty()) throw Error("the mock backend needs --mock-script");
            return Gateway::mock(std::make_shared<MockSource>(MockScript::load(config.mock_script)), mock_model(),
                                 std::move(cache));
    }
    throw Error("unknown backend");
}

int cmd_classify(const RunConfig& config, bool grid, std::ostream& log) {
    const auto inputs = load_inputs(config);
    const auto tmpl = load_template(config);
    auto cache = open_cache(config);

    std::vector<PromptSpec> specs;
    if (grid) {
        for (auto s : {Strategy::Flat, Strategy::Hierarchical})
            for (auto c : {ContextMode::CommentOnly, ContextMode::CodeAndComment}) {
                auto spec = config.spec;
                spec.strategy = s;
                spec.context = c;
                specs.push_back(spec);
            }
    } else {
        specs.push_back(config.spec);
    }

    int code = kExitOk;
    for (const auto& spec : specs) {
        auto cfg = config;
        cfg.spec = spec;
        const auto dir = grid ? config.output_dir / fmt::format("{}-{}", to_string(spec.strategy), to_string(spec.context))
                              : config.output_dir;
        const auto r = classify_into(cfg, inputs, tmpl, cache, dir);
        const auto& m = r.run.manifest;
        log << fmt::format("{}: {} predictions, {} unparseable, {} requests -> {}\n", spec_label(spec), m.corpus_size,
                           m.unparseable_count, m.request_count, dir.string());
        if (over_threshold(config, m.unparseable_count, m.corpus_size)) code = kExitUnparseable;
    }
    return code;
}

int cmd_evaluate(const RunConfig& config, const EvaluateOptions& options, std::ostream& out) {
    const auto inputs = load_inputs(config);
    std::optional<LabelMap> labels;
    if (!options.label_map.empty()) labels = load_label_map(options.label_map, inputs.taxonomy);
    const auto preds = load_predictions(options.predictions, inputs.taxonomy, labels ? &*labels : nullptr);
    const auto e = evaluate(inputs.corpus, preds, config.unparseable, options.local_weights);

    ojson in;
    in["command"] = "evaluate";
    in["config"] = config.to_json();
    in["predictions_digest"] = file_digest(options.predictions);
    in["label_map_digest"] = options.label_map.empty() ? std::string() : file_digest(options.label_map);
    in["weights"] = options.local_weights ? "local" : "corpus";
    const auto digest = config_digest(in);
    const auto unparseable = unparseable_count(preds);

    ojson report;
    report["config_digest"] = digest;
    report["seed"] = config.seed;
    report["run"] = run_label(preds);
    report["corpus_digest"] = inputs.corpus.digest();
    report["corpus_size"] = inputs.corpus.size();
    report["unparseable_count"] = unparseable;
    report["unparseable_policy"] = std::string(policy_name(config.unparseable));
    report["weights"] = in["weights"];
    report["summary"] = summary_json(e.summary);
    report["group_accuracy"] = e.group_accuracy;
    report["categories"] = category_json(inputs.taxonomy, e.counts);
    write_json(config.output_dir / "report.json", report);

    const SummaryRow row{run_label(preds), e.summary};
    std::string txt = fmt::format("config {}\n\n", digest);
    txt += render_summary_table(std::span(&row, 1));
    txt += fmt::format("\ngroup accuracy {}  unparseable {}/{}\n\n", format_score(e.group_accuracy), unparseable,
                       inputs.corpus.size());
    txt += render_category_table(inputs.taxonomy, e.counts);
    write_file(config.output_dir / "report.txt", txt);
    out << txt;

    return over_threshold(config, unparseable, preds.size()) ? kExitUnparseable : kExitOk;
}

int cmd_compare(const RunConfig& config, const CompareOptions& options, std::ostream& out) {
    const auto inputs = load_inputs(config);
    std::optional<LabelMap> labels;
    if (!options.label_map.empty()) labels = load_label_map(options.label_map, inputs.taxonomy);
    const auto* lm = labels ? &*labels : nullptr;
    const auto ours = load_predictions(options.ours, inputs.taxonomy, lm);
    const auto base = load_predictions(options.baseline, inputs.taxonomy, lm);

    const auto ours_labels = category_labels(inputs.corpus, ours, config.unparseable);
    const auto base_labels = category_labels(inputs.corpus, base, config.unparseable);
    const auto folds = make_folds(inputs.corpus, options.folds, config.seed, options.plain_folds);

    std::vector<WeightedSummary> ours_runs, base_runs;
    for (std::size_t f = 0; f < folds.k; ++f) {
        const auto members = folds.members(f);
        ours_runs.push_back(fold_summary(ours_labels, members));
        base_runs.push_back(fold_summary(base_labels, members));
    }

    std::array<WilcoxonResult, 4> tests;
    for (std::size_t m = 0; m < 4; ++m) {
        std::vector<double> a, b;
        for (std::size_t f = 0; f < folds.k; ++f) {
            a.push_back(metric_values(ours_runs[f])[m]);
            b.push_back(metric_values(base_runs[f])[m]);
        }
        tests[m] = wilcoxon_signed_rank(a, b, Alternative::Greater);
    }
    const auto ours_mean = mean_summary(ours_runs);
    const auto base_mean = mean_summary(base_runs);
    const auto change = compare_summaries(ours_mean, base_mean);

    ojson in;
    in["command"] = "compare";
    in["config"] = config.to_json();
    in["ours_digest"] = file_digest(options.ours);
    in["baseline_digest"] = file_digest(options.baseline);
    in["label_map_digest"] = options.label_map.empty() ? std::string() : file_digest(options.label_map);
    in["folds"] = options.folds;
    in["plain_folds"] = options.plain_folds;
    const auto digest = config_digest(in);

    static constexpr std::array<const char*, 4> kMetricNames{"f1", "precision", "recall", "accuracy"};
    ojson report;
    report["config_digest"] = digest;
    report["seed"] = config.seed;
    report["folds"] = folds.k;
    report["stratified"] = folds.stratified;
    report["ours"] = {{"label", options.ours_label}, {"mean", summary_json(ours_mean)}};
    report["baseline"] = {{"label", options.baseline_label}, {"mean", summary_json(base_mean)}};
    report["percent_change"] = delta_json(change);
    ojson sig;
    for (std::size_t m = 0; m < 4; ++m) sig[kMetricNames[m]] = wilcoxon_json(tests[m]);
    report["wilcoxon"] = sig;
    auto per_fold = ojson::array();
    for (std::size_t f = 0; f < folds.k; ++f)
        per_fold.push_back({{"fold", f}, {"ours", summary_json(ours_runs[f])}, {"baseline", summary_json(base_runs[f])}});
    report["per_fold"] = per_fold;
    write_json(config.output_dir / "compare.json", report);

    const std::array<ComparisonRow, 2> rows{ComparisonRow{options.baseline_label, base_mean, std::nullopt, std::nullopt},
                                            ComparisonRow{options.ours_label, ours_mean, tests, change}};
    std::string txt = fmt::format("config {}\n{} folds ({})\n\n", digest, folds.k, folds.stratified ? "stratified" : "plain");
    txt += render_comparison_table(rows);
    txt += "Changes use unrounded fold means; recomputing them from the one-decimal cells can differ by a few tenths.\n";
    write_file(config.output_dir / "compare.txt", txt);
    out << txt;
    return kExitOk;
}

int cmd_crossval(const RunConfig& config, const CrossvalOptions& options, std::ostream& out) {
    const auto inputs = load_inputs(config);

    std::vector<Prediction> preds;
    std::string source_digest;
    if (options.predictions.empty()) {
        auto cache = open_cache(config);
        auto r = classify_into(config, inputs, load_template(config), std::move(cache), config.output_dir / "predictions");
        preds = std::move(r.run.predictions);
        source_digest = r.run_digest;
    } else {
        preds = load_predictions(options.predictions, inputs.taxonomy);
        source_digest = file_digest(options.predictions);
    }

    const auto labels = category_labels(inputs.corpus, preds, config.unparseable);
    const auto folds = make_folds(inputs.corpus, options.folds, config.seed, options.plain_folds);

    ojson in;
    in["command"] = "crossval";
    in["config"] = config.to_json();
    in["predictions"] = source_digest;
    in["folds"] = options.folds;
    in["plain_folds"] = options.plain_folds;
    const auto digest = config_digest(in);

    std::vector<WeightedSummary> runs;
    std::vector<SummaryRow> rows;
    auto per_fold = ojson::array();
    for (std::size_t f = 0; f < folds.k; ++f) {
        const auto members = folds.members(f);
        std::vector<int> g, p;
        for (auto i : members) {
            g.push_back(labels.gold[i]);
            p.push_back(labels.pred[i]);
        }
        const auto counts = confusion_counts(g, p, kCategoryCount);
        const auto s = weighted_summary(counts);
        runs.push_back(s);
        rows.push_back({fmt::format("fold {}", f + 1), s});

        ojson fold;
        fold["config_digest"] = digest;
        fold["seed"] = config.seed;
        fold["fold"] = f + 1;
        fold["size"] = members.size();
        fold["summary"] = summary_json(s);
        fold["categories"] = category_json(inputs.taxonomy, counts);
        write_json(config.output_dir / "folds" / fmt::format("fold-{:02}.json", f + 1), fold);
        per_fold.push_back({{"fold", f + 1}, {"size", members.size()}, {"summary", summary_json(s)}});
    }
    const auto mean = mean_summary(runs);
    rows.push_back({"mean", mean});

    std::vector<double> f1s;
    for (const auto& s : runs) f1s.push_back(s.f1);
    ojson report;
    report["config_digest"] = digest;
    report["seed"] = config.seed;
    report["folds"] = folds.k;
    report["stratified"] = folds.stratified;
    report["run"] = run_label(preds);
    report["per_fold"] = per_fold;
    report["mean"] = summary_json(mean);
    report["f1_stddev"] = sweep_stats(f1s).stddev;
    write_json(config.output_dir / "crossval.json", report);

    std::string txt = fmt::format("config {}\n{}: {} folds\n\n", digest, run_label(preds), folds.k);
    txt += render_summary_table(rows);
    write_file(config.output_dir / "crossval.txt", txt);
    out << txt;
    return over_threshold(config, unparseable_count(preds), preds.size()) ? kExitUnparseable : kExitOk;
}

int cmd_taxonomy_show(const RunConfig& config, bool as_json, std::ostream& out) {
    const auto taxonomy = config.definitions.empty() ? Taxonomy::builtin() : Taxonomy::load(config.definitions);
    if (as_json) {
        out << taxonomy.to_json().dump(2) << "\n";
        return kExitOk;
    }
    out << fmt::format("{:<22} {:<28} {:>6} {:>6}\n", "Group", "Category", "Rating", "Count");
    for (const auto g : kAllGroups) {
        for (const auto& c : taxonomy.children_of(g)) {
            out << fmt::format("{:<22} {:<28} {:>6} {:>6}\n", taxonomy.group(g).display_name, c.display_name,
                               c.usefulness_rating ? fmt::format("{:.2f}", *c.usefulness_rating) : std::string("N/A"),
                               c.reference_frequency);
        }
    }
    out << fmt::format("total {}  refined definitions: {}\n", taxonomy.frequency_total(),
                       taxonomy.has_refined_definitions() ? "yes" : "no");
    return kExitOk;
}

int cmd_baseline(const RunConfig& config, const BaselineOptions& options, std::ostream& out) {
    const auto inputs = load_inputs(config);
    std::vector<Prediction> preds;
    if (options.kind == "majority")
        preds = baseline_majority(inputs.corpus);
    else if (options.kind == "random")
        preds = baseline_random(inputs.corpus, config.seed);
    else
        throw Error("unknown baseline '" + options.kind + "' (majority | random)");

    ojson in;
    in["command"] = "baseline";
    in["kind"] = options.kind;
    in["config"] = config.to_json();
    in["sweep_seeds"] = options.sweep_seeds;
    const auto digest = config_digest(in);

    std::ostringstream ps;
    write_predictions(ps, preds, digest);
    write_file(config.output_dir / "predictions.jsonl", ps.str());

    const auto e = evaluate(inputs.corpus, preds, config.unparseable, false);
    ojson report;
    report["config_digest"] = digest;
    report["seed"] = config.seed;
    report["run"] = run_label(preds);
    report["summary"] = summary_json(e.summary);
    report["categories"] = category_json(inputs.taxonomy, e.counts);

    std::vector<SummaryRow> rows{{run_label(preds), e.summary}};
    std::string notes;
    if (options.kind == "random") {
        const auto weights = as_vector(class_weights(inputs.corpus));
        report["expected"] = {{"recall", expected_random_recall()}, {"precision", expected_random_precision(weights)}};
        notes += fmt::format("expected recall {}  expected precision {}\n", format_score(expected_random_recall()),
                             format_score(expected_random_precision(weights)));
        if (options.sweep_seeds > 0) {
            std::vector<std::uint64_t> seeds(options.sweep_seeds);
            for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = config.seed + i;
            const auto sweep = random_baseline_sweep(inputs.corpus, seeds);
            auto stat = [](const SweepStats& s) { return ojson{{"mean", s.mean}, {"stddev", s.stddev}}; };
            report["sweep"] = {{"seeds", seeds.size()},
                               {"f1", stat(sweep.f1)},
                               {"precision", stat(sweep.precision)},
                               {"recall", stat(sweep.recall)}};
            notes += fmt::format("{} seeds: F1 {} ± {}  precision {} ± {}  recall {} ± {}\n", seeds.size(),
                                 format_score(sweep.f1.mean), format_score(sweep.f1.stddev),
                                 format_score(sweep.precision.mean), format_score(sweep.precision.stddev),
                                 format_score(sweep.recall.mean), format_score(sweep.recall.stddev));
        }
    }
    write_json(config.output_dir / "report.json", report);

    std::string txt = fmt::format("config {}\n\n", digest) + render_summary_table(rows);
    if (!notes.empty()) txt += "\n" + notes;
    write_file(config.output_dir / "report.txt", txt);
    out << txt;
    return kExitOk;
}

int cmd_delta(double ours, double baseline, std::ostream& out) {
    const auto change = percent_change(ours, baseline);
    out << fmt::format("({} - {}) / {} x 100 = {}\n", ours, baseline, baseline, format_change(change));
    if (const auto range = percent_change_range(ours, baseline, 0.05))
        out << fmt::format("inputs rounded to one decimal: between {:+.2f}% and {:+.2f}%\n", range->low, range->high);
    return kExitOk;
}

int cmd_ablation(const RunConfig& config, const AblationOptions& options, std::ostream& out) {
    const auto inputs = load_inputs(config);
    const auto original = load_predictions(options.original, inputs.taxonomy);
    const auto refined = load_predictions(options.refined, inputs.taxonomy);
    const auto eo = evaluate(inputs.corpus, original, config.unparseable, false);
    const auto er = evaluate(inputs.corpus, refined, config.unparseable, false);
    const auto delta = definition_delta(eo.summary, er.summary);

    ojson in;
    in["command"] = "ablation";
    in["config"] = config.to_json();
    in["original_digest"] = file_digest(options.original);
    in["refined_digest"] = file_digest(options.refined);
    const auto digest = config_digest(in);

    ojson report;
    report["config_digest"] = digest;
    report["seed"] = config.seed;
    report["label"] = options.label;
    report["original"] = summary_json(eo.summary);
    report["refined"] = summary_json(er.summary);
    report["delta"] = delta_json(delta);
    write_json(config.output_dir / "ablation.json", report);

    const DeltaRow row{options.label, delta};
    const std::string txt = fmt::format("config {}\n\n", digest) + render_delta_table(std::span(&row, 1));
    write_file(config.output_dir / "ablation.txt", txt);
    out << txt;
    return kExitOk;
}

}  // namespace crevtax::cli

#include "crevtax/classifier.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>

#include <fmt/format.h>
#include <omp.h>

#include "crevtax/errors.hpp"
#include "crevtax/text.hpp"

namespace crevtax {

std::string_view to_string(UnparseableReason r) noexcept {
    switch (r) {
        case UnparseableReason::NoMatch: return "no_match";
        case UnparseableReason::Ambiguous: return "ambiguous";
        case UnparseableReason::Empty: return "empty";
    }
    return "no_match";
}

namespace {

struct Hit {
    std::size_t begin;
    std::size_t end;
    std::size_t option;
};

ParseOutcome parse_impl(std::string_view raw, std::span<const std::string> options) {
    const auto stop = raw.find(kStopToken);
    const auto answer = text::trim_wrapping(raw.substr(0, stop));
    if (answer.empty()) return {std::nullopt, UnparseableReason::Empty};

    const std::string norm = text::normalize_name(answer);
    std::vector<std::string> names;
    names.reserve(options.size());
    for (const auto& o : options) names.push_back(text::normalize_name(o));

    for (std::size_t i = 0; i < names.size(); ++i)
        if (!names[i].empty() && names[i] == norm) return {i, UnparseableReason::NoMatch};

    std::vector<Hit> hits;
    for (std::size_t i = 0; i < names.size(); ++i) {
        const auto& name = names[i];
        if (name.empty()) continue;
        for (auto pos = norm.find(name); pos != std::string::npos; pos = norm.find(name, pos + 1)) {
            if (text::is_word_boundary(norm, pos, pos + name.size())) hits.push_back({pos, pos + name.size(), i});
        }
    }

    // A hit lying inside a longer hit of a different option is part of that name, not a separate mention.
    std::vector<std::size_t> distinct;
    for (const auto& h : hits) {
        bool nested = false;
        for (const auto& other : hits) {
            if (other.option != h.option && other.begin <= h.begin && h.end <= other.end &&
                other.end - other.begin > h.end - h.begin) {
                nested = true;
                break;
            }
        }
        if (!nested && std::find(distinct.begin(), distinct.end(), h.option) == distinct.end()) distinct.push_back(h.option);
    }

    if (distinct.size() == 1) return {distinct.front(), UnparseableReason::NoMatch};
    return {std::nullopt, distinct.empty() ? UnparseableReason::NoMatch : UnparseableReason::Ambiguous};
}

}  // namespace

ParseOutcome parse_response(std::string_view raw, std::span<const std::string> options) noexcept {
    try {
        return parse_impl(raw, options);
    } catch (...) {
        return {std::nullopt, UnparseableReason::NoMatch};
    }
}

ClassifierContext::ClassifierContext(const Taxonomy& taxonomy, PromptSpec spec, PromptTemplate tmpl)
    : taxonomy_(&taxonomy),
      spec_(spec),
      template_(std::move(tmpl)),
      catalog_(OptionCatalog::build(taxonomy, spec.definitions)) {
    if (spec_.max_code_chars == 0) throw Error("max_code_chars must be positive");
    for (const auto& o : catalog_.categories) category_names_.push_back(o.name);
    for (const auto& o : catalog_.groups) group_names_.push_back(o.name);
    for (std::size_t g = 0; g < kGroupCount; ++g)
        for (const auto& o : catalog_.children[g]) child_names_[g].push_back(o.name);
}

namespace {

std::string ask(Gateway& gateway, const ReviewComment& comment, const RenderedPrompt& prompt, int step) {
    try {
        return gateway.complete(ChatRequest{prompt.system_text, prompt.user_text, RequestTag{comment.id, step}});
    } catch (const GatewayError& e) {
        throw ClassificationError(comment.id, e.what());
    }
}

Prediction base_prediction(const ReviewComment& comment, const ClassifierContext& ctx, const Gateway& gateway) {
    Prediction p;
    p.comment_id = comment.id;
    p.spec = ctx.spec();
    p.model_id = gateway.config().model_id;
    return p;
}

Prediction flat_impl(const ReviewComment& comment, const ClassifierContext& ctx, Gateway& gateway, bool& degraded) {
    auto p = base_prediction(comment, ctx, gateway);
    const auto prompt = render_classification_prompt(comment, ctx.catalog().categories, ctx.spec(), ctx.prompt_template());
    degraded = prompt.degraded_context;
    p.raw_responses.push_back(ask(gateway, comment, prompt, 1));

    const auto outcome = parse_response(p.raw_responses.back(), ctx.category_names());
    if (outcome.ok())
        p.category = category_at(*outcome.matched);
    else
        p.unparseable_reason = outcome.reason;
    return p;
}

Prediction hierarchical_impl(const ReviewComment& comment, const ClassifierContext& ctx, Gateway& gateway, bool& degraded) {
    auto p = base_prediction(comment, ctx, gateway);
    const auto step1 = render_classification_prompt(comment, ctx.catalog().groups, ctx.spec(), ctx.prompt_template());
    degraded = step1.degraded_context;
    p.raw_responses.push_back(ask(gateway, comment, step1, 1));

    const auto group_outcome = parse_response(p.raw_responses.back(), ctx.group_names());
    if (!group_outcome.ok()) {
        p.unparseable_reason = group_outcome.reason;
        return p;
    }
    const GroupId group = group_at(*group_outcome.matched);
    p.step1_group = group;

    const auto& ids = ctx.catalog().child_ids[index_of(group)];
    if (ids.size() == 1) {
        p.category = ids.front();
        return p;
    }

    const auto step2 =
        render_classification_prompt(comment, ctx.catalog().children[index_of(group)], ctx.spec(), ctx.prompt_template());
    p.raw_responses.push_back(ask(gateway, comment, step2, 2));
    const auto outcome = parse_response(p.raw_responses.back(), ctx.child_names(group));
    if (outcome.ok())
        p.category = ids[*outcome.matched];
    else
        p.unparseable_reason = outcome.reason;
    return p;
}

Prediction classify_impl(const ReviewComment& comment, const ClassifierContext& ctx, Gateway& gateway, bool& degraded) {
    return ctx.spec().strategy == Strategy::Flat ? flat_impl(comment, ctx, gateway, degraded)
                                                 : hierarchical_impl(comment, ctx, gateway, degraded);
}

}  // namespace

Prediction classify_flat(const ReviewComment& comment, const ClassifierContext& ctx, Gateway& gateway) {
    if (ctx.spec().strategy != Strategy::Flat) throw Error("classify_flat requires a flat prompt spec");
    bool degraded = false;
    return flat_impl(comment, ctx, gateway, degraded);
}

Prediction classify_hierarchical(const ReviewComment& comment, const ClassifierContext& ctx, Gateway& gateway) {
    if (ctx.spec().strategy != Strategy::Hierarchical) throw Error("classify_hierarchical requires a hierarchical prompt spec");
    bool degraded = false;
    return hierarchical_impl(comment, ctx, gateway, degraded);
}

Prediction classify(const ReviewComment& comment, const ClassifierContext& ctx, Gateway& gateway) {
    bool degraded = false;
    return classify_impl(comment, ctx, gateway, degraded);
}

nlohmann::ordered_json RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["corpus_digest"] = corpus_digest;
    j["taxonomy_digest"] = taxonomy_digest;
    j["template_version"] = template_version;
    j["spec"] = spec.to_json();
    j["backend"] = backend;
    j["model_id"] = model_id;
    j["endpoint_url"] = endpoint_url;
    j["decoding"] = decoding;
    j["corpus_size"] = corpus_size;
    j["unparseable_count"] = unparseable_count;
    j["request_count"] = request_count;
    j["degraded_context_count"] = degraded_context_count;
    return j;
}

CorpusRun classify_corpus(const Corpus& corpus, const ClassifierContext& ctx, Gateway& gateway,
                          const CorpusRunOptions& options) {
    if (options.parallelism < 1) throw Error("parallelism must be >= 1");
    if (const auto& w = ctx.catalog().warnings; !w.empty())
        text::warn(w.size() == 1 ? w.front()
                                 : fmt::format("{} (and {} more definitions without refined text)", w.front(), w.size() - 1));

    CorpusRun run;
    run.timing.started = utc_timestamp();
    const auto wall_start = std::chrono::steady_clock::now();

    const auto n = static_cast<std::ptrdiff_t>(corpus.size());
    std::vector<std::optional<Prediction>> slots(corpus.size());
    std::vector<char> degraded(corpus.size(), 0);
    std::vector<std::exception_ptr> errors(corpus.size());
    std::atomic<int> consecutive_failures{0};
    std::atomic<bool> aborted{false};

    // Dynamic scheduling: request latency varies by orders of magnitude between items.
#pragma omp parallel for schedule(dynamic, 1) num_threads(options.parallelism)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        if (aborted.load(std::memory_order_relaxed)) continue;
        const auto idx = static_cast<std::size_t>(i);
        try {
            bool was_degraded = false;
            slots[idx] = classify_impl(corpus[idx], ctx, gateway, was_degraded);
            degraded[idx] = was_degraded ? 1 : 0;
            consecutive_failures.store(0, std::memory_order_relaxed);
        } catch (...) {
            errors[idx] = std::current_exception();
            const int streak = consecutive_failures.fetch_add(1, std::memory_order_relaxed) + 1;
            if (options.max_consecutive_failures > 0 && streak >= options.max_consecutive_failures)
                aborted.store(true, std::memory_order_relaxed);
        }
    }

    for (const auto& e : errors) {
        if (!e) continue;
        if (aborted.load()) {
            try {
                std::rethrow_exception(e);
            } catch (const std::exception& first) {
                throw Error(fmt::format("run aborted after {} consecutive gateway failures; first failure: {}",
                                        options.max_consecutive_failures, first.what()));
            }
        }
        std::rethrow_exception(e);
    }

    run.predictions.reserve(corpus.size());
    std::size_t unparseable = 0;
    std::size_t requests = 0;
    std::size_t degraded_count = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        auto& p = *slots[i];
        if (!p.classified()) ++unparseable;
        requests += p.raw_responses.size();
        degraded_count += static_cast<std::size_t>(degraded[i]);
        run.predictions.push_back(std::move(p));
    }

    auto& m = run.manifest;
    m.corpus_digest = corpus.digest();
    m.taxonomy_digest = ctx.taxonomy().digest();
    m.template_version = ctx.prompt_template().version;
    m.spec = ctx.spec();
    m.backend = std::string(to_string(gateway.kind()));
    m.model_id = gateway.config().model_id;
    m.endpoint_url = gateway.config().endpoint_url;
    m.decoding = gateway.config().decoding_json();
    m.corpus_size = corpus.size();
    m.unparseable_count = unparseable;
    m.request_count = requests;
    m.degraded_context_count = degraded_count;

    run.timing.finished = utc_timestamp();
    run.timing.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    return run;
}

double group_accuracy(const Corpus& corpus, std::span<const Prediction> predictions) {
    if (corpus.size() != predictions.size()) throw EvaluationError("group_accuracy: prediction count does not match corpus");
    if (corpus.empty()) throw EvaluationError("group_accuracy: empty evaluation set");
    std::vector<char> seen(corpus.size(), 0);
    std::size_t correct = 0;
    for (const auto& p : predictions) {
        const auto idx = corpus.index_of(p.comment_id);
        if (!idx) throw EvaluationError("group_accuracy: prediction for unknown comment '" + p.comment_id + "'");
        if (seen[*idx]++) throw EvaluationError("group_accuracy: duplicate prediction for comment '" + p.comment_id + "'");
        if (p.step1_group && *p.step1_group == group_of(corpus[*idx].gold)) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(corpus.size());
}

}  // namespace crevtax

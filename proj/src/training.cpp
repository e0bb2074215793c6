#include "kbregex/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <json.hpp>

#include "kbregex/parallel.hpp"

namespace kbregex {

const char* stage_name(Stage s) { return s == Stage::SingleHop ? "single-hop" : "regex"; }

void TrainConfig::validate() const {
    std::vector<std::string> bad;
    if (gamma <= 0) bad.push_back("gamma must be > 0");
    if (alpha <= 0 || alpha >= 1) bad.push_back("alpha must be in (0,1)");
    if (batch_size < 1) bad.push_back("batch_size must be >= 1");
    if (negatives < 1) bad.push_back("negatives must be >= 1");
    if (lr_single_hop <= 0 || lr_regex <= 0) bad.push_back("learning rates must be > 0");
    if (epochs_single_hop < 0 || epochs_regex < 0) bad.push_back("epoch caps must be >= 0");
    if (patience < 1) bad.push_back("patience must be >= 1");
    if (eval_every < 1) bad.push_back("eval_every must be >= 1");
    if (dim < 1) bad.push_back("dim must be >= 1");
    if (workers < 1) bad.push_back("workers must be >= 1");
    if (!bad.empty()) {
        std::string msg = "invalid training config:";
        for (const auto& b : bad) msg += "\n  - " + b;
        throw TrainError(msg);
    }
}

std::vector<EntId> negative_sample(const KnowledgeBase& kb, const RegexQuery& query, int n,
                                   Rng& rng) {
    const size_t nE = kb.num_entities();
    std::vector<EntId> pool;
    pool.reserve(nE - query.full_answers.size());
    for (size_t e = 0; e < nE; ++e) {
        if (!std::binary_search(query.full_answers.begin(), query.full_answers.end(),
                                static_cast<EntId>(e))) {
            pool.push_back(static_cast<EntId>(e));
        }
    }
    if (pool.empty()) {
        throw TrainError("degenerate query: answer set covers every entity (head " +
                         std::to_string(query.head) + ", regex " + query.regex_text + ")");
    }
    std::vector<EntId> out;
    out.reserve(static_cast<size_t>(n));
    if (pool.size() < static_cast<size_t>(n)) {
        for (int i = 0; i < n; ++i) out.push_back(pool[rng.next_below(pool.size())]);
        return out;
    }
    for (int i = 0; i < n; ++i) {
        size_t j = static_cast<size_t>(i) + rng.next_below(pool.size() - static_cast<size_t>(i));
        std::swap(pool[static_cast<size_t>(i)], pool[j]);
        out.push_back(pool[static_cast<size_t>(i)]);
    }
    return out;
}

Node pair_loss(Tape& tape, const ModelParams& params, Variant v, const RegexQuery& query,
               EntId answer, std::span<const EntId> negatives, double gamma, NegMode mode,
               double adv_temperature) {
    EmbeddedQueryT emb = embed_regex_t(tape, params, v, query.head, query.expr);
    if (emb.unanswerable) return Node{};

    Node d_pos = query_distance_t(tape, params, emb, answer);
    std::vector<Node> d_neg;
    d_neg.reserve(negatives.size());
    for (EntId e : negatives) d_neg.push_back(query_distance_t(tape, params, emb, e));

    // negative weights: uniform, or softmax of -dist (treated as constants)
    const size_t n = negatives.size();
    Vec w(n, 1.0 / static_cast<double>(n));
    if (mode == NegMode::SelfAdversarial) {
        double mx = -std::numeric_limits<double>::infinity();
        Vec logits(n);
        for (size_t i = 0; i < n; ++i) {
            logits[i] = -adv_temperature * tape.scalar(d_neg[i]);
            mx = std::max(mx, logits[i]);
        }
        double z = 0.0;
        for (size_t i = 0; i < n; ++i) z += std::exp(logits[i] - mx);
        for (size_t i = 0; i < n; ++i) w[i] = std::exp(logits[i] - mx) / z;
    }

    Node gamma_n = tape.constant(Vec{gamma});
    Node loss = tape.neg(tape.log_sigmoid(tape.sub(gamma_n, d_pos)));
    for (size_t i = 0; i < n; ++i) {
        Node term = tape.log_sigmoid(tape.sub(d_neg[i], gamma_n));
        loss = tape.sub(loss, tape.scale(term, w[i]));
    }
    return loss;
}

namespace {

struct ElementResult {
    GradSink sink;
    double loss = 0.0;
    bool contributed = false;
    explicit ElementResult(const ParamSet& ps) : sink(ps) {}
};

void run_element(const KnowledgeBase& kb, const ModelParams& params,
                 const std::vector<RegexQuery>& queries, TrainPair pair, uint64_t neg_seed,
                 const TrainConfig& cfg, NegMode mode, ElementResult& res) {
    const RegexQuery& q = queries[static_cast<size_t>(pair.query)];
    Rng rng(neg_seed);
    std::vector<EntId> negs = negative_sample(kb, q, cfg.negatives, rng);
    thread_local Tape tape;  // keeps its buffers across elements
    tape.clear();
    Node loss = pair_loss(tape, params, cfg.variant, q, pair.answer, negs, cfg.gamma, mode,
                          cfg.adv_temperature);
    if (!loss.valid()) return;
    res.loss = tape.scalar(loss);
    tape.backward(loss, res.sink);
    res.contributed = true;
}

BatchStats merge_elements(std::vector<ElementResult>& elems, GradSink& out) {
    BatchStats stats;
    for (const ElementResult& e : elems) {
        if (e.contributed) {
            ++stats.contributed;
            stats.loss_sum += e.loss;
        } else {
            ++stats.skipped_unanswerable;
        }
    }
    if (stats.contributed == 0) return stats;
    const double scale = 1.0 / static_cast<double>(stats.contributed);
    for (const ElementResult& e : elems) {  // fixed batch order
        if (e.contributed) out.merge_scaled(e.sink, scale);
    }
    return stats;
}

}  // namespace

BatchStats batch_gradients(const KnowledgeBase& kb, const ModelParams& params,
                           const std::vector<RegexQuery>& queries,
                           std::span<const TrainPair> batch,
                           std::span<const uint64_t> neg_seeds, const TrainConfig& cfg,
                           NegMode mode, GradSink& out, int workers) {
    std::vector<ElementResult> elems(batch.size(), ElementResult(params.ps));
    parallel_for(batch.size(), workers, [&](size_t i) {
        run_element(kb, params, queries, batch[i], neg_seeds[i], cfg, mode, elems[i]);
    });
    return merge_elements(elems, out);
}

BatchStats batch_gradients_serial(const KnowledgeBase& kb, const ModelParams& params,
                                  const std::vector<RegexQuery>& queries,
                                  std::span<const TrainPair> batch,
                                  std::span<const uint64_t> neg_seeds, const TrainConfig& cfg,
                                  NegMode mode, GradSink& out) {
    std::vector<ElementResult> elems(batch.size(), ElementResult(params.ps));
    for (size_t i = 0; i < batch.size(); ++i) {
        run_element(kb, params, queries, batch[i], neg_seeds[i], cfg, mode, elems[i]);
    }
    return merge_elements(elems, out);
}

StopDecision early_stop(std::span<const double> history, int patience) {
    StopDecision d;
    if (history.empty()) return d;
    double best = history[0];
    d.best_index = 0;
    int since_best = 0;
    for (size_t i = 1; i < history.size(); ++i) {
        if (history[i] > best) {
            best = history[i];
            d.best_index = i;
            since_best = 0;
        } else {
            ++since_best;
        }
        if (since_best >= patience) {
            d.stop = true;
            return d;
        }
    }
    return d;
}

std::string EpochRecord::to_json() const {
    nlohmann::json j;
    j["epoch"] = epoch;
    j["stage"] = stage_name(stage);
    j["mean_loss"] = mean_loss;
    if (dev_mrr) j["dev_mrr"] = *dev_mrr;
    else j["dev_mrr"] = nullptr;
    j["lr"] = lr;
    j["wall_ms"] = wall_ms;
    return j.dump();
}

StageResult train_stage(const KnowledgeBase& kb, const std::vector<RegexQuery>& train_queries,
                        const std::vector<RegexQuery>& dev_queries, const TrainConfig& cfg,
                        Stage stage, ModelParams& params,
                        const std::function<void(const std::string&)>& log_line) {
    cfg.validate();
    const double lr = stage == Stage::SingleHop ? cfg.lr_single_hop : cfg.lr_regex;
    const int max_epochs = stage == Stage::SingleHop ? cfg.epochs_single_hop : cfg.epochs_regex;
    const NegMode mode = stage == Stage::SingleHop ? cfg.neg_mode_single_hop : cfg.neg_mode_regex;

    std::vector<TrainPair> pairs;
    for (size_t qi = 0; qi < train_queries.size(); ++qi) {
        for (EntId a : train_queries[qi].answers) {
            pairs.push_back({static_cast<int>(qi), a});
        }
    }
    if (pairs.empty()) throw TrainError("no training pairs for stage");

    if (stage == Stage::Regex) copy_kleene_from_relations(params);

    AdamState adam = AdamState::init(params.ps, lr);
    StageResult result;
    std::vector<double> dev_history;
    ModelParams best = params;
    int skipped_total = 0;

    std::vector<size_t> order(pairs.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;

    GradSink grads(params.ps);
    for (int epoch = 1; epoch <= max_epochs; ++epoch) {
        auto t0 = std::chrono::steady_clock::now();
        Rng shuffle_rng(mix_stream(cfg.seed, std::string("shuffle/") + stage_name(stage),
                                   static_cast<uint64_t>(epoch)));
        for (size_t i = order.size(); i > 1; --i) {
            size_t j = shuffle_rng.next_below(i);
            std::swap(order[i - 1], order[j]);
        }

        double loss_sum = 0.0;
        long contributed = 0;
        for (size_t start = 0; start < order.size(); start += static_cast<size_t>(cfg.batch_size)) {
            const size_t end = std::min(order.size(), start + static_cast<size_t>(cfg.batch_size));
            std::vector<TrainPair> batch;
            std::vector<uint64_t> seeds;
            batch.reserve(end - start);
            for (size_t i = start; i < end; ++i) {
                batch.push_back(pairs[order[i]]);
                seeds.push_back(mix_stream(cfg.seed, std::string("neg/") + stage_name(stage),
                                           (static_cast<uint64_t>(epoch) << 32) | i));
            }
            grads.clear();
            BatchStats stats = batch_gradients(kb, params, train_queries, batch, seeds, cfg, mode,
                                               grads, cfg.workers);
            skipped_total += stats.skipped_unanswerable;
            if (stats.contributed == 0) continue;
            if (!std::isfinite(stats.loss_sum)) {
                const RegexQuery& q0 = train_queries[static_cast<size_t>(batch.front().query)];
                throw TrainError("non-finite loss in stage " + std::string(stage_name(stage)) +
                                 ", epoch " + std::to_string(epoch) + ", batch at pair " +
                                 std::to_string(start) + " (first query: head " +
                                 std::to_string(q0.head) + ", regex " + q0.regex_text + ")");
            }
            loss_sum += stats.loss_sum;
            contributed += stats.contributed;
            adam_step(params.ps, grads, adam);
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.stage = stage;
        rec.mean_loss = contributed > 0 ? loss_sum / static_cast<double>(contributed) : 0.0;
        rec.lr = lr;

        const bool eval_now = (epoch % cfg.eval_every == 0) || epoch == max_epochs;
        bool stop = false;
        if (eval_now && !dev_queries.empty()) {
            auto outcomes = rank_all_pairs(kb, params, cfg.variant, dev_queries, cfg.workers);
            EvalReport rep = metrics(outcomes);
            rec.dev_mrr = rep.overall.mrr;
            dev_history.push_back(rep.overall.mrr);
            if (dev_history.size() == 1 || rep.overall.mrr > result.best_dev_mrr) {
                result.best_dev_mrr = rep.overall.mrr;
                result.best_epoch = epoch;
                best = params;
            }
            stop = early_stop(dev_history, cfg.patience).stop;
        }

        rec.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
        if (log_line) log_line(rec.to_json());
        result.history.push_back(std::move(rec));
        if (stop) break;
    }

    if (!dev_queries.empty() && !dev_history.empty()) {
        params = std::move(best);  // best-epoch checkpoint is the run artifact
    }
    result.skipped_unanswerable = skipped_total;
    return result;
}

std::vector<RegexQuery> single_hop_queries(const KnowledgeBase& kb, Split split) {
    std::map<std::pair<EntId, RelId>, std::vector<EntId>> grouped;
    for (const Triple& t : kb.triples(split)) {
        grouped[{t.head, t.rel}].push_back(t.tail);
    }
    const Adjacency& full = kb.adjacency(GraphSel::Full);
    std::vector<RegexQuery> out;
    out.reserve(grouped.size());
    for (auto& [key, tails] : grouped) {
        RegexQuery q;
        q.head = key.first;
        q.expr = RegexExpr::make_rel(key.second);
        q.regex_text = kb.relation_name(key.second);
        std::sort(tails.begin(), tails.end());
        q.answers = std::move(tails);
        q.full_answers = full.tails(key.second, key.first);
        q.type_tag = "single-hop";
        out.push_back(std::move(q));
    }
    return out;
}

}  // namespace kbregex

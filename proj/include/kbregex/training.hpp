#pragma once

#include <functional>
#include <optional>

#include "kbregex/adam.hpp"
#include "kbregex/evaluation.hpp"
#include "kbregex/model.hpp"
#include "kbregex/rng.hpp"

namespace kbregex {

struct TrainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class NegMode : uint8_t { Uniform, SelfAdversarial };
enum class Stage : uint8_t { SingleHop, Regex };

const char* stage_name(Stage s);

struct TrainConfig {
    double gamma = 24.0;
    double alpha = 0.2;
    double lr_single_hop = 1e-4;
    double lr_regex = 1e-4;
    int batch_size = 1024;
    int negatives = 256;
    NegMode neg_mode_single_hop = NegMode::SelfAdversarial;  // rotate-style models
    NegMode neg_mode_regex = NegMode::Uniform;
    double adv_temperature = 1.0;
    int epochs_single_hop = 1000;
    int epochs_regex = 500;
    int patience = 10;   // dev evaluations without improvement
    int eval_every = 5;  // epochs between dev evaluations
    uint64_t seed = 0;
    Variant variant = Variant::Comp;
    ModelKind kind = ModelKind::RotateBox;
    int dim = 400;
    int workers = 1;

    void validate() const;
};

// n entities from E \ full_answers: uniform without replacement, falling back
// to replacement when the complement is smaller than n.
std::vector<EntId> negative_sample(const KnowledgeBase& kb, const RegexQuery& query, int n,
                                   Rng& rng);

// Margin loss of one (query, answer) pair with the given negatives. Weights
// are 1/n, or softmax(-temperature * dist) for self-adversarial mode
// (computed from the current distances and treated as constants). Returns an
// invalid node when the variant cannot embed the query.
Node pair_loss(Tape& tape, const ModelParams& params, Variant v, const RegexQuery& query,
               EntId answer, std::span<const EntId> negatives, double gamma, NegMode mode,
               double adv_temperature);

struct TrainPair {
    int query = 0;   // index into the query list
    EntId answer = 0;
};

struct BatchStats {
    double loss_sum = 0.0;
    int contributed = 0;
    int skipped_unanswerable = 0;
};

// Gradients of the batch-mean loss. Elements are processed independently and
// merged in batch order, so results do not depend on the worker count.
BatchStats batch_gradients(const KnowledgeBase& kb, const ModelParams& params,
                           const std::vector<RegexQuery>& queries,
                           std::span<const TrainPair> batch,
                           std::span<const uint64_t> neg_seeds, const TrainConfig& cfg,
                           NegMode mode, GradSink& out, int workers);
// plain-loop reference for the kernel above
BatchStats batch_gradients_serial(const KnowledgeBase& kb, const ModelParams& params,
                                  const std::vector<RegexQuery>& queries,
                                  std::span<const TrainPair> batch,
                                  std::span<const uint64_t> neg_seeds, const TrainConfig& cfg,
                                  NegMode mode, GradSink& out);

struct EpochRecord {
    int epoch = 0;
    Stage stage = Stage::SingleHop;
    double mean_loss = 0.0;
    std::optional<double> dev_mrr;
    double lr = 0.0;
    long wall_ms = 0;
    std::string to_json() const;
};

// Stop once dev MRR has gone `patience` consecutive evaluations without
// improving; best_index is the evaluation that produced the best value.
struct StopDecision {
    bool stop = false;
    size_t best_index = 0;
};
StopDecision early_stop(std::span<const double> dev_mrr_history, int patience);

struct StageResult {
    std::vector<EpochRecord> history;
    double best_dev_mrr = 0.0;
    int best_epoch = 0;
    int skipped_unanswerable = 0;
};

// Epoch loop: seeded shuffle, batched forward/backward, Adam step, periodic
// dev evaluation with early stopping. `params` holds the best-epoch state on
// return. `log_line` (optional) receives one JSON line per epoch.
StageResult train_stage(const KnowledgeBase& kb, const std::vector<RegexQuery>& train_queries,
                        const std::vector<RegexQuery>& dev_queries, const TrainConfig& cfg,
                        Stage stage, ModelParams& params,
                        const std::function<void(const std::string&)>& log_line = {});

// (e1, r, ?) queries from one split's triples, grouped by (head, relation).
// `answers` are the split's tails, `full_answers` the tails over all splits.
std::vector<RegexQuery> single_hop_queries(const KnowledgeBase& kb, Split split);

}  // namespace kbregex

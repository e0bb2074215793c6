#include <iostream>

#include <CLI11.hpp>

#include "kbregex/cli_runs.hpp"

using namespace kbregex;

namespace {

void add_kb_flags(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--train-triples", cfg.train_triples, "tab-separated train triples");
    cmd->add_option("--dev-triples", cfg.dev_triples, "tab-separated dev triples");
    cmd->add_option("--test-triples", cfg.test_triples, "tab-separated test triples");
}

void add_common_flags(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--out", cfg.out_dir, "output directory")->envname("KBREGEX_OUT");
    cmd->add_option("--seed", cfg.train.seed, "master seed for all sub-streams");
    cmd->add_option("--workers", cfg.train.workers, "worker threads (1 = serial)");
    cmd->set_config("--config", "", "key=value config file; flags win");
}

void add_model_flags(CLI::App* cmd, RunConfig& cfg, std::string& model, std::string& variant) {
    cmd->add_option("--model", model, "rotate-box | rotate | query2box");
    cmd->add_option("--variant", variant,
                    "baseline | free-agg | free-deepsets | proj-agg | comp");
    cmd->add_option("--dim", cfg.train.dim, "embedding dimension");
    cmd->add_option("--gamma", cfg.train.gamma, "margin");
    cmd->add_option("--alpha", cfg.train.alpha, "inside-box downweight");
}

void resolve_model(const std::string& model, const std::string& variant, RunConfig& cfg) {
    auto k = model_kind_from_name(model);
    if (!k) throw CLI::ValidationError("--model", "unknown model '" + model + "'");
    cfg.train.kind = *k;
    auto v = variant_from_name(variant);
    if (!v) throw CLI::ValidationError("--variant", "unknown variant '" + variant + "'");
    cfg.train.variant = *v;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"regex queries over incomplete knowledge bases"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string model = "rotate-box";
    std::string variant = "comp";

    auto* gen = app.add_subcommand("gen", "synthesize a regex-query dataset");
    add_kb_flags(gen, cfg);
    add_common_flags(gen, cfg);
    gen->add_option("--dataset", cfg.dataset, "template set: fb15k-regex | wiki100-regex");
    gen->add_option("--per-template", cfg.queries_per_template, "queries per template");
    gen->add_option("--max-answers", cfg.max_answers, "reject larger answer sets");
    gen->add_option("--max-len", cfg.max_len, "path depth cap");

    auto* oracle = app.add_subcommand("oracle", "ground-truth answers of one query");
    std::string head, regex;
    int capped = -1;
    add_kb_flags(oracle, cfg);
    add_common_flags(oracle, cfg);
    oracle->add_option("head", head, "head entity")->required();
    oracle->add_option("regex", regex, "regex over relations")->required();
    oracle->add_option("--capped", capped, "cap path length (omit for exact)");

    auto* train = app.add_subcommand("train", "two-stage training");
    add_kb_flags(train, cfg);
    add_common_flags(train, cfg);
    add_model_flags(train, cfg, model, variant);
    train->add_option("--train-queries", cfg.train_queries, "regex train split (jsonl)");
    train->add_option("--dev-queries", cfg.dev_queries, "regex dev split (jsonl)");
    train->add_option("--lr-single-hop", cfg.train.lr_single_hop, "stage-1 learning rate");
    train->add_option("--lr-regex", cfg.train.lr_regex, "stage-2 learning rate");
    train->add_option("--batch", cfg.train.batch_size, "batch size");
    train->add_option("--negatives", cfg.train.negatives, "negatives per query");
    train->add_option("--epochs-single-hop", cfg.train.epochs_single_hop, "stage-1 epoch cap");
    train->add_option("--epochs-regex", cfg.train.epochs_regex, "stage-2 epoch cap");
    train->add_option("--patience", cfg.train.patience, "dev evals without improvement");
    train->add_option("--eval-every", cfg.train.eval_every, "epochs between dev evals");
    train->add_option("--adv-temperature", cfg.train.adv_temperature,
                      "self-adversarial temperature");

    auto* eval = app.add_subcommand("eval", "filtered-ranking evaluation");
    add_kb_flags(eval, cfg);
    add_common_flags(eval, cfg);
    add_model_flags(eval, cfg, model, variant);
    eval->add_option("--checkpoint", cfg.checkpoint, "trained checkpoint")->required();
    eval->add_option("--queries", cfg.test_queries, "query file to evaluate")->required();
    eval->add_flag("--exclude-infinite", [&cfg](size_t) { cfg.include_infinite = false; },
                   "drop infinite ranks from the averages");
    std::string types_filter;
    eval->add_option("--types-answerable-by", types_filter,
                     "'all' keeps only types every variant can answer");
    eval->add_flag("--dump-outcomes", cfg.dump_outcomes,
                   "write one JSON line per (query, answer) outcome");

    auto* fixture = app.add_subcommand("fixture", "write a synthetic fixture");
    std::string fixture_name;
    fixture->add_option("name", fixture_name, "chain | cycle | hierarchy | symmetric | planted")
        ->required();
    add_common_flags(fixture, cfg);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            run_gen(cfg, std::cout);
        } else if (oracle->parsed()) {
            run_oracle(cfg, head, regex, capped, std::cout);
        } else if (train->parsed()) {
            resolve_model(model, variant, cfg);
            run_train_files(cfg, std::cout);
        } else if (eval->parsed()) {
            resolve_model(model, variant, cfg);
            if (!types_filter.empty()) {
                if (types_filter != "all") {
                    throw std::invalid_argument("--types-answerable-by supports only 'all'");
                }
                cfg.answerable_by_all = true;
            }
            run_eval(cfg, std::cout);
        } else if (fixture->parsed()) {
            run_fixture(fixture_name, cfg.out_dir, cfg.train.seed, std::cout);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

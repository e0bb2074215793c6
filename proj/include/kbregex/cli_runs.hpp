#pragma once

#include <iostream>

#include "kbregex/dataset.hpp"
#include "kbregex/training.hpp"

namespace kbregex {

// Everything a subcommand needs; the CLI fills this from flags plus an
// optional config file (flags win).
struct RunConfig {
    std::string train_triples;
    std::string dev_triples;
    std::string test_triples;
    std::string train_queries;
    std::string dev_queries;
    std::string test_queries;
    std::string out_dir = ".";

    TrainConfig train;

    // gen
    std::string dataset = "fb15k-regex";
    int queries_per_template = 1000;
    int max_answers = 50;
    int max_len = 5;

    // eval
    std::string checkpoint;
    bool include_infinite = true;
    bool answerable_by_all = false;
    bool dump_outcomes = false;  // per-outcome JSONL next to the report
};

// Loads whichever triple files are set; missing paths raise KbError. The
// per-split load summary goes to `info` when given.
KnowledgeBase load_kb(const RunConfig& cfg, std::ostream* info = nullptr);

// Dataset synthesis end to end: queries_{train,dev,test}.jsonl plus
// gen_report.json under out_dir.
void run_gen(const RunConfig& cfg, std::ostream& info);

// Ground-truth answers of (head, regex, ?), names sorted one per line.
// capped < 0 means exact.
void run_oracle(const RunConfig& cfg, const std::string& head, const std::string& regex,
                int capped, std::ostream& out);

struct TrainArtifacts {
    ModelParams params;
    double single_hop_mrr_pre = 0.0;   // test single-hop MRR after stage 1
    double single_hop_mrr_post = 0.0;  // same measurement after regex training
    StageResult single_hop;
    StageResult regex;
};

// Two-stage training; writes checkpoint.bin(+.json), run_log.jsonl and
// train_report.json under out_dir. Baseline variant trains stage 1 only.
TrainArtifacts run_train(const RunConfig& cfg, const KnowledgeBase& kb,
                         const std::vector<RegexQuery>& train_q,
                         const std::vector<RegexQuery>& dev_q, std::ostream& info);
void run_train_files(const RunConfig& cfg, std::ostream& info);

// Filtered-ranking evaluation of a checkpoint on a query file; writes
// eval_report.json under out_dir and returns the report.
EvalReport run_eval(const RunConfig& cfg, std::ostream& info);

// chain | cycle | hierarchy | symmetric | planted
void run_fixture(const std::string& name, const std::string& out_dir, uint64_t seed,
                 std::ostream& info);

}  // namespace kbregex

#include "kbregex/cli_runs.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "kbregex/checkpoint.hpp"
#include "kbregex/fixtures.hpp"

namespace kbregex {

namespace fs = std::filesystem;

KnowledgeBase load_kb(const RunConfig& cfg, std::ostream* info) {
    KnowledgeBase kb;
    const std::pair<const std::string*, Split> files[] = {
        {&cfg.train_triples, Split::Train},
        {&cfg.dev_triples, Split::Dev},
        {&cfg.test_triples, Split::Test},
    };
    for (auto [path, split] : files) {
        if (path->empty()) continue;
        LoadSummary s = kb.load_triples(*path, split);
        if (info) {
            *info << "loaded " << split_name(split) << ": " << s.stored << " triples";
            if (s.duplicates > 0) *info << " (" << s.duplicates << " duplicate lines)";
            *info << "\n";
        }
    }
    if (kb.total_triples() == 0) throw KbError("no triples loaded; set the triples paths");
    return kb;
}

void run_gen(const RunConfig& cfg, std::ostream& info) {
    KnowledgeBase kb = load_kb(cfg, &info);
    DatasetSpec spec;
    spec.templates = builtin_templates(cfg.dataset);
    spec.queries_per_template = cfg.queries_per_template;
    spec.max_answers = cfg.max_answers;
    spec.max_len = cfg.max_len;
    spec.seed = cfg.train.seed;
    spec.workers = cfg.train.workers;

    GenReport report;
    std::vector<RegexQuery> generated = generate_queries(kb, spec, report);
    SplitQueries split = split_queries(kb, generated, spec.max_len, &report);

    fs::create_directories(cfg.out_dir);
    save_queries(fs::path(cfg.out_dir) / "queries_train.jsonl", kb, split.train);
    save_queries(fs::path(cfg.out_dir) / "queries_dev.jsonl", kb, split.dev);
    save_queries(fs::path(cfg.out_dir) / "queries_test.jsonl", kb, split.test);
    std::ofstream rep(fs::path(cfg.out_dir) / "gen_report.json", std::ios::binary);
    rep << report.to_json() << '\n';

    info << "generated " << generated.size() << " queries over " << spec.templates.size()
         << " templates -> " << split.train.size() << " train / " << split.dev.size()
         << " dev / " << split.test.size() << " test\n";
}

void run_oracle(const RunConfig& cfg, const std::string& head, const std::string& regex,
                int capped, std::ostream& out) {
    KnowledgeBase kb = load_kb(cfg);
    auto head_id = kb.entity_id(head);
    if (!head_id) throw KbError("unknown entity '" + head + "'");
    RegexPtr expr = parse(regex, [&kb](std::string_view tok) { return kb.relation_id(tok); });
    std::vector<EntId> answers =
        capped < 0 ? answer_set_exact(kb, GraphSel::Full, *head_id, expr)
                   : answer_set_capped(kb, GraphSel::Full, *head_id, expr, capped);
    std::vector<std::string> names;
    names.reserve(answers.size());
    for (EntId e : answers) names.push_back(kb.entity_name(e));
    std::sort(names.begin(), names.end());
    for (const std::string& n : names) out << n << '\n';
}

TrainArtifacts run_train(const RunConfig& cfg, const KnowledgeBase& kb,
                         const std::vector<RegexQuery>& train_q,
                         const std::vector<RegexQuery>& dev_q, std::ostream& info) {
    cfg.train.validate();
    fs::create_directories(cfg.out_dir);
    std::ofstream log(fs::path(cfg.out_dir) / "run_log.jsonl", std::ios::binary);
    auto log_line = [&log](const std::string& line) { log << line << '\n'; };

    TrainArtifacts art;
    art.params = init_params(cfg.train.kind, cfg.train.dim, kb.num_entities(), kb.num_relations(),
                             cfg.train.alpha, cfg.train.gamma, cfg.train.seed);

    std::vector<RegexQuery> sh_train = single_hop_queries(kb, Split::Train);
    std::vector<RegexQuery> sh_dev = single_hop_queries(kb, Split::Dev);
    std::vector<RegexQuery> sh_test = single_hop_queries(kb, Split::Test);

    info << "stage single-hop: " << sh_train.size() << " queries\n";
    art.single_hop = train_stage(kb, sh_train, sh_dev, cfg.train, Stage::SingleHop, art.params,
                                 log_line);

    auto sh_mrr = [&](const ModelParams& p) {
        auto outs = rank_all_pairs(kb, p, cfg.train.variant, sh_test, cfg.train.workers);
        return metrics(outs).overall.mrr;
    };
    art.single_hop_mrr_pre = sh_mrr(art.params);

    if (cfg.train.variant != Variant::Baseline) {
        info << "stage regex: " << train_q.size() << " queries\n";
        art.regex = train_stage(kb, train_q, dev_q, cfg.train, Stage::Regex, art.params, log_line);
        art.single_hop_mrr_post = sh_mrr(art.params);
    } else {
        art.single_hop_mrr_post = art.single_hop_mrr_pre;
    }

    save_checkpoint(fs::path(cfg.out_dir) / "checkpoint.bin", art.params, kb);

    nlohmann::json rep;
    rep["model"] = model_kind_name(cfg.train.kind);
    rep["variant"] = variant_name(cfg.train.variant);
    rep["seed"] = cfg.train.seed;
    rep["dim"] = cfg.train.dim;
    rep["gamma"] = cfg.train.gamma;
    rep["alpha"] = cfg.train.alpha;
    rep["single_hop_epochs"] = art.single_hop.history.size();
    rep["single_hop_best_dev_mrr"] = art.single_hop.best_dev_mrr;
    rep["regex_epochs"] = art.regex.history.size();
    rep["regex_best_dev_mrr"] = art.regex.best_dev_mrr;
    rep["regex_skipped_unanswerable"] = art.regex.skipped_unanswerable;
    rep["single_hop_mrr_pre_regex"] = art.single_hop_mrr_pre;
    rep["single_hop_mrr_post_regex"] = art.single_hop_mrr_post;
    std::ofstream repf(fs::path(cfg.out_dir) / "train_report.json", std::ios::binary);
    repf << rep.dump(2) << '\n';

    info << "single-hop MRR pre-regex " << art.single_hop_mrr_pre << ", post-regex "
         << art.single_hop_mrr_post << "\n";
    return art;
}

void run_train_files(const RunConfig& cfg, std::ostream& info) {
    KnowledgeBase kb = load_kb(cfg, &info);
    std::vector<RegexQuery> train_q, dev_q;
    if (cfg.train.variant != Variant::Baseline) {
        if (cfg.train_queries.empty()) throw KbError("train_queries path is required");
        train_q = load_queries(cfg.train_queries, kb);
        if (!cfg.dev_queries.empty()) dev_q = load_queries(cfg.dev_queries, kb);
    }
    run_train(cfg, kb, train_q, dev_q, info);
}

EvalReport run_eval(const RunConfig& cfg, std::ostream& info) {
    KnowledgeBase kb = load_kb(cfg, &info);
    if (cfg.checkpoint.empty()) throw KbError("checkpoint path is required");
    ModelParams params = load_checkpoint(cfg.checkpoint, kb);
    if (cfg.test_queries.empty()) throw KbError("test_queries path is required");
    std::vector<RegexQuery> queries = load_queries(cfg.test_queries, kb);

    EvalOptions opts;
    opts.include_infinite = cfg.include_infinite;
    opts.types_answerable_by_all = cfg.answerable_by_all;
    if (cfg.dump_outcomes) {
        fs::create_directories(cfg.out_dir);
        opts.outcome_dump_path = (fs::path(cfg.out_dir) / "outcomes.jsonl").string();
    }
    opts.workers = cfg.train.workers;
    EvalReport rep = evaluate_split(kb, params, cfg.train.variant, queries, opts);

    fs::create_directories(cfg.out_dir);
    std::ofstream out(fs::path(cfg.out_dir) / "eval_report.json", std::ios::binary);
    out << rep.to_json() << '\n';
    info << "MRR " << rep.overall.mrr << " HITS@10 " << rep.overall.hits10 << " over "
         << rep.total_pairs << " pairs (" << rep.unanswerable << " unanswerable)\n";
    return rep;
}

namespace {

void write_triples(const KnowledgeBase& kb, const fs::path& dir) {
    fs::create_directories(dir);
    const std::pair<Split, const char*> files[] = {
        {Split::Train, "train.tsv"}, {Split::Dev, "dev.tsv"}, {Split::Test, "test.tsv"}};
    for (auto [split, name] : files) {
        std::ofstream out(dir / name, std::ios::binary);
        for (const Triple& t : kb.triples(split)) {
            out << kb.entity_name(t.head) << '\t' << kb.relation_name(t.rel) << '\t'
                << kb.entity_name(t.tail) << '\n';
        }
    }
}

}  // namespace

void run_fixture(const std::string& name, const std::string& out_dir, uint64_t seed,
                 std::ostream& info) {
    fs::path dir(out_dir);
    if (name == "chain") {
        write_triples(make_chain(), dir);
    } else if (name == "cycle") {
        write_triples(make_cycle(), dir);
    } else if (name == "hierarchy") {
        write_triples(make_hierarchy(), dir);
    } else if (name == "symmetric") {
        write_triples(make_symmetric(), dir);
    } else if (name == "planted") {
        PlantedFixture f = make_planted(seed);
        write_triples(f.kb, dir);
        save_queries(dir / "queries_train.jsonl", f.kb, f.queries.train);
        save_queries(dir / "queries_dev.jsonl", f.kb, f.queries.dev);
        save_queries(dir / "queries_test.jsonl", f.kb, f.queries.test);
        std::ofstream rep(dir / "gen_report.json", std::ios::binary);
        rep << f.report.to_json() << '\n';
    } else {
        throw std::invalid_argument("unknown fixture '" + name +
                                    "' (chain, cycle, hierarchy, symmetric, planted)");
    }
    info << "fixture " << name << " written to " << dir.string() << "\n";
}

}  // namespace kbregex

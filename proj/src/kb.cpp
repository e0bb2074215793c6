#include "kbregex/kb.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

namespace kbregex {

const char* split_name(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Dev: return "dev";
        case Split::Test: return "test";
    }
    return "?";
}

const std::vector<EntId> Adjacency::empty_;

void Adjacency::build(const std::vector<Triple>& triples, size_t num_relations) {
    by_rel_.assign(num_relations, {});
    heads_.assign(num_relations, {});
    for (const Triple& t : triples) {
        by_rel_[static_cast<size_t>(t.rel)][t.head].push_back(t.tail);
    }
    for (size_t r = 0; r < num_relations; ++r) {
        auto& heads = heads_[r];
        for (auto& [head, tails] : by_rel_[r]) {
            std::sort(tails.begin(), tails.end());
            tails.erase(std::unique(tails.begin(), tails.end()), tails.end());
            heads.push_back(head);
        }
        std::sort(heads.begin(), heads.end());
    }
}

const std::vector<EntId>& Adjacency::tails(RelId rel, EntId head) const {
    if (rel < 0 || static_cast<size_t>(rel) >= by_rel_.size()) return empty_;
    const auto& m = by_rel_[static_cast<size_t>(rel)];
    auto it = m.find(head);
    return it == m.end() ? empty_ : it->second;
}

const std::vector<EntId>& Adjacency::heads(RelId rel) const {
    if (rel < 0 || static_cast<size_t>(rel) >= heads_.size()) return empty_;
    return heads_[static_cast<size_t>(rel)];
}

EntId KnowledgeBase::intern_entity(std::string_view name) {
    auto it = entity_ids_.find(std::string(name));
    if (it != entity_ids_.end()) return it->second;
    EntId id = static_cast<EntId>(entities_.size());
    entities_.emplace_back(name);
    entity_ids_.emplace(std::string(name), id);
    return id;
}

RelId KnowledgeBase::intern_relation(std::string_view name) {
    auto it = relation_ids_.find(std::string(name));
    if (it != relation_ids_.end()) return it->second;
    RelId id = static_cast<RelId>(relations_.size());
    relations_.emplace_back(name);
    relation_ids_.emplace(std::string(name), id);
    return id;
}

std::optional<EntId> KnowledgeBase::entity_id(std::string_view name) const {
    auto it = entity_ids_.find(std::string(name));
    if (it == entity_ids_.end()) return std::nullopt;
    return it->second;
}

std::optional<RelId> KnowledgeBase::relation_id(std::string_view name) const {
    auto it = relation_ids_.find(std::string(name));
    if (it == relation_ids_.end()) return std::nullopt;
    return it->second;
}

void KnowledgeBase::check_cross_split(const Triple& t, Split split) const {
    for (int s = 0; s < 3; ++s) {
        if (s == static_cast<int>(split)) continue;
        if (triples_[static_cast<size_t>(s)].count(t)) {
            throw KbError("triple (" + entity_name(t.head) + ", " + relation_name(t.rel) + ", " +
                          entity_name(t.tail) + ") already present in split " +
                          split_name(static_cast<Split>(s)));
        }
    }
}

void KnowledgeBase::add_triple(std::string_view h, std::string_view r, std::string_view t, Split split) {
    Triple trip{intern_entity(h), intern_relation(r), intern_entity(t)};
    check_cross_split(trip, split);
    triples_[static_cast<size_t>(split)].insert(trip);
    adj_fresh_ = {false, false, false};
}

LoadSummary KnowledgeBase::load_triples(const std::filesystem::path& path, Split split) {
    std::ifstream in(path);
    if (!in) throw KbError("cannot open triples file: " + path.string());
    LoadSummary summary;
    std::string line;
    size_t line_no = 0;
    auto& dest = triples_[static_cast<size_t>(split)];
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        size_t t1 = line.find('\t');
        size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        if (t1 == std::string::npos || t2 == std::string::npos ||
            line.find('\t', t2 + 1) != std::string::npos || t1 == 0 || t2 == t1 + 1 ||
            t2 + 1 == line.size()) {
            throw KbError(path.string() + ":" + std::to_string(line_no) +
                          ": expected head<TAB>relation<TAB>tail");
        }
        ++summary.lines;
        Triple trip{intern_entity(std::string_view(line).substr(0, t1)),
                    intern_relation(std::string_view(line).substr(t1 + 1, t2 - t1 - 1)),
                    intern_entity(std::string_view(line).substr(t2 + 1))};
        check_cross_split(trip, split);
        if (dest.insert(trip).second) {
            ++summary.stored;
        } else {
            ++summary.duplicates;
        }
    }
    adj_fresh_ = {false, false, false};
    return summary;
}

size_t KnowledgeBase::total_triples() const {
    return triples_[0].size() + triples_[1].size() + triples_[2].size();
}

const Adjacency& KnowledgeBase::adjacency(GraphSel sel) const {
    size_t i = static_cast<size_t>(sel);
    if (!adj_fresh_[i]) {
        std::vector<Triple> all(triples_[0].begin(), triples_[0].end());
        if (sel != GraphSel::Train) all.insert(all.end(), triples_[1].begin(), triples_[1].end());
        if (sel == GraphSel::Full) all.insert(all.end(), triples_[2].begin(), triples_[2].end());
        adj_[i].build(all, num_relations());
        adj_fresh_[i] = true;
    }
    return adj_[i];
}

static uint64_t fnv1a(const std::vector<std::string>& names) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (const auto& n : names) {
        for (char c : n) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ull;
        }
        h ^= '\n';
        h *= 0x100000001b3ull;
    }
    return h;
}

uint64_t KnowledgeBase::entity_vocab_hash() const { return fnv1a(entities_); }
uint64_t KnowledgeBase::relation_vocab_hash() const { return fnv1a(relations_); }

// ---------------------------------------------------------------------------
// Query files
// ---------------------------------------------------------------------------

std::vector<RegexQuery> load_queries(const std::filesystem::path& path, const KnowledgeBase& kb) {
    std::ifstream in(path);
    if (!in) throw KbError("cannot open query file: " + path.string());
    std::vector<RegexQuery> out;
    std::string line;
    size_t line_no = 0;
    auto resolve = [&kb](std::string_view tok) { return kb.relation_id(tok); };
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            throw KbError(path.string() + ":" + std::to_string(line_no) + ": invalid JSON");
        }
        RegexQuery q;
        auto head = kb.entity_id(j.at("head").get<std::string>());
        if (!head) throw KbError(path.string() + ":" + std::to_string(line_no) + ": unknown entity '" +
                                 j.at("head").get<std::string>() + "'");
        q.head = *head;
        q.regex_text = j.at("regex").get<std::string>();
        q.expr = parse(q.regex_text, resolve);
        q.type_tag = j.value("type", "");
        for (const auto& a : j.at("answers")) {
            auto id = kb.entity_id(a.get<std::string>());
            if (!id) throw KbError(path.string() + ":" + std::to_string(line_no) +
                                   ": unknown answer entity '" + a.get<std::string>() + "'");
            q.answers.push_back(*id);
        }
        std::sort(q.answers.begin(), q.answers.end());
        if (j.contains("full_answers")) {
            for (const auto& a : j.at("full_answers")) {
                auto id = kb.entity_id(a.get<std::string>());
                if (!id) throw KbError(path.string() + ":" + std::to_string(line_no) +
                                       ": unknown answer entity '" + a.get<std::string>() + "'");
                q.full_answers.push_back(*id);
            }
            std::sort(q.full_answers.begin(), q.full_answers.end());
        } else {
            q.full_answers = q.answers;
        }
        out.push_back(std::move(q));
    }
    return out;
}

void save_queries(const std::filesystem::path& path, const KnowledgeBase& kb,
                  const std::vector<RegexQuery>& queries) {
    std::ofstream out(path, std::ios::binary);  // LF line endings everywhere
    if (!out) throw KbError("cannot write query file: " + path.string());
    for (const RegexQuery& q : queries) {
        nlohmann::json j;
        j["head"] = kb.entity_name(q.head);
        j["regex"] = q.regex_text;
        nlohmann::json answers = nlohmann::json::array();
        for (EntId a : q.answers) answers.push_back(kb.entity_name(a));
        j["answers"] = std::move(answers);
        if (q.full_answers != q.answers) {
            nlohmann::json full = nlohmann::json::array();
            for (EntId a : q.full_answers) full.push_back(kb.entity_name(a));
            j["full_answers"] = std::move(full);
        }
        j["type"] = q.type_tag;
        out << j.dump() << '\n';
    }
}

}  // namespace kbregex

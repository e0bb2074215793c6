#include "kbregex/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include <json.hpp>

namespace kbregex {

namespace {

constexpr char kMagic[8] = {'K', 'B', 'R', 'X', 'C', 'K', 'P', 'T'};
constexpr uint32_t kVersion = 1;

void put_u32(std::ostream& out, uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& out, uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& out, double d) {
    uint64_t bits;
    std::memcpy(&bits, &d, 8);
    put_u64(out, bits);
}

uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(b[i]) << (8 * i);
    return v;
}

uint64_t get_u64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
    return v;
}

double get_f64(std::istream& in) {
    uint64_t bits = get_u64(in);
    double d;
    std::memcpy(&d, &bits, 8);
    return d;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const ModelParams& params,
                     const KnowledgeBase& kb) {
    for (const ParamGroup& g : params.ps.groups) {
        if (!all_finite(g.data)) {
            throw CheckpointError("refusing to save non-finite parameters in " + g.name);
        }
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CheckpointError("cannot write checkpoint: " + path.string());

    out.write(kMagic, 8);
    put_u32(out, kVersion);
    out.put(static_cast<char>(params.kind));
    put_u32(out, static_cast<uint32_t>(params.dim));
    put_f64(out, params.alpha);
    put_f64(out, params.gamma);
    put_u64(out, params.num_entities);
    put_u64(out, params.num_relations);
    put_u64(out, kb.entity_vocab_hash());
    put_u64(out, kb.relation_vocab_hash());
    put_u32(out, static_cast<uint32_t>(params.ps.groups.size()));
    for (const ParamGroup& g : params.ps.groups) {
        put_u32(out, static_cast<uint32_t>(g.name.size()));
        out.write(g.name.data(), static_cast<std::streamsize>(g.name.size()));
        put_u32(out, static_cast<uint32_t>(g.rows));
        put_u32(out, static_cast<uint32_t>(g.cols));
        for (double x : g.data) put_f64(out, x);
    }
    if (!out) throw CheckpointError("short write: " + path.string());

    nlohmann::json side;
    side["kind"] = model_kind_name(params.kind);
    side["dim"] = params.dim;
    side["alpha"] = params.alpha;
    side["gamma"] = params.gamma;
    side["entities"] = kb.entity_names();
    side["relations"] = kb.relation_names();
    std::ofstream js(path.string() + ".json", std::ios::binary);
    js << side.dump(2) << '\n';
}

ModelParams load_checkpoint(const std::filesystem::path& path, const KnowledgeBase& kb) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("cannot open checkpoint: " + path.string());

    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0) {
        throw CheckpointError("bad magic in " + path.string());
    }
    uint32_t version = get_u32(in);
    if (version != kVersion) {
        throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
    }
    ModelKind kind = static_cast<ModelKind>(in.get());
    uint32_t dim = get_u32(in);
    double alpha = get_f64(in);
    double gamma = get_f64(in);
    uint64_t num_entities = get_u64(in);
    uint64_t num_relations = get_u64(in);
    uint64_t ehash = get_u64(in);
    uint64_t rhash = get_u64(in);
    if (num_entities != kb.num_entities() || num_relations != kb.num_relations() ||
        ehash != kb.entity_vocab_hash() || rhash != kb.relation_vocab_hash()) {
        throw CheckpointError("checkpoint vocabularies do not match the loaded KB");
    }

    ModelParams p = init_params(kind, static_cast<int>(dim), num_entities, num_relations, alpha,
                                gamma, /*seed=*/0);
    uint32_t groups = get_u32(in);
    if (groups != p.ps.groups.size()) {
        throw CheckpointError("unexpected group count in " + path.string());
    }
    for (ParamGroup& g : p.ps.groups) {
        uint32_t name_len = get_u32(in);
        std::string name(name_len, '\0');
        in.read(name.data(), name_len);
        uint32_t rows = get_u32(in);
        uint32_t cols = get_u32(in);
        if (name != g.name || rows != static_cast<uint32_t>(g.rows) ||
            cols != static_cast<uint32_t>(g.cols)) {
            throw CheckpointError("group mismatch: expected " + g.name + ", found " + name);
        }
        for (double& x : g.data) x = get_f64(in);
    }
    if (!in) throw CheckpointError("truncated checkpoint: " + path.string());
    for (const ParamGroup& g : p.ps.groups) {
        if (!all_finite(g.data)) throw CheckpointError("non-finite parameters in " + g.name);
    }
    return p;
}

}  // namespace kbregex

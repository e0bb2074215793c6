#pragma once

#include <span>
#include <string>

#include "kbregex/kb.hpp"
#include "kbregex/regex_ast.hpp"
#include "kbregex/tape.hpp"
#include "kbregex/tensor.hpp"

namespace kbregex {

enum class ModelKind : uint8_t { RotateBox, Rotate, Query2Box };

const char* model_kind_name(ModelKind k);
std::optional<ModelKind> model_kind_from_name(std::string_view s);

// Relation-space embedding of a regex expression. For the complex models
// `theta` is the accumulated rotation angle; for Query2Box it is the
// accumulated center translation. Offsets are absent for RotatE; Query2Box
// uses off_re only. Stored offsets are read through elementwise abs, so the
// components here are always non-negative.
struct RotationBox {
    Vec theta;
    Vec off_re;
    Vec off_im;
};

// A query-space box: the head entity rotated (or translated) into a
// relation-space box. cen_im/off_im are empty for Query2Box; offsets are zero
// vectors for RotatE.
struct QueryBox {
    Vec cen_re;
    Vec cen_im;
    Vec off_re;
    Vec off_im;
};

struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// All trainable state plus the hyperparameters that define the geometry.
struct ModelParams {
    ModelKind kind = ModelKind::RotateBox;
    int dim = 0;  // k for complex models, the real dimension for Query2Box
    double alpha = 0.2;
    double gamma = 24.0;
    size_t num_entities = 0;
    size_t num_relations = 0;

    ParamSet ps;

    // group ids; -1 when the kind does not have the block
    int g_entity = -1;
    int g_rel_theta = -1;
    int g_rel_off = -1;
    int g_kleene_theta = -1;
    int g_kleene_off = -1;
    int g_kcen = -1;
    int g_koff_re = -1;
    int g_koff_im = -1;
    int g_ds_cen_w1 = -1, g_ds_cen_b1 = -1, g_ds_cen_w2 = -1, g_ds_cen_b2 = -1, g_ds_cen_wout = -1;
    int g_ds_off_w1 = -1, g_ds_off_b1 = -1, g_ds_off_w2 = -1, g_ds_off_b2 = -1, g_ds_off_wout = -1;

    bool has_offsets() const { return kind != ModelKind::Rotate; }
    bool is_complex() const { return kind != ModelKind::Query2Box; }
};

// Entity coordinates uniform in +-(gamma+2)/dim, relation angles uniform in
// [-pi, pi), raw offsets 0.1, projection matrices identity, DeepSets layers
// identity with zero bias. The Kleene table starts as a copy of the relation
// table.
ModelParams init_params(ModelKind kind, int dim, size_t num_entities, size_t num_relations,
                        double alpha, double gamma, uint64_t seed);

// r+ := r, done again when regex-stage training starts.
void copy_kleene_from_relations(ModelParams& p);

// ---------------------------------------------------------------------------
// Value path (no gradients): used by evaluation and the exactness tests.
// ---------------------------------------------------------------------------

RotationBox relation_box(const ModelParams& p, RelId rel);
RotationBox kleene_box(const ModelParams& p, RelId rel);  // free-parameter r+

// Eq.-style path step: rotate (or translate) the center, add the offsets.
RotationBox compose_path(const RotationBox& a, const RotationBox& b);

// Learned Kleene-plus operator on a relation-space box.
RotationBox kleene_projection(const ModelParams& p, const RotationBox& box);

// Permutation-invariant combiner over >= 2 branches (elementwise-min Psi).
RotationBox disj_deepsets(const ModelParams& p, std::span<const RotationBox> branches);

// Rotate/translate the head entity into the box (single-hop semantics).
QueryBox apply_head(const ModelParams& p, EntId head, const RotationBox& box);
QueryBox single_hop(const ModelParams& p, EntId head, RelId rel);

void entity_point(const ModelParams& p, EntId e, Vec& re, Vec& im);

bool inside(const Vec& pt_re, const Vec& pt_im, const QueryBox& q);

// dist_out + alpha * dist_in, L1 over real and imaginary parts.
double distance(const ModelParams& p, const Vec& pt_re, const Vec& pt_im, const QueryBox& q);
double distance_to_entity(const ModelParams& p, EntId e, const QueryBox& q);

double disj_aggregate(const ModelParams& p, EntId e, std::span<const QueryBox> branches);

struct EmbeddedQuery {
    std::vector<QueryBox> branches;  // one box unless an aggregation variant split it
    bool unanswerable = false;
};

EmbeddedQuery embed_regex(const ModelParams& p, Variant v, EntId head, const RegexPtr& expr);

// Branch-minimum distance of an embedded query to an entity.
double query_distance(const ModelParams& p, const EmbeddedQuery& emb, EntId e);

// ---------------------------------------------------------------------------
// Tape path (differentiable): mirrors the value path operation for operation.
// ---------------------------------------------------------------------------

struct RotationBoxT {
    Node theta;
    Node off_re;
    Node off_im;
};

struct QueryBoxT {
    Node cen_re;
    Node cen_im;
    Node off_re;
    Node off_im;
};

struct EmbeddedQueryT {
    std::vector<QueryBoxT> branches;
    bool unanswerable = false;
};

EmbeddedQueryT embed_regex_t(Tape& t, const ModelParams& p, Variant v, EntId head,
                             const RegexPtr& expr);
Node distance_t(Tape& t, const ModelParams& p, EntId e, const QueryBoxT& q);
// branch-minimum distance as a differentiable scalar
Node query_distance_t(Tape& t, const ModelParams& p, const EmbeddedQueryT& emb, EntId e);

}  // namespace kbregex

#include "kbregex/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kbregex/rng.hpp"

namespace kbregex {

const char* model_kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::RotateBox: return "rotate-box";
        case ModelKind::Rotate: return "rotate";
        case ModelKind::Query2Box: return "query2box";
    }
    return "?";
}

std::optional<ModelKind> model_kind_from_name(std::string_view s) {
    for (ModelKind k : {ModelKind::RotateBox, ModelKind::Rotate, ModelKind::Query2Box}) {
        if (s == model_kind_name(k)) return k;
    }
    return std::nullopt;
}

ModelParams init_params(ModelKind kind, int dim, size_t num_entities, size_t num_relations,
                        double alpha, double gamma, uint64_t seed) {
    if (alpha <= 0.0 || alpha >= 1.0) throw ModelError("alpha must be in (0,1)");
    if (gamma <= 0.0) throw ModelError("gamma must be positive");
    if (dim <= 0) throw ModelError("dim must be positive");

    ModelParams p;
    p.kind = kind;
    p.dim = dim;
    p.alpha = alpha;
    p.gamma = gamma;
    p.num_entities = num_entities;
    p.num_relations = num_relations;

    const int k = dim;
    const int ent_cols = p.is_complex() ? 2 * k : k;
    const int off_cols = kind == ModelKind::RotateBox ? 2 * k : k;
    const int nE = static_cast<int>(num_entities);
    const int nR = static_cast<int>(num_relations);

    p.g_entity = p.ps.add("entity", nE, ent_cols);
    p.g_rel_theta = p.ps.add("rel_theta", nR, k);
    if (p.has_offsets()) p.g_rel_off = p.ps.add("rel_off", nR, off_cols);
    p.g_kleene_theta = p.ps.add("kleene_theta", nR, k);
    if (p.has_offsets()) p.g_kleene_off = p.ps.add("kleene_off", nR, off_cols);
    p.g_kcen = p.ps.add("k_cen", 1, k * k);
    if (kind == ModelKind::RotateBox) {
        p.g_koff_re = p.ps.add("k_off_re", 1, k * k);
        p.g_koff_im = p.ps.add("k_off_im", 1, k * k);
    }
    p.g_ds_cen_w1 = p.ps.add("ds_cen_w1", 1, k * k);
    p.g_ds_cen_b1 = p.ps.add("ds_cen_b1", 1, k);
    p.g_ds_cen_w2 = p.ps.add("ds_cen_w2", 1, k * k);
    p.g_ds_cen_b2 = p.ps.add("ds_cen_b2", 1, k);
    p.g_ds_cen_wout = p.ps.add("ds_cen_wout", 1, k * k);
    if (p.has_offsets()) {
        p.g_ds_off_w1 = p.ps.add("ds_off_w1", 1, k * k);
        p.g_ds_off_b1 = p.ps.add("ds_off_b1", 1, k);
        p.g_ds_off_w2 = p.ps.add("ds_off_w2", 1, k * k);
        p.g_ds_off_b2 = p.ps.add("ds_off_b2", 1, k);
        p.g_ds_off_wout = p.ps.add("ds_off_wout", 1, k * k);
    }

    Rng rng(mix_stream(seed, "init"));
    const double range = (gamma + 2.0) / k;
    const double pi = std::numbers::pi;

    ParamGroup& ent = p.ps[p.g_entity];
    for (double& x : ent.data) x = rng.next_range(-range, range);

    ParamGroup& theta = p.ps[p.g_rel_theta];
    if (p.is_complex()) {
        for (double& x : theta.data) x = rng.next_range(-pi, pi);
    } else {
        for (double& x : theta.data) x = rng.next_range(-range, range);
    }
    if (p.g_rel_off >= 0) {
        for (double& x : p.ps[p.g_rel_off].data) x = 0.1;
    }

    auto set_identity = [&](int gid, int n) {
        if (gid < 0) return;
        ParamGroup& g = p.ps[gid];
        std::fill(g.data.begin(), g.data.end(), 0.0);
        for (int i = 0; i < n; ++i) g.data[static_cast<size_t>(i) * n + i] = 1.0;
    };
    set_identity(p.g_kcen, k);
    set_identity(p.g_koff_re, k);
    // k_off_im stays zero: the complex projection starts as the identity

    set_identity(p.g_ds_cen_w1, k);
    set_identity(p.g_ds_cen_w2, k);
    set_identity(p.g_ds_cen_wout, k);
    set_identity(p.g_ds_off_w1, k);
    set_identity(p.g_ds_off_w2, k);
    set_identity(p.g_ds_off_wout, k);

    copy_kleene_from_relations(p);
    return p;
}

void copy_kleene_from_relations(ModelParams& p) {
    p.ps[p.g_kleene_theta].data = p.ps[p.g_rel_theta].data;
    if (p.g_kleene_off >= 0) p.ps[p.g_kleene_off].data = p.ps[p.g_rel_off].data;
}

// ---------------------------------------------------------------------------
// Value path
// ---------------------------------------------------------------------------

namespace {

Vec abs_vec(const double* x, int n) {
    Vec out(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<size_t>(i)] = std::fabs(x[i]);
    return out;
}

Vec matvec_val(const ParamGroup& mat, const Vec& x) {
    const int n = static_cast<int>(x.size());
    Vec out(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        const double* row = mat.data.data() + static_cast<size_t>(i) * n;
        for (int j = 0; j < n; ++j) s += row[j] * x[static_cast<size_t>(j)];
        out[static_cast<size_t>(i)] = s;
    }
    return out;
}

// y = W2 * relu(W1 x + b1) + b2
Vec mlp2_val(const ModelParams& p, int w1, int b1, int w2, int b2, const Vec& x) {
    Vec h = matvec_val(p.ps[w1], x);
    const Vec& bias1 = p.ps[b1].data;
    for (size_t i = 0; i < h.size(); ++i) {
        h[i] += bias1[i];
        if (h[i] < 0.0) h[i] = 0.0;
    }
    Vec y = matvec_val(p.ps[w2], h);
    const Vec& bias2 = p.ps[b2].data;
    for (size_t i = 0; i < y.size(); ++i) y[i] += bias2[i];
    return y;
}

void min_into(Vec& acc, const Vec& x) {
    for (size_t i = 0; i < acc.size(); ++i) {
        if (x[i] < acc[i]) acc[i] = x[i];
    }
}

struct BoxRead {
    RotationBox box_from(const ModelParams& p, int theta_group, int off_group, RelId rel) const {
        RotationBox b;
        const ParamGroup& th = p.ps[theta_group];
        b.theta.assign(th.row(rel), th.row(rel) + th.cols);
        if (off_group >= 0) {
            const ParamGroup& off = p.ps[off_group];
            if (p.kind == ModelKind::RotateBox) {
                b.off_re = abs_vec(off.row(rel), p.dim);
                b.off_im = abs_vec(off.row(rel) + p.dim, p.dim);
            } else {
                b.off_re = abs_vec(off.row(rel), p.dim);
            }
        }
        return b;
    }
};

}  // namespace

RotationBox relation_box(const ModelParams& p, RelId rel) {
    return BoxRead{}.box_from(p, p.g_rel_theta, p.g_rel_off, rel);
}

RotationBox kleene_box(const ModelParams& p, RelId rel) {
    return BoxRead{}.box_from(p, p.g_kleene_theta, p.g_kleene_off, rel);
}

RotationBox compose_path(const RotationBox& a, const RotationBox& b) {
    check_same_size(a.theta, b.theta, "compose_path");
    RotationBox out;
    out.theta.resize(a.theta.size());
    for (size_t i = 0; i < a.theta.size(); ++i) out.theta[i] = a.theta[i] + b.theta[i];
    auto add = [](const Vec& x, const Vec& y) {
        Vec z(x.size());
        for (size_t i = 0; i < x.size(); ++i) z[i] = x[i] + y[i];
        return z;
    };
    if (!a.off_re.empty()) out.off_re = add(a.off_re, b.off_re);
    if (!a.off_im.empty()) out.off_im = add(a.off_im, b.off_im);
    return out;
}

RotationBox kleene_projection(const ModelParams& p, const RotationBox& box) {
    RotationBox out;
    out.theta = matvec_val(p.ps[p.g_kcen], box.theta);
    if (p.kind == ModelKind::RotateBox) {
        // complex matrix action on the complex offset, non-negativity restored
        Vec rr = matvec_val(p.ps[p.g_koff_re], box.off_re);
        Vec ii = matvec_val(p.ps[p.g_koff_im], box.off_im);
        Vec ri = matvec_val(p.ps[p.g_koff_re], box.off_im);
        Vec ir = matvec_val(p.ps[p.g_koff_im], box.off_re);
        out.off_re.resize(rr.size());
        out.off_im.resize(rr.size());
        for (size_t i = 0; i < rr.size(); ++i) {
            out.off_re[i] = std::fabs(rr[i] - ii[i]);
            out.off_im[i] = std::fabs(ri[i] + ir[i]);
        }
    } else if (p.kind == ModelKind::Query2Box) {
        Vec o = matvec_val(p.ps[p.g_kcen], box.off_re);
        out.off_re.resize(o.size());
        for (size_t i = 0; i < o.size(); ++i) out.off_re[i] = std::fabs(o[i]);
    }
    return out;
}

RotationBox disj_deepsets(const ModelParams& p, std::span<const RotationBox> branches) {
    if (branches.size() < 2) {
        throw ModelError("disj_deepsets needs at least two branches");
    }
    RotationBox out;
    Vec agg = mlp2_val(p, p.g_ds_cen_w1, p.g_ds_cen_b1, p.g_ds_cen_w2, p.g_ds_cen_b2,
                       branches[0].theta);
    for (size_t i = 1; i < branches.size(); ++i) {
        min_into(agg, mlp2_val(p, p.g_ds_cen_w1, p.g_ds_cen_b1, p.g_ds_cen_w2, p.g_ds_cen_b2,
                               branches[i].theta));
    }
    out.theta = matvec_val(p.ps[p.g_ds_cen_wout], agg);

    auto combine_off = [&](auto member) {
        Vec o = mlp2_val(p, p.g_ds_off_w1, p.g_ds_off_b1, p.g_ds_off_w2, p.g_ds_off_b2,
                         branches[0].*member);
        for (size_t i = 1; i < branches.size(); ++i) {
            min_into(o, mlp2_val(p, p.g_ds_off_w1, p.g_ds_off_b1, p.g_ds_off_w2, p.g_ds_off_b2,
                                 branches[i].*member));
        }
        Vec y = matvec_val(p.ps[p.g_ds_off_wout], o);
        for (double& x : y) x = std::fabs(x);
        return y;
    };
    if (p.kind == ModelKind::RotateBox) {
        out.off_re = combine_off(&RotationBox::off_re);
        out.off_im = combine_off(&RotationBox::off_im);
    } else if (p.kind == ModelKind::Query2Box) {
        out.off_re = combine_off(&RotationBox::off_re);
    }
    return out;
}

void entity_point(const ModelParams& p, EntId e, Vec& re, Vec& im) {
    const ParamGroup& ent = p.ps[p.g_entity];
    const double* row = ent.row(e);
    if (p.is_complex()) {
        re.assign(row, row + p.dim);
        im.assign(row + p.dim, row + 2 * p.dim);
    } else {
        re.assign(row, row + p.dim);
        im.clear();
    }
}

QueryBox apply_head(const ModelParams& p, EntId head, const RotationBox& box) {
    QueryBox q;
    Vec e_re, e_im;
    entity_point(p, head, e_re, e_im);
    if (p.is_complex()) {
        const size_t k = static_cast<size_t>(p.dim);
        Vec c(k), s(k);
        for (size_t i = 0; i < k; ++i) {
            c[i] = std::cos(box.theta[i]);
            s[i] = std::sin(box.theta[i]);
        }
        q.cen_re.resize(k);
        q.cen_im.resize(k);
        for (size_t i = 0; i < k; ++i) {
            q.cen_re[i] = e_re[i] * c[i] - e_im[i] * s[i];
            q.cen_im[i] = e_re[i] * s[i] + e_im[i] * c[i];
        }
        if (p.kind == ModelKind::RotateBox) {
            q.off_re = box.off_re;
            q.off_im = box.off_im;
        } else {
            q.off_re.assign(k, 0.0);
            q.off_im.assign(k, 0.0);
        }
    } else {
        q.cen_re.resize(static_cast<size_t>(p.dim));
        for (size_t i = 0; i < q.cen_re.size(); ++i) q.cen_re[i] = e_re[i] + box.theta[i];
        q.off_re = box.off_re;
    }
    return q;
}

QueryBox single_hop(const ModelParams& p, EntId head, RelId rel) {
    return apply_head(p, head, relation_box(p, rel));
}

bool inside(const Vec& pt_re, const Vec& pt_im, const QueryBox& q) {
    for (size_t i = 0; i < q.cen_re.size(); ++i) {
        if (pt_re[i] < q.cen_re[i] - q.off_re[i] || pt_re[i] > q.cen_re[i] + q.off_re[i]) {
            return false;
        }
    }
    for (size_t i = 0; i < q.cen_im.size(); ++i) {
        if (pt_im[i] < q.cen_im[i] - q.off_im[i] || pt_im[i] > q.cen_im[i] + q.off_im[i]) {
            return false;
        }
    }
    return true;
}

namespace {

// one component (real or imaginary) of Eq.-2 style distance
void component_distance(const Vec& pt, const Vec& cen, const Vec& off, double& out_l1,
                        double& in_l1) {
    double dout = 0.0, din = 0.0;
    for (size_t i = 0; i < cen.size(); ++i) {
        const double qmax = cen[i] + off[i];
        const double qmin = cen[i] - off[i];
        const double hi = pt[i] - qmax;
        const double lo = qmin - pt[i];
        dout += std::fabs((hi > 0.0 ? hi : 0.0) + (lo > 0.0 ? lo : 0.0));
        const double clamped = std::min(qmax, std::max(qmin, pt[i]));
        din += std::fabs(cen[i] - clamped);
    }
    out_l1 = dout;
    in_l1 = din;
}

}  // namespace

double distance(const ModelParams& p, const Vec& pt_re, const Vec& pt_im, const QueryBox& q) {
    double out_re = 0.0, in_re = 0.0, out_im = 0.0, in_im = 0.0;
    component_distance(pt_re, q.cen_re, q.off_re, out_re, in_re);
    if (!q.cen_im.empty()) component_distance(pt_im, q.cen_im, q.off_im, out_im, in_im);
    return (out_re + out_im) + p.alpha * (in_re + in_im);
}

double distance_to_entity(const ModelParams& p, EntId e, const QueryBox& q) {
    Vec re, im;
    entity_point(p, e, re, im);
    return distance(p, re, im, q);
}

double disj_aggregate(const ModelParams& p, EntId e, std::span<const QueryBox> branches) {
    if (branches.empty()) throw ModelError("disj_aggregate: no branches");
    double best = distance_to_entity(p, e, branches[0]);
    for (size_t i = 1; i < branches.size(); ++i) {
        best = std::min(best, distance_to_entity(p, e, branches[i]));
    }
    return best;
}

namespace {

bool uses_aggregation(Variant v) {
    return v == Variant::Baseline || v == Variant::FreeAgg || v == Variant::ProjAgg;
}

bool uses_free_plus(Variant v) { return v == Variant::FreeAgg || v == Variant::FreeDeepsets; }

// expression embedding in relation space; `expr` is disjunction-free for
// aggregation variants (DNF happens upstream)
RotationBox embed_expr(const ModelParams& p, Variant v, const RegexPtr& expr) {
    switch (expr->op) {
        case RegexOp::Rel:
            return relation_box(p, expr->rel);
        case RegexOp::Compose:
            return compose_path(embed_expr(p, v, expr->left), embed_expr(p, v, expr->right));
        case RegexOp::Plus:
            if (v == Variant::Baseline) return embed_expr(p, v, expr->left);  // r+ treated as r
            if (uses_free_plus(v)) return kleene_box(p, expr->left->rel);
            return kleene_projection(p, embed_expr(p, v, expr->left));
        case RegexOp::Disj: {
            // only the DeepSets variants embed a disjunction node directly
            std::vector<RegexPtr> parts = flatten_disj(expr);
            std::vector<RotationBox> branches;
            branches.reserve(parts.size());
            for (const RegexPtr& c : parts) branches.push_back(embed_expr(p, v, c));
            return disj_deepsets(p, branches);
        }
    }
    throw ModelError("embed_expr: bad expression");
}

}  // namespace

EmbeddedQuery embed_regex(const ModelParams& p, Variant v, EntId head, const RegexPtr& expr) {
    EmbeddedQuery out;
    if (!is_answerable(expr, v)) {
        out.unanswerable = true;
        return out;
    }
    if (uses_aggregation(v)) {
        auto parts = dnf_decompose(expr);
        for (const RegexPtr& part : *parts) {
            out.branches.push_back(apply_head(p, head, embed_expr(p, v, part)));
        }
    } else {
        out.branches.push_back(apply_head(p, head, embed_expr(p, v, expr)));
    }
    return out;
}

double query_distance(const ModelParams& p, const EmbeddedQuery& emb, EntId e) {
    if (emb.unanswerable) throw ModelError("query_distance on unanswerable embedding");
    return disj_aggregate(p, e, emb.branches);
}

// ---------------------------------------------------------------------------
// Tape path. Mirrors the value path so forward values agree bitwise.
// ---------------------------------------------------------------------------

namespace {

Node mlp2_t(Tape& t, const ModelParams& p, int w1, int b1, int w2, int b2, Node x) {
    const int k = static_cast<int>(t.size(x));
    Node h = t.matvec(t.leaf(p.ps[w1], w1, 0), k, k, x);
    h = t.add(h, t.leaf(p.ps[b1], b1, 0));
    h = t.smax(h, 0.0);
    Node y = t.matvec(t.leaf(p.ps[w2], w2, 0), k, k, h);
    return t.add(y, t.leaf(p.ps[b2], b2, 0));
}

RotationBoxT box_from_t(Tape& t, const ModelParams& p, int theta_group, int off_group, RelId rel) {
    RotationBoxT b;
    b.theta = t.leaf(p.ps[theta_group], theta_group, rel);
    if (off_group >= 0) {
        Node raw = t.leaf(p.ps[off_group], off_group, rel);
        if (p.kind == ModelKind::RotateBox) {
            b.off_re = t.abs_(t.slice(raw, 0, p.dim));
            b.off_im = t.abs_(t.slice(raw, p.dim, p.dim));
        } else {
            b.off_re = t.abs_(raw);
        }
    }
    return b;
}

RotationBoxT compose_t(Tape& t, const RotationBoxT& a, const RotationBoxT& b) {
    RotationBoxT out;
    out.theta = t.add(a.theta, b.theta);
    if (a.off_re.valid()) out.off_re = t.add(a.off_re, b.off_re);
    if (a.off_im.valid()) out.off_im = t.add(a.off_im, b.off_im);
    return out;
}

RotationBoxT kleene_projection_t(Tape& t, const ModelParams& p, const RotationBoxT& box) {
    const int k = p.dim;
    RotationBoxT out;
    out.theta = t.matvec(t.leaf(p.ps[p.g_kcen], p.g_kcen, 0), k, k, box.theta);
    if (p.kind == ModelKind::RotateBox) {
        Node kre = t.leaf(p.ps[p.g_koff_re], p.g_koff_re, 0);
        Node kim = t.leaf(p.ps[p.g_koff_im], p.g_koff_im, 0);
        Node rr = t.matvec(kre, k, k, box.off_re);
        Node ii = t.matvec(kim, k, k, box.off_im);
        Node ri = t.matvec(kre, k, k, box.off_im);
        Node ir = t.matvec(kim, k, k, box.off_re);
        out.off_re = t.abs_(t.sub(rr, ii));
        out.off_im = t.abs_(t.add(ri, ir));
    } else if (p.kind == ModelKind::Query2Box) {
        out.off_re = t.abs_(t.matvec(t.leaf(p.ps[p.g_kcen], p.g_kcen, 0), k, k, box.off_re));
    }
    return out;
}

RotationBoxT deepsets_t(Tape& t, const ModelParams& p, const std::vector<RotationBoxT>& branches) {
    if (branches.size() < 2) throw ModelError("disj_deepsets needs at least two branches");
    const int k = p.dim;
    RotationBoxT out;
    Node agg = mlp2_t(t, p, p.g_ds_cen_w1, p.g_ds_cen_b1, p.g_ds_cen_w2, p.g_ds_cen_b2,
                      branches[0].theta);
    for (size_t i = 1; i < branches.size(); ++i) {
        agg = t.vmin(agg, mlp2_t(t, p, p.g_ds_cen_w1, p.g_ds_cen_b1, p.g_ds_cen_w2, p.g_ds_cen_b2,
                                 branches[i].theta));
    }
    out.theta = t.matvec(t.leaf(p.ps[p.g_ds_cen_wout], p.g_ds_cen_wout, 0), k, k, agg);

    auto combine_off = [&](Node RotationBoxT::*member) {
        Node o = mlp2_t(t, p, p.g_ds_off_w1, p.g_ds_off_b1, p.g_ds_off_w2, p.g_ds_off_b2,
                        branches[0].*member);
        for (size_t i = 1; i < branches.size(); ++i) {
            o = t.vmin(o, mlp2_t(t, p, p.g_ds_off_w1, p.g_ds_off_b1, p.g_ds_off_w2, p.g_ds_off_b2,
                                 branches[i].*member));
        }
        return t.abs_(t.matvec(t.leaf(p.ps[p.g_ds_off_wout], p.g_ds_off_wout, 0), k, k, o));
    };
    if (p.kind == ModelKind::RotateBox) {
        out.off_re = combine_off(&RotationBoxT::off_re);
        out.off_im = combine_off(&RotationBoxT::off_im);
    } else if (p.kind == ModelKind::Query2Box) {
        out.off_re = combine_off(&RotationBoxT::off_re);
    }
    return out;
}

QueryBoxT apply_head_t(Tape& t, const ModelParams& p, EntId head, const RotationBoxT& box) {
    QueryBoxT q;
    Node ent = t.leaf(p.ps[p.g_entity], p.g_entity, head);
    if (p.is_complex()) {
        Node e_re = t.slice(ent, 0, p.dim);
        Node e_im = t.slice(ent, p.dim, p.dim);
        Node c = t.cos_(box.theta);
        Node s = t.sin_(box.theta);
        q.cen_re = t.sub(t.hadamard(e_re, c), t.hadamard(e_im, s));
        q.cen_im = t.add(t.hadamard(e_re, s), t.hadamard(e_im, c));
        if (p.kind == ModelKind::RotateBox) {
            q.off_re = box.off_re;
            q.off_im = box.off_im;
        } else {
            q.off_re = t.constant_fill(0.0, static_cast<size_t>(p.dim));
            q.off_im = t.constant_fill(0.0, static_cast<size_t>(p.dim));
        }
    } else {
        q.cen_re = t.add(ent, box.theta);
        q.off_re = box.off_re;
    }
    return q;
}

// one component of the Eq.-2 distance as tape nodes
void component_distance_t(Tape& t, Node pt, Node cen, Node off, Node& out_l1, Node& in_l1) {
    Node qmax = t.add(cen, off);
    Node qmin = t.sub(cen, off);
    Node hi = t.smax(t.sub(pt, qmax), 0.0);
    Node lo = t.smax(t.sub(qmin, pt), 0.0);
    out_l1 = t.l1(t.add(hi, lo));
    Node clamped = t.vmin(qmax, t.vmax(qmin, pt));
    in_l1 = t.l1(t.sub(cen, clamped));
}

RotationBoxT embed_expr_t(Tape& t, const ModelParams& p, Variant v, const RegexPtr& expr) {
    switch (expr->op) {
        case RegexOp::Rel:
            return box_from_t(t, p, p.g_rel_theta, p.g_rel_off, expr->rel);
        case RegexOp::Compose:
            return compose_t(t, embed_expr_t(t, p, v, expr->left),
                             embed_expr_t(t, p, v, expr->right));
        case RegexOp::Plus:
            if (v == Variant::Baseline) return embed_expr_t(t, p, v, expr->left);
            if (uses_free_plus(v)) return box_from_t(t, p, p.g_kleene_theta, p.g_kleene_off, expr->left->rel);
            return kleene_projection_t(t, p, embed_expr_t(t, p, v, expr->left));
        case RegexOp::Disj: {
            std::vector<RegexPtr> parts = flatten_disj(expr);
            std::vector<RotationBoxT> branches;
            branches.reserve(parts.size());
            for (const RegexPtr& c : parts) branches.push_back(embed_expr_t(t, p, v, c));
            return deepsets_t(t, p, branches);
        }
    }
    throw ModelError("embed_expr_t: bad expression");
}

}  // namespace

EmbeddedQueryT embed_regex_t(Tape& t, const ModelParams& p, Variant v, EntId head,
                             const RegexPtr& expr) {
    EmbeddedQueryT out;
    if (!is_answerable(expr, v)) {
        out.unanswerable = true;
        return out;
    }
    if (uses_aggregation(v)) {
        auto parts = dnf_decompose(expr);
        for (const RegexPtr& part : *parts) {
            out.branches.push_back(apply_head_t(t, p, head, embed_expr_t(t, p, v, part)));
        }
    } else {
        out.branches.push_back(apply_head_t(t, p, head, embed_expr_t(t, p, v, expr)));
    }
    return out;
}

Node distance_t(Tape& t, const ModelParams& p, EntId e, const QueryBoxT& q) {
    Node ent = t.leaf(p.ps[p.g_entity], p.g_entity, e);
    Node out_re, in_re;
    if (p.is_complex()) {
        Node e_re = t.slice(ent, 0, p.dim);
        Node e_im = t.slice(ent, p.dim, p.dim);
        component_distance_t(t, e_re, q.cen_re, q.off_re, out_re, in_re);
        Node out_im, in_im;
        component_distance_t(t, e_im, q.cen_im, q.off_im, out_im, in_im);
        return t.add(t.add(out_re, out_im), t.scale(t.add(in_re, in_im), p.alpha));
    }
    component_distance_t(t, ent, q.cen_re, q.off_re, out_re, in_re);
    return t.add(out_re, t.scale(in_re, p.alpha));
}

Node query_distance_t(Tape& t, const ModelParams& p, const EmbeddedQueryT& emb, EntId e) {
    if (emb.unanswerable) throw ModelError("query_distance_t on unanswerable embedding");
    Node best = distance_t(t, p, e, emb.branches[0]);
    for (size_t i = 1; i < emb.branches.size(); ++i) {
        best = t.vmin(best, distance_t(t, p, e, emb.branches[i]));
    }
    return best;
}

}  // namespace kbregex

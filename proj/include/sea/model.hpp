#pragma once

#include "sea/graphs.hpp"
#include "sea/params.hpp"

#include <vector>

namespace sea {

// LightGCN-style alternating aggregation. Returns the sum of layers 1..K
// (layer 0 optionally included).
inline std::pair<Mat, Mat> propagate_bipartite(const SparseGraph& user_to_item, const SparseGraph& item_to_user,
                                               const Mat& user_emb, const Mat& item_emb, Index k_layers,
                                               bool include_layer0 = false) {
    if (k_layers < 1) throw std::invalid_argument("k_layers must be >= 1");
    if (user_emb.rows() != user_to_item.n_rows || item_emb.rows() != user_to_item.n_cols)
        throw std::invalid_argument("bipartite propagation shape mismatch");
    Mat u = user_emb, i = item_emb;
    Mat sum_u = include_layer0 ? user_emb : Mat::Zero(user_emb.rows(), user_emb.cols());
    Mat sum_i = include_layer0 ? item_emb : Mat::Zero(item_emb.rows(), item_emb.cols());
    for (Index k = 0; k < k_layers; ++k) {
        Mat u_next = user_to_item.multiply(i);
        Mat i_next = item_to_user.multiply(u);
        sum_u += u_next;
        sum_i += i_next;
        u = std::move(u_next);
        i = std::move(i_next);
    }
    return {sum_u, sum_i};
}

// E_i = [unique_t | generic_t | unique_v | generic_v] + H, elementwise over
// the full 2d width.
inline Mat fuse_item(const ModalSplit& split_t, const ModalSplit& split_v, const Mat& h) {
    const Index n = split_t.generic.rows();
    const Index half = split_t.generic.cols();
    if (split_v.generic.rows() != n || split_v.generic.cols() != half)
        throw std::invalid_argument("modal splits disagree in shape");
    if (h.rows() != n || h.cols() != 4 * half)
        throw std::invalid_argument("item-graph output width must be 2d");
    Mat e(n, 4 * half);
    e.leftCols(half) = split_t.unique;
    e.middleCols(half, half) = split_t.generic;
    e.middleCols(2 * half, half) = split_v.unique;
    e.rightCols(half) = split_v.generic;
    e += h;
    return e;
}

// E_u = [gate_t * E_u^t | gate_v * E_u^v]
inline Mat fuse_user(const Mat& e_u_t, const Mat& e_u_v, double gate_t, double gate_v) {
    if (e_u_t.rows() != e_u_v.rows() || e_u_t.cols() != e_u_v.cols())
        throw std::invalid_argument("user modal embeddings disagree in shape");
    Mat e(e_u_t.rows(), 2 * e_u_t.cols());
    e.leftCols(e_u_t.cols()) = gate_t * e_u_t;
    e.rightCols(e_u_v.cols()) = gate_v * e_u_v;
    return e;
}

inline double score(const Mat& e_u, const Mat& e_i, Index user, Index item) {
    if (user < 0 || user >= e_u.rows()) throw std::out_of_range("user index out of range");
    if (item < 0 || item >= e_i.rows()) throw std::out_of_range("item index out of range");
    return e_u.row(user).dot(e_i.row(item));
}

struct ModelInputs {
    const SparseGraph* user_to_item = nullptr;
    const SparseGraph* item_to_user = nullptr;
    const SparseGraph* s_visual = nullptr;
    const SparseGraph* s_textual = nullptr;
    const Mat* feat_visual = nullptr;
    const Mat* feat_textual = nullptr;
};

struct ForwardOptions {
    Index gcn_layers = 2;
    Index ii_layers = 1;
    bool include_layer0 = false;
};

// Everything the backward pass needs is cached here.
struct ForwardPass {
    Mat item_base_v, item_base_t;  // projected features, n_items x d
    Mat e_u_v, e_u_t;              // propagated user embeddings, n_users x d
    Mat e_i_v, e_i_t;              // propagated item embeddings, n_items x d
    std::vector<Mat> h_layers;     // item-graph states H^(0..L), n_items x 2d
    double w_s = 0.5;
    double gate_t = 0.5, gate_v = 0.5;
    Mat fused_users;  // n_users x 2d
    Mat fused_items;  // n_items x 2d

    const Mat& h_final() const { return h_layers.back(); }
};

inline ForwardPass forward_model(const ParameterSet& params, const ModelInputs& in, const ForwardOptions& opt) {
    ForwardPass f;
    f.item_base_v = *in.feat_visual * params.proj_visual;
    f.item_base_t = *in.feat_textual * params.proj_textual;

    std::tie(f.e_u_v, f.e_i_v) = propagate_bipartite(*in.user_to_item, *in.item_to_user, params.user_emb_visual,
                                                     f.item_base_v, opt.gcn_layers, opt.include_layer0);
    std::tie(f.e_u_t, f.e_i_t) = propagate_bipartite(*in.user_to_item, *in.item_to_user, params.user_emb_textual,
                                                     f.item_base_t, opt.gcn_layers, opt.include_layer0);

    f.w_s = params.w_s();
    Mat h0(f.e_i_v.rows(), f.e_i_v.cols() + f.e_i_t.cols());
    h0.leftCols(f.e_i_v.cols()) = f.e_i_v;
    h0.rightCols(f.e_i_t.cols()) = f.e_i_t;
    f.h_layers.push_back(std::move(h0));
    for (Index l = 0; l < opt.ii_layers; ++l) {
        const Mat& prev = f.h_layers.back();
        f.h_layers.push_back(f.w_s * in.s_visual->multiply(prev) + (1.0 - f.w_s) * in.s_textual->multiply(prev));
    }

    f.fused_items = fuse_item(split_modal(f.e_i_t), split_modal(f.e_i_v), f.h_final());
    f.gate_t = params.gate_t();
    f.gate_v = params.gate_v();
    f.fused_users = fuse_user(f.e_u_t, f.e_u_v, f.gate_t, f.gate_v);
    return f;
}

}  // namespace sea

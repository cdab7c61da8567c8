#pragma once

#include "sea/adam.hpp"
#include "sea/common.hpp"

#include <vector>

namespace sea {

inline Mat xavier_uniform(Index fan_in, Index fan_out, Rng& rng) {
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Mat m(fan_in, fan_out);
    for (Index r = 0; r < fan_in; ++r)
        for (Index c = 0; c < fan_out; ++c) m(r, c) = rng.uniform(-bound, bound);
    return m;
}

// Variational conditional q(g | x): a 2-layer tanh net with separate mean
// and log-variance heads, diagonal Gaussian output. Log-variances are
// clamped to [-10, 10]. Owns the Adam state used by its likelihood updates
// so the alternating scheme stays decoupled from the main optimizer.
struct VariationalEstimator {
    Index in_dim = 0;
    Index hidden = 0;
    Mat w1, b1;       // in_dim x hidden, 1 x hidden
    Mat w_mu, b_mu;   // hidden x in_dim, 1 x in_dim
    Mat w_lv, b_lv;   // hidden x in_dim, 1 x in_dim
    AdamState adam;

    static constexpr double kLogVarMin = -10.0;
    static constexpr double kLogVarMax = 10.0;

    VariationalEstimator() = default;

    VariationalEstimator(Index in, Index h, Rng& rng) : in_dim(in), hidden(h) {
        w1 = xavier_uniform(in, h, rng);
        b1 = Mat::Zero(1, h);
        w_mu = xavier_uniform(h, in, rng);
        b_mu = Mat::Zero(1, in);
        w_lv = xavier_uniform(h, in, rng);
        b_lv = Mat::Zero(1, in);
        adam.init(param_ptrs_const());
    }

    std::vector<Mat*> param_ptrs() { return {&w1, &b1, &w_mu, &b_mu, &w_lv, &b_lv}; }
    std::vector<const Mat*> param_ptrs_const() const { return {&w1, &b1, &w_mu, &b_mu, &w_lv, &b_lv}; }

    struct Forward {
        Mat hidden_act;  // N x h, tanh
        Mat mu;          // N x in_dim
        Mat logvar_raw;  // N x in_dim, pre-clamp
        Mat logvar;      // N x in_dim, clamped
    };

    Forward forward(const Mat& x) const {
        Forward f;
        f.hidden_act = ((x * w1).rowwise() + b1.row(0)).array().tanh();
        f.mu = (f.hidden_act * w_mu).rowwise() + b_mu.row(0);
        f.logvar_raw = (f.hidden_act * w_lv).rowwise() + b_lv.row(0);
        f.logvar = f.logvar_raw.cwiseMax(kLogVarMin).cwiseMin(kLogVarMax);
        return f;
    }

    // Backward through the net for given upstream d/dmu and d/dlogvar at
    // input x. Accumulates parameter gradients (if grads non-null, same
    // order as param_ptrs) and returns d/dx.
    Mat backward(const Mat& x, const Forward& f, const Mat& dmu, const Mat& dlogvar,
                 std::vector<Mat>* grads) const {
        const Mat gate = ((f.logvar_raw.array() > kLogVarMin) && (f.logvar_raw.array() < kLogVarMax))
                             .cast<double>()
                             .matrix();
        const Mat dlv_raw = dlogvar.cwiseProduct(gate);
        const Mat dhidden =
            (dmu * w_mu.transpose() + dlv_raw * w_lv.transpose()).cwiseProduct(
                (1.0 - f.hidden_act.array().square()).matrix());
        if (grads) {
            auto& g = *grads;
            g[0] += x.transpose() * dhidden;
            g[1].row(0) += dhidden.colwise().sum();
            g[2] += f.hidden_act.transpose() * dmu;
            g[3].row(0) += dmu.colwise().sum();
            g[4] += f.hidden_act.transpose() * dlv_raw;
            g[5].row(0) += dlv_raw.colwise().sum();
        }
        return dhidden * w1.transpose();
    }

    std::vector<Mat> zero_grads() const {
        std::vector<Mat> g;
        for (const Mat* p : param_ptrs_const()) g.push_back(Mat::Zero(p->rows(), p->cols()));
        return g;
    }
};

// Modal item embedding split into aligned (generic) and modality-exclusive
// (unique) halves. Views are copies; concatenating them reconstructs the
// input exactly.
struct ModalSplit {
    Mat generic;  // first d/2 columns
    Mat unique;   // last d/2 columns
};

inline ModalSplit split_modal(const Mat& e) {
    if (e.cols() % 2 != 0) throw std::invalid_argument("modal embedding width must be even");
    const Index half = e.cols() / 2;
    return {e.leftCols(half), e.rightCols(half)};
}

struct ParameterSet {
    Mat user_emb_visual;   // n_users x d
    Mat user_emb_textual;  // n_users x d
    Mat proj_visual;       // d_v x d
    Mat proj_textual;      // d_t x d
    Mat w_s_logit;         // 1x1, sigmoid-mapped item-graph gate
    Mat gate_t_logit;      // 1x1, user fusion gate for the textual half
    Mat gate_v_logit;      // 1x1
    VariationalEstimator club_visual;
    VariationalEstimator club_textual;

    Index d() const { return user_emb_visual.cols(); }

    double w_s() const { return sigmoid(w_s_logit(0, 0)); }
    double gate_t() const { return sigmoid(gate_t_logit(0, 0)); }
    double gate_v() const { return sigmoid(gate_v_logit(0, 0)); }

    // main-model tensors, excluding the variational estimators
    std::vector<Mat*> main_ptrs() {
        return {&user_emb_visual, &user_emb_textual, &proj_visual, &proj_textual,
                &w_s_logit, &gate_t_logit, &gate_v_logit};
    }
    std::vector<const Mat*> main_ptrs_const() const {
        return {&user_emb_visual, &user_emb_textual, &proj_visual, &proj_textual,
                &w_s_logit, &gate_t_logit, &gate_v_logit};
    }
    static std::vector<std::string> main_names() {
        return {"user_emb_visual", "user_emb_textual", "proj_visual", "proj_textual",
                "w_s_logit", "gate_t_logit", "gate_v_logit"};
    }

    bool all_finite() const {
        for (const Mat* p : main_ptrs_const())
            if (!p->allFinite()) return false;
        for (const auto* est : {&club_visual, &club_textual})
            for (const Mat* p : est->param_ptrs_const())
                if (!p->allFinite()) return false;
        return true;
    }
};

inline ParameterSet init_parameters(Index d, Index d_v, Index d_t, Index n_users, Index club_hidden,
                                    bool shared_user_init, Rng& rng) {
    if (d % 2 != 0) throw std::invalid_argument("embedding dimension d must be even");
    ParameterSet p;
    p.user_emb_visual = xavier_uniform(n_users, d, rng);
    p.user_emb_textual = shared_user_init ? p.user_emb_visual : xavier_uniform(n_users, d, rng);
    p.proj_visual = xavier_uniform(d_v, d, rng);
    p.proj_textual = xavier_uniform(d_t, d, rng);
    p.w_s_logit = Mat::Zero(1, 1);
    p.gate_t_logit = Mat::Zero(1, 1);
    p.gate_v_logit = Mat::Zero(1, 1);
    const Index h = club_hidden > 0 ? club_hidden : d;
    p.club_visual = VariationalEstimator(d / 2, h, rng);
    p.club_textual = VariationalEstimator(d / 2, h, rng);
    return p;
}

}  // namespace sea

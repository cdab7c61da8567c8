#pragma once

#include "sea/data.hpp"
#include "sea/params.hpp"

#include <vector>

namespace sea {

inline double logsumexp(const Vec& s) {
    const double m = s.maxCoeff();
    return m + std::log((s.array() - m).exp().sum());
}

constexpr double kLogTwoPi = 1.8378770664093453;

// ---------------------------------------------------------------------------
// BPR

inline double bpr_loss(const Mat& e_u, const Mat& e_i, const std::vector<Triplet>& triplets) {
    if (triplets.empty()) throw std::invalid_argument("empty triplet batch");
    double total = 0.0;
    for (const auto& t : triplets) {
        const double margin = e_u.row(t.user).dot(e_i.row(t.pos) - e_i.row(t.neg));
        total += softplus(-margin);
    }
    return total / static_cast<double>(triplets.size());
}

// Adds weight * d(bpr)/d(e_u), d(bpr)/d(e_i) into the accumulators.
inline double bpr_loss_grad(const Mat& e_u, const Mat& e_i, const std::vector<Triplet>& triplets,
                            double weight, Mat& d_eu, Mat& d_ei) {
    if (triplets.empty()) throw std::invalid_argument("empty triplet batch");
    const double inv_b = 1.0 / static_cast<double>(triplets.size());
    double total = 0.0;
    for (const auto& t : triplets) {
        const auto diff = e_i.row(t.pos) - e_i.row(t.neg);
        const double margin = e_u.row(t.user).dot(diff);
        total += softplus(-margin);
        const double coef = -sigmoid(-margin) * inv_b * weight;
        d_eu.row(t.user) += coef * diff;
        d_ei.row(t.pos) += coef * e_u.row(t.user);
        d_ei.row(t.neg) -= coef * e_u.row(t.user);
    }
    return total * inv_b;
}

// ---------------------------------------------------------------------------
// Alignment: SoloSim and InfoNCE

// One softmax over the batch's positive-pair logits; no cross-pair
// negatives.
inline double solosim_from_logits(const Vec& s) {
    return logsumexp(s) - s.mean();
}

inline Vec pair_logits(const Mat& g_v, const Mat& g_t, double tau) {
    if (tau <= 0.0) throw std::invalid_argument("temperature must be positive");
    if (g_v.rows() != g_t.rows() || g_v.cols() != g_t.cols())
        throw std::invalid_argument("aligned batches must have equal shape");
    if (g_v.rows() < 2) throw std::invalid_argument("alignment batch must have >= 2 rows");
    return g_v.cwiseProduct(g_t).rowwise().sum() / tau;
}

inline double solosim_loss(const Mat& g_v, const Mat& g_t, double tau) {
    return solosim_from_logits(pair_logits(g_v, g_t, tau));
}

inline double solosim_loss_grad(const Mat& g_v, const Mat& g_t, double tau, double weight, Mat& d_gv,
                                Mat& d_gt) {
    const Vec s = pair_logits(g_v, g_t, tau);
    const Index b = s.size();
    const double lse = logsumexp(s);
    const Vec p = (s.array() - lse).exp();
    for (Index i = 0; i < b; ++i) {
        const double ds = (p(i) - 1.0 / static_cast<double>(b)) * weight / tau;
        d_gv.row(i) += ds * g_t.row(i);
        d_gt.row(i) += ds * g_v.row(i);
    }
    return lse - s.mean();
}

// Symmetric in-batch InfoNCE over the pairwise logit matrix, diagonal
// positive, averaged over both directions.
inline double infonce_from_logits(const Mat& s) {
    const Index b = s.rows();
    double loss = 0.0;
    for (Index i = 0; i < b; ++i) {
        loss += logsumexp(s.row(i).transpose()) - s(i, i);
        loss += logsumexp(s.col(i)) - s(i, i);
    }
    return loss / (2.0 * static_cast<double>(b));
}

inline Mat cross_logits(const Mat& g_v, const Mat& g_t, double tau) {
    if (tau <= 0.0) throw std::invalid_argument("temperature must be positive");
    if (g_v.rows() != g_t.rows()) throw std::invalid_argument("aligned batches must have equal rows");
    if (g_v.rows() < 2) throw std::invalid_argument("alignment batch must have >= 2 rows");
    return g_v * g_t.transpose() / tau;
}

inline double infonce_loss(const Mat& g_v, const Mat& g_t, double tau) {
    return infonce_from_logits(cross_logits(g_v, g_t, tau));
}

inline double infonce_loss_grad(const Mat& g_v, const Mat& g_t, double tau, double weight, Mat& d_gv,
                                Mat& d_gt) {
    const Mat s = cross_logits(g_v, g_t, tau);
    const Index b = s.rows();
    const double inv = 1.0 / (2.0 * static_cast<double>(b));
    Mat ds = Mat::Zero(b, b);
    double loss = 0.0;
    for (Index i = 0; i < b; ++i) {
        const Vec row = s.row(i).transpose();
        const double lse_r = logsumexp(row);
        loss += lse_r - s(i, i);
        ds.row(i) += ((row.array() - lse_r).exp().matrix()).transpose();
        ds(i, i) -= 1.0;

        const Vec col = s.col(i);
        const double lse_c = logsumexp(col);
        loss += lse_c - s(i, i);
        ds.col(i) += (col.array() - lse_c).exp().matrix();
        ds(i, i) -= 1.0;
    }
    ds *= inv * weight / tau;
    d_gv += ds * g_t;
    d_gt += ds.transpose() * g_v;
    return loss * inv;
}

// ---------------------------------------------------------------------------
// Distancing: CLUB estimate and negative l2

// (1/N) sum_i [ log q(G_i|Q_i) - (1/N) sum_j log q(G_j|Q_i) ] with the
// diagonal-Gaussian conditional. The pairwise term reduces to column
// moments of G, so evaluation is O(N d) after the N conditioning forwards.
inline double club_estimate(const VariationalEstimator& est, const Mat& g, const Mat& q) {
    if (g.rows() != q.rows()) throw std::invalid_argument("club batch row mismatch");
    const Index n = g.rows();
    if (n == 0) throw std::invalid_argument("empty club batch");
    const auto f = est.forward(q);
    const Mat inv_var = (-f.logvar).array().exp();
    const Vec col_sum = g.colwise().sum();
    const Vec col_sq = g.array().square().colwise().sum();

    double pos = 0.0, neg = 0.0;
    for (Index i = 0; i < n; ++i) {
        for (Index k = 0; k < g.cols(); ++k) {
            const double mu = f.mu(i, k), lv = f.logvar(i, k), iv = inv_var(i, k);
            const double di = g(i, k) - mu;
            pos += -0.5 * kLogTwoPi - 0.5 * lv - 0.5 * di * di * iv;
            const double ssq = col_sq(k) - 2.0 * mu * col_sum(k) + static_cast<double>(n) * mu * mu;
            neg += static_cast<double>(n) * (-0.5 * kLogTwoPi - 0.5 * lv) - 0.5 * ssq * iv;
        }
    }
    const double nn = static_cast<double>(n);
    return pos / nn - neg / (nn * nn);
}

// Same estimator value for an arbitrary conditional log-density
// cond(i, j) = log q(G_j | Q_i); used to plug in known true conditionals.
template <typename CondLogDensity>
double club_estimate_with(Index n, CondLogDensity&& cond) {
    double pos = 0.0, neg = 0.0;
    for (Index i = 0; i < n; ++i) {
        pos += cond(i, i);
        for (Index j = 0; j < n; ++j) neg += cond(i, j);
    }
    const double nn = static_cast<double>(n);
    return pos / nn - neg / (nn * nn);
}

// Gradient of the CLUB estimate w.r.t. the representations (estimator
// parameters held constant), scaled by weight.
inline double club_estimate_grad(const VariationalEstimator& est, const Mat& g, const Mat& q, double weight,
                                 Mat& d_g, Mat& d_q) {
    const Index n = g.rows(), d = g.cols();
    const double nn = static_cast<double>(n);
    const auto f = est.forward(q);
    const Mat inv_var = (-f.logvar).array().exp();
    const Vec col_sum = g.colwise().sum();
    const Vec col_sq = g.array().square().colwise().sum();

    Mat dmu = Mat::Zero(n, d), dlv = Mat::Zero(n, d);
    double pos = 0.0, neg = 0.0;
    for (Index i = 0; i < n; ++i) {
        for (Index k = 0; k < d; ++k) {
            const double mu = f.mu(i, k), lv = f.logvar(i, k), iv = inv_var(i, k);
            const double di = g(i, k) - mu;
            const double ssq = col_sq(k) - 2.0 * mu * col_sum(k) + nn * mu * mu;
            pos += -0.5 * kLogTwoPi - 0.5 * lv - 0.5 * di * di * iv;
            neg += nn * (-0.5 * kLogTwoPi - 0.5 * lv) - 0.5 * ssq * iv;

            // d/dG_ik of the positive term
            d_g(i, k) += weight * (-di * iv / nn);
            // d/dmu: positive term gives di*iv/N; the subtracted pairwise
            // term gives -(1/N^2) * iv * (col_sum - N mu)
            dmu(i, k) = di * iv / nn - iv * (col_sum(k) - nn * mu) / (nn * nn);
            dlv(i, k) = (-0.5 + 0.5 * di * di * iv) / nn - (-0.5 * nn + 0.5 * ssq * iv) / (nn * nn);
        }
    }
    // pairwise term d/dG_jk = (1/N^2) sum_i (G_jk - mu_ik) * iv_ik
    const Vec iv_col = inv_var.colwise().sum();
    const Vec mu_iv_col = f.mu.cwiseProduct(inv_var).colwise().sum();
    for (Index j = 0; j < n; ++j)
        for (Index k = 0; k < d; ++k)
            d_g(j, k) += weight * (g(j, k) * iv_col(k) - mu_iv_col(k)) / (nn * nn);

    d_q += est.backward(q, f, (weight * dmu).eval(), (weight * dlv).eval(), nullptr);
    return pos / nn - neg / (nn * nn);
}

inline double club_loglikelihood(const VariationalEstimator& est, const Mat& g, const Mat& q) {
    const auto f = est.forward(q);
    const double n = static_cast<double>(g.rows());
    double ll = 0.0;
    for (Index i = 0; i < g.rows(); ++i)
        for (Index k = 0; k < g.cols(); ++k) {
            const double di = g(i, k) - f.mu(i, k);
            ll += -0.5 * kLogTwoPi - 0.5 * f.logvar(i, k) - 0.5 * di * di * std::exp(-f.logvar(i, k));
        }
    return ll / n;
}

// One Adam ascent step on the mean conditional log-likelihood, treating
// representations as constants. Returns the pre-step likelihood.
inline double club_likelihood_step(VariationalEstimator& est, const Mat& g, const Mat& q, double lr) {
    const Index n = g.rows();
    const double nn = static_cast<double>(n);
    const auto f = est.forward(q);
    Mat dmu(n, g.cols()), dlv(n, g.cols());
    double ll = 0.0;
    for (Index i = 0; i < n; ++i)
        for (Index k = 0; k < g.cols(); ++k) {
            const double iv = std::exp(-f.logvar(i, k));
            const double di = g(i, k) - f.mu(i, k);
            ll += -0.5 * kLogTwoPi - 0.5 * f.logvar(i, k) - 0.5 * di * di * iv;
            dmu(i, k) = di * iv / nn;
            dlv(i, k) = (-0.5 + 0.5 * di * di * iv) / nn;
        }
    auto grads = est.zero_grads();
    est.backward(q, f, dmu, dlv, &grads);
    for (auto& gm : grads) gm = -gm;  // ascent via descent on the negation
    std::vector<const Mat*> gptrs;
    for (const auto& gm : grads) gptrs.push_back(&gm);
    est.adam.update(est.param_ptrs(), gptrs, lr);
    return ll / nn;
}

// Gradient of the mean log-likelihood w.r.t. estimator parameters only
// (for verification harnesses).
inline double club_loglikelihood_grad_params(const VariationalEstimator& est, const Mat& g, const Mat& q,
                                             std::vector<Mat>& grads) {
    const Index n = g.rows();
    const double nn = static_cast<double>(n);
    const auto f = est.forward(q);
    Mat dmu(n, g.cols()), dlv(n, g.cols());
    double ll = 0.0;
    for (Index i = 0; i < n; ++i)
        for (Index k = 0; k < g.cols(); ++k) {
            const double iv = std::exp(-f.logvar(i, k));
            const double di = g(i, k) - f.mu(i, k);
            ll += -0.5 * kLogTwoPi - 0.5 * f.logvar(i, k) - 0.5 * di * di * iv;
            dmu(i, k) = di * iv / nn;
            dlv(i, k) = (-0.5 + 0.5 * di * di * iv) / nn;
        }
    est.backward(q, f, dmu, dlv, &grads);
    return ll / nn;
}

// ---------------------------------------------------------------------------
// Negative l2 distance (cheap distancing alternative)

inline double neg_l2_distance(const Mat& g, const Mat& q) {
    if (g.rows() != q.rows() || g.cols() != q.cols())
        throw std::invalid_argument("neg_l2 shape mismatch");
    return -(g - q).rowwise().squaredNorm().mean();
}

inline double neg_l2_distance_grad(const Mat& g, const Mat& q, double weight, Mat& d_g, Mat& d_q) {
    const double inv_b = 1.0 / static_cast<double>(g.rows());
    const Mat diff = g - q;
    d_g += weight * (-2.0 * inv_b) * diff;
    d_q += weight * (2.0 * inv_b) * diff;
    return -diff.rowwise().squaredNorm().mean();
}

// ---------------------------------------------------------------------------

struct LossReport {
    std::int64_t step = 0;
    double bpr = 0.0;
    double align = 0.0;
    double dis_visual = 0.0;
    double dis_textual = 0.0;
    double total = 0.0;

    std::string to_jsonl() const {
        std::ostringstream os;
        os.precision(17);
        os << "{\"step\":" << step << ",\"bpr\":" << bpr << ",\"align\":" << align << ",\"dis_v\":" << dis_visual
           << ",\"dis_t\":" << dis_textual << ",\"total\":" << total << "}";
        return os.str();
    }
};

}  // namespace sea

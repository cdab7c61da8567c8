#pragma once

#include "sea/config.hpp"
#include "sea/evaluator.hpp"
#include "sea/losses.hpp"
#include "sea/model.hpp"

#include <chrono>
#include <map>
#include <optional>

namespace sea {

// Frozen per-run structures: split dataset, raw features, normalized
// bipartite graph and the per-modality item graphs (built once from raw
// features and never rebuilt during training).
struct EngineData {
    InteractionDataset ds;
    Mat feat_visual;
    Mat feat_textual;
    BipartiteGraphs bipartite;
    SparseGraph s_visual, s_textual;
    SparseGraph s_visual_t, s_textual_t;  // transposes, for adjoints
    Index n_isolated_visual = 0;          // zero-norm feature rows per modality
    Index n_isolated_textual = 0;

    ModelInputs inputs() const {
        ModelInputs in;
        in.user_to_item = &bipartite.user_to_item;
        in.item_to_user = &bipartite.item_to_user;
        in.s_visual = &s_visual;
        in.s_textual = &s_textual;
        in.feat_visual = &feat_visual;
        in.feat_textual = &feat_textual;
        return in;
    }
};

inline EngineData prepare_engine_data(InteractionDataset ds, const FeatureMatrix& visual,
                                      const FeatureMatrix& textual, Index knn_k) {
    visual.validate(ds.n_items);
    textual.validate(ds.n_items);
    EngineData data;
    data.ds = std::move(ds);
    data.feat_visual = visual.data;
    data.feat_textual = textual.data;
    data.bipartite = build_normalized_bipartite(data.ds);
    data.s_visual = build_item_graph(visual, knn_k, &data.n_isolated_visual);
    data.s_textual = build_item_graph(textual, knn_k, &data.n_isolated_textual);
    data.s_visual_t = data.s_visual.transpose();
    data.s_textual_t = data.s_textual.transpose();
    return data;
}

inline ForwardOptions forward_options(const TrainConfig& cfg) {
    return {cfg.gcn_layers, cfg.ii_layers, cfg.include_layer0};
}

inline std::vector<Index> dedup_positive_items(const std::vector<Triplet>& batch) {
    std::vector<Index> items;
    items.reserve(batch.size());
    for (const auto& t : batch) items.push_back(t.pos);
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
    return items;
}

namespace detail {

inline Mat gather_rows(const Mat& m, const std::vector<Index>& rows) {
    Mat out(static_cast<Index>(rows.size()), m.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Index>(r)) = m.row(rows[r]);
    return out;
}

inline void scatter_add_rows(Mat& target, const std::vector<Index>& rows, const Mat& values) {
    for (std::size_t r = 0; r < rows.size(); ++r) target.row(rows[r]) += values.row(static_cast<Index>(r));
}

}  // namespace detail

// Gradients for the main-model tensors, ordered as ParameterSet::main_ptrs.
using MainGrads = std::vector<Mat>;

inline MainGrads zero_main_grads(const ParameterSet& p) {
    MainGrads g;
    for (const Mat* m : p.main_ptrs_const()) g.push_back(Mat::Zero(m->rows(), m->cols()));
    return g;
}

// Total objective: bpr + alpha * align + beta * (dis_v + dis_t). The
// alignment and distancing terms run over the deduplicated positive items
// of the batch. When `grads` is non-null the full reverse pass w.r.t. the
// main tensors is accumulated (variational estimators held constant).
inline LossReport total_loss(const ParameterSet& params, const EngineData& data, const TrainConfig& cfg,
                             const ForwardPass& f, const std::vector<Triplet>& batch,
                             const std::vector<Index>& batch_items, MainGrads* grads) {
    const Index d = params.d();
    const Index half = d / 2;
    LossReport report;

    Mat d_eu = Mat::Zero(f.fused_users.rows(), f.fused_users.cols());
    Mat d_ei = Mat::Zero(f.fused_items.rows(), f.fused_items.cols());

    if (grads) {
        report.bpr = bpr_loss_grad(f.fused_users, f.fused_items, batch, 1.0, d_eu, d_ei);
    } else {
        report.bpr = bpr_loss(f.fused_users, f.fused_items, batch);
    }

    // batch-item modal splits; columns [generic | unique]
    const Mat ei_v = detail::gather_rows(f.e_i_v, batch_items);
    const Mat ei_t = detail::gather_rows(f.e_i_t, batch_items);
    const Mat g_v = ei_v.leftCols(half), q_v = ei_v.rightCols(half);
    const Mat g_t = ei_t.leftCols(half), q_t = ei_t.rightCols(half);

    Mat d_gv = Mat::Zero(g_v.rows(), half), d_qv = Mat::Zero(g_v.rows(), half);
    Mat d_gt = Mat::Zero(g_t.rows(), half), d_qt = Mat::Zero(g_t.rows(), half);

    const bool want_align_grad = grads && cfg.alpha != 0.0;
    if (cfg.align_loss == AlignLoss::solosim) {
        report.align = want_align_grad ? solosim_loss_grad(g_v, g_t, cfg.tau, cfg.alpha, d_gv, d_gt)
                                       : solosim_loss(g_v, g_t, cfg.tau);
    } else {
        report.align = want_align_grad ? infonce_loss_grad(g_v, g_t, cfg.tau, cfg.alpha, d_gv, d_gt)
                                       : infonce_loss(g_v, g_t, cfg.tau);
    }

    const bool want_dis_grad = grads && cfg.beta != 0.0;
    if (cfg.dis_loss == DisLoss::club) {
        report.dis_visual = want_dis_grad ? club_estimate_grad(params.club_visual, g_v, q_v, cfg.beta, d_gv, d_qv)
                                          : club_estimate(params.club_visual, g_v, q_v);
        report.dis_textual = want_dis_grad
                                 ? club_estimate_grad(params.club_textual, g_t, q_t, cfg.beta, d_gt, d_qt)
                                 : club_estimate(params.club_textual, g_t, q_t);
    } else {
        report.dis_visual = want_dis_grad ? neg_l2_distance_grad(g_v, q_v, cfg.beta, d_gv, d_qv)
                                          : neg_l2_distance(g_v, q_v);
        report.dis_textual = want_dis_grad ? neg_l2_distance_grad(g_t, q_t, cfg.beta, d_gt, d_qt)
                                           : neg_l2_distance(g_t, q_t);
    }

    report.total = report.bpr + cfg.alpha * report.align + cfg.beta * (report.dis_visual + report.dis_textual);
    if (!grads) return report;

    // ---- reverse pass ----
    // adjoints of the propagated modal embeddings
    Mat d_eiv = Mat::Zero(f.e_i_v.rows(), d);
    Mat d_eit = Mat::Zero(f.e_i_t.rows(), d);

    // alignment/distancing contributions enter through the batch rows
    Mat d_eiv_batch(static_cast<Index>(batch_items.size()), d);
    d_eiv_batch << d_gv, d_qv;
    detail::scatter_add_rows(d_eiv, batch_items, d_eiv_batch);
    Mat d_eit_batch(static_cast<Index>(batch_items.size()), d);
    d_eit_batch << d_gt, d_qt;
    detail::scatter_add_rows(d_eit, batch_items, d_eit_batch);

    // fused item embedding: [unique_t | generic_t | unique_v | generic_v] + H
    d_eit.rightCols(half) += d_ei.leftCols(half);           // unique_t
    d_eit.leftCols(half) += d_ei.middleCols(half, half);    // generic_t
    d_eiv.rightCols(half) += d_ei.middleCols(2 * half, half);  // unique_v
    d_eiv.leftCols(half) += d_ei.rightCols(half);           // generic_v

    // item-graph chain: H^(l) = w Sv H^(l-1) + (1-w) St H^(l-1)
    Mat d_h = d_ei;
    double d_ws = 0.0;
    for (Index l = cfg.ii_layers; l >= 1; --l) {
        const Mat& prev = f.h_layers[static_cast<std::size_t>(l - 1)];
        const Mat sv_prev = data.s_visual.multiply(prev);
        const Mat st_prev = data.s_textual.multiply(prev);
        d_ws += d_h.cwiseProduct(sv_prev - st_prev).sum();
        d_h = f.w_s * data.s_visual_t.multiply(d_h) + (1.0 - f.w_s) * data.s_textual_t.multiply(d_h);
    }
    d_eiv += d_h.leftCols(d);
    d_eit += d_h.rightCols(d);

    // fused user embedding: [gate_t * E_u^t | gate_v * E_u^v]
    const Mat d_eut = f.gate_t * d_eu.leftCols(d);
    const Mat d_euv = f.gate_v * d_eu.rightCols(d);
    const double d_gate_t = d_eu.leftCols(d).cwiseProduct(f.e_u_t).sum();
    const double d_gate_v = d_eu.rightCols(d).cwiseProduct(f.e_u_v).sum();

    // bipartite propagation adjoint: every layer k in 1..K receives the
    // output adjoint; walk back through u_k = Gui i_{k-1}, i_k = Giu u_{k-1}
    auto backprop_bipartite = [&](const Mat& d_eu_m, const Mat& d_ei_m, Mat& d_user0, Mat& d_item0) {
        Mat du = d_eu_m, di = d_ei_m;
        d_user0 = cfg.include_layer0 ? d_eu_m : Mat::Zero(d_eu_m.rows(), d_eu_m.cols());
        d_item0 = cfg.include_layer0 ? d_ei_m : Mat::Zero(d_ei_m.rows(), d_ei_m.cols());
        for (Index k = cfg.gcn_layers; k >= 1; --k) {
            Mat di_prev = data.bipartite.item_to_user.multiply(du);
            Mat du_prev = data.bipartite.user_to_item.multiply(di);
            if (k - 1 >= 1) {
                du = d_eu_m + du_prev;
                di = d_ei_m + di_prev;
            } else {
                d_user0 += du_prev;
                d_item0 += di_prev;
            }
        }
    };

    Mat d_user_v, d_item_v, d_user_t, d_item_t;
    backprop_bipartite(d_euv, d_eiv, d_user_v, d_item_v);
    backprop_bipartite(d_eut, d_eit, d_user_t, d_item_t);

    auto& g = *grads;
    g[0] += d_user_v;
    g[1] += d_user_t;
    g[2] += data.feat_visual.transpose() * d_item_v;
    g[3] += data.feat_textual.transpose() * d_item_t;
    g[4](0, 0) += d_ws * f.w_s * (1.0 - f.w_s);
    g[5](0, 0) += d_gate_t * f.gate_t * (1.0 - f.gate_t);
    g[6](0, 0) += d_gate_v * f.gate_v * (1.0 - f.gate_v);
    return report;
}

inline LossReport total_loss(const ParameterSet& params, const EngineData& data, const TrainConfig& cfg,
                             const std::vector<Triplet>& batch) {
    const ForwardPass f = forward_model(params, data.inputs(), forward_options(cfg));
    return total_loss(params, data, cfg, f, batch, dedup_positive_items(batch), nullptr);
}

// One composite step: (1) likelihood updates for the variational
// estimators on constant representations, (2) one Adam step on the total
// loss for every main tensor.
inline LossReport train_step(ParameterSet& params, AdamState& main_adam, const EngineData& data,
                             const TrainConfig& cfg, const std::vector<Triplet>& batch, std::int64_t step_id) {
    const auto batch_items = dedup_positive_items(batch);
    const ForwardPass f = forward_model(params, data.inputs(), forward_options(cfg));

    if (cfg.dis_loss == DisLoss::club) {
        const Index half = params.d() / 2;
        const Mat ei_v = detail::gather_rows(f.e_i_v, batch_items);
        const Mat ei_t = detail::gather_rows(f.e_i_t, batch_items);
        for (Index s = 0; s < cfg.club_inner_steps; ++s) {
            club_likelihood_step(params.club_visual, ei_v.leftCols(half), ei_v.rightCols(half), cfg.club_lr);
            club_likelihood_step(params.club_textual, ei_t.leftCols(half), ei_t.rightCols(half), cfg.club_lr);
        }
    }

    MainGrads grads = zero_main_grads(params);
    LossReport report = total_loss(params, data, cfg, f, batch, batch_items, &grads);
    report.step = step_id;

    const auto check = [&](double v, const char* name) {
        if (!std::isfinite(v))
            throw std::runtime_error(std::string("non-finite ") + name + " loss at step " +
                                     std::to_string(step_id));
    };
    check(report.bpr, "bpr");
    check(report.align, "align");
    check(report.dis_visual, "dis_visual");
    check(report.dis_textual, "dis_textual");
    check(report.total, "total");

    std::vector<const Mat*> gptrs;
    for (const auto& m : grads) gptrs.push_back(&m);
    main_adam.update(params.main_ptrs(), gptrs, cfg.lr);
    if (!params.all_finite())
        throw std::runtime_error("non-finite parameter after optimizer step " + std::to_string(step_id));
    return report;
}

struct EpochRecord {
    Index epoch = 0;
    double loss = 0.0;
    double val_recall20 = 0.0;
    double val_ndcg20 = 0.0;
    double elapsed_s = 0.0;

    std::string to_jsonl() const {
        std::ostringstream os;
        os.precision(17);
        os << "{\"epoch\":" << epoch << ",\"loss\":" << loss << ",\"val_recall20\":" << val_recall20
           << ",\"val_ndcg20\":" << val_ndcg20 << ",\"elapsed_s\":" << elapsed_s << "}";
        return os.str();
    }
};

struct Checkpoint {
    TrainConfig config;
    ParameterSet params;
    AdamState main_adam;
    Index epoch = 0;
    double best_val_recall20 = 0.0;
    std::string rng_state;
    std::map<std::string, std::string> input_digests;
};

struct FitResult {
    Checkpoint best;
    Checkpoint last;
    std::vector<EpochRecord> log;
    std::vector<LossReport> step_reports;
};

// Training loop with per-epoch validation Recall@20 and early stopping:
// stops once the number of epochs since the best validation metric
// exceeds `patience`.
inline FitResult fit(const EngineData& data, const TrainConfig& cfg,
                     std::optional<Checkpoint> resume = std::nullopt) {
    cfg.validate();
    ParameterSet params;
    AdamState main_adam;
    Rng rng(cfg.seed);
    Index start_epoch = 0;
    double best_metric = -1.0;

    if (resume) {
        params = resume->params;
        main_adam = resume->main_adam;
        rng = Rng::deserialize(resume->rng_state);
        start_epoch = resume->epoch;
        best_metric = resume->best_val_recall20;
    } else {
        params = init_parameters(cfg.d, data.feat_visual.cols(), data.feat_textual.cols(), data.ds.n_users,
                                 cfg.club_hidden, cfg.shared_user_init, rng);
        main_adam.init(params.main_ptrs_const());
    }

    BprSampler sampler(data.ds);
    const Index steps_per_epoch =
        std::max<Index>(1, (static_cast<Index>(sampler.train_pairs.size()) + cfg.batch_size - 1) / cfg.batch_size);

    FitResult result;
    auto snapshot = [&](Index epoch) {
        Checkpoint c;
        c.config = cfg;
        c.params = params;
        c.main_adam = main_adam;
        c.epoch = epoch;
        c.best_val_recall20 = best_metric;
        c.rng_state = rng.serialize();
        return c;
    };

    Index epochs_since_best = 0;
    bool have_best = false;
    const auto t0 = std::chrono::steady_clock::now();
    std::int64_t step_id = static_cast<std::int64_t>(start_epoch) * steps_per_epoch;

    for (Index epoch = start_epoch; epoch < cfg.max_epochs; ++epoch) {
        double loss_sum = 0.0;
        for (Index s = 0; s < steps_per_epoch; ++s) {
            const auto batch = sampler.sample(cfg.batch_size, rng);
            const LossReport r = train_step(params, main_adam, data, cfg, batch, step_id++);
            loss_sum += r.total;
            result.step_reports.push_back(r);
        }

        const ForwardPass f = forward_model(params, data.inputs(), forward_options(cfg));
        const MetricsAtK val = evaluate_embeddings_at_k(f.fused_users, f.fused_items, data.ds, Split::val, 20);

        EpochRecord rec;
        rec.epoch = epoch + 1;
        rec.loss = loss_sum / static_cast<double>(steps_per_epoch);
        rec.val_recall20 = val.recall;
        rec.val_ndcg20 = val.ndcg;
        rec.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.log.push_back(rec);

        if (val.recall > best_metric) {
            best_metric = val.recall;
            epochs_since_best = 0;
            result.best = snapshot(epoch + 1);
            have_best = true;
        } else {
            ++epochs_since_best;
            if (epochs_since_best > cfg.patience) {
                result.last = snapshot(epoch + 1);
                if (!have_best) result.best = result.last;
                return result;
            }
        }
    }
    result.last = snapshot(cfg.max_epochs);
    if (!have_best) result.best = result.last;
    return result;
}

// ---------------------------------------------------------------------------
// Checkpoint serialization: magic SEAC, version byte, JSON metadata, then
// named f64 tensors. Round-trips bit-exactly.

namespace detail {

inline std::vector<std::pair<std::string, Mat*>> checkpoint_tensors(Checkpoint& c) {
    std::vector<std::pair<std::string, Mat*>> out;
    const auto names = ParameterSet::main_names();
    const auto mains = c.params.main_ptrs();
    for (std::size_t i = 0; i < mains.size(); ++i) out.emplace_back(names[i], mains[i]);
    auto add_estimator = [&out](const std::string& prefix, VariationalEstimator& est) {
        const char* enames[] = {"w1", "b1", "w_mu", "b_mu", "w_lv", "b_lv"};
        const auto ptrs = est.param_ptrs();
        for (std::size_t i = 0; i < ptrs.size(); ++i) out.emplace_back(prefix + enames[i], ptrs[i]);
        for (std::size_t i = 0; i < est.adam.m.size(); ++i) {
            out.emplace_back(prefix + "adam_m" + std::to_string(i), &est.adam.m[i]);
            out.emplace_back(prefix + "adam_v" + std::to_string(i), &est.adam.v[i]);
        }
    };
    add_estimator("club_visual.", c.params.club_visual);
    add_estimator("club_textual.", c.params.club_textual);
    for (std::size_t i = 0; i < c.main_adam.m.size(); ++i) {
        out.emplace_back("adam_m" + std::to_string(i), &c.main_adam.m[i]);
        out.emplace_back("adam_v" + std::to_string(i), &c.main_adam.v[i]);
    }
    return out;
}

inline void write_string(std::ostream& os, const std::string& s) {
    write_u32(os, static_cast<std::uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_string(std::istream& is) {
    const std::uint32_t len = read_u32(is);
    std::string s(len, '\0');
    is.read(s.data(), len);
    if (!is) throw std::runtime_error("truncated checkpoint string");
    return s;
}

}  // namespace detail

inline void save_checkpoint(Checkpoint& ckpt, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write checkpoint: " + path);
    os.write("SEAC", 4);
    os.put(static_cast<char>(1));  // version

    std::ostringstream meta;
    meta.precision(17);
    meta << "{\"epoch\":" << ckpt.epoch << ",\"best_val_recall20\":" << ckpt.best_val_recall20
         << ",\"main_adam_step\":" << ckpt.main_adam.step
         << ",\"club_v_adam_step\":" << ckpt.params.club_visual.adam.step
         << ",\"club_t_adam_step\":" << ckpt.params.club_textual.adam.step << "}";
    detail::write_string(os, meta.str());
    detail::write_string(os, ckpt.config.serialize());
    detail::write_string(os, ckpt.rng_state);
    detail::write_u32(os, static_cast<std::uint32_t>(ckpt.input_digests.size()));
    for (const auto& [k, v] : ckpt.input_digests) {
        detail::write_string(os, k);
        detail::write_string(os, v);
    }

    // shape header so load can pre-size every tensor
    detail::write_u32(os, static_cast<std::uint32_t>(ckpt.params.user_emb_visual.rows()));
    detail::write_u32(os, static_cast<std::uint32_t>(ckpt.params.proj_visual.rows()));
    detail::write_u32(os, static_cast<std::uint32_t>(ckpt.params.proj_textual.rows()));
    detail::write_u32(os, static_cast<std::uint32_t>(ckpt.params.club_visual.hidden));

    auto tensors = detail::checkpoint_tensors(ckpt);
    detail::write_u32(os, static_cast<std::uint32_t>(tensors.size()));
    for (auto& [name, m] : tensors) {
        detail::write_string(os, name);
        detail::write_u32(os, static_cast<std::uint32_t>(m->rows()));
        detail::write_u32(os, static_cast<std::uint32_t>(m->cols()));
        for (Index r = 0; r < m->rows(); ++r)
            for (Index c = 0; c < m->cols(); ++c) detail::write_f64(os, (*m)(r, c));
    }
    if (!os) throw std::runtime_error("checkpoint write failed: " + path);
}

inline Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open checkpoint: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "SEAC", 4) != 0)
        throw std::runtime_error("bad checkpoint magic in " + path);
    const int version = is.get();
    if (version != 1) throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));

    Checkpoint c;
    const std::string meta = detail::read_string(is);
    auto grab = [&meta](const std::string& key) {
        const std::string tag = "\"" + key + "\":";
        const std::size_t p = meta.find(tag);
        if (p == std::string::npos) throw std::runtime_error("checkpoint metadata missing " + key);
        return std::stod(meta.substr(p + tag.size()));
    };
    c.epoch = static_cast<Index>(grab("epoch"));
    c.best_val_recall20 = grab("best_val_recall20");
    const auto main_step = static_cast<std::int64_t>(grab("main_adam_step"));
    const auto club_v_step = static_cast<std::int64_t>(grab("club_v_adam_step"));
    const auto club_t_step = static_cast<std::int64_t>(grab("club_t_adam_step"));

    c.config = parse_config_text(detail::read_string(is));
    c.rng_state = detail::read_string(is);
    const std::uint32_t n_digests = detail::read_u32(is);
    for (std::uint32_t i = 0; i < n_digests; ++i) {
        const std::string k = detail::read_string(is);
        c.input_digests[k] = detail::read_string(is);
    }

    const Index n_users = detail::read_u32(is);
    const Index d_v = detail::read_u32(is);
    const Index d_t = detail::read_u32(is);
    const Index hidden = detail::read_u32(is);

    Rng scratch(0);
    c.params = init_parameters(c.config.d, d_v, d_t, n_users, hidden, false, scratch);
    c.main_adam.init(c.params.main_ptrs_const());
    c.main_adam.step = main_step;
    c.params.club_visual.adam.step = club_v_step;
    c.params.club_textual.adam.step = club_t_step;

    std::map<std::string, Mat*> by_name;
    for (auto& [name, m] : detail::checkpoint_tensors(c)) by_name[name] = m;

    const std::uint32_t n_tensors = detail::read_u32(is);
    for (std::uint32_t t = 0; t < n_tensors; ++t) {
        const std::string name = detail::read_string(is);
        const Index rows = detail::read_u32(is);
        const Index cols = detail::read_u32(is);
        auto it = by_name.find(name);
        if (it == by_name.end()) throw std::runtime_error("unknown tensor in checkpoint: " + name);
        it->second->resize(rows, cols);
        for (Index r = 0; r < rows; ++r)
            for (Index ccol = 0; ccol < cols; ++ccol) (*it->second)(r, ccol) = detail::read_f64(is);
    }
    return c;
}

// ---------------------------------------------------------------------------
// Finite-difference verification of the analytic gradients. Checks the
// main-tensor gradient of the total loss and, when CLUB is active, the
// estimator-parameter gradient of the likelihood objective. Samples up to
// 100 coordinates per tensor.

inline double gradient_check(ParameterSet& params, const EngineData& data, const TrainConfig& cfg,
                             const std::vector<Triplet>& batch, double eps = 1e-5,
                             std::uint64_t coord_seed = 12345) {
    const auto batch_items = dedup_positive_items(batch);
    Rng coord_rng(coord_seed);

    // relative error with a small floor so near-zero coordinates are
    // compared absolutely
    const auto rel_err = [](double a, double b) {
        return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-4});
    };

    MainGrads grads = zero_main_grads(params);
    {
        const ForwardPass f = forward_model(params, data.inputs(), forward_options(cfg));
        total_loss(params, data, cfg, f, batch, batch_items, &grads);
    }

    const auto loss_at = [&]() {
        const ForwardPass f = forward_model(params, data.inputs(), forward_options(cfg));
        return total_loss(params, data, cfg, f, batch, batch_items, nullptr).total;
    };

    double max_err = 0.0;
    auto mains = params.main_ptrs();
    for (std::size_t t = 0; t < mains.size(); ++t) {
        Mat& m = *mains[t];
        const Index n_coords = m.size();
        const Index n_check = std::min<Index>(100, n_coords);
        for (Index s = 0; s < n_check; ++s) {
            const Index flat = n_coords <= 100 ? s : static_cast<Index>(coord_rng.uniform_index(n_coords));
            const Index r = flat / m.cols(), ccol = flat % m.cols();
            const double saved = m(r, ccol);
            m(r, ccol) = saved + eps;
            const double lp = loss_at();
            m(r, ccol) = saved - eps;
            const double lm = loss_at();
            m(r, ccol) = saved;
            const double numeric = (lp - lm) / (2.0 * eps);
            max_err = std::max(max_err, rel_err(grads[t](r, ccol), numeric));
        }
    }

    if (cfg.dis_loss == DisLoss::club) {
        const ForwardPass f = forward_model(params, data.inputs(), forward_options(cfg));
        const Index half = params.d() / 2;
        const Mat ei_v = detail::gather_rows(f.e_i_v, batch_items);
        const Mat g = ei_v.leftCols(half), q = ei_v.rightCols(half);
        auto est_grads = params.club_visual.zero_grads();
        club_loglikelihood_grad_params(params.club_visual, g, q, est_grads);
        auto eptrs = params.club_visual.param_ptrs();
        for (std::size_t t = 0; t < eptrs.size(); ++t) {
            Mat& m = *eptrs[t];
            const Index n_coords = m.size();
            const Index n_check = std::min<Index>(100, n_coords);
            for (Index s = 0; s < n_check; ++s) {
                const Index flat = n_coords <= 100 ? s : static_cast<Index>(coord_rng.uniform_index(n_coords));
                const Index r = flat / m.cols(), ccol = flat % m.cols();
                const double saved = m(r, ccol);
                m(r, ccol) = saved + eps;
                const double lp = club_loglikelihood(params.club_visual, g, q);
                m(r, ccol) = saved - eps;
                const double lm = club_loglikelihood(params.club_visual, g, q);
                m(r, ccol) = saved;
                const double numeric = (lp - lm) / (2.0 * eps);
                max_err = std::max(max_err, rel_err(est_grads[t](r, ccol), numeric));
            }
        }
    }
    return max_err;
}

}  // namespace sea

#include "sea/trainer.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

using namespace sea;

namespace {

EngineData tiny_engine(std::uint64_t seed, Index users = 15, Index items = 12) {
    auto synth = generate_synthetic(users, items, 3, 0.2, seed);
    auto ds = split_dataset(synth.dataset, seed + 1);
    return prepare_engine_data(std::move(ds), synth.visual, synth.textual, 3);
}

TrainConfig tiny_config() {
    TrainConfig cfg;
    cfg.d = 8;
    cfg.knn_k = 3;
    cfg.batch_size = 16;
    cfg.club_hidden = 8;
    cfg.max_epochs = 4;
    cfg.seed = 5;
    return cfg;
}

}  // namespace

TEST_CASE("adam first step size is lr regardless of gradient magnitude", "[trainer]") {
    for (const double g0 : {1e-3, 0.5, 3.0, 1e4}) {
        Mat p = Mat::Zero(1, 1);
        Mat g = Mat::Constant(1, 1, g0);
        AdamState adam;
        adam.init({&p});
        adam.update({&p}, {&g}, 0.1);
        // bias-corrected first step is lr * g / (|g| + eps)
        CHECK_THAT(-p(0, 0), Catch::Matchers::WithinRel(0.1 * g0 / (g0 + 1e-8), 1e-12));
        CHECK_THAT(-p(0, 0), Catch::Matchers::WithinRel(0.1, 1e-4));
    }
}

TEST_CASE("adam matches a hand-computed two-step trajectory", "[trainer]") {
    const double lr = 0.1, g0 = 3.0;
    Mat p = Mat::Zero(1, 1);
    Mat g = Mat::Constant(1, 1, g0);
    AdamState adam;
    adam.init({&p});

    // independent recurrence
    double m = 0.0, v = 0.0, want = 0.0;
    for (int t = 1; t <= 2; ++t) {
        m = 0.9 * m + 0.1 * g0;
        v = 0.999 * v + 0.001 * g0 * g0;
        const double mhat = m / (1.0 - std::pow(0.9, t));
        const double vhat = v / (1.0 - std::pow(0.999, t));
        want -= lr * mhat / (std::sqrt(vhat) + 1e-8);
        adam.update({&p}, {&g}, lr);
        CHECK_THAT(p(0, 0), Catch::Matchers::WithinAbs(want, 1e-15));
    }
}

TEST_CASE("train_step with lr = 0 reports losses but leaves parameters fixed", "[trainer]") {
    const auto data = tiny_engine(1);
    auto cfg = tiny_config();
    cfg.lr = 0.0;
    Rng rng(cfg.seed);
    auto params = init_parameters(cfg.d, data.feat_visual.cols(), data.feat_textual.cols(), data.ds.n_users,
                                  cfg.club_hidden, false, rng);
    const Mat before = params.user_emb_visual;
    AdamState adam;
    adam.init(params.main_ptrs_const());
    BprSampler sampler(data.ds);
    const auto batch = sampler.sample(cfg.batch_size, rng);
    const auto report = train_step(params, adam, data, cfg, batch, 0);
    CHECK((params.user_emb_visual - before).cwiseAbs().maxCoeff() == 0.0);
    CHECK(std::isfinite(report.bpr));
    CHECK(std::isfinite(report.total));
    CHECK_THAT(report.total,
               Catch::Matchers::WithinRel(
                   report.bpr + cfg.alpha * report.align + cfg.beta * (report.dis_visual + report.dis_textual),
                   1e-12));
}

TEST_CASE("alpha = beta = 0 trajectory is pure BPR", "[trainer]") {
    const auto data = tiny_engine(2);
    auto run = [&](DisLoss dis, AlignLoss align) {
        auto cfg = tiny_config();
        cfg.alpha = 0.0;
        cfg.beta = 0.0;
        cfg.dis_loss = dis;
        cfg.align_loss = align;
        return fit(data, cfg).last.params.user_emb_visual;
    };
    // with both weights zero, the loss-term choices cannot matter
    const Mat a = run(DisLoss::club, AlignLoss::solosim);
    const Mat b = run(DisLoss::neg_l2, AlignLoss::infonce);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("beta = 0 keeps the main trajectory independent of the estimators", "[trainer]") {
    const auto data = tiny_engine(3);
    auto cfg = tiny_config();
    cfg.beta = 0.0;
    const auto active = fit(data, cfg);

    auto frozen_cfg = cfg;
    frozen_cfg.club_inner_steps = 0;  // estimators never updated
    const auto frozen = fit(data, frozen_cfg);

    CHECK((active.last.params.user_emb_visual - frozen.last.params.user_emb_visual).cwiseAbs().maxCoeff() ==
          0.0);
    CHECK((active.last.params.proj_textual - frozen.last.params.proj_textual).cwiseAbs().maxCoeff() == 0.0);
    // the estimators themselves did move in the active run
    CHECK((active.last.params.club_visual.w1 - frozen.last.params.club_visual.w1).cwiseAbs().maxCoeff() >
          0.0);
}

TEST_CASE("training is deterministic for a fixed seed and config", "[trainer]") {
    const auto data = tiny_engine(4);
    const auto cfg = tiny_config();
    const auto a = fit(data, cfg);
    const auto b = fit(data, cfg);
    REQUIRE(a.log.size() == b.log.size());
    for (std::size_t e = 0; e < a.log.size(); ++e) {
        CHECK(a.log[e].loss == b.log[e].loss);
        CHECK(a.log[e].val_recall20 == b.log[e].val_recall20);
    }
    REQUIRE(a.step_reports.size() == b.step_reports.size());
    for (std::size_t s = 0; s < a.step_reports.size(); ++s)
        CHECK(a.step_reports[s].total == b.step_reports[s].total);
}

TEST_CASE("nan losses abort with the term name", "[trainer]") {
    const auto data = tiny_engine(5);
    const auto cfg = tiny_config();
    Rng rng(cfg.seed);
    auto params = init_parameters(cfg.d, data.feat_visual.cols(), data.feat_textual.cols(), data.ds.n_users,
                                  cfg.club_hidden, false, rng);
    params.user_emb_visual(0, 0) = std::numeric_limits<double>::quiet_NaN();
    AdamState adam;
    adam.init(params.main_ptrs_const());
    BprSampler sampler(data.ds);
    const auto batch = sampler.sample(64, rng);  // large enough to touch user 0
    CHECK_THROWS_WITH(train_step(params, adam, data, cfg, batch, 7),
                      Catch::Matchers::ContainsSubstring("non-finite"));
}

TEST_CASE("fit logs one record per epoch and stops on patience", "[trainer]") {
    const auto data = tiny_engine(6);
    auto cfg = tiny_config();
    cfg.max_epochs = 40;
    cfg.patience = 0;
    const auto res = fit(data, cfg);
    CHECK(!res.log.empty());
    CHECK(res.log.size() <= 40);
    // with patience 0, every epoch before the last must have strictly
    // improved the best validation recall
    double best = -1.0;
    for (std::size_t e = 0; e + 1 < res.log.size(); ++e) {
        CHECK(res.log[e].val_recall20 > best);
        best = std::max(best, res.log[e].val_recall20);
    }
    if (res.log.size() < 40) CHECK(res.log.back().val_recall20 <= best);
    for (std::size_t e = 0; e < res.log.size(); ++e) CHECK(res.log[e].epoch == static_cast<Index>(e + 1));
}

TEST_CASE("gradient_check stays under 1e-4 on a tiny instance", "[trainer]") {
    const auto data = tiny_engine(7);
    auto cfg = tiny_config();
    Rng rng(cfg.seed);
    auto params = init_parameters(cfg.d, data.feat_visual.cols(), data.feat_textual.cols(), data.ds.n_users,
                                  cfg.club_hidden, false, rng);
    BprSampler sampler(data.ds);
    const auto batch = sampler.sample(12, rng);
    const double err = gradient_check(params, data, cfg, batch);
    INFO("max rel err = " << err);
    CHECK(err < 1e-4);
}

TEST_CASE("halving the step keeps the finite-difference error at the noise floor", "[trainer]") {
    const auto data = tiny_engine(8);
    auto cfg = tiny_config();
    Rng rng(cfg.seed);
    auto params = init_parameters(cfg.d, data.feat_visual.cols(), data.feat_textual.cols(), data.ds.n_users,
                                  cfg.club_hidden, false, rng);
    BprSampler sampler(data.ds);
    const auto batch = sampler.sample(12, rng);
    const double err_full = gradient_check(params, data, cfg, batch, 1e-5);
    const double err_half = gradient_check(params, data, cfg, batch, 5e-6);
    INFO("err(1e-5) = " << err_full << ", err(5e-6) = " << err_half);
    CHECK(err_half <= std::max(err_full * 1.5, 1e-6));
}

TEST_CASE("clamped log-variance coordinates have zero gradient both ways", "[trainer]") {
    Rng rng(9);
    VariationalEstimator est(2, 4, rng);
    est.b_lv.setConstant(50.0);  // logvar_raw far above the clamp
    const Mat g = Mat::Random(6, 2), q = Mat::Random(6, 2);
    auto grads = est.zero_grads();
    club_loglikelihood_grad_params(est, g, q, grads);
    CHECK(grads[5].cwiseAbs().maxCoeff() == 0.0);  // b_lv gradient
    const double eps = 1e-5;
    est.b_lv(0, 0) += eps;
    const double lp = club_loglikelihood(est, g, q);
    est.b_lv(0, 0) -= 2 * eps;
    const double lm = club_loglikelihood(est, g, q);
    CHECK((lp - lm) / (2 * eps) == 0.0);
}

TEST_CASE("checkpoints round-trip bit-exactly", "[trainer]") {
    const auto data = tiny_engine(10);
    auto cfg = tiny_config();
    cfg.max_epochs = 2;
    auto res = fit(data, cfg);
    res.last.input_digests = {{"interactions", "00ff"}, {"visual", "abcd"}};

    namespace fs = std::filesystem;
    const auto p1 = (fs::temp_directory_path() / "sea_ckpt_a.bin").string();
    const auto p2 = (fs::temp_directory_path() / "sea_ckpt_b.bin").string();
    save_checkpoint(res.last, p1);
    auto loaded = load_checkpoint(p1);
    save_checkpoint(loaded, p2);
    CHECK(read_file(p1) == read_file(p2));

    CHECK(loaded.epoch == res.last.epoch);
    CHECK(loaded.best_val_recall20 == res.last.best_val_recall20);
    CHECK(loaded.rng_state == res.last.rng_state);
    CHECK(loaded.input_digests == res.last.input_digests);
    CHECK(loaded.config.serialize() == cfg.serialize());
    CHECK((loaded.params.user_emb_visual - res.last.params.user_emb_visual).cwiseAbs().maxCoeff() == 0.0);
    CHECK((loaded.main_adam.m[0] - res.last.main_adam.m[0]).cwiseAbs().maxCoeff() == 0.0);
    CHECK(loaded.main_adam.step == res.last.main_adam.step);
}

TEST_CASE("corrupt checkpoint magic is rejected", "[trainer]") {
    namespace fs = std::filesystem;
    const auto path = (fs::temp_directory_path() / "sea_ckpt_bad.bin").string();
    {
        std::ofstream os(path, std::ios::binary);
        os << "NOPE garbage";
    }
    CHECK_THROWS_WITH(load_checkpoint(path), Catch::Matchers::ContainsSubstring("magic"));
}

TEST_CASE("resuming from a checkpoint reproduces the uninterrupted run", "[trainer]") {
    const auto data = tiny_engine(11);
    auto cfg = tiny_config();
    cfg.max_epochs = 10;
    cfg.patience = 1000;
    const auto full = fit(data, cfg);

    auto cfg_half = cfg;
    cfg_half.max_epochs = 5;
    auto half = fit(data, cfg_half);
    auto resumed = fit(data, cfg, half.last);

    REQUIRE(full.log.size() == 10);
    REQUIRE(resumed.log.size() == 5);
    for (std::size_t e = 0; e < 5; ++e) {
        CHECK(resumed.log[e].loss == full.log[e + 5].loss);
        CHECK(resumed.log[e].val_recall20 == full.log[e + 5].val_recall20);
    }
    CHECK((resumed.last.params.user_emb_visual - full.last.params.user_emb_visual).cwiseAbs().maxCoeff() ==
          0.0);
}

// sea: multimodal recommender training engine command-line front end.
//
// Subcommands: synth, graph, train, eval, export, sweep, verify.

#include "sea/evaluator.hpp"
#include "sea/theory.hpp"
#include "sea/trainer.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct DataArgs {
    std::string interactions;
    std::string visual;
    std::string textual;

    void attach(CLI::App* cmd) {
        cmd->add_option("--interactions", interactions, "interactions CSV (user_id,item_id)")->required();
        cmd->add_option("--visual", visual, "visual feature matrix (SEAF or CSV)")->required();
        cmd->add_option("--textual", textual, "textual feature matrix (SEAF or CSV)")->required();
    }

    std::map<std::string, std::string> digests() const {
        return {{"interactions", sea::file_digest(interactions)},
                {"visual", sea::file_digest(visual)},
                {"textual", sea::file_digest(textual)}};
    }
};

std::string iso_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
    return buf;
}

sea::EngineData load_engine_data(const DataArgs& paths, const sea::TrainConfig& cfg) {
    auto ds = sea::load_interactions(paths.interactions);
    if (ds.n_duplicates_dropped > 0)
        std::cerr << "note: dropped " << ds.n_duplicates_dropped << " duplicate interactions\n";
    const auto visual = sea::load_features(paths.visual, sea::Modality::visual);
    const auto textual = sea::load_features(paths.textual, sea::Modality::textual);
    if (visual.n_items() != textual.n_items())
        throw std::runtime_error("visual and textual feature files disagree on the item count");
    sea::align_items_to_catalog(ds, visual.n_items());
    ds = sea::split_dataset(std::move(ds), cfg.seed);
    if (ds.n_users_too_small_to_split > 0)
        std::cerr << "note: " << ds.n_users_too_small_to_split
                  << " users have < 3 interactions; all their interactions stay in train\n";
    auto data = sea::prepare_engine_data(std::move(ds), visual, textual, cfg.knn_k);
    if (data.n_isolated_visual > 0 || data.n_isolated_textual > 0)
        std::cerr << "note: zero-norm feature rows treated as isolated in the item graphs (visual "
                  << data.n_isolated_visual << ", textual " << data.n_isolated_textual << ")\n";
    return data;
}

json config_json(const sea::TrainConfig& cfg) {
    json j;
    std::istringstream in(cfg.serialize());
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        j[sea::detail::trim(line.substr(0, eq))] = sea::detail::trim(line.substr(eq + 1));
    }
    return j;
}

void write_manifest(const fs::path& dir, const sea::TrainConfig& cfg,
                    const std::map<std::string, std::string>& input_digests,
                    const std::vector<std::string>& outputs, const std::string& started) {
    json m;
    m["config"] = config_json(cfg);
    m["config_digest"] = cfg.digest();
    m["inputs"] = input_digests;
    json outs = json::object();
    for (const auto& name : outputs) outs[name] = sea::file_digest((dir / name).string());
    m["outputs"] = outs;
    m["started_utc"] = started;
    m["completed_utc"] = iso_now();
    std::ofstream os(dir / "manifest.json");
    os << m.dump(2) << '\n';
}

// Runs fit and writes the artifact directory: checkpoint, logs, metrics,
// split and id-map CSVs, manifest. Returns the best-checkpoint val table.
sea::MetricsTable run_training(const sea::EngineData& data, const sea::TrainConfig& cfg,
                               const std::map<std::string, std::string>& digests, const fs::path& out) {
    const std::string started = iso_now();
    fs::create_directories(out);

    sea::FitResult result = sea::fit(data, cfg);
    result.best.input_digests = digests;

    sea::save_checkpoint(result.best, (out / "checkpoint.bin").string());
    {
        std::ofstream os(out / "training_log.jsonl");
        for (const auto& rec : result.log) os << rec.to_jsonl() << '\n';
    }
    {
        std::ofstream os(out / "steps.jsonl");
        for (const auto& rec : result.step_reports) os << rec.to_jsonl() << '\n';
    }
    sea::save_split_csv(data.ds, (out / "splits.csv").string());
    sea::save_id_map(data.ds.user_ids, (out / "id_map_users.csv").string());
    sea::save_id_map(data.ds.item_ids, (out / "id_map_items.csv").string());

    const sea::ForwardPass f =
        sea::forward_model(result.best.params, data.inputs(), sea::forward_options(cfg));
    const auto val = sea::evaluate_embeddings(f.fused_users, f.fused_items, data.ds, sea::Split::val);
    const auto test = sea::evaluate_embeddings(f.fused_users, f.fused_items, data.ds, sea::Split::test);
    {
        std::ofstream os(out / "metrics.json");
        os << "{\"val\":" << val.to_json() << ",\"test\":" << test.to_json()
           << ",\"best_epoch\":" << result.best.epoch << ",\"epochs_run\":" << result.log.size() << "}\n";
    }
    {
        std::ofstream os(out / "metrics.txt");
        os << "split: val\n" << val.to_text() << "\nsplit: test\n" << test.to_text();
    }
    write_manifest(out, cfg, digests,
                   {"checkpoint.bin", "training_log.jsonl", "steps.jsonl", "splits.csv", "id_map_users.csv",
                    "id_map_items.csv", "metrics.json", "metrics.txt"},
                   started);
    return val;
}

int cmd_train(const DataArgs& paths, const sea::TrainConfig& cfg, const std::string& out_dir) {
    cfg.validate();
    const auto data = load_engine_data(paths, cfg);
    const auto val = run_training(data, cfg, paths.digests(), out_dir);
    std::cout << "split: val\n" << val.to_text();
    return 0;
}

int cmd_eval(const DataArgs& paths, const std::string& ckpt_path, const std::string& split_name,
             const std::vector<sea::Index>& ks) {
    sea::Checkpoint ckpt = sea::load_checkpoint(ckpt_path);
    const auto digests = paths.digests();
    for (const auto& [name, digest] : ckpt.input_digests) {
        auto it = digests.find(name);
        if (it != digests.end() && it->second != digest)
            throw std::runtime_error("checkpoint/input mismatch for " + name + ": checkpoint has digest " +
                                     digest + ", file has " + it->second);
    }
    const auto data = load_engine_data(paths, ckpt.config);
    const sea::Split split = split_name == "val" ? sea::Split::val : sea::Split::test;
    const sea::ForwardPass f =
        sea::forward_model(ckpt.params, data.inputs(), sea::forward_options(ckpt.config));

    json out;
    out["split"] = split_name;
    std::ostringstream text;
    text << std::left << std::setw(12) << "metric" << std::right << std::setw(12) << "value" << '\n'
         << std::fixed << std::setprecision(6);
    for (const auto k : ks) {
        const auto m = sea::evaluate_embeddings_at_k(f.fused_users, f.fused_items, data.ds, split, k);
        out["recall@" + std::to_string(k)] = m.recall;
        out["ndcg@" + std::to_string(k)] = m.ndcg;
        out["n_users"] = m.n_users_evaluated;
        text << std::left << std::setw(12) << ("recall@" + std::to_string(k)) << std::right << std::setw(12)
             << m.recall << '\n';
        text << std::left << std::setw(12) << ("ndcg@" + std::to_string(k)) << std::right << std::setw(12)
             << m.ndcg << '\n';
    }
    std::cout << out.dump() << '\n' << text.str();
    return 0;
}

int cmd_export(const DataArgs& paths, const std::string& ckpt_path, const std::string& out_dir) {
    sea::Checkpoint ckpt = sea::load_checkpoint(ckpt_path);
    const auto data = load_engine_data(paths, ckpt.config);
    const sea::ForwardPass f =
        sea::forward_model(ckpt.params, data.inputs(), sea::forward_options(ckpt.config));
    const std::string started = iso_now();
    fs::create_directories(out_dir);
    const fs::path out(out_dir);
    sea::write_seaf((out / "user_embeddings.seaf").string(), f.fused_users);
    sea::write_seaf((out / "item_embeddings.seaf").string(), f.fused_items);
    sea::save_id_map(data.ds.user_ids, (out / "id_map_users.csv").string());
    sea::save_id_map(data.ds.item_ids, (out / "id_map_items.csv").string());
    write_manifest(out, ckpt.config, paths.digests(),
                   {"user_embeddings.seaf", "item_embeddings.seaf", "id_map_users.csv", "id_map_items.csv"},
                   started);
    std::cout << "exported fused embeddings for " << f.fused_users.rows() << " users and "
              << f.fused_items.rows() << " items to " << out_dir << '\n';
    return 0;
}

int cmd_graph(const DataArgs& paths, const sea::TrainConfig& cfg, const std::string& out_dir) {
    const auto data = load_engine_data(paths, cfg);
    const std::string started = iso_now();
    fs::create_directories(out_dir);
    const fs::path out(out_dir);
    data.bipartite.user_to_item.dump_csv((out / "bipartite_user_item.csv").string());
    data.s_visual.dump_csv((out / "item_graph_visual.csv").string());
    data.s_textual.dump_csv((out / "item_graph_textual.csv").string());
    write_manifest(out, cfg, paths.digests(),
                   {"bipartite_user_item.csv", "item_graph_visual.csv", "item_graph_textual.csv"}, started);
    std::cout << "bipartite edges: " << data.bipartite.user_to_item.nnz()
              << ", item graph edges: " << data.s_visual.nnz() << " visual / " << data.s_textual.nnz()
              << " textual\n";
    return 0;
}

int cmd_synth(sea::Index users, sea::Index items, sea::Index latent, double noise, std::uint64_t seed,
              const std::string& out_dir) {
    const auto synth = sea::generate_synthetic(users, items, latent, noise, seed);
    fs::create_directories(out_dir);
    const fs::path out(out_dir);
    {
        // item ids are catalog positions so the feature rows stay joinable
        std::ofstream os(out / "interactions.csv");
        os << "user_id,item_id\n";
        for (const auto& [u, i] : synth.dataset.interactions)
            os << synth.dataset.user_ids[static_cast<std::size_t>(u)] << ',' << i << '\n';
    }
    sea::write_seaf((out / "visual.seaf").string(), synth.visual.data);
    sea::write_seaf((out / "textual.seaf").string(), synth.textual.data);
    std::cout << "wrote " << synth.dataset.interactions.size() << " interactions for " << users << " users x "
              << items << " items (visual dim " << synth.visual.dim() << ", textual dim "
              << synth.textual.dim() << ") to " << out_dir << '\n';
    return 0;
}

int cmd_verify_theorem1(sea::Index dim, sea::Index samples, std::uint64_t seed, const std::string& hist_out) {
    sea::Rng rng(seed);
    const auto st = sea::sample_angle_distribution(dim, samples, rng);
    const double var_ref = dim > 2 ? 1.0 / (static_cast<double>(dim) - 2.0) : M_PI * M_PI / 12.0;

    if (!hist_out.empty()) {
        std::ofstream os(hist_out);
        if (!os) throw std::runtime_error("cannot write histogram: " + hist_out);
        os << "bin_lo,bin_hi,count,density\n";
        os.precision(17);
        for (std::size_t b = 0; b + 1 < st.bin_edges.size(); ++b) {
            const double width = st.bin_edges[b + 1] - st.bin_edges[b];
            os << st.bin_edges[b] << ',' << st.bin_edges[b + 1] << ',' << st.counts[b] << ','
               << st.counts[b] / (width * static_cast<double>(samples)) << '\n';
        }
    }

    const bool mean_ok = std::abs(st.mean - M_PI_2) <= 0.005;
    const bool var_ok = std::abs(st.variance - var_ref) <= 0.15 * var_ref;
    const bool chi2_ok = st.chi2.pvalue > 0.001;

    json j;
    j["dim"] = dim;
    j["samples"] = samples;
    j["mean"] = st.mean;
    j["mean_target"] = M_PI_2;
    j["variance"] = st.variance;
    j["variance_reference"] = var_ref;
    j["variance_exact"] = sea::variance_quadrature(dim);
    j["chi2_statistic"] = st.chi2.statistic;
    j["chi2_dof"] = st.chi2.dof;
    j["chi2_pvalue"] = st.chi2.pvalue;
    j["assertions"] = {{"mean_within_0.005", mean_ok},
                       {"variance_within_15pct", var_ok},
                       {"chi2_not_rejected_at_0.001", chi2_ok}};
    j["pass"] = mean_ok && var_ok && chi2_ok;
    std::cout << j.dump(2) << '\n';
    return j["pass"].get<bool>() ? 0 : 1;
}

int cmd_verify_club(double rho, sea::Index samples, sea::Index steps, std::uint64_t seed) {
    sea::Rng rng(seed);
    const auto ex = sea::club_gaussian_experiment(rho, samples, steps, rng);
    // Upper-bound property with sampling slack; at rho = 0 the bound is
    // tight, so the estimate must sit near zero. With a converged
    // conditional the Gaussian-pair bound equals rho^2/(1-rho^2), which is
    // strictly above the MI for rho != 0.
    const bool lower_ok = ex.estimate >= ex.true_mi - 0.05;
    const bool zero_ok = rho != 0.0 || std::abs(ex.estimate) <= 0.05;

    json j;
    j["rho"] = rho;
    j["samples"] = samples;
    j["train_steps"] = steps;
    j["true_mi"] = ex.true_mi;
    j["estimate"] = ex.estimate;
    j["converged_bound_reference"] = rho * rho / (1.0 - rho * rho);
    j["final_loglik"] = ex.final_loglik;
    j["assertions"] = {{"estimate_at_least_mi_minus_0.05", lower_ok},
                       {"near_zero_when_independent", zero_ok}};
    j["pass"] = lower_ok && zero_ok;
    std::cout << j.dump(2) << '\n';
    return j["pass"].get<bool>() ? 0 : 1;
}

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : csv) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

int cmd_sweep(const DataArgs& paths, const sea::TrainConfig& base, const std::vector<std::string>& grids,
              const std::string& out_dir) {
    // parse grid axes: key=v1,v2,...
    std::vector<std::pair<std::string, std::vector<std::string>>> axes;
    for (const auto& g : grids) {
        const auto eq = g.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("grid must be key=v1,v2,...: " + g);
        const auto values = split_list(g.substr(eq + 1));
        if (values.empty()) throw std::invalid_argument("empty grid for " + g.substr(0, eq));
        axes.emplace_back(g.substr(0, eq), values);
    }
    if (axes.empty()) throw std::invalid_argument("sweep requires at least one --grid axis");

    std::vector<sea::TrainConfig> points{base};
    std::vector<std::map<std::string, std::string>> labels{{}};
    for (const auto& [key, values] : axes) {
        std::vector<sea::TrainConfig> next;
        std::vector<std::map<std::string, std::string>> next_labels;
        for (std::size_t p = 0; p < points.size(); ++p) {
            for (const auto& v : values) {
                sea::TrainConfig cfg = points[p];
                cfg.set(key, v);
                next.push_back(cfg);
                auto lab = labels[p];
                lab[key] = v;
                next_labels.push_back(std::move(lab));
            }
        }
        points = std::move(next);
        labels = std::move(next_labels);
    }

    const std::string started = iso_now();
    fs::create_directories(out_dir);
    const fs::path out(out_dir);
    const auto digests = paths.digests();

    struct Row {
        std::string point;
        std::map<std::string, std::string> label;
        sea::MetricsTable val;
    };
    std::vector<Row> rows;

    std::optional<sea::EngineData> data;  // reused across points with the same graphs/split
    std::pair<sea::Index, std::uint64_t> loaded_key{-1, 0};
    for (std::size_t p = 0; p < points.size(); ++p) {
        points[p].validate();
        const std::string name = "point_" + std::to_string(p) + "_" + points[p].digest();
        const fs::path pdir = out / name;
        Row row;
        row.point = name;
        row.label = labels[p];

        if (fs::exists(pdir / "manifest.json") && fs::exists(pdir / "metrics.json")) {
            const json m = json::parse(sea::read_file((pdir / "manifest.json").string()));
            if (m.value("config_digest", "") == points[p].digest()) {
                const json metrics = json::parse(sea::read_file((pdir / "metrics.json").string()));
                row.val.recall10 = metrics["val"]["recall@10"].get<double>();
                row.val.recall20 = metrics["val"]["recall@20"].get<double>();
                row.val.ndcg10 = metrics["val"]["ndcg@10"].get<double>();
                row.val.ndcg20 = metrics["val"]["ndcg@20"].get<double>();
                rows.push_back(std::move(row));
                std::cout << name << ": already complete, skipping\n";
                continue;
            }
        }
        const std::pair<sea::Index, std::uint64_t> key{points[p].knn_k, points[p].seed};
        if (!data || loaded_key != key) {
            data = load_engine_data(paths, points[p]);
            loaded_key = key;
        }
        row.val = run_training(*data, points[p], digests, pdir);
        std::cout << name << ": val recall@20 = " << row.val.recall20 << '\n';
        rows.push_back(std::move(row));
    }

    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.val.recall20 > b.val.recall20; });
    {
        std::ofstream os(out / "sweep_summary.csv");
        os << "point";
        for (const auto& [key, _] : axes) os << ',' << key;
        os << ",val_recall10,val_recall20,val_ndcg10,val_ndcg20\n";
        os.precision(10);
        for (const auto& r : rows) {
            os << r.point;
            for (const auto& [key, _] : axes) os << ',' << r.label.at(key);
            os << ',' << r.val.recall10 << ',' << r.val.recall20 << ',' << r.val.ndcg10 << ',' << r.val.ndcg20
               << '\n';
        }
    }
    write_manifest(out, base, digests, {"sweep_summary.csv"}, started);
    std::cout << "sweep complete: " << rows.size() << " points, summary in "
              << (out / "sweep_summary.csv").string() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SEA multimodal recommender training engine"};
    app.require_subcommand(1);

    // train
    auto* train = app.add_subcommand("train", "train a model and write artifacts");
    DataArgs train_paths;
    train_paths.attach(train);
    std::string train_config, train_out;
    std::vector<std::string> train_sets;
    train->add_option("--config", train_config, "config file (flat key = value lines)")->required();
    train->add_option("--out", train_out, "output directory")->required();
    train->add_option("--set", train_sets, "inline config override key=value (repeatable)");

    // eval
    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint");
    DataArgs eval_paths;
    eval_paths.attach(eval);
    std::string eval_ckpt, eval_split = "val", eval_ks = "10,20";
    eval->add_option("--checkpoint", eval_ckpt, "checkpoint file")->required();
    eval->add_option("--split", eval_split, "val or test")->check(CLI::IsMember({"val", "test"}));
    eval->add_option("--k", eval_ks, "comma-separated cutoff list (default 10,20)");

    // export
    auto* exp = app.add_subcommand("export", "export fused embeddings from a checkpoint");
    DataArgs export_paths;
    export_paths.attach(exp);
    std::string export_ckpt, export_out;
    exp->add_option("--checkpoint", export_ckpt, "checkpoint file")->required();
    exp->add_option("--out", export_out, "output directory")->required();

    // graph
    auto* graph = app.add_subcommand("graph", "build and dump the graphs as CSV");
    DataArgs graph_paths;
    graph_paths.attach(graph);
    std::string graph_config, graph_out;
    std::vector<std::string> graph_sets;
    graph->add_option("--config", graph_config, "config file");
    graph->add_option("--set", graph_sets, "inline config override key=value");
    graph->add_option("--out", graph_out, "output directory")->required();

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    sea::Index synth_users = 200, synth_items = 100, synth_latent = 8;
    double synth_noise = 0.1;
    std::uint64_t synth_seed = 1;
    std::string synth_out;
    synth->add_option("--users", synth_users, "number of users");
    synth->add_option("--items", synth_items, "number of items");
    synth->add_option("--latent", synth_latent, "latent dimension (>= 2)");
    synth->add_option("--noise", synth_noise, "feature noise scale");
    synth->add_option("--seed", synth_seed, "generator seed");
    synth->add_option("--out", synth_out, "output directory")->required();

    // verify
    auto* verify = app.add_subcommand("verify", "statistical verification experiments");
    verify->require_subcommand(1);
    auto* theorem1 = verify->add_subcommand("theorem1", "angle concentration of random directions");
    sea::Index t1_dim = 64, t1_samples = 100000;
    std::uint64_t t1_seed = 20240501;
    theorem1->add_option("--dim", t1_dim, "space dimension (>= 2)");
    theorem1->add_option("--samples", t1_samples, "Monte Carlo sample count");
    theorem1->add_option("--seed", t1_seed, "rng seed");
    std::string t1_hist;
    theorem1->add_option("--hist-out", t1_hist, "write the angle histogram as CSV");
    auto* club = verify->add_subcommand("club", "CLUB bound on correlated Gaussian pairs");
    double club_rho = 0.5;
    sea::Index club_samples = 10000, club_steps = 3000;
    std::uint64_t club_seed = 20240502;
    club->add_option("--rho", club_rho, "pair correlation in (-1, 1)");
    club->add_option("--samples", club_samples, "Gaussian pair count");
    club->add_option("--steps", club_steps, "likelihood training steps");
    club->add_option("--seed", club_seed, "rng seed");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "grid sweep over config values");
    DataArgs sweep_paths;
    sweep_paths.attach(sweep);
    std::string sweep_config, sweep_out;
    std::vector<std::string> sweep_grids, sweep_sets;
    sweep->add_option("--config", sweep_config, "base config file");
    sweep->add_option("--set", sweep_sets, "inline base config override key=value");
    sweep->add_option("--grid", sweep_grids, "grid axis key=v1,v2,... (repeatable)")->required();
    sweep->add_option("--out", sweep_out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    auto build_config = [](const std::string& file, const std::vector<std::string>& sets) {
        sea::TrainConfig cfg;
        if (!file.empty()) cfg = sea::load_config(file);
        for (const auto& kv : sets) sea::apply_override(cfg, kv);
        return cfg;
    };

    try {
        if (train->parsed()) return cmd_train(train_paths, build_config(train_config, train_sets), train_out);
        if (eval->parsed()) {
            std::vector<sea::Index> ks;
            for (const auto& k : split_list(eval_ks)) ks.push_back(std::stoll(k));
            if (ks.empty()) throw std::invalid_argument("--k list is empty");
            return cmd_eval(eval_paths, eval_ckpt, eval_split, ks);
        }
        if (exp->parsed()) return cmd_export(export_paths, export_ckpt, export_out);
        if (graph->parsed()) return cmd_graph(graph_paths, build_config(graph_config, graph_sets), graph_out);
        if (synth->parsed()) return cmd_synth(synth_users, synth_items, synth_latent, synth_noise, synth_seed, synth_out);
        if (theorem1->parsed()) {
            if (t1_dim < 2) {
                std::cerr << "error: --dim must be >= 2\n";
                return 2;
            }
            if (t1_samples < 1000) {
                std::cerr << "error: --samples must be >= 1000\n";
                return 2;
            }
            return cmd_verify_theorem1(t1_dim, t1_samples, t1_seed, t1_hist);
        }
        if (club->parsed()) {
            if (std::abs(club_rho) >= 1.0) {
                std::cerr << "error: --rho must lie in (-1, 1)\n";
                return 2;
            }
            return cmd_verify_club(club_rho, club_samples, club_steps, club_seed);
        }
        if (sweep->parsed())
            return cmd_sweep(sweep_paths, build_config(sweep_config, sweep_sets), sweep_grids, sweep_out);
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

#pragma once

#include "sea/common.hpp"
#include "sea/io.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace sea {

enum class Split : std::uint8_t { train = 0, val = 1, test = 2 };

inline const char* split_name(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::val: return "val";
        default: return "test";
    }
}

struct InteractionDataset {
    Index n_users = 0;
    Index n_items = 0;
    std::vector<std::pair<Index, Index>> interactions;  // (user, item)
    std::vector<Split> split_assignment;                // parallel to interactions

    // original ids in first-appearance order; user_ids[k] maps index k back
    std::vector<std::string> user_ids;
    std::vector<std::string> item_ids;

    Index n_duplicates_dropped = 0;
    Index n_users_too_small_to_split = 0;  // users with <3 interactions, all sent to train

    std::vector<std::vector<Index>> items_by_user(Split s) const {
        std::vector<std::vector<Index>> out(static_cast<std::size_t>(n_users));
        for (std::size_t k = 0; k < interactions.size(); ++k)
            if (split_assignment.empty() || split_assignment[k] == s)
                out[static_cast<std::size_t>(interactions[k].first)].push_back(interactions[k].second);
        return out;
    }

    std::vector<std::pair<Index, Index>> split_pairs(Split s) const {
        std::vector<std::pair<Index, Index>> out;
        for (std::size_t k = 0; k < interactions.size(); ++k)
            if (!split_assignment.empty() && split_assignment[k] == s) out.push_back(interactions[k]);
        return out;
    }
};

enum class Modality : std::uint8_t { visual = 0, textual = 1 };

struct FeatureMatrix {
    Modality modality = Modality::visual;
    Mat data;  // n_items x dim

    Index n_items() const { return data.rows(); }
    Index dim() const { return data.cols(); }

    void validate(Index expected_items) const {
        if (data.rows() != expected_items)
            throw std::runtime_error("feature matrix row count " + std::to_string(data.rows()) +
                                     " does not match item count " + std::to_string(expected_items));
        if (!data.allFinite()) throw std::runtime_error("feature matrix contains NaN/Inf");
    }
};

// CSV with header `user_id,item_id`; ids re-indexed densely in
// first-appearance order, duplicate pairs dropped and counted.
inline InteractionDataset load_interactions(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open interactions file: " + path);

    InteractionDataset ds;
    std::unordered_map<std::string, Index> user_index, item_index;
    std::unordered_set<std::uint64_t> seen;

    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto fields = split_csv_line(line);
        if (!header_seen) {
            if (fields.size() < 2 || fields[0] != "user_id" || fields[1] != "item_id")
                throw std::runtime_error(path + ":1: expected header 'user_id,item_id'");
            header_seen = true;
            continue;
        }
        if (fields.size() != 2 || fields[0].empty() || fields[1].empty())
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": malformed row '" + line + "'");
        auto [uit, uinserted] = user_index.try_emplace(fields[0], ds.n_users);
        if (uinserted) {
            ds.user_ids.push_back(fields[0]);
            ++ds.n_users;
        }
        auto [iit, iinserted] = item_index.try_emplace(fields[1], ds.n_items);
        if (iinserted) {
            ds.item_ids.push_back(fields[1]);
            ++ds.n_items;
        }
        const Index u = uit->second, i = iit->second;
        const std::uint64_t key = (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint64_t>(i);
        if (!seen.insert(key).second) {
            ++ds.n_duplicates_dropped;
            continue;
        }
        ds.interactions.emplace_back(u, i);
    }
    if (!header_seen || ds.interactions.empty())
        throw std::runtime_error(path + ": no interactions found");
    ds.split_assignment.assign(ds.interactions.size(), Split::train);
    return ds;
}

// Feature file loader: SEAF binary, or headerless CSV fallback (one row per
// item).
inline FeatureMatrix load_features(const std::string& path, Modality modality) {
    FeatureMatrix fm;
    fm.modality = modality;
    {
        std::ifstream probe(path, std::ios::binary);
        if (!probe) throw std::runtime_error("cannot open features file: " + path);
        char magic[4] = {0, 0, 0, 0};
        probe.read(magic, 4);
        if (probe && std::memcmp(magic, "SEAF", 4) == 0) {
            fm.data = read_seaf(path);
            return fm;
        }
    }
    std::ifstream in(path);
    std::string line;
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        std::vector<double> row;
        for (const auto& f : split_csv_line(line)) {
            try {
                row.push_back(std::stod(f));
            } catch (const std::exception&) {
                throw std::runtime_error(path + ":" + std::to_string(line_no) + ": not a number: '" + f + "'");
            }
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": inconsistent column count");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error(path + ": empty feature file");
    fm.data.resize(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c) fm.data(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
    return fm;
}

// Features cover the whole catalog, including items that never appear in
// the interactions. When every original item id parses as a canonical
// decimal position into the feature catalog, item indices are remapped to
// those positions and the item space widens to the catalog size, so
// uninteracted items keep their feature rows. Non-numeric ids keep their
// first-appearance indexing and must match the catalog size exactly.
inline void align_items_to_catalog(InteractionDataset& ds, Index catalog_rows) {
    auto parse_canonical = [](const std::string& s, Index limit, Index* out) {
        if (s.empty() || (s.size() > 1 && s[0] == '0')) return false;
        Index v = 0;
        for (char c : s) {
            if (c < '0' || c > '9') return false;
            v = v * 10 + (c - '0');
            if (v >= limit) return false;
        }
        *out = v;
        return true;
    };
    std::vector<Index> remap(ds.item_ids.size());
    bool numeric = true;
    for (std::size_t k = 0; k < ds.item_ids.size(); ++k) {
        if (!parse_canonical(ds.item_ids[k], catalog_rows, &remap[k])) {
            numeric = false;
            break;
        }
    }
    if (!numeric) {
        if (ds.n_items != catalog_rows)
            throw std::runtime_error("feature catalog has " + std::to_string(catalog_rows) +
                                     " rows but interactions cover " + std::to_string(ds.n_items) +
                                     " items and the item ids are not catalog positions");
        return;
    }
    for (auto& [u, i] : ds.interactions) i = remap[static_cast<std::size_t>(i)];
    ds.n_items = catalog_rows;
    ds.item_ids.clear();
    ds.item_ids.reserve(static_cast<std::size_t>(catalog_rows));
    for (Index i = 0; i < catalog_rows; ++i) ds.item_ids.push_back(std::to_string(i));
}

// Per-user random 8:1:1 assignment. val and test each get floor(n/10),
// remainder goes to train, so train keeps >= 80% and >= 1 interaction.
// Users with < 3 interactions keep everything in train (counted).
inline InteractionDataset split_dataset(InteractionDataset ds, std::uint64_t seed) {
    Rng rng(seed);
    ds.split_assignment.assign(ds.interactions.size(), Split::train);
    ds.n_users_too_small_to_split = 0;

    std::vector<std::vector<std::size_t>> per_user(static_cast<std::size_t>(ds.n_users));
    for (std::size_t k = 0; k < ds.interactions.size(); ++k)
        per_user[static_cast<std::size_t>(ds.interactions[k].first)].push_back(k);

    for (auto& ks : per_user) {
        const std::size_t n = ks.size();
        if (n < 3) {
            if (n > 0) ++ds.n_users_too_small_to_split;
            continue;
        }
        // Fisher-Yates on this user's interaction slots
        for (std::size_t i = n - 1; i > 0; --i) {
            const std::size_t j = static_cast<std::size_t>(rng.uniform_index(i + 1));
            std::swap(ks[i], ks[j]);
        }
        const std::size_t n_val = n / 10, n_test = n / 10;
        for (std::size_t i = 0; i < n_val; ++i) ds.split_assignment[ks[i]] = Split::val;
        for (std::size_t i = n_val; i < n_val + n_test; ++i) ds.split_assignment[ks[i]] = Split::test;
    }
    return ds;
}

inline void save_split_csv(const InteractionDataset& ds, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write split file: " + path);
    os << "user_index,item_index,split\n";
    for (std::size_t k = 0; k < ds.interactions.size(); ++k)
        os << ds.interactions[k].first << ',' << ds.interactions[k].second << ','
           << split_name(ds.split_assignment[k]) << '\n';
}

inline void load_split_csv(InteractionDataset& ds, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open split file: " + path);
    std::unordered_map<std::uint64_t, Split> assign;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 || line.empty()) continue;
        auto f = split_csv_line(line);
        if (f.size() != 3) throw std::runtime_error(path + ":" + std::to_string(line_no) + ": malformed row");
        Split s;
        if (f[2] == "train") s = Split::train;
        else if (f[2] == "val") s = Split::val;
        else if (f[2] == "test") s = Split::test;
        else throw std::runtime_error(path + ":" + std::to_string(line_no) + ": unknown split '" + f[2] + "'");
        assign[(std::stoull(f[0]) << 32) | std::stoull(f[1])] = s;
    }
    for (std::size_t k = 0; k < ds.interactions.size(); ++k) {
        const auto key = (static_cast<std::uint64_t>(ds.interactions[k].first) << 32) |
                         static_cast<std::uint64_t>(ds.interactions[k].second);
        auto it = assign.find(key);
        if (it == assign.end())
            throw std::runtime_error(path + ": missing split for interaction " + std::to_string(k));
        ds.split_assignment[k] = it->second;
    }
}

// Two-column id mapping so exported embeddings stay joinable to raw ids.
inline void save_id_map(const std::vector<std::string>& ids, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write id map: " + path);
    os << "index,original_id\n";
    for (std::size_t k = 0; k < ids.size(); ++k) os << k << ',' << ids[k] << '\n';
}

struct Triplet {
    Index user;
    Index pos;
    Index neg;
};

// Uniform draw over train interactions; negative is uniform over items the
// user has no train interaction with (rejection capped at 100, then the
// draw is skipped and counted).
struct BprSampler {
    std::vector<std::pair<Index, Index>> train_pairs;
    std::vector<std::unordered_set<Index>> user_train_items;
    Index n_items = 0;
    Index n_skipped = 0;

    explicit BprSampler(const InteractionDataset& ds) : n_items(ds.n_items) {
        user_train_items.resize(static_cast<std::size_t>(ds.n_users));
        for (std::size_t k = 0; k < ds.interactions.size(); ++k) {
            if (ds.split_assignment[k] != Split::train) continue;
            train_pairs.push_back(ds.interactions[k]);
            user_train_items[static_cast<std::size_t>(ds.interactions[k].first)].insert(ds.interactions[k].second);
        }
        if (train_pairs.empty()) throw std::runtime_error("train split is empty");
    }

    std::vector<Triplet> sample(Index batch_size, Rng& rng) {
        std::vector<Triplet> out;
        out.reserve(static_cast<std::size_t>(batch_size));
        Index consecutive_skips = 0;
        while (static_cast<Index>(out.size()) < batch_size) {
            const auto& [u, ipos] = train_pairs[rng.uniform_index(train_pairs.size())];
            const auto& owned = user_train_items[static_cast<std::size_t>(u)];
            bool found = false;
            Index jneg = 0;
            for (int tries = 0; tries < 100; ++tries) {
                jneg = static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(n_items)));
                if (!owned.count(jneg)) {
                    found = true;
                    break;
                }
            }
            if (!found) {
                ++n_skipped;
                if (++consecutive_skips > static_cast<Index>(train_pairs.size()) + 100)
                    throw std::runtime_error("negative sampling failed: no user has an uninteracted item");
                continue;
            }
            consecutive_skips = 0;
            out.push_back({u, ipos, jneg});
        }
        return out;
    }
};

inline std::vector<Triplet> sample_bpr_triplets(const InteractionDataset& ds, Index batch_size, Rng& rng) {
    BprSampler sampler(ds);
    return sampler.sample(batch_size, rng);
}

struct SyntheticData {
    InteractionDataset dataset;
    FeatureMatrix visual;
    FeatureMatrix textual;
};

// Desk-scale generator. Latent user/item factors decide interactions (each
// user takes the top 10% of items by latent inner product); each modality
// observes a distinct linear map of the shared item latent plus its own
// private latent block plus Gaussian noise, so both modal-generic and
// modal-unique signal exist by construction.
inline SyntheticData generate_synthetic(Index n_users, Index n_items, Index latent_dim, double noise,
                                        std::uint64_t seed) {
    if (latent_dim < 2) throw std::invalid_argument("latent_dim must be >= 2");
    Rng rng(seed);
    auto gaussian = [&rng](Index r, Index c) {
        Mat m(r, c);
        for (Index i = 0; i < r; ++i)
            for (Index j = 0; j < c; ++j) m(i, j) = rng.normal();
        return m;
    };

    const Mat zu = gaussian(n_users, latent_dim);
    const Mat zi = gaussian(n_items, latent_dim);

    SyntheticData out;
    out.dataset.n_users = n_users;
    out.dataset.n_items = n_items;
    out.dataset.user_ids.reserve(static_cast<std::size_t>(n_users));
    out.dataset.item_ids.reserve(static_cast<std::size_t>(n_items));
    for (Index u = 0; u < n_users; ++u) out.dataset.user_ids.push_back("u" + std::to_string(u));
    for (Index i = 0; i < n_items; ++i) out.dataset.item_ids.push_back("i" + std::to_string(i));

    const Index per_user = std::max<Index>(1, static_cast<Index>(std::llround(0.1 * static_cast<double>(n_items))));
    const Mat affinity = zu * zi.transpose();
    std::vector<Index> order(static_cast<std::size_t>(n_items));
    for (Index u = 0; u < n_users; ++u) {
        std::iota(order.begin(), order.end(), Index{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](Index a, Index b) { return affinity(u, a) > affinity(u, b); });
        for (Index k = 0; k < per_user; ++k) out.dataset.interactions.emplace_back(u, order[static_cast<std::size_t>(k)]);
    }
    out.dataset.split_assignment.assign(out.dataset.interactions.size(), Split::train);

    const Index d_visual = 2 * latent_dim, d_textual = 3 * latent_dim;
    const Mat zp_v = gaussian(n_items, latent_dim);
    const Mat zp_t = gaussian(n_items, latent_dim);
    const Mat map_v = gaussian(latent_dim, d_visual), priv_v = gaussian(latent_dim, d_visual);
    const Mat map_t = gaussian(latent_dim, d_textual), priv_t = gaussian(latent_dim, d_textual);

    out.visual.modality = Modality::visual;
    out.visual.data = zi * map_v + zp_v * priv_v + noise * gaussian(n_items, d_visual);
    out.textual.modality = Modality::textual;
    out.textual.data = zi * map_t + zp_t * priv_t + noise * gaussian(n_items, d_textual);
    return out;
}

}  // namespace sea

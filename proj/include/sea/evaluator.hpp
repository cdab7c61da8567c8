#pragma once

#include "sea/data.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_set>
#include <vector>

namespace sea {

// All unmasked items by descending score, ties to the lower item index.
inline std::vector<Index> rank_items(const Mat& e_u, const Mat& e_i, Index user,
                                     const std::unordered_set<Index>& mask) {
    const Vec scores = e_i * e_u.row(user).transpose();
    std::vector<Index> order;
    order.reserve(static_cast<std::size_t>(e_i.rows()));
    for (Index i = 0; i < e_i.rows(); ++i)
        if (!mask.count(i)) order.push_back(i);
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
        if (scores(a) != scores(b)) return scores(a) > scores(b);
        return a < b;
    });
    return order;
}

struct MetricsAtK {
    double recall = 0.0;
    double ndcg = 0.0;
    Index n_users_evaluated = 0;
};

// Recall@K = |topK ∩ GT| / |GT|; NDCG@K with binary gains and
// IDCG truncated at min(K, |GT|). Users with empty ground truth are
// excluded from the means.
inline MetricsAtK compute_metrics(const std::vector<std::vector<Index>>& rankings,
                                  const std::vector<std::vector<Index>>& ground_truth, Index k) {
    if (k <= 0) throw std::invalid_argument("K must be positive");
    MetricsAtK out;
    double recall_sum = 0.0, ndcg_sum = 0.0;
    for (std::size_t u = 0; u < rankings.size(); ++u) {
        const auto& gt = ground_truth[u];
        if (gt.empty()) continue;
        const std::unordered_set<Index> gt_set(gt.begin(), gt.end());
        const Index depth = std::min<Index>(k, static_cast<Index>(rankings[u].size()));
        Index hits = 0;
        double dcg = 0.0;
        for (Index r = 0; r < depth; ++r) {
            if (gt_set.count(rankings[u][static_cast<std::size_t>(r)])) {
                ++hits;
                dcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
            }
        }
        double idcg = 0.0;
        const Index ideal = std::min<Index>(k, static_cast<Index>(gt.size()));
        for (Index r = 0; r < ideal; ++r) idcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
        recall_sum += static_cast<double>(hits) / static_cast<double>(gt.size());
        ndcg_sum += idcg > 0.0 ? dcg / idcg : 0.0;
        ++out.n_users_evaluated;
    }
    if (out.n_users_evaluated > 0) {
        recall_sum /= static_cast<double>(out.n_users_evaluated);
        ndcg_sum /= static_cast<double>(out.n_users_evaluated);
    }
    out.recall = recall_sum;
    out.ndcg = ndcg_sum;
    return out;
}

struct MetricsTable {
    double recall10 = 0.0, recall20 = 0.0;
    double ndcg10 = 0.0, ndcg20 = 0.0;
    Index n_users_evaluated = 0;

    std::string to_json() const {
        std::ostringstream os;
        os.precision(10);
        os << "{\"recall@10\":" << recall10 << ",\"recall@20\":" << recall20 << ",\"ndcg@10\":" << ndcg10
           << ",\"ndcg@20\":" << ndcg20 << ",\"n_users\":" << n_users_evaluated << "}";
        return os.str();
    }

    std::string to_text() const {
        std::ostringstream os;
        os << std::left << std::setw(12) << "metric" << std::right << std::setw(12) << "value" << '\n';
        os << std::fixed << std::setprecision(6);
        os << std::left << std::setw(12) << "recall@10" << std::right << std::setw(12) << recall10 << '\n';
        os << std::left << std::setw(12) << "recall@20" << std::right << std::setw(12) << recall20 << '\n';
        os << std::left << std::setw(12) << "ndcg@10" << std::right << std::setw(12) << ndcg10 << '\n';
        os << std::left << std::setw(12) << "ndcg@20" << std::right << std::setw(12) << ndcg20 << '\n';
        os << std::left << std::setw(12) << "n_users" << std::right << std::setw(12) << n_users_evaluated << '\n';
        return os.str();
    }
};

// Per-user mask for ranking: train items for val evaluation, train+val for
// test evaluation.
inline std::vector<std::unordered_set<Index>> evaluation_masks(const InteractionDataset& ds, Split target) {
    std::vector<std::unordered_set<Index>> masks(static_cast<std::size_t>(ds.n_users));
    for (std::size_t k = 0; k < ds.interactions.size(); ++k) {
        const Split s = ds.split_assignment[k];
        const bool masked = (target == Split::val) ? (s == Split::train) : (s == Split::train || s == Split::val);
        if (masked) masks[static_cast<std::size_t>(ds.interactions[k].first)].insert(ds.interactions[k].second);
    }
    return masks;
}

inline std::vector<std::vector<Index>> ground_truth_for(const InteractionDataset& ds, Split target) {
    std::vector<std::vector<Index>> gt(static_cast<std::size_t>(ds.n_users));
    for (std::size_t k = 0; k < ds.interactions.size(); ++k)
        if (ds.split_assignment[k] == target)
            gt[static_cast<std::size_t>(ds.interactions[k].first)].push_back(ds.interactions[k].second);
    return gt;
}

inline MetricsAtK evaluate_embeddings_at_k(const Mat& e_u, const Mat& e_i, const InteractionDataset& ds,
                                           Split target, Index k) {
    const auto masks = evaluation_masks(ds, target);
    const auto gt = ground_truth_for(ds, target);
    std::vector<std::vector<Index>> rankings(static_cast<std::size_t>(ds.n_users));
    for (Index u = 0; u < ds.n_users; ++u)
        if (!gt[static_cast<std::size_t>(u)].empty())
            rankings[static_cast<std::size_t>(u)] = rank_items(e_u, e_i, u, masks[static_cast<std::size_t>(u)]);
    return compute_metrics(rankings, gt, k);
}

inline MetricsTable evaluate_embeddings(const Mat& e_u, const Mat& e_i, const InteractionDataset& ds,
                                        Split target) {
    const auto masks = evaluation_masks(ds, target);
    const auto gt = ground_truth_for(ds, target);
    std::vector<std::vector<Index>> rankings(static_cast<std::size_t>(ds.n_users));
    for (Index u = 0; u < ds.n_users; ++u)
        if (!gt[static_cast<std::size_t>(u)].empty())
            rankings[static_cast<std::size_t>(u)] = rank_items(e_u, e_i, u, masks[static_cast<std::size_t>(u)]);
    const auto m10 = compute_metrics(rankings, gt, 10);
    const auto m20 = compute_metrics(rankings, gt, 20);
    MetricsTable t;
    t.recall10 = m10.recall;
    t.ndcg10 = m10.ndcg;
    t.recall20 = m20.recall;
    t.ndcg20 = m20.ndcg;
    t.n_users_evaluated = m20.n_users_evaluated;
    return t;
}

// Every user gets the global popularity order (train interaction counts,
// ties to the lower index) minus their masked items.
inline std::vector<std::vector<Index>> popularity_baseline(const InteractionDataset& ds, Split target) {
    std::vector<Index> counts(static_cast<std::size_t>(ds.n_items), 0);
    for (std::size_t k = 0; k < ds.interactions.size(); ++k)
        if (ds.split_assignment[k] == Split::train)
            ++counts[static_cast<std::size_t>(ds.interactions[k].second)];
    std::vector<Index> base(static_cast<std::size_t>(ds.n_items));
    std::iota(base.begin(), base.end(), Index{0});
    std::sort(base.begin(), base.end(), [&](Index a, Index b) {
        if (counts[static_cast<std::size_t>(a)] != counts[static_cast<std::size_t>(b)])
            return counts[static_cast<std::size_t>(a)] > counts[static_cast<std::size_t>(b)];
        return a < b;
    });
    const auto masks = evaluation_masks(ds, target);
    std::vector<std::vector<Index>> rankings(static_cast<std::size_t>(ds.n_users));
    for (Index u = 0; u < ds.n_users; ++u) {
        auto& r = rankings[static_cast<std::size_t>(u)];
        r.reserve(base.size());
        for (Index i : base)
            if (!masks[static_cast<std::size_t>(u)].count(i)) r.push_back(i);
    }
    return rankings;
}

}  // namespace sea

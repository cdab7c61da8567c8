#pragma once

#include "sea/data.hpp"
#include "sea/sparse.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <tuple>
#include <vector>

namespace sea {

inline unsigned worker_count() {
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* env = std::getenv("SEA_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1 && static_cast<unsigned>(cap) < n) n = static_cast<unsigned>(cap);
    }
    return n;
}

struct BipartiteGraphs {
    SparseGraph user_to_item;  // n_users x n_items
    SparseGraph item_to_user;  // transpose, same per-edge coefficient
};

// Edge coefficient 1/sqrt(deg(u) * deg(i)) over train interactions.
// Zero-degree users/items get empty rows.
inline BipartiteGraphs build_normalized_bipartite(const InteractionDataset& ds) {
    std::vector<Index> deg_u(static_cast<std::size_t>(ds.n_users), 0);
    std::vector<Index> deg_i(static_cast<std::size_t>(ds.n_items), 0);
    std::vector<std::pair<Index, Index>> edges;
    for (std::size_t k = 0; k < ds.interactions.size(); ++k) {
        if (!ds.split_assignment.empty() && ds.split_assignment[k] != Split::train) continue;
        edges.push_back(ds.interactions[k]);
        ++deg_u[static_cast<std::size_t>(ds.interactions[k].first)];
        ++deg_i[static_cast<std::size_t>(ds.interactions[k].second)];
    }
    if (edges.empty()) throw std::runtime_error("train split is empty, cannot build bipartite graph");
    std::sort(edges.begin(), edges.end());

    std::vector<std::tuple<Index, Index, double>> triples;
    triples.reserve(edges.size());
    for (const auto& [u, i] : edges)
        triples.emplace_back(u, i,
                             1.0 / std::sqrt(static_cast<double>(deg_u[static_cast<std::size_t>(u)]) *
                                             static_cast<double>(deg_i[static_cast<std::size_t>(i)])));

    BipartiteGraphs g;
    g.user_to_item = SparseGraph::from_sorted_triples(ds.n_users, ds.n_items, triples);
    g.item_to_user = g.user_to_item.transpose();
    return g;
}

// Row-wise top-k cosine neighbours (self excluded, ties to the lowest item
// index), binarized, then scaled by 1/sqrt(rowdeg(i) * coldeg(j)) of the
// binary matrix. Zero-norm rows become isolated and are counted in
// n_isolated.
inline SparseGraph build_item_graph(const FeatureMatrix& features, Index k, Index* n_isolated = nullptr) {
    const Mat& f = features.data;
    const Index n = f.rows();
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (k >= n) throw std::invalid_argument("k must be < n_items");

    Vec norms(n);
    for (Index i = 0; i < n; ++i) norms(i) = f.row(i).norm();
    if ((norms.array() == 0.0).all()) throw std::runtime_error("all-zero feature matrix");

    Mat unit = f;
    Index isolated = 0;
    for (Index i = 0; i < n; ++i) {
        if (norms(i) > 0.0)
            unit.row(i) /= norms(i);
        else
            ++isolated;
    }
    if (n_isolated) *n_isolated = isolated;

    std::vector<std::vector<Index>> neighbours(static_cast<std::size_t>(n));
    auto process_rows = [&](Index begin, Index end) {
        std::vector<Index> order;
        for (Index i = begin; i < end; ++i) {
            if (norms(i) == 0.0) continue;  // isolated
            const Vec sims = unit * unit.row(i).transpose();
            order.resize(static_cast<std::size_t>(n));
            std::iota(order.begin(), order.end(), Index{0});
            order.erase(std::remove(order.begin(), order.end(), i), order.end());
            std::stable_sort(order.begin(), order.end(),
                             [&](Index a, Index b) { return sims(a) > sims(b); });
            auto& ns = neighbours[static_cast<std::size_t>(i)];
            ns.assign(order.begin(), order.begin() + k);
            std::sort(ns.begin(), ns.end());
        }
    };

    const unsigned workers = worker_count();
    if (workers <= 1 || n < 256) {
        process_rows(0, n);
    } else {
        std::vector<std::thread> pool;
        const Index chunk = (n + static_cast<Index>(workers) - 1) / static_cast<Index>(workers);
        for (unsigned w = 0; w < workers; ++w) {
            const Index begin = static_cast<Index>(w) * chunk;
            const Index end = std::min<Index>(begin + chunk, n);
            if (begin >= end) break;
            pool.emplace_back(process_rows, begin, end);
        }
        for (auto& t : pool) t.join();
    }

    std::vector<Index> coldeg(static_cast<std::size_t>(n), 0);
    for (const auto& ns : neighbours)
        for (Index j : ns) ++coldeg[static_cast<std::size_t>(j)];

    std::vector<std::tuple<Index, Index, double>> triples;
    triples.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(k));
    for (Index i = 0; i < n; ++i) {
        const double rowdeg = static_cast<double>(neighbours[static_cast<std::size_t>(i)].size());
        for (Index j : neighbours[static_cast<std::size_t>(i)])
            triples.emplace_back(i, j, 1.0 / std::sqrt(rowdeg * static_cast<double>(coldeg[static_cast<std::size_t>(j)])));
    }
    return SparseGraph::from_sorted_triples(n, n, triples);
}

// H^(l) = w_s * Sv H^(l-1) + (1 - w_s) * St H^(l-1); returns the final
// layer only.
inline Mat propagate_item_graph(const SparseGraph& sv, const SparseGraph& st, double w_s, const Mat& h0,
                                Index n_layers) {
    if (h0.rows() != sv.n_rows || h0.rows() != st.n_rows)
        throw std::invalid_argument("item-graph H0 row count mismatch");
    if (w_s < 0.0 || w_s > 1.0) throw std::invalid_argument("w_s must be in [0, 1]");
    Mat h = h0;
    for (Index l = 0; l < n_layers; ++l) h = w_s * sv.multiply(h) + (1.0 - w_s) * st.multiply(h);
    return h;
}

}  // namespace sea

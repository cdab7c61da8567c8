#pragma once

#include "sea/common.hpp"

#include <fstream>
#include <vector>

namespace sea {

// Compressed sparse row matrix. Column indices strictly increasing within
// each row; values finite.
struct SparseGraph {
    Index n_rows = 0;
    Index n_cols = 0;
    std::vector<Index> row_offsets;  // size n_rows + 1
    std::vector<Index> col_indices;
    std::vector<double> values;

    static SparseGraph empty(Index rows, Index cols) {
        SparseGraph g;
        g.n_rows = rows;
        g.n_cols = cols;
        g.row_offsets.assign(static_cast<std::size_t>(rows) + 1, 0);
        return g;
    }

    Index nnz() const { return static_cast<Index>(col_indices.size()); }

    Index row_nnz(Index r) const {
        return row_offsets[static_cast<std::size_t>(r) + 1] - row_offsets[static_cast<std::size_t>(r)];
    }

    // builds from row-major (row, col, value) triples already sorted by
    // (row, col)
    static SparseGraph from_sorted_triples(Index rows, Index cols,
                                           const std::vector<std::tuple<Index, Index, double>>& triples) {
        SparseGraph g = empty(rows, cols);
        g.col_indices.reserve(triples.size());
        g.values.reserve(triples.size());
        for (const auto& [r, c, v] : triples) {
            g.col_indices.push_back(c);
            g.values.push_back(v);
            ++g.row_offsets[static_cast<std::size_t>(r) + 1];
        }
        for (std::size_t r = 0; r < static_cast<std::size_t>(rows); ++r) g.row_offsets[r + 1] += g.row_offsets[r];
        return g;
    }

    SparseGraph transpose() const {
        SparseGraph t = empty(n_cols, n_rows);
        std::vector<Index> count(static_cast<std::size_t>(n_cols), 0);
        for (Index c : col_indices) ++count[static_cast<std::size_t>(c)];
        t.row_offsets.resize(static_cast<std::size_t>(n_cols) + 1);
        t.row_offsets[0] = 0;
        for (Index c = 0; c < n_cols; ++c)
            t.row_offsets[static_cast<std::size_t>(c) + 1] = t.row_offsets[static_cast<std::size_t>(c)] + count[static_cast<std::size_t>(c)];
        t.col_indices.resize(col_indices.size());
        t.values.resize(values.size());
        std::vector<Index> cursor(t.row_offsets.begin(), t.row_offsets.end() - 1);
        for (Index r = 0; r < n_rows; ++r) {
            for (Index k = row_offsets[static_cast<std::size_t>(r)]; k < row_offsets[static_cast<std::size_t>(r) + 1]; ++k) {
                const Index c = col_indices[static_cast<std::size_t>(k)];
                const Index dst = cursor[static_cast<std::size_t>(c)]++;
                t.col_indices[static_cast<std::size_t>(dst)] = r;
                t.values[static_cast<std::size_t>(dst)] = values[static_cast<std::size_t>(k)];
            }
        }
        return t;
    }

    // y = this * x
    Mat multiply(const Mat& x) const {
        if (x.rows() != n_cols)
            throw std::invalid_argument("spmm dimension mismatch: " + std::to_string(n_cols) + " vs " +
                                        std::to_string(x.rows()));
        Mat y = Mat::Zero(n_rows, x.cols());
        for (Index r = 0; r < n_rows; ++r) {
            for (Index k = row_offsets[static_cast<std::size_t>(r)]; k < row_offsets[static_cast<std::size_t>(r) + 1]; ++k) {
                y.row(r) += values[static_cast<std::size_t>(k)] * x.row(col_indices[static_cast<std::size_t>(k)]);
            }
        }
        return y;
    }

    Mat to_dense() const {
        Mat d = Mat::Zero(n_rows, n_cols);
        for (Index r = 0; r < n_rows; ++r)
            for (Index k = row_offsets[static_cast<std::size_t>(r)]; k < row_offsets[static_cast<std::size_t>(r) + 1]; ++k)
                d(r, col_indices[static_cast<std::size_t>(k)]) = values[static_cast<std::size_t>(k)];
        return d;
    }

    // CSV dump `row,col,value`, row-major with ascending columns
    void dump_csv(const std::string& path) const {
        std::ofstream os(path);
        if (!os) throw std::runtime_error("cannot write graph dump: " + path);
        os << "row,col,value\n";
        os.precision(17);
        for (Index r = 0; r < n_rows; ++r)
            for (Index k = row_offsets[static_cast<std::size_t>(r)]; k < row_offsets[static_cast<std::size_t>(r) + 1]; ++k)
                os << r << ',' << col_indices[static_cast<std::size_t>(k)] << ',' << values[static_cast<std::size_t>(k)] << '\n';
    }
};

}  // namespace sea

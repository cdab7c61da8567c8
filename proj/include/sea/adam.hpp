#pragma once

#include "sea/common.hpp"

#include <vector>

namespace sea {

// Adam with bias correction (beta1 = 0.9, beta2 = 0.999, eps = 1e-8). One
// state per tensor; step counter shared across the tensors of one
// optimizer.
struct AdamState {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::int64_t step = 0;
    std::vector<Mat> m;
    std::vector<Mat> v;

    void init(const std::vector<const Mat*>& params) {
        m.clear();
        v.clear();
        for (const Mat* p : params) {
            m.push_back(Mat::Zero(p->rows(), p->cols()));
            v.push_back(Mat::Zero(p->rows(), p->cols()));
        }
        step = 0;
    }

    // In-place descent step: p -= lr * mhat / (sqrt(vhat) + eps)
    void update(std::vector<Mat*> params, const std::vector<const Mat*>& grads, double lr) {
        ++step;
        const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
        const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
        for (std::size_t t = 0; t < params.size(); ++t) {
            m[t] = beta1 * m[t] + (1.0 - beta1) * (*grads[t]);
            v[t] = beta2 * v[t] + (1.0 - beta2) * grads[t]->cwiseProduct(*grads[t]);
            const Mat mhat = m[t] / c1;
            const Mat vhat = v[t] / c2;
            *params[t] -= lr * mhat.cwiseQuotient(vhat.cwiseSqrt() + Mat::Constant(vhat.rows(), vhat.cols(), eps));
        }
    }
};

}  // namespace sea

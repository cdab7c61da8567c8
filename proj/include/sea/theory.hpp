#pragma once

#include "sea/losses.hpp"
#include "sea/params.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace sea {

// ---------------------------------------------------------------------------
// Quadrature and special functions

namespace numerics {

namespace detail {

template <typename F>
double adaptive_simpson_rec(const F& f, double a, double b, double fa, double fm, double fb, double whole,
                            double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Composite adaptive Simpson over uniform initial panels. The panels keep
// sharply peaked integrands visible to the refinement; a plain recursive
// start can see an all-zero stencil and return early.
template <typename F>
double adaptive_simpson(const F& f, double a, double b, double tol = 1e-12, int max_depth = 48,
                        int panels = 16) {
    double total = 0.0;
    const double panel_tol = tol / panels;
    for (int p = 0; p < panels; ++p) {
        const double pa = a + (b - a) * p / panels;
        const double pb = a + (b - a) * (p + 1) / panels;
        const double fa = f(pa), fb = f(pb), fm = f(0.5 * (pa + pb));
        const double whole = (pb - pa) / 6.0 * (fa + 4.0 * fm + fb);
        total += detail::adaptive_simpson_rec(f, pa, pb, fa, fm, fb, whole, panel_tol, max_depth);
    }
    return total;
}

// Regularized lower incomplete gamma P(a, x); series for x < a+1,
// continued fraction otherwise.
inline double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_p domain error");
    if (x == 0.0) return 0.0;
    const double gln = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a, sum = 1.0 / a, del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-15) break;
        }
        return sum * std::exp(-x + a * std::log(x) - gln);
    }
    // Lentz continued fraction for Q(a, x)
    double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-15) break;
    }
    const double q = std::exp(-x + a * std::log(x) - gln) * h;
    return 1.0 - q;
}

inline double gamma_q(double a, double x) { return 1.0 - gamma_p(a, x); }

// upper-tail p-value of a chi-square statistic
inline double chi2_pvalue(double statistic, double dof) {
    if (statistic <= 0.0) return 1.0;
    return gamma_q(0.5 * dof, 0.5 * statistic);
}

struct Chi2Result {
    double statistic = 0.0;
    double dof = 0.0;
    double pvalue = 1.0;
};

// Pearson chi-square against expected counts. Bins with expected count
// below `min_expected` are pooled with their right neighbour (Cochran's
// rule of thumb); dof = pooled_bins - 1.
inline Chi2Result chi2_gof(const std::vector<double>& observed, const std::vector<double>& expected,
                           double min_expected = 5.0) {
    std::vector<double> obs_pooled, exp_pooled;
    double obs_acc = 0.0, exp_acc = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        obs_acc += observed[i];
        exp_acc += expected[i];
        if (exp_acc >= min_expected) {
            obs_pooled.push_back(obs_acc);
            exp_pooled.push_back(exp_acc);
            obs_acc = exp_acc = 0.0;
        }
    }
    if (exp_acc > 0.0 || obs_acc > 0.0) {
        if (!exp_pooled.empty()) {
            obs_pooled.back() += obs_acc;
            exp_pooled.back() += exp_acc;
        } else {
            obs_pooled.push_back(obs_acc);
            exp_pooled.push_back(exp_acc);
        }
    }
    Chi2Result r;
    for (std::size_t i = 0; i < obs_pooled.size(); ++i) {
        const double diff = obs_pooled[i] - exp_pooled[i];
        r.statistic += diff * diff / exp_pooled[i];
    }
    r.dof = static_cast<double>(obs_pooled.size()) - 1.0;
    r.pvalue = r.dof >= 1.0 ? chi2_pvalue(r.statistic, r.dof) : 1.0;
    return r;
}

}  // namespace numerics

// ---------------------------------------------------------------------------
// Angle distribution between random directions in R^n

// normalizer Gamma(n/2) / (Gamma((n-1)/2) sqrt(pi)), via log-gamma
inline double angle_pdf_norm(Index n) {
    const double nn = static_cast<double>(n);
    return std::exp(std::lgamma(0.5 * nn) - std::lgamma(0.5 * (nn - 1.0))) / std::sqrt(M_PI);
}

// density of the angle theta: c_n sin^(n-2)(theta) on [0, pi]
inline double angle_pdf(Index n, double theta) {
    if (n < 2) throw std::invalid_argument("dimension must be >= 2");
    if (theta < 0.0 || theta > M_PI) throw std::invalid_argument("theta must lie in [0, pi]");
    const double s = std::sin(theta);
    if (s <= 0.0) return n == 2 ? angle_pdf_norm(n) : 0.0;
    return std::exp(std::log(angle_pdf_norm(n)) + (static_cast<double>(n) - 2.0) * std::log(s));
}

// density of the cosine eta = cos(theta): c_n (1 - eta^2)^((n-3)/2)
inline double cosine_pdf(Index n, double eta) {
    if (n < 2) throw std::invalid_argument("dimension must be >= 2");
    if (eta < -1.0 || eta > 1.0) throw std::invalid_argument("eta must lie in [-1, 1]");
    const double t = 1.0 - eta * eta;
    const double ex = 0.5 * (static_cast<double>(n) - 3.0);
    if (t <= 0.0) return ex == 0.0 ? angle_pdf_norm(n) : (ex > 0.0 ? 0.0 : INFINITY);
    return std::exp(std::log(angle_pdf_norm(n)) + ex * std::log(t));
}

// exact Var(theta) = c_n \int (theta - pi/2)^2 sin^(n-2) d theta
inline double variance_quadrature(Index n) {
    if (n < 2) throw std::invalid_argument("dimension must be >= 2");
    return numerics::adaptive_simpson(
        [n](double t) { return (t - M_PI_2) * (t - M_PI_2) * angle_pdf(n, t); }, 0.0, M_PI, 1e-13);
}

struct AngleStats {
    Index dim = 0;
    Index n_samples = 0;
    double mean = 0.0;
    double variance = 0.0;
    std::vector<double> bin_edges;   // size bins + 1, uniform over [0, pi]
    std::vector<double> counts;      // size bins
    numerics::Chi2Result chi2;       // fit against angle_pdf
};

// Draws pairs of standard Gaussian vectors, takes arccos of the normalized
// inner product, aggregates moments, a histogram, and a chi-square
// goodness-of-fit statistic against the analytic density.
inline AngleStats sample_angle_distribution(Index n, Index n_samples, Rng& rng, Index bins = 50) {
    if (n < 2) throw std::invalid_argument("dimension must be >= 2");
    if (n_samples < 1000) throw std::invalid_argument("need at least 1000 samples");

    AngleStats st;
    st.dim = n;
    st.n_samples = n_samples;
    st.counts.assign(static_cast<std::size_t>(bins), 0.0);
    st.bin_edges.resize(static_cast<std::size_t>(bins) + 1);
    for (Index b = 0; b <= bins; ++b)
        st.bin_edges[static_cast<std::size_t>(b)] = M_PI * static_cast<double>(b) / static_cast<double>(bins);

    Vec x(n), y(n);
    double sum = 0.0, sum_sq = 0.0;
    for (Index s = 0; s < n_samples; ++s) {
        double nx = 0.0, ny = 0.0;
        do {
            for (Index k = 0; k < n; ++k) x(k) = rng.normal();
            nx = x.norm();
        } while (nx == 0.0);
        do {
            for (Index k = 0; k < n; ++k) y(k) = rng.normal();
            ny = y.norm();
        } while (ny == 0.0);
        const double c = std::clamp(x.dot(y) / (nx * ny), -1.0, 1.0);
        const double theta = std::acos(c);
        sum += theta;
        sum_sq += theta * theta;
        Index b = static_cast<Index>(theta / M_PI * static_cast<double>(bins));
        if (b >= bins) b = bins - 1;
        st.counts[static_cast<std::size_t>(b)] += 1.0;
    }
    st.mean = sum / static_cast<double>(n_samples);
    st.variance = sum_sq / static_cast<double>(n_samples) - st.mean * st.mean;

    std::vector<double> expected(static_cast<std::size_t>(bins));
    for (Index b = 0; b < bins; ++b) {
        const double lo = st.bin_edges[static_cast<std::size_t>(b)];
        const double hi = st.bin_edges[static_cast<std::size_t>(b) + 1];
        expected[static_cast<std::size_t>(b)] =
            static_cast<double>(n_samples) *
            numerics::adaptive_simpson([n](double t) { return angle_pdf(n, t); }, lo, hi, 1e-12);
    }
    st.chi2 = numerics::chi2_gof(st.counts, expected);
    return st;
}

// ---------------------------------------------------------------------------
// CLUB on correlated Gaussian pairs with known mutual information

struct ClubExperiment {
    double rho = 0.0;
    double true_mi = 0.0;       // -0.5 ln(1 - rho^2) per dimension
    double estimate = 0.0;      // CLUB value after likelihood training
    double final_loglik = 0.0;  // mean conditional log-likelihood at the end
};

inline ClubExperiment club_gaussian_experiment(double rho, Index n_samples, Index train_steps, Rng& rng,
                                               Index hidden = 16, Index batch = 256, double lr = 1e-3) {
    if (std::abs(rho) >= 1.0) throw std::invalid_argument("|rho| must be < 1");
    ClubExperiment ex;
    ex.rho = rho;
    ex.true_mi = -0.5 * std::log1p(-rho * rho);

    Mat q(n_samples, 1), g(n_samples, 1);
    const double noise_scale = std::sqrt(1.0 - rho * rho);
    for (Index i = 0; i < n_samples; ++i) {
        q(i, 0) = rng.normal();
        g(i, 0) = rho * q(i, 0) + noise_scale * rng.normal();
    }

    VariationalEstimator est(1, hidden, rng);
    Mat qb(batch, 1), gb(batch, 1);
    double ll = 0.0;
    for (Index s = 0; s < train_steps; ++s) {
        for (Index b = 0; b < batch; ++b) {
            const Index idx = static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(n_samples)));
            qb(b, 0) = q(idx, 0);
            gb(b, 0) = g(idx, 0);
        }
        ll = club_likelihood_step(est, gb, qb, lr);
    }
    ex.final_loglik = ll;
    ex.estimate = club_estimate(est, g, q);
    return ex;
}

}  // namespace sea

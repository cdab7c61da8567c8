#include "sea/theory.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace sea;

TEST_CASE("angle pdf closed forms", "[theory]") {
    // n = 3: p(theta) = sin(theta)/2
    CHECK_THAT(angle_pdf(3, M_PI_2), Catch::Matchers::WithinAbs(0.5, 1e-14));
    CHECK_THAT(angle_pdf(3, M_PI / 6), Catch::Matchers::WithinAbs(0.25, 1e-14));
    // sin term vanishes at the boundary for n >= 3
    CHECK(angle_pdf(3, 0.0) == 0.0);
    CHECK(angle_pdf(64, 0.0) == 0.0);
    CHECK(angle_pdf(64, M_PI) == 0.0);
    // n = 2 is uniform 1/pi
    CHECK_THAT(angle_pdf(2, 1.234), Catch::Matchers::WithinAbs(1.0 / M_PI, 1e-14));
    CHECK_THROWS_AS(angle_pdf(1, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(angle_pdf(3, -0.1), std::invalid_argument);
}

TEST_CASE("angle pdf is symmetric about pi/2 and integrates to 1", "[theory]") {
    for (const Index n : {2, 3, 8, 64, 200}) {
        for (const double t : {0.3, 0.9, 1.4})
            CHECK_THAT(angle_pdf(n, t), Catch::Matchers::WithinRel(angle_pdf(n, M_PI - t), 1e-12));
        const double total =
            numerics::adaptive_simpson([n](double t) { return angle_pdf(n, t); }, 0.0, M_PI, 1e-12);
        INFO("n = " << n);
        CHECK_THAT(total, Catch::Matchers::WithinAbs(1.0, 1e-8));
    }
}

TEST_CASE("cosine pdf closed forms and normalization", "[theory]") {
    // n = 3 is uniform 1/2 on [-1, 1]
    CHECK_THAT(cosine_pdf(3, 0.0), Catch::Matchers::WithinAbs(0.5, 1e-14));
    CHECK_THAT(cosine_pdf(3, 0.77), Catch::Matchers::WithinAbs(0.5, 1e-14));
    CHECK_THROWS_AS(cosine_pdf(3, 1.2), std::invalid_argument);
    for (const Index n : {3, 8, 64}) {
        for (const double e : {0.1, 0.5, 0.9})
            CHECK_THAT(cosine_pdf(n, e), Catch::Matchers::WithinRel(cosine_pdf(n, -e), 1e-12));
        const double total =
            numerics::adaptive_simpson([n](double e) { return cosine_pdf(n, e); }, -1.0, 1.0, 1e-12);
        CHECK_THAT(total, Catch::Matchers::WithinAbs(1.0, 1e-8));
    }
}

TEST_CASE("high dimensions concentrate the cosine near zero", "[theory]") {
    const double tail =
        2.0 * numerics::adaptive_simpson([](double e) { return cosine_pdf(64, e); }, 0.3, 1.0, 1e-12);
    CHECK_THAT(tail, Catch::Matchers::WithinAbs(0.015184131610504, 1e-9));
    CHECK(tail < 0.02);
}

TEST_CASE("angle and cosine densities agree under the change of variables", "[theory]") {
    for (const Index n : {3, 16, 64}) {
        for (const double t : {0.4, 1.0, M_PI_2, 2.2}) {
            const double via_cos = cosine_pdf(n, std::cos(t)) * std::sin(t);
            CHECK_THAT(angle_pdf(n, t), Catch::Matchers::WithinAbs(via_cos, 1e-8));
        }
    }
}

TEST_CASE("variance quadrature matches frozen oracle values", "[theory]") {
    // reference values computed with adaptive Gauss quadrature to 1e-12
    CHECK_THAT(variance_quadrature(2), Catch::Matchers::WithinAbs(0.8224670334241132, 1e-10));
    CHECK_THAT(variance_quadrature(8), Catch::Matchers::WithinAbs(0.14191148, 1e-6));
    CHECK_THAT(variance_quadrature(16), Catch::Matchers::WithinAbs(0.06656851, 1e-6));
    CHECK_THAT(variance_quadrature(32), Catch::Matchers::WithinAbs(0.03224689, 1e-6));
    CHECK_THAT(variance_quadrature(64), Catch::Matchers::WithinAbs(0.01587168, 1e-6));
    CHECK_THAT(variance_quadrature(128), Catch::Matchers::WithinAbs(0.00787385, 1e-6));
}

TEST_CASE("variance at n = 64 is within 5% of 1/62", "[theory]") {
    CHECK_THAT(variance_quadrature(64), Catch::Matchers::WithinRel(1.0 / 62.0, 0.05));
}

TEST_CASE("exact variance decreases strictly over n in [3, 256]", "[theory]") {
    double prev = variance_quadrature(3);
    for (Index n = 4; n <= 256; ++n) {
        const double v = variance_quadrature(n);
        INFO("n = " << n);
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("sampled angles in 2 dimensions are uniform on [0, pi]", "[theory]") {
    Rng rng(41);
    const auto st = sample_angle_distribution(2, 40000, rng);
    CHECK_THAT(st.mean, Catch::Matchers::WithinAbs(M_PI_2, 0.02));
    CHECK_THAT(st.variance, Catch::Matchers::WithinRel(M_PI * M_PI / 12.0, 0.03));
    CHECK(st.chi2.pvalue > 0.001);
}

TEST_CASE("sampled angles at n = 64 concentrate as predicted", "[theory]") {
    Rng rng(42);
    const auto st = sample_angle_distribution(64, 20000, rng);
    CHECK_THAT(st.mean, Catch::Matchers::WithinAbs(M_PI_2, 0.01));
    CHECK_THAT(st.variance, Catch::Matchers::WithinRel(1.0 / 62.0, 0.15));
    CHECK(st.chi2.pvalue > 0.001);
    double count_total = 0.0;
    for (double c : st.counts) count_total += c;
    CHECK(count_total == 20000.0);
    CHECK(st.bin_edges.front() == 0.0);
    CHECK_THAT(st.bin_edges.back(), Catch::Matchers::WithinAbs(M_PI, 1e-12));
}

TEST_CASE("sample_angle_distribution validates arguments", "[theory]") {
    Rng rng(1);
    CHECK_THROWS_AS(sample_angle_distribution(1, 5000, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_angle_distribution(8, 10, rng), std::invalid_argument);
}

TEST_CASE("chi-square helper agrees with known quantiles", "[theory]") {
    // P(X <= x) for chi-square: p-value = Q(dof/2, x/2)
    CHECK_THAT(numerics::chi2_pvalue(3.841458820694124, 1), Catch::Matchers::WithinAbs(0.05, 1e-9));
    CHECK_THAT(numerics::chi2_pvalue(18.307038053275146, 10), Catch::Matchers::WithinAbs(0.05, 1e-9));
    CHECK(numerics::chi2_pvalue(1000.0, 10) < 1e-100);
    CHECK(numerics::chi2_pvalue(0.0, 10) == 1.0);
}

TEST_CASE("club gaussian experiment stays near zero when independent", "[theory]") {
    Rng rng(43);
    const auto ex = club_gaussian_experiment(0.0, 6000, 1500, rng);
    INFO("estimate = " << ex.estimate);
    CHECK(ex.true_mi == 0.0);
    CHECK(std::abs(ex.estimate) <= 0.05);
}

TEST_CASE("club gaussian experiment respects the lower MI bound at rho = 0.5", "[theory]") {
    Rng rng(44);
    const auto ex = club_gaussian_experiment(0.5, 6000, 1500, rng);
    INFO("estimate = " << ex.estimate << " true " << ex.true_mi);
    CHECK_THAT(ex.true_mi, Catch::Matchers::WithinAbs(0.14384103622589045, 1e-12));
    CHECK(ex.estimate >= ex.true_mi - 0.05);
}

TEST_CASE("club gaussian experiment rejects |rho| >= 1", "[theory]") {
    Rng rng(1);
    CHECK_THROWS_AS(club_gaussian_experiment(1.0, 1000, 10, rng), std::invalid_argument);
}

#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "reskern/multisphere.hpp"
#include "reskern/rng.hpp"
#include "reskern/types.hpp"

using namespace reskern;

TEST_CASE("normalization fixed point at the all-ones vector") {
    for (int d : {4, 8}) {
        for (int q : {3, 5}) {
            for (double alpha : {0.25, 1.0}) {
                for (int L = 1; L <= 10; ++L) {
                    KernelParams kp;
                    kp.depth = L;
                    kp.filter = q;
                    kp.pixels = d;
                    kp.channels = 3;
                    kp.alpha = alpha;
                    const CosineVector ones(std::vector<double>(static_cast<std::size_t>(d), 1.0));
                    CHECK(std::abs(rescgpk_multisphere_normalized(ones, kp) - 1.0) <= 1e-12);
                }
            }
        }
    }
}

TEST_CASE("depth-one normalized kernel hand values") {
    KernelParams kp;
    kp.depth = 1;
    kp.filter = 3;
    kp.pixels = 5;
    kp.channels = 3;

    kp.alpha = 1.0;
    const CosineVector zeros(std::vector<double>(5, 0.0));
    CHECK(rescgpk_multisphere_normalized(zeros, kp) ==
          Catch::Approx(1.0 / (2.0 * M_PI)).margin(1e-14));

    kp.alpha = 0.0;
    const CosineVector t = sample_cosine(5, 4);
    CHECK(rescgpk_multisphere_normalized(t, kp) == Catch::Approx(t[0]).margin(1e-15));
}

TEST_CASE("normalized recursion rejects other scaling constants") {
    KernelParams kp;
    kp.depth = 1;
    kp.filter = 3;
    kp.pixels = 4;
    kp.channels = 3;
    kp.cv = 1.5;
    const CosineVector ones(std::vector<double>(4, 1.0));
    CHECK_THROWS_AS(rescgpk_multisphere_normalized(ones, kp), std::invalid_argument);
}

TEST_CASE("two-pixel-window kernel values and contract") {
    KernelParams kp;
    kp.depth = 1;
    kp.filter = 2;
    kp.pixels = 4;
    kp.channels = 3;

    const CosineVector ones(std::vector<double>(4, 1.0));
    const CosineVector zeros(std::vector<double>(4, 0.0));
    for (double beta : {0.0, 1.0}) {
        for (int L : {1, 2, 5}) {
            CHECK(cgpk_appendix_h_shifts(ones, L, beta)[0] == Catch::Approx(1.0).margin(1e-13));
        }
    }
    CHECK(cgpk_appendix_h(zeros, kp, 0.0) == Catch::Approx(1.0 / M_PI).margin(1e-14));
    CHECK(cgpk_appendix_h(zeros, kp, 1.0) == Catch::Approx(1.0 / (2.0 * M_PI)).margin(1e-14));

    CHECK_THROWS_AS(cgpk_appendix_h(zeros, kp, 0.5), std::invalid_argument);
    kp.filter = 3;
    CHECK_THROWS_AS(cgpk_appendix_h(zeros, kp, 1.0), std::invalid_argument);
}

TEST_CASE("fully connected residual kernels at the fixed point") {
    for (int L : {1, 3, 7}) {
        CHECK(fc_res_gpk(1.0, L, 1.0) == Catch::Approx(1.0).margin(1e-14));
        CHECK(fc_res_ntk(1.0, L, 1.0) == Catch::Approx(1.0).margin(1e-13));
    }
    for (double u : {-0.4, 0.2, 0.9}) CHECK(fc_res_gpk(u, 0, 1.0) == u);
}

TEST_CASE("cyclic shift semantics") {
    const CosineVector t(std::vector<double>{0.1, 0.2, 0.3, 0.4});
    const CosineVector s1 = shift(t, 1);
    CHECK(s1[0] == 0.2);
    CHECK(s1[1] == 0.3);
    CHECK(s1[2] == 0.4);
    CHECK(s1[3] == 0.1);

    const CosineVector s0 = shift(t, 0);
    for (int i = 0; i < 4; ++i) CHECK(s0[i] == t[i]);

    for (int i = 0; i < 8; ++i) {
        const CosineVector round = shift(shift(t, i), 4 - (i % 4));
        for (int j = 0; j < 4; ++j) CHECK(round[j] == t[j]);
    }
}

TEST_CASE("kernel normalization helper") {
    CHECK(normalize(5.0, 25.0, 1.0) == Catch::Approx(1.0));
    CHECK(normalize(3.0, 3.0, 3.0) == Catch::Approx(1.0));
    CHECK_THROWS_AS(normalize(1.0, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(normalize(1.0, 1.0, -2.0), std::invalid_argument);
}

TEST_CASE("cosine vectors clamp only inside the tolerance band") {
    CHECK_NOTHROW(CosineVector(std::vector<double>{1.0 + 5e-13, -1.0}));
    CHECK_THROWS_AS(CosineVector(std::vector<double>{1.0 + 1e-11}), std::domain_error);
    const CosineVector c(std::vector<double>{1.0 + 5e-13});
    CHECK(c[0] == 1.0);
}

TEST_CASE("composed kappa1 mean starts from the raw mean") {
    const CosineVector t = sample_cosine(6, 99);
    double mean = 0.0;
    for (double u : t.t) mean += u;
    mean /= 6.0;
    CHECK(kappa1_composed_mean(t, 0) == Catch::Approx(mean).margin(1e-15));
    CHECK(kappa1_composed_mean(t, 1) >= kappa1_composed_mean(t, 0));
}

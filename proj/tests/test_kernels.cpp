#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "reskern/general.hpp"
#include "reskern/linalg.hpp"
#include "reskern/multisphere.hpp"
#include "reskern/rng.hpp"

using namespace reskern;

namespace {

KernelParams make_params(int L, int q, int d, int c0, double alpha, Head head = Head::Eq,
                         bool skip = true) {
    KernelParams kp;
    kp.depth = L;
    kp.filter = q;
    kp.pixels = d;
    kp.channels = c0;
    kp.alpha = alpha;
    kp.head = head;
    kp.skip = skip;
    return kp;
}

}  // namespace

TEST_CASE("self covariance diagonal matches the layer profile") {
    // N_1 = 1/C0, N_2 = (2 c_w + a^2 c_v c_w)/(2 C0), N_l = (1 + a^2 c_v c_w/2) N_{l-1}.
    for (double alpha : {0.0, 0.5, 1.0}) {
        const KernelParams kp = make_params(5, 3, 6, 3, alpha);
        const InputSignal x = sample_multisphere(1, 3, 6, 77).front();
        const auto layers = rescgpk_layers(x, x, kp);
        std::vector<double> expected(5);
        expected[0] = 1.0 / 3.0;
        expected[1] = (2.0 * kp.cw + alpha * alpha * kp.cv * kp.cw) / (2.0 * 3.0);
        for (int l = 2; l < 5; ++l)
            expected[static_cast<std::size_t>(l)] =
                (1.0 + alpha * alpha * kp.cv * kp.cw / 2.0) * expected[static_cast<std::size_t>(l - 1)];
        for (int l = 0; l < 5; ++l)
            for (int p = 0; p < 6; ++p)
                CHECK(layers[static_cast<std::size_t>(l)].sig(p, p) ==
                      Catch::Approx(expected[static_cast<std::size_t>(l)]).margin(1e-12));
    }
}

TEST_CASE("second-level diagonal equals one in the balanced two-channel case") {
    const KernelParams kp = make_params(2, 3, 4, 2, 1.0);
    const InputSignal x = sample_multisphere(1, 2, 4, 3).front();
    const auto layers = rescgpk_layers(x, x, kp);
    CHECK(layers[1].sig(0, 0) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("zero input gives a zero first-level covariance") {
    const KernelParams kp = make_params(2, 3, 4, 3, 1.0);
    InputSignal zero(3, 4);
    const InputSignal z = sample_multisphere(1, 3, 4, 9).front();
    const auto layers = rescgpk_layers(zero, z, kp);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(layers[0].sig(i, j) == 0.0);
    CHECK(rescgpk(zero, z, kp) == Catch::Approx(0.0).margin(1e-14));
}

TEST_CASE("diagonal kernel value matches the closed form") {
    for (double alpha : {0.5, 1.0}) {
        for (int L : {1, 2, 5, 10}) {
            const KernelParams kp = make_params(L, 3, 5, 3, alpha);
            const InputSignal x = sample_multisphere(1, 3, 5, 11).front();
            const double expected = std::pow(1.0 + alpha * alpha, L) / 3.0;
            CHECK(rescgpk(x, x, kp) == Catch::Approx(expected).margin(1e-10));
        }
    }
}

TEST_CASE("single-pixel network reduces to the hand value") {
    // d = q = 1, L = 1, unit input in two channels: (1 + alpha^2)/2.
    for (double alpha : {0.0, 0.7, 1.0}) {
        const KernelParams kp = make_params(1, 1, 1, 2, alpha);
        InputSignal x(2, 1);
        x.at(0, 0) = 1.0;
        x.mark_multisphere();
        CHECK(rescgpk(x, x, kp) ==
              Catch::Approx((1.0 + alpha * alpha) / 2.0).margin(1e-13));
    }
}

TEST_CASE("kernels are symmetric in their arguments") {
    const auto pts = sample_multisphere(2, 3, 5, 21);
    for (bool skip : {true, false}) {
        for (Head head : {Head::Eq, Head::Tr, Head::GAP}) {
            const KernelParams kp = make_params(3, 3, 5, 3, 0.8, head, skip);
            CHECK(rescgpk(pts[0], pts[1], kp) ==
                  Catch::Approx(rescgpk(pts[1], pts[0], kp)).margin(1e-12));
            CHECK(rescntk(pts[0], pts[1], kp) ==
                  Catch::Approx(rescntk(pts[1], pts[0], kp)).margin(1e-12));
        }
    }
}

TEST_CASE("trace and GAP heads are shift averages of the equivariant head") {
    const auto pts = sample_multisphere(2, 3, 5, 33);
    const InputSignal& x = pts[0];
    const InputSignal& z = pts[1];
    for (bool skip : {true, false}) {
        for (bool ntk : {false, true}) {
            auto eval = [&](const InputSignal& a, const InputSignal& b, Head h) {
                const KernelParams kp = make_params(3, 3, 5, 3, 1.0, h, skip);
                return ntk ? rescntk(a, b, kp) : rescgpk(a, b, kp);
            };
            double tr = 0.0, gap = 0.0;
            for (int j = 0; j < 5; ++j) {
                tr += eval(shift_signal(x, j), shift_signal(z, j), Head::Eq);
                for (int j2 = 0; j2 < 5; ++j2)
                    gap += eval(shift_signal(x, j), shift_signal(z, j2), Head::Eq);
            }
            CHECK(eval(x, z, Head::Tr) == Catch::Approx(tr / 5.0).margin(1e-12));
            CHECK(eval(x, z, Head::GAP) == Catch::Approx(gap / 25.0).margin(1e-12));
        }
    }
}

TEST_CASE("alpha zero collapses both kernels to the first-level covariance") {
    const auto pts = sample_multisphere(2, 3, 6, 5);
    const KernelParams kp = make_params(4, 3, 6, 3, 0.0);
    const double sigma11 = pts[0].pixel_dot(pts[1], 0, 0) / 3.0;
    CHECK(rescgpk(pts[0], pts[1], kp) == sigma11);
    CHECK(rescntk(pts[0], pts[1], kp) == sigma11);
}

TEST_CASE("tangent kernel dominates the GP kernel on the diagonal") {
    const auto pts = sample_multisphere(6, 3, 5, 41);
    const KernelParams kp = make_params(3, 3, 5, 3, 1.0);
    for (const auto& x : pts) CHECK(rescntk(x, x, kp) >= rescgpk(x, x, kp));
}

TEST_CASE("backward weights start at the delta profile and sum geometrically") {
    const KernelParams kp = make_params(4, 3, 5, 3, 0.8);
    std::vector<double> ones(5, 1.0);
    auto [x, z] = realize_pair(CosineVector(ones), 3);
    const auto pw = rescntk_p_weights(x, z, kp);
    REQUIRE(pw.size() == 4);
    CHECK(pw[3][0] == Catch::Approx(1.0 / kp.cw));
    for (int j = 1; j < 5; ++j) CHECK(pw[3][static_cast<std::size_t>(j)] == 0.0);
    // At t = 1 the level sums follow (1 + a^2 c_v c_w / 2)^(L-l) / c_w.
    const double growth = 1.0 + kp.alpha * kp.alpha * kp.cv * kp.cw / 2.0;
    for (int l = 1; l <= 4; ++l) {
        double s = 0.0;
        for (double v : pw[static_cast<std::size_t>(l - 1)]) s += v;
        CHECK(s == Catch::Approx(std::pow(growth, 4 - l) / kp.cw).margin(1e-12));
    }
}

TEST_CASE("gram matrices of both kernels are positive semidefinite") {
    const auto pts = sample_multisphere(8, 3, 4, 7);
    const KernelParams kp = make_params(3, 3, 4, 3, 1.0);
    for (bool ntk : {false, true}) {
        SquareMatrix g(8);
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j) {
                const double v = ntk ? rescntk(pts[static_cast<std::size_t>(i)], pts[static_cast<std::size_t>(j)], kp)
                                     : rescgpk(pts[static_cast<std::size_t>(i)], pts[static_cast<std::size_t>(j)], kp);
                const double sx = ntk ? rescntk(pts[static_cast<std::size_t>(i)], pts[static_cast<std::size_t>(i)], kp)
                                      : rescgpk(pts[static_cast<std::size_t>(i)], pts[static_cast<std::size_t>(i)], kp);
                const double sz = ntk ? rescntk(pts[static_cast<std::size_t>(j)], pts[static_cast<std::size_t>(j)], kp)
                                      : rescgpk(pts[static_cast<std::size_t>(j)], pts[static_cast<std::size_t>(j)], kp);
                g(i, j) = normalize(v, sx, sz);
            }
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < i; ++j) {
                const double s = 0.5 * (g(i, j) + g(j, i));
                g(i, j) = s;
                g(j, i) = s;
            }
        const auto ed = sym_eig(g);
        CHECK(ed.values.back() >= -1e-8);
    }
}

TEST_CASE("normalized recursion agrees with the general path") {
    const KernelParams kp = make_params(4, 3, 5, 3, 0.7);
    const CosineVector t = sample_cosine(5, 13);
    const double fast = rescgpk_multisphere_normalized(t, kp);
    const double general = rescgpk_t(t, kp) * 3.0 / std::pow(1.0 + 0.49, 4);
    CHECK(fast == Catch::Approx(general).margin(1e-12));

    // Plain variant against its own general path.
    KernelParams plain = kp;
    plain.skip = false;
    auto [x, z] = realize_pair(t, 3);
    const double fastp = cgpk_multisphere_normalized(t, plain);
    const double generalp = rescgpk(x, z, plain) / rescgpk(x, x, plain);
    CHECK(fastp == Catch::Approx(generalp).margin(1e-12));
}

TEST_CASE("constant cosine vectors reduce to the fully connected kernels") {
    for (int L : {1, 2, 4, 6}) {
        for (double alpha : {0.5, 1.0}) {
            const KernelParams kp = make_params(L, 3, 5, 3, alpha);
            for (int i = 0; i <= 20; ++i) {
                const double u = -1.0 + 2.0 * i / 20.0;
                const CosineVector t(std::vector<double>(5, u));
                CHECK(rescgpk_multisphere_normalized(t, kp) ==
                      Catch::Approx(fc_res_gpk(u, L, alpha)).margin(1e-10));

                auto [x, z] = realize_pair(t, 3);
                const std::vector<double> ones(5, 1.0);
                auto [x1, z1] = realize_pair(CosineVector(ones), 3);
                const double diff = rescntk(x, z, kp) - rescgpk(x, z, kp);
                const double diff1 = rescntk(x1, z1, kp) - rescgpk(x1, z1, kp);
                CHECK(diff / diff1 == Catch::Approx(fc_res_ntk(u, L, alpha)).margin(1e-10));
            }
        }
    }
}

TEST_CASE("residual trace kernel trails the plain one by the composition gap") {
    // Plain minus residual dominates the telescoped kappa1-composition means.
    const double alpha = 1.0;
    for (int L : {1, 3, 6}) {
        const KernelParams kp = make_params(L, 3, 6, 3, alpha);
        for (int rep = 0; rep < 10; ++rep) {
            const CosineVector t = sample_cosine(6, 1000 + 100 * L + rep);
            const double plain = cgpk_multisphere_normalized_tr(t, kp);
            const double res = rescgpk_multisphere_normalized_tr(t, kp);
            double bound = 0.0;
            for (int l = 1; l <= L; ++l)
                bound += (kappa1_composed_mean(t, l) - kappa1_composed_mean(t, l - 1)) /
                         std::pow(1.0 + alpha * alpha, L - l + 1);
            CHECK(plain - res >= bound - 1e-10);
        }
    }
}

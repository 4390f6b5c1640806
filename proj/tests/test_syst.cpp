#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "sysmorse/syst.hpp"

using namespace sysmorse;

namespace {
const double kSqrt8 = 2.0 * std::numbers::sqrt2;
const MarkovPoint kHex{3, 3, 3};
const MarkovPoint kSquare{kSqrt8, kSqrt8, 4};
}

TEST_CASE("systole and minimizers") {
    auto s = systole(kHex);
    CHECK(s.value == doctest::Approx(1.9248473002384139).epsilon(1e-10));
    CHECK(s.minimizers.size() == 3);
    auto sq = systole(kSquare);
    CHECK(sq.value == doctest::Approx(1.7627471740390861).epsilon(1e-9));
    CHECK(sq.minimizers.size() == 2);
    // mapping-class invariance
    CHECK(systole({3, 3, 6}).value == doctest::Approx(s.value).epsilon(1e-12));
}

TEST_CASE("second systole") {
    CHECK(second_systole(kHex) == doctest::Approx(3.5254943480781717).epsilon(1e-9));
    CHECK(second_systole(kSquare) == doctest::Approx(2.6339157938496336).epsilon(1e-9));
    std::mt19937_64 rng(3);
    for (int i = 0; i < 5; ++i) {
        MarkovPoint p = oracles::sample_domain_point(rng);
        CHECK(second_systole(p) > systole(p).value);
    }
}

TEST_CASE("syst at the hexagonal point") {
    SystParams params;
    params.T = 0.1;
    auto v = syst_eval(kHex, params);
    double expected = 1.9248473002384139 - 0.1 * std::log(3.0);
    CHECK(v.value == doctest::Approx(expected).epsilon(1e-6));
    CHECK(v.tail_bound <= params.tail_tol);
    CHECK(v.value < systole(kHex).value);
}

TEST_CASE("syst decreasing in T and below sys") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 6; ++i) {
        MarkovPoint p = oracles::sample_domain_point(rng);
        double sys = systole(p).value;
        double prev = std::numeric_limits<double>::infinity();
        for (double T : {0.05, 0.1, 0.2}) { // increasing T
            SystParams params;
            params.T = T;
            double v = syst_eval(p, params).value;
            CHECK(v < sys);
            CHECK(v < prev); // larger T gives strictly smaller syst
            prev = v;
        }
        // strict positive gap via the cancellation-free route
        for (double T : {0.2, 0.1, 0.05, 0.025}) {
            SystParams params;
            params.T = T;
            CHECK(syst_gap_to_sys(p, params) > 0.0);
        }
    }
}

TEST_CASE("tail certification: doubling the cutoff moves the value less than the bound") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 4; ++i) {
        MarkovPoint p = oracles::sample_domain_point(rng);
        SystParams loose;
        loose.T = 0.15;
        loose.tail_tol = 1e-6;
        auto v1 = syst_eval(p, loose);
        SystParams strict = loose;
        strict.tail_tol = 1e-14;
        strict.cutoff_cap = 80.0;
        auto v2 = syst_eval(p, strict);
        CHECK(std::abs(v1.value - v2.value) <= v1.tail_bound + 1e-15);
    }
}

TEST_CASE("gradient vanishes at both symmetric orbits") {
    for (double T : {0.2, 0.1, 0.05}) {
        SystParams params;
        params.T = T;
        CHECK(syst_grad(kHex, params).tangent.norm() < 1e-12);
        CHECK(syst_grad(kSquare, params).tangent.norm() < 1e-12);
    }
}

TEST_CASE("gradient matches central finite differences at a generic point") {
    MarkovPoint p = point_from_xy(3.1, 3.4, Branch::lower);
    SystParams params;
    params.T = 0.1;
    params.tail_tol = 1e-12;
    auto g = syst_grad(p, params);
    const double h = 1e-5;
    for (int i = 0; i < 2; ++i) {
        Vec3 dir = i == 0 ? g.frame.e1 : g.frame.e2;
        double vp = syst_eval(retract(p.coords() + h * dir), params).value;
        double vm = syst_eval(retract(p.coords() - h * dir), params).value;
        double fd = (vp - vm) / (2 * h);
        CHECK(g.tangent[i] == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("thin-part gradient pairs positively with the short curve") {
    // x near 2 pinches the slope-infinity curve
    double x = 2.02;
    double ymin = 2 * x / std::sqrt(x * x - 4);
    MarkovPoint p = point_from_xy(x, ymin * 1.2, Branch::lower);
    SystParams params;
    params.T = 0.1;
    auto g = syst_grad(p, params);
    auto ents = enumerate_geodesics(p, systole(p).value + 1e-9);
    REQUIRE(ents.size() >= 1);
    Vec3 dl = ents.front().d_length;
    Vec3 gt = g.frame.from_frame(g.tangent);
    CHECK(dl.dot(gt) > 0.0);
}

TEST_CASE("hessian: indices at the two orbits") {
    SystParams params;
    params.T = 0.05;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> hex(syst_hessian(kHex, params));
    CHECK(hex.eigenvalues()[0] < -1e-6);
    CHECK(hex.eigenvalues()[1] < -1e-6);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> sq(syst_hessian(kSquare, params));
    CHECK(sq.eigenvalues()[0] < -1e-6);
    CHECK(sq.eigenvalues()[1] > 1e-6);
}

TEST_CASE("hessian matches value-based second differences") {
    MarkovPoint p = point_from_xy(3.1, 3.4, Branch::lower);
    SystParams params;
    params.T = 0.1;
    params.tail_tol = 1e-12;
    Eigen::Matrix2d H = syst_hessian(p, params);
    TangentFrame f = tangent_frame(p);
    auto val = [&](const MarkovPoint& q) { return syst_eval(q, params).value; };
    const double h = 1e-4;
    double q11 = oracles::second_difference(p, f.e1, h, val);
    double q22 = oracles::second_difference(p, f.e2, h, val);
    Vec3 diag = (f.e1 + f.e2).normalized();
    Vec3 anti = (f.e1 - f.e2).normalized();
    double q12 = (oracles::second_difference(p, diag, h, val) -
                  oracles::second_difference(p, anti, h, val)) /
                 2.0;
    CHECK(H(0, 0) == doctest::Approx(q11).epsilon(1e-4));
    CHECK(H(1, 1) == doctest::Approx(q22).epsilon(1e-4));
    CHECK(H(0, 1) == doctest::Approx(q12).epsilon(1e-4));
    CHECK(H(0, 1) == doctest::Approx(H(1, 0)).epsilon(1e-10));
}

TEST_CASE("nodal syst") {
    NodalSurface bare;
    bare.nodes = 1; // one node, thrice-punctured sphere component: no geodesics
    bare.component_syst = {std::nullopt};
    CHECK(syst_nodal_eval(bare, 0.1) == doctest::Approx(0.0));

    NodalSurface two;
    two.nodes = 2;
    two.component_syst = {1.0, 2.0};
    double expected = -0.1 * std::log(2 + std::exp(-10.0) + std::exp(-20.0));
    CHECK(syst_nodal_eval(two, 0.1) == doctest::Approx(expected).epsilon(1e-12));

    SystParams params;
    params.T = 0.1;
    NodalSurface hexn;
    hexn.nodes = 1;
    hexn.component_syst = {syst_eval(kHex, params).value};
    double v = syst_nodal_eval(hexn, 0.1);
    CHECK(v == doctest::Approx(-1.3e-9).epsilon(0.05));
    CHECK_THROWS_AS(syst_nodal_eval(bare, 1.5), error);
}

TEST_CASE("nodal hessian block spectrum") {
    auto eigs = nodal_hessian_spectrum({{-1.0, 0.5}, {0.7, 2.5}}, 1);
    REQUIRE(eigs.size() == 6);
    int neg = 0;
    for (double e : eigs) {
        CHECK(std::abs(e) > 1e-9);
        if (e < 0) ++neg;
    }
    CHECK(neg == 1); // union of component signs; nodes contribute +2 pairs
}

TEST_CASE("convergence envelope: gap/T bounded by its largest-T value") {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 5; ++i) {
        MarkovPoint p = oracles::sample_domain_point(rng);
        std::vector<double> ratio;
        for (double T : {0.2, 0.1, 0.05, 0.025}) {
            SystParams params;
            params.T = T;
            ratio.push_back(syst_gap_to_sys(p, params) / T);
        }
        double cprime = ratio.front();
        for (size_t k = 0; k < ratio.size(); ++k) {
            CHECK(ratio[k] > 0.0);
            CHECK(ratio[k] <= 1.25 * cprime);
        }
        // the ratio is nonincreasing as T decreases (log-sum monotonicity)
        for (size_t k = 1; k < ratio.size(); ++k) CHECK(ratio[k] <= ratio[k - 1] * (1 + 1e-9));
    }
}

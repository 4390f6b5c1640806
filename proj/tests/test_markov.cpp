#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "sysmorse/markov.hpp"

using namespace sysmorse;

namespace {
const double kSqrt8 = 2.0 * std::numbers::sqrt2;
}

TEST_CASE("markov residual basics") {
    CHECK(markov_residual(3, 3, 3) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(markov_residual(kSqrt8, kSqrt8, 4) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(markov_residual(3, 3, 4) == doctest::Approx(-2.0));
}

TEST_CASE("point_from_xy branches") {
    auto lo = point_from_xy(3, 3, Branch::lower);
    CHECK(lo.z == doctest::Approx(3.0));
    auto hi = point_from_xy(3, 3, Branch::upper);
    CHECK(hi.z == doctest::Approx(6.0));
    CHECK_THROWS_WITH_AS(point_from_xy(2.5, 2.5, Branch::lower), doctest::Contains("NegativeDiscriminant"),
                         error);
}

TEST_CASE("length_of_trace") {
    CHECK(length_of_trace(3.0) == doctest::Approx(1.9248473002384139).epsilon(1e-12));
    CHECK(length_of_trace(2 * std::cosh(1.0)) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_THROWS_AS(length_of_trace(2.0), error);
}

TEST_CASE("tangent frame is orthonormal and orthogonal to the constraint") {
    for (MarkovPoint p : {MarkovPoint{3, 3, 3}, MarkovPoint{kSqrt8, kSqrt8, 4},
                          point_from_xy(3.1, 3.4, Branch::lower)}) {
        TangentFrame f = tangent_frame(p);
        CHECK(std::abs(f.e1.dot(f.e2)) < 1e-12);
        CHECK(f.e1.norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(f.e2.norm() == doctest::Approx(1.0).epsilon(1e-12));
        Vec3 g = residual_gradient(p);
        CHECK(std::abs(f.e1.dot(g)) < 1e-12 * g.norm() + 1e-12);
        CHECK(std::abs(f.e2.dot(g)) < 1e-12 * g.norm() + 1e-12);
    }
    // constraint gradient at the hexagonal point is parallel to (1,1,1)
    Vec3 g = residual_gradient({3, 3, 3});
    CHECK(g.isApprox(Vec3(-3, -3, -3)));
}

TEST_CASE("retract") {
    MarkovPoint p = retract(Vec3(3, 3, 3));
    CHECK(markov_residual(p) == doctest::Approx(0.0).epsilon(1e-12));
    MarkovPoint q = retract(Vec3(3, 3, 3.001));
    CHECK(std::abs(markov_residual(q)) < 1e-12);
    CHECK((q.coords() - Vec3(3, 3, 3.001)).norm() < 1e-3);
}

TEST_CASE("normalize_to_fundamental_domain") {
    auto r = normalize_to_fundamental_domain({3, 3, 6});
    CHECK(r.point.x == doctest::Approx(3));
    CHECK(r.point.z == doctest::Approx(3));
    CHECK(r.move_count == 1);
    auto fixed = normalize_to_fundamental_domain({3, 3, 3});
    CHECK(fixed.move_count == 0);
    auto sorted = normalize_to_fundamental_domain({kSqrt8, 4, kSqrt8});
    CHECK(sorted.move_count == 0);
    CHECK(sorted.point.y == doctest::Approx(kSqrt8));
    CHECK(sorted.point.z == doctest::Approx(4.0));
}

TEST_CASE("enumeration at the hexagonal point") {
    auto ents = enumerate_geodesics({3, 3, 3}, 4.0);
    CHECK(ents.size() == 6);
    int t3 = 0, t6 = 0;
    for (const auto& e : ents) {
        if (std::abs(e.trace - 3) < 1e-12) ++t3;
        if (std::abs(e.trace - 6) < 1e-12) ++t6;
    }
    CHECK(t3 == 3);
    CHECK(t6 == 3);
    CHECK_THROWS_AS(enumerate_geodesics({3, 3, 3}, 0.5), error);
}

TEST_CASE("census equals the holonomy-matrix oracle at random domain points") {
    std::mt19937_64 rng(20240811);
    for (int trial = 0; trial < 20; ++trial) {
        MarkovPoint p = oracles::sample_domain_point(rng, 2.3);
        double cutoff = 8.0;
        auto ents = enumerate_geodesics(p, cutoff);
        auto oracle = oracles::holonomy_census(p, 2 * std::cosh(cutoff / 2), 14);
        REQUIRE(ents.size() == oracle.size());
        for (const auto& e : ents) {
            auto it = oracle.find({e.slope.p, e.slope.q});
            REQUIRE(it != oracle.end());
            CHECK(e.trace == doctest::Approx(it->second).epsilon(1e-9));
        }
    }
}

TEST_CASE("length derivatives match central differences through retraction") {
    std::mt19937_64 rng(7);
    MarkovPoint p = oracles::sample_domain_point(rng);
    auto ents = enumerate_geodesics(p, length_of_trace(std::min({p.x, p.y, p.z})) + 2.5);
    TangentFrame f = tangent_frame(p);
    const double h = 1e-5;
    for (const auto& e : ents) {
        for (const Vec3& dir : {f.e1, f.e2}) {
            auto length_at = [&](const MarkovPoint& q) {
                for (const auto& ge : enumerate_geodesics(q, e.length + 3.0))
                    if (ge.slope == e.slope) return ge.length;
                FAIL("slope disappeared");
                return 0.0;
            };
            double lp = length_at(retract(p.coords() + h * dir));
            double lm = length_at(retract(p.coords() - h * dir));
            double fd = (lp - lm) / (2 * h);
            double an = e.d_length.dot(dir);
            CHECK(std::abs(fd - an) <= tol::derivative_check * std::max(1.0, std::abs(fd)));
        }
    }
}

TEST_CASE("mapping-class invariance of the length multiset") {
    MarkovPoint a{3.05, 3.3, point_from_xy(3.05, 3.3, Branch::lower).z};
    MarkovPoint b{a.y, a.x, a.x * a.y - a.z}; // permutation + Markov move
    auto la = enumerate_geodesics(a, 7.0);
    auto lb = enumerate_geodesics(b, 7.0);
    REQUIRE(la.size() == lb.size());
    std::vector<double> va, vb;
    for (const auto& e : la) va.push_back(e.length);
    for (const auto& e : lb) vb.push_back(e.length);
    std::sort(va.begin(), va.end());
    std::sort(vb.begin(), vb.end());
    for (size_t i = 0; i < va.size(); ++i) CHECK(va[i] == doctest::Approx(vb[i]).epsilon(1e-10));
}

TEST_CASE("chart_xy_gradient and the fold") {
    MarkovPoint p = point_from_xy(3.1, 3.4, Branch::lower);
    auto ents = enumerate_geodesics(p, 4.0);
    // finite differences in the (x,y) chart with z on the lower branch
    const double h = 1e-6;
    for (const auto& e : ents) {
        auto len = [&](double x, double y) {
            MarkovPoint q = point_from_xy(x, y, Branch::lower);
            for (const auto& ge : enumerate_geodesics(q, e.length + 2.0))
                if (ge.slope == e.slope) return ge.length;
            return 0.0;
        };
        auto g = chart_xy_gradient(p, e);
        double fdx = (len(p.x + h, p.y) - len(p.x - h, p.y)) / (2 * h);
        double fdy = (len(p.x, p.y + h) - len(p.x, p.y - h)) / (2 * h);
        CHECK(g[0] == doctest::Approx(fdx).epsilon(1e-4));
        CHECK(g[1] == doctest::Approx(fdy).epsilon(1e-4));
    }
    // fold: 2z = xy at the square point
    MarkovPoint sq{kSqrt8, kSqrt8, 4};
    auto sq_ents = enumerate_geodesics(sq, 2.0);
    CHECK_THROWS_AS(chart_xy_gradient(sq, sq_ents.front()), error);
}

TEST_CASE("slope seed triple matches direct traces") {
    MarkovPoint p = point_from_xy(3.2, 3.9, Branch::lower);
    for (Slope s : {Slope{1, 0}, Slope{0, 1}, Slope{1, 1}, Slope{2, 1}, Slope{1, 2}, Slope{-1, 1},
                    Slope{3, 2}, Slope{-2, 3}}) {
        SeedTriple st = seed_triple_for_slope(p, s);
        bool found = false;
        for (const auto& e : enumerate_geodesics(p, 14.0))
            if (e.slope == s) {
                CHECK(st.t_gamma == doctest::Approx(e.trace).epsilon(1e-10));
                found = true;
            }
        CHECK(found);
        // the triple is itself a Markov triple
        CHECK(std::abs(markov_residual(st.t_gamma, st.t_neighbor, st.t_mediant)) < 1e-6);
    }
}

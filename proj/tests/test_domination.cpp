#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hamflow/catalog.hpp"
#include "hamflow/domination.hpp"
#include "oracles.hpp"

using namespace hamflow;

static IntegratorConfig fast_cfg() {
    IntegratorConfig cfg;
    cfg.energy_tol = 0.0;
    return cfg;
}

TEST_CASE("hyperbolic-drift is 1-dominated with ratio exp(-2)") {
    DominationReport rep = domination_scan(make_hyperbolic_drift(),
                                           Phase4::Zero(), 1, 10.0, fast_cfg());
    CHECK(rep.classification == DominationClass::Dominated);
    CHECK(!rep.trivial_splitting);
    REQUIRE(!rep.ratios.empty());
    for (double r : rep.ratios)
        CHECK(std::abs(r - std::exp(-2.0)) <= 1e-6);
    CHECK(rep.worst == doctest::Approx(std::exp(-2.0)).epsilon(1e-6));
}

TEST_CASE("elliptic-drift: trivial splitting, not dominated for any m") {
    for (int m = 1; m <= 10; ++m) {
        DominationReport rep = domination_scan(make_elliptic_drift(),
                                               Phase4::Zero(), m, 12.0, fast_cfg());
        CHECK(rep.classification == DominationClass::NotDominated);
        CHECK(rep.trivial_splitting);
    }
}

TEST_CASE("swapped direction labels invert the ratio") {
    DominationOptions opt;
    opt.supplied_directions = std::make_pair(Vec2(1, 1), Vec2(1, -1));  // swapped
    DominationReport rep = domination_scan(make_hyperbolic_drift(),
                                           Phase4::Zero(), 1, 6.0, fast_cfg(), opt);
    CHECK(rep.classification == DominationClass::NotDominated);
    for (double r : rep.ratios)
        CHECK(std::abs(r - std::exp(2.0)) <= 1e-5);
}

TEST_CASE("classification is invariant under frame sign flips") {
    for (auto dirs :
         {std::make_pair(Vec2(1, -1), Vec2(1, 1)),
          std::make_pair(Vec2(-1, 1), Vec2(1, 1)),
          std::make_pair(Vec2(1, -1), Vec2(-1, -1))}) {
        DominationOptions opt;
        opt.supplied_directions = dirs;
        DominationReport rep = domination_scan(
            make_hyperbolic_drift(), Phase4::Zero(), 1, 6.0, fast_cfg(), opt);
        CHECK(rep.classification == DominationClass::Dominated);
        CHECK(rep.worst == doctest::Approx(std::exp(-2.0)).epsilon(1e-6));
    }
}

TEST_CASE("domination ratio compounds along multiples of m") {
    DominationOptions opt;
    opt.supplied_directions = std::make_pair(Vec2(1, -1), Vec2(1, 1));
    auto worst = [&](int m) {
        return domination_scan(make_hyperbolic_drift(), Phase4::Zero(), m, 16.0,
                               fast_cfg(), opt)
            .worst;
    };
    double r1 = worst(1);
    for (int k : {2, 3}) {
        double rk = worst(k);
        CHECK(rk <= std::pow(r1, k) * 4.0);
    }
}

TEST_CASE("conservation identity residual") {
    IntegratorConfig cfg = fast_cfg();
    SUBCASE("hyperbolic-drift closed-form factors") {
        double res = conservation_identity_residual(make_hyperbolic_drift(),
                                                    Phase4::Zero(), 2.0, cfg);
        CHECK(res <= 1e-6);
    }
    SUBCASE("translation with supplied orthogonal directions") {
        DominationOptions opt;
        opt.supplied_directions = std::make_pair(Vec2(1, 0), Vec2(0, 1));
        double res = conservation_identity_residual(make_translation(),
                                                    Phase4::Zero(), 3.0, cfg, opt);
        CHECK(res <= 1e-10);
    }
    SUBCASE("time zero is exact") {
        DominationOptions opt;
        opt.supplied_directions = std::make_pair(Vec2(1, 0), Vec2(0, 1));
        CHECK(conservation_identity_residual(make_translation(), Phase4::Zero(),
                                             0.0, cfg, opt) == 0.0);
    }
    SUBCASE("bounded residual along hyperbolic orbits up to t = 10") {
        for (double t : {1.0, 5.0, 10.0}) {
            double res = conservation_identity_residual(
                make_hyperbolic_drift(), Phase4::Zero(), t, cfg);
            CHECK(res <= 1e-5);
        }
    }
}

TEST_CASE("anosov diagnostic on surface patches") {
    IntegratorConfig cfg = fast_cfg();
    SamplingOptions sopt;
    sopt.region = Box4::cube(1e-4);
    sopt.region_set = true;
    SUBCASE("hyperbolic-drift patch: m = 1, theta near exp(-2)") {
        HyperbolicityCertificate cert = anosov_diagnostic(
            make_hyperbolic_drift(), 0.0, 5, 12, 8.0, 3, cfg, {}, sopt);
        CHECK(cert.satisfied);
        CHECK(cert.contraction_m == 1);
        CHECK(std::abs(cert.theta - std::exp(-2.0)) <= 1e-3);
        CHECK(cert.C > 0.0);
    }
    SUBCASE("elliptic-drift surface: never satisfied") {
        HyperbolicityCertificate cert = anosov_diagnostic(
            make_elliptic_drift(), 0.0, 5, 8, 8.0, 3, cfg, {}, sopt);
        CHECK(!cert.satisfied);
        CHECK(cert.n_trivial == 8);
    }
    SUBCASE("empty sample is an error") {
        CHECK_THROWS_AS(anosov_diagnostic(make_elliptic_drift(), 0.0, 5, 0, 8.0,
                                          3, cfg, {}, sopt),
                        EmptyLevelSetError);
    }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "hamflow/catalog.hpp"
#include "hamflow/integrator.hpp"
#include "hamflow/io.hpp"
#include "hamflow/reference.hpp"
#include "oracles.hpp"

using namespace hamflow;

TEST_CASE("translation flow is exact") {
    HamiltonianSystem tr = make_translation();
    IntegratorConfig cfg;
    TangentState ts = integrate_tangent(tr, Phase4::Zero(), 2.5, cfg);
    Phase4 expect(2.5, 0, 0, 0);
    CHECK((ts.y - expect).norm() <= 1e-12);
    CHECK((ts.F - Mat4::Identity()).norm() <= 1e-14);
}

TEST_CASE("time zero returns the identity") {
    HamiltonianSystem hd = make_hyperbolic_drift();
    Phase4 y0(0.1, 0.2, 0.3, 0.4);
    TangentState ts = integrate_tangent(hd, y0, 0.0, {});
    CHECK((ts.y - y0).norm() == 0.0);
    CHECK((ts.F - Mat4::Identity()).norm() == 0.0);
}

TEST_CASE("hyperbolic-drift (y2,y4) block follows the 2x2 exponential") {
    HamiltonianSystem hd = make_hyperbolic_drift();
    IntegratorConfig cfg;
    cfg.dt = 1e-4;
    Phase4 y0(0, 0.1, 0, 0);
    TangentState ts = integrate_tangent(hd, y0, 1.0, cfg);
    Vec2 z = oracle::exp_hyperbolic_block(1.0) * Vec2(0.1, 0.0);
    CHECK(std::abs(ts.y(1) - z(0)) <= 1e-9);
    CHECK(std::abs(ts.y(3) - z(1)) <= 1e-9);
}

TEST_CASE("quadratic tangent flow equals the matrix exponential") {
    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 3; ++rep) {
        Mat4 S = oracle::random_symmetric(rng, 0.5);
        HamiltonianSystem q = make_quadratic(S);
        IntegratorConfig cfg;
        cfg.dt = 1e-3;
        cfg.method = Method::Gauss2;
        cfg.energy_tol = 0.0;
        Phase4 y0(0.02, -0.01, 0.03, 0.015);
        TangentState ts = integrate_tangent(q, y0, 2.0, cfg);
        Mat4 E = oracle::expm_taylor<Mat4>(2.0 * symplectic_J() * S);
        CHECK((ts.F - E).norm() <= 1e-9);
        CHECK((ts.y - E * y0).norm() <= 1e-10);
    }
}

TEST_CASE("bump-rotation time-1 tangent restricted to (e2,e4) is R_alpha") {
    const double alpha = 0.01, r = 0.1, nu = 0.5;
    HamiltonianSystem sys = make_bump_rotation(alpha, r, nu);
    IntegratorConfig cfg;
    cfg.dt = 1e-3;
    cfg.method = Method::Gauss2;
    Phase4 y0(0, 0.03, 0, 0.02);  // rho < r nu = 0.05
    TangentState ts = integrate_tangent(sys, y0, 1.0, cfg);
    Mat2 R;
    R << std::cos(alpha), -std::sin(alpha), std::sin(alpha), std::cos(alpha);
    Mat2 R2;
    R2 << ts.F(1, 1), ts.F(1, 3), ts.F(3, 1), ts.F(3, 3);
    CHECK((R2 - R).norm() <= 1e-6);
}

TEST_CASE("reference flows") {
    Phase4 y0(0.2, 0.01, -0.3, 0.04);
    SUBCASE("translation") {
        auto [y, F] = reference_flow("translation", y0, 1.7);
        CHECK((y - (y0 + 1.7 * Vec4::Unit(0))).norm() == 0.0);
        CHECK((F - Mat4::Identity()).norm() == 0.0);
    }
    SUBCASE("bump-rotation from the symmetry axis point") {
        double alpha = 0.3, r = 0.1, nu = 0.5, rho = 0.03;
        std::ostringstream id;
        id << "bump-rotation(" << alpha << "," << r << "," << nu << ")";
        Phase4 p(0, rho, 0, 0);
        auto [y, F] = reference_flow(id.str(), p, 1.0);
        CHECK(std::abs(y(0) - 1.0) <= 1e-12);
        CHECK(std::abs(y(1) - rho * std::cos(alpha)) <= 1e-10);
        CHECK(std::abs(y(2)) <= 1e-12);
        CHECK(std::abs(y(3) - rho * std::sin(alpha)) <= 1e-10);
        CHECK(F.allFinite());
    }
    SUBCASE("quadratic vs Taylor exponential") {
        std::mt19937_64 rng(3);
        Mat4 S = oracle::random_symmetric(rng, 0.4);
        HamiltonianSystem q = make_quadratic(S);
        auto [y, F] = reference_flow(q.id, y0, 1.3);
        Mat4 E = oracle::expm_taylor<Mat4>(1.3 * symplectic_J() * S);
        CHECK((F - E).norm() <= 1e-12);
        CHECK((y - E * y0).norm() <= 1e-12);
    }
    SUBCASE("no closed form") {
        CHECK_THROWS_AS(reference_flow("realized(translation,0:0:0:0,0.01,0.1)",
                                       y0, 1.0),
                        UnsupportedError);
    }
}

TEST_CASE("symplecticity of long quadratic runs") {
    std::mt19937_64 rng(29);
    Mat4 S = oracle::random_symmetric(rng, 0.5);
    HamiltonianSystem q = make_quadratic(S);
    IntegratorConfig cfg;
    cfg.dt = 1e-3;
    cfg.method = Method::Gauss2;
    cfg.energy_tol = 0.0;
    cfg.box_abort = false;
    TangentState ts = integrate_tangent(q, Phase4(0.01, 0.02, -0.01, 0.0), 10.0, cfg);
    CHECK(symplectic_residual(ts.F) <= 1e-8);
}

TEST_CASE("energy conservation of the implicit midpoint") {
    IntegratorConfig cfg;  // midpoint, dt 1e-3
    cfg.energy_tol = 0.0;
    SUBCASE("polynomial catalog systems conserve to roundoff") {
        for (auto sys : {make_translation(), make_hyperbolic_drift(),
                         make_elliptic_drift()}) {
            Phase4 y0(0, 1e-3, 0, 2e-3);
            double H0 = sys.H(y0);
            OrbitSegment seg = integrate(sys, y0, 10.0, cfg);
            double worst = 0.0;
            for (const auto& s : seg.states)
                worst = std::max(worst, std::abs(sys.H(s.y) - H0));
            CHECK(worst <= 1e-9);
        }
    }
    SUBCASE("bump-rotation inner orbit") {
        HamiltonianSystem sys = make_bump_rotation(0.01, 0.1, 0.5);
        Phase4 y0(0, 0.002, 0, 0.0);
        double H0 = sys.H(y0);
        OrbitSegment seg = integrate(sys, y0, 10.0, cfg);
        double worst = 0.0;
        for (const auto& s : seg.states)
            worst = std::max(worst, std::abs(sys.H(s.y) - H0));
        CHECK(worst <= 1e-9);
    }
}

TEST_CASE("group law on the shared step grid") {
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> steps(1, 2000);
    HamiltonianSystem hd = make_hyperbolic_drift();
    IntegratorConfig cfg;
    cfg.energy_tol = 0.0;
    for (int rep = 0; rep < 3; ++rep) {
        double T1 = cfg.dt * steps(rng), T2 = cfg.dt * steps(rng);
        Phase4 y0(0, 5e-4, 0, -3e-4);
        TangentState a = integrate_tangent(hd, y0, T1, cfg);
        TangentState b = integrate_tangent(hd, a.y, T2, cfg);
        TangentState c = integrate_tangent(hd, y0, T1 + T2, cfg);
        CHECK((b.y - c.y).norm() <= 1e-7);
        CHECK((b.F * a.F - c.F).norm() <= 1e-7);
    }
}

TEST_CASE("oracle agreement at T=1, dt=1e-4 (implicit midpoint)") {
    IntegratorConfig cfg;
    cfg.dt = 1e-4;
    cfg.energy_tol = 0.0;
    SUBCASE("translation") {
        Phase4 y0(0.1, 0.2, 0.3, 0.4);
        auto [yr, Fr] = reference_flow("translation", y0, 1.0);
        TangentState ts = integrate_tangent(make_translation(), y0, 1.0, cfg);
        CHECK((ts.y - yr).norm() <= 1e-8);
        CHECK((ts.F - Fr).norm() <= 1e-6);
    }
    SUBCASE("quadratic") {
        std::mt19937_64 rng(41);
        Mat4 S = oracle::random_symmetric(rng, 0.5);
        HamiltonianSystem q = make_quadratic(S);
        Phase4 y0(0.05, -0.02, 0.01, 0.03);
        auto [yr, Fr] = reference_flow(q.id, y0, 1.0);
        TangentState ts = integrate_tangent(q, y0, 1.0, cfg);
        CHECK((ts.y - yr).norm() <= 1e-8);
        CHECK((ts.F - Fr).norm() <= 1e-6);
    }
    SUBCASE("bump-rotation") {
        HamiltonianSystem sys = make_bump_rotation(0.05, 0.1, 0.5);
        Phase4 y0(0.0, 0.02, 0.0, -0.01);
        auto [yr, Fr] = reference_flow(sys.id, y0, 1.0);
        TangentState ts = integrate_tangent(sys, y0, 1.0, cfg);
        CHECK((ts.y - yr).norm() <= 1e-8);
        CHECK((ts.F - Fr).norm() <= 1e-6);
    }
}

TEST_CASE("rho invariance along bump-rotation orbits") {
    HamiltonianSystem sys = make_bump_rotation(0.05, 0.1, 0.5);
    IntegratorConfig cfg;
    cfg.energy_tol = 0.0;
    Phase4 y0(0.0, 0.04, 0.0, 0.02);
    double rho0 = std::hypot(y0(1), y0(3));
    OrbitSegment seg = integrate(sys, y0, 3.0, cfg);
    for (const auto& s : seg.states)
        CHECK(std::abs(std::hypot(s.y(1), s.y(3)) - rho0) <= 1e-9);
}

TEST_CASE("escape raises EscapeError with the exit time") {
    HamiltonianSystem tr = make_translation();
    tr.domain = Box4::cube(1.0);
    try {
        integrate(tr, Phase4::Zero(), 5.0, {});
        FAIL("expected EscapeError");
    } catch (const EscapeError& e) {
        CHECK(e.exit_time > 0.9);
        CHECK(e.exit_time < 1.2);
    }
}

TEST_CASE("stage Newton divergence raises StepError") {
    // strongly nonlinear field with an absurd step: the midpoint fixed point
    // has no contraction and Newton walks away
    HamiltonianSystem stiff = finite_difference_system(
        "stiff", [](const Phase4& y) { return y(2) + std::cosh(8.0 * y(1)); },
        Box4::cube(1000.0));
    IntegratorConfig cfg;
    cfg.dt = 10.0;
    cfg.newton_max = 12;
    cfg.energy_tol = 0.0;
    CHECK_THROWS_AS(integrate_tangent(stiff, Phase4(0, 1.5, 0, 0), 10.0, cfg),
                    StepError);
}

TEST_CASE("violated energy tolerance raises StepError") {
    HamiltonianSystem sys = make_bump_rotation(0.1, 0.1, 0.5);
    IntegratorConfig cfg;
    cfg.energy_tol = 1e-18;  // unreachably tight
    CHECK_THROWS_AS(integrate(sys, Phase4(0.0, 0.04, 0.0, 0.0), 2.0, cfg),
                    StepError);
}

TEST_CASE("orbit CSV has the declared schema") {
    HamiltonianSystem tr = make_translation();
    OrbitSegment seg = integrate(tr, Phase4::Zero(), 0.01, {});
    std::ostringstream os;
    write_orbit_csv(os, seg, tr);
    std::istringstream is(os.str());
    std::string header;
    std::getline(is, header);
    CHECK(header ==
          "t,y1,y2,y3,y4,H,F11,F12,F13,F14,F21,F22,F23,F24,F31,F32,F33,F34,"
          "F41,F42,F43,F44,sympl_residual");
    int rows = 0;
    std::string line;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == (int)seg.states.size());
}

TEST_CASE("binary checkpoint round-trips bit-exactly") {
    HamiltonianSystem hd = make_hyperbolic_drift();
    OrbitSegment seg = integrate(hd, Phase4(0, 1e-3, 0, 0), 0.05, {});
    std::stringstream buf;
    write_checkpoint(buf, seg);
    OrbitSegment back = read_checkpoint(buf);
    REQUIRE(back.states.size() == seg.states.size());
    for (std::size_t i = 0; i < seg.states.size(); ++i) {
        CHECK(back.states[i].t == seg.states[i].t);
        CHECK((back.states[i].y - seg.states[i].y).norm() == 0.0);
        CHECK((back.states[i].F - seg.states[i].F).norm() == 0.0);
    }
}

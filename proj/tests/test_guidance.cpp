#include <doctest.h>

#include <cmath>
#include <random>

#include "bohm/guidance.hpp"

using namespace bohm;

namespace
{
TwoParticleState default_state()
{
    return TwoParticleState::centered({}, 0.05, 1.0);
}

TwoParticleState moving_state()
{
    return TwoParticleState({.hbar = 0.9, .mass = 1.2},
                            {.sigma0 = 0.3, .center0 = 0.1, .wavenumber = 0.8, .coord_mass = 2.4},
                            {.sigma0 = 0.8, .center0 = -0.2, .wavenumber = -0.5, .coord_mass = 0.6},
                            Correlation::SumNarrow);
}

double pair_error(VelocityPair a, VelocityPair b)
{
    return std::hypot(a.v1 - b.v1, a.v2 - b.v2);
}

double pair_norm(VelocityPair a)
{
    return std::hypot(a.v1, a.v2);
}
}  // namespace

TEST_CASE("velocity vanishes for real initial data")
{
    auto const s = default_state();
    for (double y1 : {-1.0, 0.2, 2.5})
    {
        VelocityPair const v = velocity(s, y1, 0.3, 0.0);
        CHECK(v.v1 == 0.0);
        CHECK(v.v2 == 0.0);
        VelocityPair const fd = velocity_fd(s, y1, 0.3, 0.0, 1e-4);
        CHECK(std::abs(fd.v1) <= 1e-12);
        CHECK(std::abs(fd.v2) <= 1e-12);
    }
}

TEST_CASE("single-mode field: frozen value at u=1, t=2")
{
    // beta = 1/2, v = u beta^2 t / (1 + beta^2 t^2) = 0.5/2
    ModeField const field({.sigma0 = 1, .coord_mass = 1}, {});
    CHECK(field.velocity(1.0, 2.0) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("single-mode field: finite difference of the analytic phase")
{
    // Oracle: v = (hbar/m) d(arg psi)/du, differenced on the closed-form amplitude.
    GaussianMode const mode{.sigma0 = 1, .coord_mass = 1};
    EvolvedMode const e = evolve_mode(mode, {}, 2.0);
    double const h = 1e-5;
    double const dphase = std::arg(e.amplitude(1 + h) / e.amplitude(1 - h)) / (2 * h);
    CHECK(dphase == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("velocity matches velocity_fd at random in-support points")
{
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> z(-3, 3), time(0.05, 4);
    for (auto const& s : {default_state(), moving_state(),
                          TwoParticleState::centered({}, 0.1, 1.0, Correlation::DifferenceNarrow)})
    {
        double worst = 0;
        for (int i = 0; i < 1000; ++i)
        {
            double const t = time(rng);
            EvolvedMode const cm = s.evolve_cm(t), rel = s.evolve_rel(t);
            Position const p
                = to_particles({cm.center + z(rng) * cm.sigma, rel.center + z(rng) * rel.sigma});
            VelocityPair const exact = velocity(s, p.y1, p.y2, t);
            VelocityPair const fd = velocity_fd(s, p.y1, p.y2, t, default_fd_step(s));
            worst = std::max(worst, pair_error(exact, fd) / pair_norm(exact));
        }
        CHECK(worst <= 1e-6);
    }
}

TEST_CASE("velocity_fd converges at second order")
{
    auto const s = moving_state();
    double const t = 0.7;
    VelocityPair const exact = velocity(s, 0.9, -0.4, t);
    double const h = 0.02;
    double const e1 = pair_error(velocity_fd(s, 0.9, -0.4, t, h), exact);
    double const e2 = pair_error(velocity_fd(s, 0.9, -0.4, t, h / 2), exact);
    CHECK(e1 / e2 >= 3.5);
    CHECK(e1 / e2 <= 4.5);
}

TEST_CASE("velocity_fd errors")
{
    auto const s = default_state();
    CHECK_THROWS_AS(velocity_fd(s, 0, 0, 1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(velocity_fd(s, 0, 0, 1, -1e-3), std::invalid_argument);
    CHECK_THROWS_AS(velocity_fd(s, 500, 0, 0, 1e-4), std::domain_error);
    CHECK_THROWS_AS(velocity(s, NAN, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(velocity(s, 0, 0, INFINITY), std::invalid_argument);
}

TEST_CASE("velocity decouples into center-of-mass and relative parts")
{
    auto const s = moving_state();
    double const t = 1.3;
    // Same Y, different y: v1+v2 = 2 v_Y depends on Y only.
    Position const a = to_particles({0.4, -1.0}), b = to_particles({0.4, 2.2});
    VelocityPair const va = velocity(s, a.y1, a.y2, t), vb = velocity(s, b.y1, b.y2, t);
    CHECK(std::abs((va.v1 + va.v2) - (vb.v1 + vb.v2)) <= 1e-12);
    // Same y, different Y: v1-v2 = v_y depends on y only.
    Position const c = to_particles({-0.7, 0.5}), d = to_particles({1.9, 0.5});
    VelocityPair const vc = velocity(s, c.y1, c.y2, t), vd = velocity(s, d.y1, d.y2, t);
    CHECK(std::abs((vc.v1 - vc.v2) - (vd.v1 - vd.v2)) <= 1e-12);
}

TEST_CASE("velocity symmetry of the centered state")
{
    auto const s = default_state();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> pos(-3, 3), time(0, 10);
    for (int i = 0; i < 1000; ++i)
    {
        double const a = pos(rng), b = pos(rng), t = time(rng);
        VelocityPair const v = velocity(s, a, b, t);
        VelocityPair const w = velocity(s, -b, -a, t);
        CHECK(v.v1 == doctest::Approx(-w.v2).epsilon(1e-13));
    }
}

TEST_CASE("mode field is affine in u")
{
    ModeField const field({.sigma0 = 0.3, .center0 = 0.2, .wavenumber = 1.1, .coord_mass = 2},
                          {});
    double const t = 0.8;
    double const u0 = -1.3, u1 = 0.4, u2 = 2.9;
    double const slope01 = (field.velocity(u1, t) - field.velocity(u0, t)) / (u1 - u0);
    double const slope12 = (field.velocity(u2, t) - field.velocity(u1, t)) / (u2 - u1);
    CHECK(std::abs(slope01 - slope12) <= 1e-12);
}

TEST_CASE("continuity residual converges to zero at second order")
{
    for (auto const& s : {default_state(), TwoParticleState::centered({}, 1.0, 1.0)})
    {
        double const t = 0.5;
        ContinuityGrid grid{.points = 41, .h = s.sigma_min(t) / 50, .tau = 1e-3};
        ContinuityResult const coarse = continuity_residual(s, grid, t);
        grid.h /= 2;
        grid.tau /= 2;
        ContinuityResult const fine = continuity_residual(s, grid, t);
        CHECK_FALSE(coarse.grid_too_coarse);
        double const ratio = coarse.l2_norm / fine.l2_norm;
        CHECK(ratio >= 3.5);
        CHECK(ratio <= 4.5);
        CHECK(coarse.max_norm <= 1e-4 * coarse.max_density * coarse.max_speed);
    }
}

TEST_CASE("continuity residual flags a coarse stencil and rejects bad grids")
{
    auto const s = default_state();
    ContinuityGrid grid{.points = 11, .h = 0.05, .tau = 1e-3};
    CHECK(continuity_residual(s, grid, 0.0).grid_too_coarse);
    grid.h = 0;
    CHECK_THROWS_AS(continuity_residual(s, grid, 0.0), std::invalid_argument);
    grid.h = 1e-3;
    grid.points = 1;
    CHECK_THROWS_AS(continuity_residual(s, grid, 0.0), std::invalid_argument);
}

#include "bohm/guidance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bohm
{
namespace
{
void require_finite(double value, char const* name)
{
    if (!std::isfinite(value))
        throw std::invalid_argument(std::string(name) + " must be finite");
}

constexpr double amplitude_floor = 1e-150;
}  // namespace

ModeField::ModeField(GaussianMode const& mode, PhysicalParams const& params)
{
    validate(mode);
    validate(params);
    beta_ = params.hbar / (2 * mode.coord_mass * mode.sigma0 * mode.sigma0);
    if (!std::isfinite(beta_))
        throw std::domain_error("spreading rate overflows: sigma0 is too small");
    center0_ = mode.center0;
    group_velocity_ = params.hbar * mode.wavenumber / mode.coord_mass;
}

GuidanceField::GuidanceField(TwoParticleState const& state)
    : cm_(state.cm_mode(), state.params()), rel_(state.rel_mode(), state.params())
{
}

VelocityPair GuidanceField::velocity(Position p, double t) const
{
    ModePoint const v = mode_velocity(to_modes(p), t);
    // dy1/dt = dY/dt + (dy/dt)/2, dy2/dt = dY/dt - (dy/dt)/2
    double const half = 0.5 * v.rel;
    return {v.cm + half, v.cm - half};
}

VelocityPair velocity(TwoParticleState const& state, double y1, double y2, double t)
{
    require_finite(y1, "y1");
    require_finite(y2, "y2");
    require_finite(t, "t");
    return GuidanceField(state).velocity({y1, y2}, t);
}

double default_fd_step(TwoParticleState const& state)
{
    // The local phase wavelength of a spreading packet stays of order its
    // initial spread, while its position spread only grows, so the initial
    // spreads bound the stencil at every t.
    return 1e-4 * std::min(state.cm_mode().sigma0, state.rel_mode().sigma0);
}

VelocityPair velocity_fd(TwoParticleState const& state,
                         double y1,
                         double y2,
                         double t,
                         double h)
{
    require_finite(y1, "y1");
    require_finite(y2, "y2");
    require_finite(t, "t");
    if (!(h > 0) || !std::isfinite(h))
        throw std::invalid_argument("finite-difference step must be positive");

    auto psi = [&](double a, double b) {
        complex const value = eval_psi(state, a, b, t);
        if (std::abs(value) < amplitude_floor)
            throw std::domain_error("wavefunction amplitude underflows at stencil point");
        return value;
    };

    complex const center = psi(y1, y2);
    complex const d1 = (psi(y1 + h, y2) - psi(y1 - h, y2)) / (2 * h);
    complex const d2 = (psi(y1, y2 + h) - psi(y1, y2 - h)) / (2 * h);
    double const scale = state.params().hbar / state.params().mass;
    return {scale * (d1 / center).imag(), scale * (d2 / center).imag()};
}

//---------------------------------------------------------------------------//

ContinuityResult continuity_residual(TwoParticleState const& state,
                                     ContinuityGrid const& grid,
                                     double t)
{
    if (!(grid.h > 0) || !(grid.tau > 0))
        throw std::invalid_argument("continuity grid needs positive h and tau");
    if (grid.points < 2)
        throw std::invalid_argument("continuity grid needs at least 2 points per axis");
    if (!(grid.half_width_sigmas > 0))
        throw std::invalid_argument("continuity grid half width must be positive");
    require_finite(t, "t");

    GuidanceField const field(state);
    double const h = grid.h;
    double const tau = grid.tau;

    auto rho = [&](double a, double b, double s) { return eval_density(state, a, b, s); };
    auto flux = [&](double a, double b, double s) {
        VelocityPair const v = field.velocity({a, b}, s);
        double const r = rho(a, b, s);
        return VelocityPair{r * v.v1, r * v.v2};
    };

    double const cm_half = grid.half_width_sigmas * state.evolve_cm(t).sigma;
    double const rel_half = grid.half_width_sigmas * state.evolve_rel(t).sigma;
    double const cm_center = state.evolve_cm(t).center;
    double const rel_center = state.evolve_rel(t).center;
    int const n = grid.points;
    double const d_cm = 2 * cm_half / (n - 1);
    double const d_rel = 2 * rel_half / (n - 1);
    // (Y, y) -> (y1, y2) has unit Jacobian, so the cell area carries over.
    double const cell_area = d_cm * d_rel;

    ContinuityResult result;
    result.t = t;
    result.points.reserve(static_cast<std::size_t>(n) * n);
    result.residual.reserve(static_cast<std::size_t>(n) * n);
    result.grid_too_coarse = h > state.sigma_min(t) / 4;

    double sum_sq = 0;
    for (int i = 0; i < n; ++i)
    {
        double const cm = cm_center - cm_half + i * d_cm;
        for (int j = 0; j < n; ++j)
        {
            double const rel = rel_center - rel_half + j * d_rel;
            Position const p = to_particles({cm, rel});

            double const drho_dt = (rho(p.y1, p.y2, t + tau) - rho(p.y1, p.y2, t - tau))
                                   / (2 * tau);
            double const dj1 = (flux(p.y1 + h, p.y2, t).v1 - flux(p.y1 - h, p.y2, t).v1)
                               / (2 * h);
            double const dj2 = (flux(p.y1, p.y2 + h, t).v2 - flux(p.y1, p.y2 - h, t).v2)
                               / (2 * h);
            double const r = drho_dt + dj1 + dj2;

            result.points.push_back(p);
            result.residual.push_back(r);
            result.max_norm = std::max(result.max_norm, std::abs(r));
            result.max_density = std::max(result.max_density, rho(p.y1, p.y2, t));
            result.max_abs_drho_dt = std::max(result.max_abs_drho_dt, std::abs(drho_dt));
            VelocityPair const v = field.velocity(p, t);
            result.max_speed = std::max(result.max_speed, std::hypot(v.v1, v.v2));
            sum_sq += r * r;
        }
    }
    result.l2_norm = std::sqrt(sum_sq * cell_area);
    return result;
}

}  // namespace bohm

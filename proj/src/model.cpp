#include "bohm/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bohm
{
namespace
{
void require_finite(double value, char const* name)
{
    if (!std::isfinite(value))
    {
        throw std::invalid_argument(std::string(name) + " must be finite");
    }
}

double normal_pdf(double x, double mean, double sigma)
{
    double const z = (x - mean) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2 * std::numbers::pi));
}
}  // namespace

void validate(PhysicalParams const& params)
{
    require_finite(params.hbar, "hbar");
    require_finite(params.mass, "mass");
    if (params.hbar <= 0)
        throw std::invalid_argument("hbar must be positive");
    if (params.mass <= 0)
        throw std::invalid_argument("mass must be positive");
}

void validate(GaussianMode const& mode)
{
    require_finite(mode.sigma0, "sigma0");
    require_finite(mode.center0, "center0");
    require_finite(mode.wavenumber, "wavenumber");
    require_finite(mode.coord_mass, "coord_mass");
    // sigma0 == 0 would be the unregularized delta function.
    if (mode.sigma0 <= 0)
        throw std::invalid_argument("sigma0 must be positive");
    if (mode.coord_mass <= 0)
        throw std::invalid_argument("coord_mass must be positive");
}

//---------------------------------------------------------------------------//
// EvolvedMode
//---------------------------------------------------------------------------//

double EvolvedMode::expansion_rate() const
{
    double const bt = beta * t;
    return beta * bt / (1 + bt * bt);
}

double EvolvedMode::velocity(double u) const
{
    return (u - center) * expansion_rate() + group_velocity;
}

double EvolvedMode::density(double u) const
{
    return normal_pdf(u, center, sigma);
}

complex EvolvedMode::amplitude(double u) const
{
    double const norm = std::pow(2 * std::numbers::pi * sigma0 * sigma0, -0.25);
    complex const spread{1.0, beta * t};
    double const du = u - center;
    complex const exponent = -du * du / (4 * sigma0 * width)
                             + complex{0, phase_k * (u - phase_origin) + phase_offset};
    return norm / std::sqrt(spread) * std::exp(exponent);
}

double EvolvedMode::trajectory(double u0) const
{
    double const center_at_zero = center - group_velocity * t;
    return center + (u0 - center_at_zero) * sigma / sigma0;
}

EvolvedMode evolve_mode(GaussianMode const& mode, PhysicalParams const& params, double t)
{
    validate(mode);
    validate(params);
    require_finite(t, "t");

    EvolvedMode result;
    result.t = t;
    result.sigma0 = mode.sigma0;
    result.beta = params.hbar / (2 * mode.coord_mass * mode.sigma0 * mode.sigma0);
    if (!std::isfinite(result.beta))
        throw std::domain_error("spreading rate overflows: sigma0 is too small");
    result.group_velocity = params.hbar * mode.wavenumber / mode.coord_mass;
    result.center = mode.center0 + result.group_velocity * t;
    double const bt = result.beta * t;
    result.sigma = mode.sigma0 * std::hypot(1.0, bt);
    result.width = mode.sigma0 * complex{1.0, bt};
    result.phase_k = mode.wavenumber;
    result.phase_origin = mode.center0;
    result.phase_offset = -params.hbar * mode.wavenumber * mode.wavenumber * t
                          / (2 * mode.coord_mass);
    return result;
}

//---------------------------------------------------------------------------//
// TwoParticleState
//---------------------------------------------------------------------------//

TwoParticleState::TwoParticleState(PhysicalParams params,
                                   GaussianMode cm_mode,
                                   GaussianMode rel_mode,
                                   Correlation correlation)
    : params_(params), cm_(cm_mode), rel_(rel_mode), correlation_(correlation)
{
    validate(params_);
    validate(cm_);
    validate(rel_);
    double const expected_cm = 2 * params_.mass;
    double const expected_rel = 0.5 * params_.mass;
    if (cm_.coord_mass != expected_cm || rel_.coord_mass != expected_rel)
    {
        throw std::invalid_argument(
            "mode masses must be 2m (center of mass) and m/2 (relative)");
    }
}

TwoParticleState TwoParticleState::centered(PhysicalParams params,
                                            double narrow_sigma,
                                            double wide_sigma,
                                            Correlation correlation)
{
    validate(params);
    GaussianMode cm{.coord_mass = 2 * params.mass};
    GaussianMode rel{.coord_mass = 0.5 * params.mass};
    if (correlation == Correlation::SumNarrow)
    {
        cm.sigma0 = narrow_sigma;
        rel.sigma0 = wide_sigma;
    }
    else
    {
        cm.sigma0 = wide_sigma;
        rel.sigma0 = narrow_sigma;
    }
    return TwoParticleState(params, cm, rel, correlation);
}

EvolvedMode TwoParticleState::evolve_cm(double t) const
{
    return evolve_mode(cm_, params_, t);
}

EvolvedMode TwoParticleState::evolve_rel(double t) const
{
    return evolve_mode(rel_, params_, t);
}

double TwoParticleState::sigma_min(double t) const
{
    return std::min(evolve_cm(t).sigma, evolve_rel(t).sigma);
}

//---------------------------------------------------------------------------//

complex eval_psi(TwoParticleState const& state, double y1, double y2, double t)
{
    ModePoint const m = to_modes({y1, y2});
    return state.evolve_cm(t).amplitude(m.cm) * state.evolve_rel(t).amplitude(m.rel);
}

double eval_density(TwoParticleState const& state, double y1, double y2, double t)
{
    ModePoint const m = to_modes({y1, y2});
    return state.evolve_cm(t).density(m.cm) * state.evolve_rel(t).density(m.rel);
}

double constraint_width(TwoParticleState const& state, double t, Combination which)
{
    if (which == Combination::Sum)
        return 2 * state.evolve_cm(t).sigma;
    return state.evolve_rel(t).sigma;
}

Combination narrow_combination(Correlation c)
{
    return c == Correlation::SumNarrow ? Combination::Sum : Combination::Difference;
}

char const* to_string(Observable obs)
{
    switch (obs)
    {
        case Observable::Y1:
            return "y1";
        case Observable::Y2:
            return "y2";
        case Observable::Sum:
            return "y1+y2";
        case Observable::Difference:
            return "y1-y2";
    }
    return "?";
}

double observe(Observable obs, Position p)
{
    switch (obs)
    {
        case Observable::Y1:
            return p.y1;
        case Observable::Y2:
            return p.y2;
        case Observable::Sum:
            return p.y1 + p.y2;
        case Observable::Difference:
            return p.y1 - p.y2;
    }
    return 0;
}

NormalLaw marginal(TwoParticleState const& state, double t, Observable obs)
{
    EvolvedMode const cm = state.evolve_cm(t);
    EvolvedMode const rel = state.evolve_rel(t);
    switch (obs)
    {
        case Observable::Y1:
            return {cm.center + 0.5 * rel.center, std::hypot(cm.sigma, 0.5 * rel.sigma)};
        case Observable::Y2:
            return {cm.center - 0.5 * rel.center, std::hypot(cm.sigma, 0.5 * rel.sigma)};
        case Observable::Sum:
            return {2 * cm.center, 2 * cm.sigma};
        case Observable::Difference:
            return {rel.center, rel.sigma};
    }
    return {};
}

}  // namespace bohm

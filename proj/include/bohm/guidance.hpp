#pragma once

#include <vector>

#include "bohm/model.hpp"

namespace bohm
{

struct VelocityPair
{
    double v1 = 0;
    double v2 = 0;
};

/*!
 * Time-dependent guidance field of one Gaussian mode.
 *
 * For a free Gaussian the field is affine in u:
 *   v(u,t) = (u - c(t)) sigma'(t)/sigma(t) + hbar k / coord_mass
 * so it only needs the mode constants, not an EvolvedMode per call.
 */
class ModeField
{
  public:
    ModeField(GaussianMode const& mode, PhysicalParams const& params);

    double velocity(double u, double t) const
    {
        double const bt = beta_ * t;
        double const rate = beta_ * bt / (1 + bt * bt);
        return (u - center0_ - group_velocity_ * t) * rate + group_velocity_;
    }

    //! Largest value of d(ln sigma)/dt over all t, i.e. beta/2.
    double max_expansion_rate() const { return 0.5 * beta_; }

  private:
    double beta_;
    double center0_;
    double group_velocity_;
};

//! Guidance field of a two-particle state in mode coordinates (Y, y).
class GuidanceField
{
  public:
    explicit GuidanceField(TwoParticleState const& state);

    ModePoint mode_velocity(ModePoint p, double t) const
    {
        return {cm_.velocity(p.cm, t), rel_.velocity(p.rel, t)};
    }

    VelocityPair velocity(Position p, double t) const;

    ModeField const& cm() const { return cm_; }
    ModeField const& rel() const { return rel_; }

  private:
    ModeField cm_;
    ModeField rel_;
};

//! Analytic Bohmian velocities v_k = (hbar/m) Im(d_k psi / psi).
VelocityPair velocity(TwoParticleState const& state, double y1, double y2, double t);

//! Step used by velocity_fd when none is given: 1e-4 of the smallest initial spread.
double default_fd_step(TwoParticleState const& state);

/*!
 * Central-difference estimate of the guidance velocities built only from
 * eval_psi. Throws std::domain_error if |psi| underflows at a stencil point.
 */
VelocityPair velocity_fd(TwoParticleState const& state,
                         double y1,
                         double y2,
                         double t,
                         double h);

//---------------------------------------------------------------------------//
// Continuity equation residual
//---------------------------------------------------------------------------//

/*!
 * Evaluation lattice and stencil for the continuity residual.
 *
 * The residual is sampled on a points x points lattice that spans
 * +-half_width_sigmas spreads of each mode coordinate (Y, y) at time t, mapped
 * into (y1, y2). Derivatives are taken along y1, y2 and t with central
 * differences of spacing h and tau, independent of the lattice pitch.
 */
struct ContinuityGrid
{
    double half_width_sigmas = 5;
    int points = 101;
    double h = 1e-3;
    double tau = 1e-3;
};

struct ContinuityResult
{
    double t = 0;
    std::vector<Position> points;
    std::vector<double> residual;  // aligned with points
    double max_norm = 0;
    double l2_norm = 0;            // sqrt(sum r^2 dA) over the lattice
    double max_density = 0;
    double max_abs_drho_dt = 0;    // magnitude of the time term, for scaling
    double max_speed = 0;          // largest |(v1, v2)| on the lattice
    bool grid_too_coarse = false;  // h > sigma_min(t)/4
};

ContinuityResult continuity_residual(TwoParticleState const& state,
                                     ContinuityGrid const& grid,
                                     double t);

}  // namespace bohm

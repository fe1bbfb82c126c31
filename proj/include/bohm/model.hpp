#pragma once

#include <complex>

namespace bohm
{

using complex = std::complex<double>;

struct PhysicalParams
{
    double hbar = 1.0;
    double mass = 1.0;  // per particle; both particles share it
};

void validate(PhysicalParams const& params);

//! One free-particle Gaussian packet in a single coordinate u.
struct GaussianMode
{
    double sigma0 = 1.0;      // initial position spread
    double center0 = 0.0;     // initial center
    double wavenumber = 0.0;  // k
    double coord_mass = 1.0;  // effective mass of coordinate u
};

void validate(GaussianMode const& mode);

/*!
 * Closed-form free evolution of a GaussianMode at time t.
 *
 * The amplitude is
 *   psi(u,t) = (2 pi sigma0^2)^(-1/4) (1 + i beta t)^(-1/2)
 *              exp(-(u - c(t))^2 / (4 sigma0^2 (1 + i beta t))
 *                  + i k (u - center0) - i hbar k^2 t / (2 coord_mass))
 * with beta = hbar / (2 coord_mass sigma0^2) and c(t) = center0 + hbar k t / coord_mass.
 */
struct EvolvedMode
{
    double t = 0;
    double sigma0 = 1;
    double beta = 0;          // spreading rate, 1/time
    double center = 0;        // c(t)
    double sigma = 1;         // sigma(t)
    double group_velocity = 0;
    complex width;            // s(t) = sigma0 (1 + i beta t)
    double phase_k = 0;       // wavenumber
    double phase_origin = 0;  // center0
    double phase_offset = 0;  // -hbar k^2 t / (2 coord_mass)

    //! d(sigma)/dt / sigma, the slope of the affine guidance field.
    double expansion_rate() const;
    double velocity(double u) const;
    double density(double u) const;
    complex amplitude(double u) const;
    //! Closed-form trajectory through u0 at time 0.
    double trajectory(double u0) const;
};

EvolvedMode evolve_mode(GaussianMode const& mode,
                        PhysicalParams const& params,
                        double t);

enum class Correlation
{
    SumNarrow,         // y1 + y2 is the regularized combination
    DifferenceNarrow,  // y1 - y2 is the regularized combination
};

enum class Combination
{
    Sum,
    Difference,
};

struct Position
{
    double y1 = 0;
    double y2 = 0;
};

//! Center-of-mass Y = (y1 + y2)/2 and relative y = y1 - y2.
struct ModePoint
{
    double cm = 0;
    double rel = 0;
};

inline ModePoint to_modes(Position p)
{
    return {0.5 * (p.y1 + p.y2), p.y1 - p.y2};
}

inline Position to_particles(ModePoint m)
{
    double const half = 0.5 * m.rel;
    return {m.cm + half, m.cm - half};
}

/*!
 * Entangled two-particle state psi(y1,y2,t) = psi_cm(Y,t) psi_rel(y,t).
 *
 * The change of variables (y1,y2) -> (Y,y) has unit Jacobian, so the joint
 * density is the product of the two mode densities with no extra factor.
 * Mode masses are fixed by the transformation: M = 2m for Y and mu = m/2
 * for y.
 */
class TwoParticleState
{
  public:
    TwoParticleState(PhysicalParams params,
                     GaussianMode cm_mode,
                     GaussianMode rel_mode,
                     Correlation correlation);

    /*!
     * Build a state whose narrow combination (y1+y2 for SumNarrow, y1-y2
     * otherwise) has spread `narrow_sigma` at t=0. The narrow argument is
     * the spread of the narrow *mode*: sigma_cm0 for SumNarrow (so the sum
     * has width 2 sigma_cm0) and sigma_rel0 for DifferenceNarrow.
     */
    static TwoParticleState centered(PhysicalParams params,
                                     double narrow_sigma,
                                     double wide_sigma,
                                     Correlation correlation
                                     = Correlation::SumNarrow);

    PhysicalParams const& params() const { return params_; }
    GaussianMode const& cm_mode() const { return cm_; }
    GaussianMode const& rel_mode() const { return rel_; }
    Correlation correlation() const { return correlation_; }

    EvolvedMode evolve_cm(double t) const;
    EvolvedMode evolve_rel(double t) const;

    //! Smallest of the two mode spreads at time t.
    double sigma_min(double t) const;

  private:
    PhysicalParams params_;
    GaussianMode cm_;
    GaussianMode rel_;
    Correlation correlation_;
};

complex eval_psi(TwoParticleState const& state, double y1, double y2, double t);

//! Analytic density, assembled from normal densities rather than |psi|^2.
double eval_density(TwoParticleState const& state, double y1, double y2, double t);

//! Standard deviation of y1+y2 (= 2 sigma_cm) or y1-y2 (= sigma_rel).
double constraint_width(TwoParticleState const& state, double t, Combination which);

//! Analytic mean and spread of the four observables y1, y2, y1+y2, y1-y2.
struct NormalLaw
{
    double mean = 0;
    double sigma = 1;
};

enum class Observable
{
    Y1,
    Y2,
    Sum,
    Difference,
};

inline constexpr Observable all_observables[] = {
    Observable::Y1, Observable::Y2, Observable::Sum, Observable::Difference};

char const* to_string(Observable obs);
double observe(Observable obs, Position p);
NormalLaw marginal(TwoParticleState const& state, double t, Observable obs);

Combination narrow_combination(Correlation c);

}  // namespace bohm

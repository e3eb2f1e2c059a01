#pragma once

#include <span>
#include <vector>

#include "qmeas/interaction.hpp"

namespace qmeas {

/// Second-moment summary of the object state (q, p).
struct ObjectStateSpec {
    double mean_q = 0.0;
    double mean_p = 0.0;
    double sigma_q = 1.0;
    double sigma_p = 0.5;

    /// Throws InvalidState unless both sigmas are positive and
    /// sigma_q * sigma_p >= hbar / 2 (up to 1e-12).
    static ObjectStateSpec make(double mean_q, double mean_p, double sigma_q, double sigma_p,
                                double hbar = kDefaultHbar);
    static ObjectStateSpec minimum_uncertainty(double sigma_q, double hbar = kDefaultHbar,
                                               double mean_q = 0.0, double mean_p = 0.0);
};

/// Second-moment summary of the probe state (Q, P). The plain constructors
/// centre the probe; `displaced` exists for the oracle's asymmetric cases.
struct ProbeStateSpec {
    double mean_Q = 0.0;
    double mean_P = 0.0;
    double sigma_Q = 1.0;
    double sigma_P = 0.5;

    static ProbeStateSpec make(double sigma_Q, double sigma_P, double hbar = kDefaultHbar);
    static ProbeStateSpec minimum_uncertainty(double sigma_Q, double hbar = kDefaultHbar);
    static ProbeStateSpec displaced(double mean_Q, double mean_P, double sigma_Q, double sigma_P,
                                    double hbar = kDefaultHbar);
};

struct ErrorDisturbance {
    double epsilon;
    double eta;
};

/// Legacy error and disturbance, E = Q' - q and D = p' - p, on centred moments.
ErrorDisturbance legacy_error_disturbance(const InteractionParams& params,
                                          const ObjectStateSpec& obj,
                                          const ProbeStateSpec& probe);

/// Gain-referred (input-referred) error and disturbance. For a = 0 or b = 0
/// one side is +infinity; `product` then carries the limit value
/// sigma_Q * sigma_P and `limit_resolved` is set.
struct GainReferred {
    double epsilon_star;
    double eta_star;
    double product;
    bool limit_resolved;
};

GainReferred gain_referred_error_disturbance(const InteractionParams& params,
                                             const ProbeStateSpec& probe);

struct NormalizedMoments {
    double epsilon_tilde;
    double eta_tilde;
};

/// Error and disturbance in units of sigma_q and sigma_p for minimum
/// uncertainty object and probe with balance w = sigma_Q / sigma_q.
/// Throws NonpositiveBalance for w <= 0.
NormalizedMoments normalized_moments(const InteractionParams& params, double w);

/// Relative slack allowed before a bound counts as violated.
inline constexpr double kBoundTolerance = 1e-9;

struct BoundEvaluation {
    double hur_lhs;
    double hur_rhs;
    double our_lhs;
    double our_rhs;
    double circle_lhs;
    double circle_rhs;

    bool hur_satisfied() const;
    bool our_satisfied() const;
    bool circle_satisfied() const;
};

/// Normalized bounds: eps*eta, eps*eta + eps + eta and eps^2 + eta^2, each
/// against 1.
BoundEvaluation evaluate_bounds(const NormalizedMoments& m);

/// Unnormalized bounds from (epsilon, eta, sigma_q, sigma_p): HUR and OUR
/// against hbar/2, the circle on (epsilon/sigma_q)^2 + (eta/sigma_p)^2
/// against 1.
BoundEvaluation evaluate_bounds(const ErrorDisturbance& ed, double sigma_q, double sigma_p,
                                double hbar = kDefaultHbar);

struct UncertaintyReport {
    double epsilon;
    double eta;
    double epsilon_star;
    double eta_star;
    double star_product;
    bool limit_resolved;
    double epsilon_tilde;
    double eta_tilde;
    double w;
    double hur_lhs;
    double our_lhs;
    double circle_lhs;
    BoundEvaluation bounds;
};

UncertaintyReport make_report(const InteractionParams& params, const ObjectStateSpec& obj,
                              const ProbeStateSpec& probe, double hbar = kDefaultHbar);

struct TrajectoryPoint {
    double w;
    double epsilon_tilde;
    double eta_tilde;
};

/// Point-wise normalized_moments over a strictly increasing positive grid.
std::vector<TrajectoryPoint> trajectory(const InteractionParams& params,
                                        std::span<const double> w_grid);

/// n logarithmically spaced points from lo to hi inclusive.
std::vector<double> log_spaced(double lo, double hi, std::size_t n);

inline constexpr std::size_t kDefaultTrajectoryPoints = 200;
inline constexpr double kDefaultWMin = 1e-2;
inline constexpr double kDefaultWMax = 1e2;

std::vector<double> default_w_grid();

/// Params with the given a, b and delta, choosing c = 0 and d = (delta + b c) / a
/// for a != 0, otherwise d = 0 and c = -delta / b.
InteractionParams params_from_gains(double a, double b, double delta);

}  // namespace qmeas

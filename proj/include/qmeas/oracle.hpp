#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "qmeas/distribution.hpp"
#include "qmeas/moments.hpp"
#include "qmeas/wavefunction.hpp"

namespace qmeas {

struct OracleSettings {
    std::size_t joint_points = 1024;
    double joint_span_sigmas = 12.0;
    std::size_t input_points = std::size_t{1} << 16;
    double input_span_sigmas = 12.0;
    std::size_t engine_points = kDefaultGridPoints;
    double engine_span_sigmas = kDefaultSpanSigmas;
    double hbar = kDefaultHbar;
    FourierSign sign = FourierSign::Negative;
};

/// Brute-force wavefunction run against the analytic distribution laws for
/// one (params, object, probe) triple.
struct OracleComparison {
    double norm_position;   // after the interaction
    double norm_momentum;   // after the momentum transform
    double l1_position;     // oracle Q' marginal vs general_output_distributions F_out
    double l1_momentum;     // oracle p' marginal vs g_out
    double variance_F_oracle;
    double variance_F_law;  // b^2 sigma_q^2 + a^2 sigma_Q^2
    double variance_g_oracle;
    double variance_g_law;  // a'^2 sigma_p^2 + b'^2 sigma_P^2

    double variance_F_rel_error() const;
    double variance_g_rel_error() const;
};

/// Object and probe must be minimum-uncertainty Gaussians (the oracle builds
/// them as gaussian_packet states). The analytic densities f, F, g, G come
/// straight from the specs, so they do not share the oracle's transform.
OracleComparison compare_with_oracle(const InteractionParams& params, const ObjectStateSpec& obj,
                                     const ProbeStateSpec& probe, const OracleSettings& settings = {});

/// L1 distance evaluated on the sample points of `sampled`, reading
/// `reference` by interpolation.
double l1_on_samples(const GriddedDistribution& sampled, const GriddedDistribution& reference);

/// Pushes psi x Psi through the interaction onto axes spanning +-12 sigma of
/// each output position marginal, maps the result back with the inverse
/// coordinate map and returns the L1 distance of the joint densities from
/// the product state sampled on the same input axes.
double round_trip_l1(const InteractionParams& params, const ObjectStateSpec& obj, const ProbeStateSpec& probe,
                     std::size_t points = 1024, double hbar = kDefaultHbar,
                     Interpolation interpolation = Interpolation::Quintic);

struct OracleCase {
    std::string name;
    InteractionParams params;
    ObjectStateSpec object;
    ProbeStateSpec probe;
};

inline constexpr std::size_t kRandomOracleCases = 10;

/// Fixed cases (ideal, contractive, swap, a = 0, b = 0, displaced probe)
/// followed by kRandomOracleCases draws from `seed`. All states are
/// minimum-uncertainty Gaussians.
std::vector<OracleCase> oracle_test_matrix(std::uint64_t seed, double hbar = kDefaultHbar);

}  // namespace qmeas

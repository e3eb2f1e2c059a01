#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "qmeas/interaction.hpp"
#include "qmeas/moments.hpp"

namespace qmeas {

/// Uniform 1-D sampling lattice x_i = origin + i * step, i < count.
struct Grid1D {
    double origin = 0.0;
    double step = 1.0;
    std::size_t count = 0;

    double coordinate(std::size_t i) const { return origin + static_cast<double>(i) * step; }
    double last() const { return coordinate(count - 1); }

    /// count points spanning [center - half_width, center + half_width].
    static Grid1D centered(double center, double half_width, std::size_t count);

    friend bool operator==(const Grid1D&, const Grid1D&) = default;
};

inline constexpr std::size_t kMinDistributionSamples = 16;
inline constexpr double kNormalizationTolerance = 1e-6;
inline constexpr std::size_t kDefaultGridPoints = 4096;
inline constexpr double kDefaultSpanSigmas = 10.0;
/// Upper bound on any grid produced by resampling.
inline constexpr std::size_t kMaxGridPoints = std::size_t{1} << 22;

/// Non-negative probability density sampled on a uniform grid. The
/// midpoint rule (step * sum of values) integrates it to 1 within 1e-6.
class GriddedDistribution {
public:
    /// Validates sample count, non-negativity and normalization; throws
    /// InvalidDistribution on failure.
    static GriddedDistribution make(double origin, double step, std::vector<double> values);
    static GriddedDistribution sample(const Grid1D& grid, const std::function<double(double)>& density);

    double origin() const { return grid_.origin; }
    double step() const { return grid_.step; }
    std::size_t size() const { return values_.size(); }
    const Grid1D& grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    double coordinate(std::size_t i) const { return grid_.coordinate(i); }

    double mass() const;
    /// Linear interpolation between samples, zero outside the grid.
    double value_at(double x) const;

    friend bool operator==(const GriddedDistribution&, const GriddedDistribution&) = default;

private:
    GriddedDistribution(Grid1D grid, std::vector<double> values)
        : grid_(grid), values_(std::move(values)) {}

    Grid1D grid_;
    std::vector<double> values_;
};

GriddedDistribution gaussian_density(double mean, double sigma, const Grid1D& grid);
GriddedDistribution gaussian_density(double mean, double sigma,
                                     std::size_t points = kDefaultGridPoints,
                                     double span_sigmas = kDefaultSpanSigmas);

struct MomentSummary {
    double mean;
    double variance;
};

MomentSummary moments(const GriddedDistribution& f);

/// f_k(x) = k f(k x) on the grid (origin / k, step / k). Throws
/// NonpositiveScale for k <= 0.
GriddedDistribution rescale(const GriddedDistribution& f, double k);

/// x -> f(-x).
GriddedDistribution reflect(const GriddedDistribution& f);

/// Resamples onto `grid` by linear interpolation. Throws MismatchedGrids if
/// f carries more than 1e-12 of mass in its edge samples (its true support
/// would extend past the data) and ResolutionExceeded if grid.count exceeds
/// kMaxGridPoints.
GriddedDistribution resample(const GriddedDistribution& f, const Grid1D& grid);

enum class ConvolutionMethod { Auto, Direct, Fft };

/// Direct summation is used below this many output samples in Auto mode.
inline constexpr std::size_t kDirectConvolutionLimit = 4096;

/// (f * g)(x) = integral f(y) g(x - y) dy. Grids with different steps are
/// first brought to the finer step.
GriddedDistribution convolve(const GriddedDistribution& f, const GriddedDistribution& g,
                             ConvolutionMethod method = ConvolutionMethod::Auto);

/// Integral |f - g| over a common grid at the finer of the two steps.
double l1_distance(const GriddedDistribution& f, const GriddedDistribution& g);

/// F_out is the distribution of Q', g_out that of p'.
struct OutputDistributions {
    GriddedDistribution F_out;
    GriddedDistribution g_out;
};

/// Inputs: f(q) and g(p) for the object, F(Q) and G for the probe, where
/// G(x) is the density of -P (the reflection is part of G's construction).
OutputDistributions ideal_output_distributions(const GriddedDistribution& f,
                                               const GriddedDistribution& F,
                                               const GriddedDistribution& g,
                                               const GriddedDistribution& G);

OutputDistributions general_output_distributions(const InteractionParams& params,
                                                 const GriddedDistribution& f,
                                                 const GriddedDistribution& F,
                                                 const GriddedDistribution& g,
                                                 const GriddedDistribution& G);

/// Gain-referred error and disturbance from the probe densities F and G.
GainReferred distribution_error_disturbance(const InteractionParams& params,
                                            const GriddedDistribution& F,
                                            const GriddedDistribution& G);

enum class LimitParameter { A, B };

struct DeltaLimitSettings {
    /// Which gain is driven to zero.
    LimitParameter vary = LimitParameter::A;
    /// The other gain, held fixed.
    double fixed_gain = 1.0;
    double delta = 1.0;
};

/// One step of a limit study. With a -> 0 the columns are
/// L1(F_out, f_{1/b}) and L1(g_out, G_{1/b'}); with b -> 0 they are
/// L1(F_out, F_{1/a}) and L1(g_out, g_{1/a'}). At b = 1 (resp. a = 1) and
/// delta = 1 the targets reduce to f, G_delta (resp. F, g_delta).
struct DeltaLimitRow {
    double gain;
    double l1_position;
    double l1_momentum;
};

/// `sequence` must be strictly decreasing within (0, 1].
std::vector<DeltaLimitRow> delta_limit_study(std::span<const double> sequence,
                                             const GriddedDistribution& f,
                                             const GriddedDistribution& F,
                                             const GriddedDistribution& g,
                                             const GriddedDistribution& G,
                                             const DeltaLimitSettings& settings = {});

/// The four input densities for Gaussian object and probe specs, each on its
/// own grid of `points` samples spanning +-span_sigmas standard deviations.
struct InputDistributions {
    GriddedDistribution f;
    GriddedDistribution F;
    GriddedDistribution g;
    GriddedDistribution G;
};

InputDistributions gaussian_inputs(const ObjectStateSpec& obj, const ProbeStateSpec& probe,
                                   std::size_t points = kDefaultGridPoints,
                                   double span_sigmas = kDefaultSpanSigmas);

}  // namespace qmeas

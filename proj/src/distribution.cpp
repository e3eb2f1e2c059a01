#include "qmeas/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <fmt/format.h>

#include "qmeas/errors.hpp"
#include "qmeas/fft.hpp"

namespace qmeas {

namespace {

constexpr double kTailMassLimit = 1e-12;
constexpr double kSameStepTolerance = 1e-12;

bool same_step(double h1, double h2) {
    return std::abs(h1 - h2) <= kSameStepTolerance * std::max(h1, h2);
}

std::size_t points_to_cover(double lo, double hi, double step) {
    const double n = std::ceil((hi - lo) / step - 1e-9) + 1.0;
    if (!(n <= static_cast<double>(kMaxGridPoints))) {
        throw Error(ErrorKind::ResolutionExceeded,
                    fmt::format("covering [{:g}, {:g}] at step {:g} needs more than {} samples", lo, hi,
                                step, kMaxGridPoints));
    }
    return static_cast<std::size_t>(n);
}

/// Brings f and g to a common step, resampling the coarser of the two.
std::pair<GriddedDistribution, GriddedDistribution> common_step(const GriddedDistribution& f,
                                                                const GriddedDistribution& g) {
    if (same_step(f.step(), g.step())) {
        return {f, g};
    }
    const double h = std::min(f.step(), g.step());
    auto refine = [h](const GriddedDistribution& d) {
        if (d.step() == h) return d;
        return resample(d, {d.origin(), h, points_to_cover(d.origin(), d.grid().last(), h)});
    };
    return {refine(f), refine(g)};
}

GriddedDistribution finish_convolution(double origin, double step, std::vector<double> sums) {
    for (double& v : sums) {
        // Round-off from the transform route can dip just below zero.
        v = std::max(v * step, 0.0);
    }
    return GriddedDistribution::make(origin, step, std::move(sums));
}

}  // namespace

Grid1D Grid1D::centered(double center, double half_width, std::size_t count) {
    if (count < 2 || !(half_width > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "grid needs at least two points and a positive width");
    }
    return {center - half_width, 2.0 * half_width / static_cast<double>(count - 1), count};
}

GriddedDistribution GriddedDistribution::make(double origin, double step, std::vector<double> values) {
    if (!std::isfinite(origin) || !(step > 0.0) || !std::isfinite(step)) {
        throw Error(ErrorKind::InvalidDistribution, "distribution grid needs a finite origin and positive step");
    }
    if (values.size() < kMinDistributionSamples) {
        throw Error(ErrorKind::InvalidDistribution,
                    fmt::format("distribution has {} samples, needs at least {}", values.size(),
                                kMinDistributionSamples));
    }
    for (double v : values) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw Error(ErrorKind::InvalidDistribution, "distribution values must be finite and non-negative");
        }
    }
    const double mass = step * std::accumulate(values.begin(), values.end(), 0.0);
    if (std::abs(mass - 1.0) > kNormalizationTolerance) {
        throw Error(ErrorKind::InvalidDistribution,
                    fmt::format("distribution integrates to {:.12g}, not 1", mass));
    }
    const std::size_t n = values.size();
    return GriddedDistribution(Grid1D{origin, step, n}, std::move(values));
}

GriddedDistribution GriddedDistribution::sample(const Grid1D& grid,
                                                const std::function<double(double)>& density) {
    std::vector<double> values(grid.count);
    for (std::size_t i = 0; i < grid.count; ++i) {
        values[i] = density(grid.coordinate(i));
    }
    return make(grid.origin, grid.step, std::move(values));
}

double GriddedDistribution::mass() const {
    return grid_.step * std::accumulate(values_.begin(), values_.end(), 0.0);
}

double GriddedDistribution::value_at(double x) const {
    const double t = (x - grid_.origin) / grid_.step;
    const double last = static_cast<double>(values_.size() - 1);
    if (!(t >= 0.0) || t > last) {
        return 0.0;
    }
    const auto i = static_cast<std::size_t>(t);
    if (i + 1 >= values_.size()) {
        return values_.back();
    }
    const double frac = t - static_cast<double>(i);
    return values_[i] + frac * (values_[i + 1] - values_[i]);
}

GriddedDistribution gaussian_density(double mean, double sigma, const Grid1D& grid) {
    if (!(sigma > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "Gaussian sigma must be positive");
    }
    const double norm = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
    return GriddedDistribution::sample(grid, [=](double x) {
        const double z = (x - mean) / sigma;
        return norm * std::exp(-0.5 * z * z);
    });
}

GriddedDistribution gaussian_density(double mean, double sigma, std::size_t points, double span_sigmas) {
    return gaussian_density(mean, sigma, Grid1D::centered(mean, span_sigmas * sigma, points));
}

MomentSummary moments(const GriddedDistribution& f) {
    const auto v = f.values();
    const double h = f.step();
    double mean = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        mean += f.coordinate(i) * v[i];
    }
    mean *= h;
    double var = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double dx = f.coordinate(i) - mean;
        var += dx * dx * v[i];
    }
    return {mean, var * h};
}

GriddedDistribution rescale(const GriddedDistribution& f, double k) {
    if (!(k > 0.0) || !std::isfinite(k)) {
        throw Error(ErrorKind::NonpositiveScale, fmt::format("scale factor k = {:g} must be positive", k));
    }
    std::vector<double> values(f.values().begin(), f.values().end());
    for (double& v : values) v *= k;
    return GriddedDistribution::make(f.origin() / k, f.step() / k, std::move(values));
}

GriddedDistribution reflect(const GriddedDistribution& f) {
    std::vector<double> values(f.values().rbegin(), f.values().rend());
    return GriddedDistribution::make(-f.grid().last(), f.step(), std::move(values));
}

GriddedDistribution resample(const GriddedDistribution& f, const Grid1D& grid) {
    if (grid.count > kMaxGridPoints) {
        throw Error(ErrorKind::ResolutionExceeded,
                    fmt::format("resampling onto {} points exceeds the {} point limit", grid.count,
                                kMaxGridPoints));
    }
    const auto v = f.values();
    const double edge_mass = (v.front() + v.back()) * f.step();
    if (edge_mass > kTailMassLimit) {
        throw Error(ErrorKind::MismatchedGrids,
                    fmt::format("cannot resample: {:g} of mass sits on the grid edges", edge_mass));
    }
    std::vector<double> values(grid.count);
    for (std::size_t i = 0; i < grid.count; ++i) {
        values[i] = f.value_at(grid.coordinate(i));
    }
    return GriddedDistribution::make(grid.origin, grid.step, std::move(values));
}

GriddedDistribution convolve(const GriddedDistribution& f_in, const GriddedDistribution& g_in,
                             ConvolutionMethod method) {
    const auto [f, g] = common_step(f_in, g_in);
    const double h = f.step();
    const auto x = f.values();
    const auto y = g.values();
    const std::size_t out_n = x.size() + y.size() - 1;
    if (method == ConvolutionMethod::Auto) {
        method = out_n < kDirectConvolutionLimit ? ConvolutionMethod::Direct : ConvolutionMethod::Fft;
    }
    std::vector<double> sums;
    if (method == ConvolutionMethod::Direct) {
        sums.assign(out_n, 0.0);
        for (std::size_t i = 0; i < x.size(); ++i) {
            for (std::size_t j = 0; j < y.size(); ++j) {
                sums[i + j] += x[i] * y[j];
            }
        }
    } else {
        sums = fft::linear_convolution(x, y);
    }
    return finish_convolution(f.origin() + g.origin(), h, std::move(sums));
}

double l1_distance(const GriddedDistribution& f, const GriddedDistribution& g) {
    const double h = std::min(f.step(), g.step());
    const double lo = std::min(f.origin(), g.origin());
    const double hi = std::max(f.grid().last(), g.grid().last());
    const std::size_t n = points_to_cover(lo, hi, h);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = lo + static_cast<double>(i) * h;
        sum += std::abs(f.value_at(x) - g.value_at(x));
    }
    return sum * h;
}

OutputDistributions ideal_output_distributions(const GriddedDistribution& f, const GriddedDistribution& F,
                                               const GriddedDistribution& g, const GriddedDistribution& G) {
    return {convolve(f, F), convolve(g, G)};
}

OutputDistributions general_output_distributions(const InteractionParams& p, const GriddedDistribution& f,
                                                 const GriddedDistribution& F, const GriddedDistribution& g,
                                                 const GriddedDistribution& G) {
    // Exact cases: Q' = b q, p' = -b' P for a = 0 and Q' = a Q, p' = a' p for
    // b = 0. With unit gains the rescales are the identity and the inputs
    // pass through unchanged.
    if (p.a() == 0.0) {
        return {rescale(f, 1.0 / p.b()), rescale(G, 1.0 / p.b_p())};
    }
    if (p.b() == 0.0) {
        return {rescale(F, 1.0 / p.a()), rescale(g, 1.0 / p.a_p())};
    }
    auto F_out = rescale(convolve(rescale(f, 1.0 / p.b_p()), rescale(F, 1.0 / p.a_p())), 1.0 / p.delta());
    auto g_out = rescale(convolve(rescale(g, 1.0 / p.a()), rescale(G, 1.0 / p.b())), p.delta());
    return {std::move(F_out), std::move(g_out)};
}

GainReferred distribution_error_disturbance(const InteractionParams& p, const GriddedDistribution& F,
                                            const GriddedDistribution& G) {
    const double sF = std::sqrt(moments(F).variance);
    const double sG = std::sqrt(moments(G).variance);
    const double inf = std::numeric_limits<double>::infinity();
    if (p.a() == 0.0) {
        return {0.0, inf, sF * sG, true};
    }
    if (p.b() == 0.0) {
        return {inf, 0.0, sF * sG, true};
    }
    const double eps = (p.a() / p.b()) * sF;
    const double eta = (p.b() / p.a()) * sG;
    return {eps, eta, eps * eta, false};
}

std::vector<DeltaLimitRow> delta_limit_study(std::span<const double> sequence, const GriddedDistribution& f,
                                             const GriddedDistribution& F, const GriddedDistribution& g,
                                             const GriddedDistribution& G, const DeltaLimitSettings& s) {
    if (sequence.empty()) {
        throw Error(ErrorKind::InvalidArgument, "limit study needs at least one gain value");
    }
    for (std::size_t i = 0; i < sequence.size(); ++i) {
        if (!(sequence[i] > 0.0 && sequence[i] <= 1.0)) {
            throw Error(ErrorKind::InvalidArgument, "limit study gains must lie in (0, 1]");
        }
        if (i > 0 && !(sequence[i] < sequence[i - 1])) {
            throw Error(ErrorKind::InvalidArgument, "limit study gains must be strictly decreasing");
        }
    }
    if (!(s.fixed_gain > 0.0) || !(s.delta > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "limit study needs a positive fixed gain and delta");
    }

    const bool vary_a = s.vary == LimitParameter::A;
    // Limits of the output distributions as the varied gain goes to zero.
    const auto position_target = vary_a ? rescale(f, 1.0 / s.fixed_gain) : rescale(F, 1.0 / s.fixed_gain);
    const auto momentum_target = vary_a ? rescale(G, s.delta / s.fixed_gain) : rescale(g, s.delta / s.fixed_gain);

    std::vector<DeltaLimitRow> rows;
    rows.reserve(sequence.size());
    for (double x : sequence) {
        const auto params = vary_a ? params_from_gains(x, s.fixed_gain, s.delta)
                                   : params_from_gains(s.fixed_gain, x, s.delta);
        const auto out = general_output_distributions(params, f, F, g, G);
        rows.push_back({x, l1_distance(out.F_out, position_target), l1_distance(out.g_out, momentum_target)});
    }
    return rows;
}

InputDistributions gaussian_inputs(const ObjectStateSpec& obj, const ProbeStateSpec& probe, std::size_t points,
                                   double span_sigmas) {
    // G(x) is the density of -P.
    return {gaussian_density(obj.mean_q, obj.sigma_q, points, span_sigmas),
            gaussian_density(probe.mean_Q, probe.sigma_Q, points, span_sigmas),
            gaussian_density(obj.mean_p, obj.sigma_p, points, span_sigmas),
            gaussian_density(-probe.mean_P, probe.sigma_P, points, span_sigmas)};
}

}  // namespace qmeas

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "qmeas/distribution.hpp"
#include "qmeas/errors.hpp"
#include "qmeas/moments.hpp"
#include "qmeas/oracle.hpp"
#include "qmeas/verify.hpp"

using namespace qmeas;

namespace {

double normal_pdf(double x, double mean, double sigma) {
    const double z = (x - mean) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2 * std::numbers::pi));
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

/// L1 distance between N(0, s1) and N(0, s2), s1 < s2: the densities cross at
/// +-x*, so the integral is 4 [Phi(x*/s1) - Phi(x*/s2)].
double gaussian_l1(double s1, double s2) {
    const double x = s1 * s2 * std::sqrt(2 * std::log(s2 / s1) / (s2 * s2 - s1 * s1));
    return 4 * (normal_cdf(x / s1) - normal_cdf(x / s2));
}

/// Largest deviation from a reference density on the sample points.
double max_deviation(const GriddedDistribution& f, double mean, double sigma) {
    double m = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        m = std::max(m, std::abs(f.values()[i] - normal_pdf(f.coordinate(i), mean, sigma)));
    }
    return m;
}

GriddedDistribution uniform_unit(std::size_t n) {
    const double h = 1.0 / static_cast<double>(n);
    return GriddedDistribution::make(0.5 * h, h, std::vector<double>(n, 1.0));
}

/// Textbook O(nm) convolution on a shared step.
std::vector<double> naive_convolution(const GriddedDistribution& f, const GriddedDistribution& g) {
    std::vector<double> out(f.size() + g.size() - 1, 0.0);
    for (std::size_t i = 0; i < f.size(); ++i) {
        for (std::size_t j = 0; j < g.size(); ++j) out[i + j] += f.values()[i] * g.values()[j] * f.step();
    }
    return out;
}

GriddedDistribution mixture(std::mt19937_64& rng, const Grid1D& grid) {
    std::uniform_real_distribution<double> mean(-2, 2), sd(0.3, 1.2), weight(0.2, 1.0);
    const double w1 = weight(rng), w2 = weight(rng);
    const double m1 = mean(rng), m2 = mean(rng), s1 = sd(rng), s2 = sd(rng);
    return GriddedDistribution::sample(grid, [=](double x) {
        return (w1 * normal_pdf(x, m1, s1) + w2 * normal_pdf(x, m2, s2)) / (w1 + w2);
    });
}

}  // namespace

TEST(Gridded, Validation) {
    EXPECT_THROW(GriddedDistribution::make(0, 0.1, std::vector<double>(8, 1.25)), Error);
    std::vector<double> neg(16, 1.0 / 1.6);
    neg[3] = -0.1;
    neg[4] += 0.1;
    EXPECT_THROW(GriddedDistribution::make(0, 0.1, neg), Error);
    EXPECT_THROW(GriddedDistribution::make(0, 0.1, std::vector<double>(16, 1.0)), Error);
    EXPECT_THROW(GriddedDistribution::make(0, -0.1, std::vector<double>(16, 1.0 / 1.6)), Error);
    EXPECT_NO_THROW(GriddedDistribution::make(0, 0.1, std::vector<double>(16, 1.0 / 1.6)));
}

TEST(Moments, UnitGaussian) {
    const auto f = gaussian_density(0.0, 1.0, 4096, 8.0);
    const auto m = moments(f);
    EXPECT_NEAR(m.mean, 0.0, 1e-9);
    EXPECT_NEAR(m.variance, 1.0, 1e-6);
}

TEST(Moments, Uniform) {
    const auto m = moments(uniform_unit(4096));
    EXPECT_NEAR(m.mean, 0.5, 1e-12);
    EXPECT_NEAR(m.variance, 1.0 / 12.0, 1e-6);
}

TEST(Rescale, Uniform) {
    const auto f = rescale(uniform_unit(1000), 2.0);
    EXPECT_NEAR(moments(f).mean, 0.25, 1e-12);
    for (const double v : f.values()) EXPECT_DOUBLE_EQ(v, 2.0);
    EXPECT_DOUBLE_EQ(f.origin() - 0.5 * f.step(), 0.0);
    EXPECT_DOUBLE_EQ(f.grid().last() + 0.5 * f.step(), 0.5);
}

TEST(Rescale, GaussianWidth) {
    const auto f = rescale(gaussian_density(0.0, 1.0), 2.0);
    EXPECT_NEAR(moments(f).variance, 0.25, 1e-6);
    EXPECT_LT(max_deviation(f, 0.0, 0.5), 1e-12);
}

TEST(Rescale, IdentityAndErrors) {
    const auto f = gaussian_density(0.3, 0.7);
    EXPECT_EQ(rescale(f, 1.0), f);
    EXPECT_THROW(rescale(f, 0.0), Error);
    EXPECT_THROW(rescale(f, -2.0), Error);
}

TEST(Reflect, MirrorsMean) {
    const auto f = gaussian_density(1.5, 0.4);
    const auto r = reflect(f);
    EXPECT_NEAR(moments(r).mean, -1.5, 1e-9);
    EXPECT_NEAR(r.mass(), 1.0, 1e-12);
}

TEST(Convolve, GaussianWidthsAdd) {
    const auto f = gaussian_density(0.0, 1.0);
    const auto out = convolve(f, f);
    EXPECT_NEAR(moments(out).variance, 2.0, 1e-6);
    EXPECT_LT(max_deviation(out, 0.0, std::sqrt(2.0)), 1e-9);
    EXPECT_NEAR(out.mass(), 1.0, 1e-6);
}

TEST(Convolve, SharpKernelReproducesInput) {
    const auto f = gaussian_density(0.4, 1.0);
    const auto delta = gaussian_density(0.0, 1e-3, 256, 8.0);
    EXPECT_LE(l1_distance(convolve(f, delta), f), 1e-3);
    EXPECT_LE(l1_distance(convolve(delta, f), f), 1e-3);
}

TEST(Convolve, VarianceAdditivityOnMixtures) {
    std::mt19937_64 rng(43);
    const auto grid = Grid1D::centered(0.0, 12.0, 2048);
    for (int k = 0; k < 20; ++k) {
        const auto f = mixture(rng, grid);
        const auto g = mixture(rng, grid);
        const double expect = moments(f).variance + moments(g).variance;
        EXPECT_NEAR(moments(convolve(f, g)).variance / expect, 1.0, 1e-4);
    }
}

TEST(Convolve, DirectAndFftAgreeWithNaiveSum) {
    const auto f = gaussian_density(-0.5, 0.8, 700, 10.0);
    const Grid1D kernel{f.origin() + 3.0, f.step(), 300};
    const double centre = kernel.coordinate(150);
    const auto g = GriddedDistribution::sample(kernel, [&](double x) { return normal_pdf(x, centre, 0.5); });
    const auto naive = naive_convolution(f, g);
    for (const auto method : {ConvolutionMethod::Direct, ConvolutionMethod::Fft, ConvolutionMethod::Auto}) {
        const auto out = convolve(f, g, method);
        ASSERT_EQ(out.size(), naive.size());
        EXPECT_DOUBLE_EQ(out.origin(), f.origin() + g.origin());
        for (std::size_t i = 0; i < naive.size(); ++i) EXPECT_NEAR(out.values()[i], naive[i], 1e-13);
    }
}

TEST(Convolve, MixedStepsResampleCoarser) {
    const auto f = gaussian_density(0.0, 1.0, 1024, 10.0);
    const auto g = gaussian_density(1.0, 0.5, 4096, 10.0);
    const auto out = convolve(f, g);
    EXPECT_NEAR(out.step(), g.step(), 1e-15);
    EXPECT_NEAR(moments(out).mean, 1.0, 1e-6);
    EXPECT_NEAR(moments(out).variance, 1.25, 1e-4);
}

TEST(Resample, Guards) {
    const auto f = GriddedDistribution::make(0.0, 1.0 / 64, std::vector<double>(64, 1.0));  // edges carry real mass
    EXPECT_THROW(resample(f, Grid1D{f.origin(), f.step() / 2, 127}), Error);
    const auto g = gaussian_density(0.0, 1.0);
    try {
        resample(g, Grid1D{g.origin(), 1e-9, kMaxGridPoints + 1});
        ADD_FAILURE();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ResolutionExceeded);
    }
}

TEST(L1, Basics) {
    const auto f = gaussian_density(0.0, 1.0);
    EXPECT_EQ(l1_distance(f, f), 0.0);
    const auto g = gaussian_density(0.0, 1.5);
    EXPECT_NEAR(l1_distance(f, g), gaussian_l1(1.0, 1.5), 1e-6);
    EXPECT_NEAR(l1_distance(gaussian_density(-5, 1), gaussian_density(5, 1)), 2.0, 1e-5);
}

TEST(Outputs, IdealMatchesGeneral) {
    const auto in = gaussian_inputs(ObjectStateSpec::minimum_uncertainty(1.0), ProbeStateSpec::minimum_uncertainty(1.0));
    const auto a = ideal_output_distributions(in.f, in.F, in.g, in.G);
    const auto b = general_output_distributions(InteractionParams::ideal(), in.f, in.F, in.g, in.G);
    EXPECT_EQ(a.F_out, b.F_out);
    EXPECT_EQ(a.g_out, b.g_out);
    EXPECT_NEAR(moments(a.F_out).variance, 2.0, 1e-3 * 2.0);
}

TEST(Outputs, SharpProbeKeepsObjectBroadProbeBlursMomentum) {
    const auto obj = ObjectStateSpec::minimum_uncertainty(1.0);
    const auto probe = ProbeStateSpec::minimum_uncertainty(1e-2);
    const auto in = gaussian_inputs(obj, probe);
    const auto out = ideal_output_distributions(in.f, in.F, in.g, in.G);
    EXPECT_LT(l1_distance(out.F_out, in.f), 1e-3);
    EXPECT_GT(std::sqrt(moments(out.g_out).variance), 40 * obj.sigma_p);
}

TEST(Outputs, ExactCasesAtUnitGain) {
    const auto in = gaussian_inputs(ObjectStateSpec::minimum_uncertainty(0.8, 1.0, 0.2, -0.1),
                                    ProbeStateSpec::displaced(0.3, 0.6, 1.1, 0.5 / 1.1));
    const auto a0 = general_output_distributions(InteractionParams::make(0, 1, -1, 1), in.f, in.F, in.g, in.G);
    EXPECT_EQ(a0.F_out, in.f);
    EXPECT_EQ(a0.g_out, in.G);
    const auto b0 = general_output_distributions(InteractionParams::make(1, 0, 0.5, 1), in.f, in.F, in.g, in.G);
    EXPECT_EQ(b0.F_out, in.F);
    EXPECT_EQ(b0.g_out, in.g);
}

TEST(Outputs, ExactCasesAtOtherGains) {
    const auto obj = ObjectStateSpec::minimum_uncertainty(1.0);
    const auto probe = ProbeStateSpec::minimum_uncertainty(1.0);
    const auto in = gaussian_inputs(obj, probe);
    // a = 0, b = 2, delta = 1: Q' = 2 q and p' = -2 P.
    const auto p = InteractionParams::make(0, 2, -0.5, 0);
    const auto out = general_output_distributions(p, in.f, in.F, in.g, in.G);
    EXPECT_NEAR(moments(out.F_out).variance, 4.0, 1e-6);
    EXPECT_NEAR(moments(out.g_out).variance, 1.0, 1e-6);
}

TEST(Outputs, VarianceLaws) {
    for (const auto& c : oracle_test_matrix(kDefaultSeed)) {
        const auto in = gaussian_inputs(c.object, c.probe);
        const auto out = general_output_distributions(c.params, in.f, in.F, in.g, in.G);
        const double a = c.params.a(), b = c.params.b(), ap = c.params.a_p(), bp = c.params.b_p();
        const double vF = b * b * c.object.sigma_q * c.object.sigma_q + a * a * c.probe.sigma_Q * c.probe.sigma_Q;
        const double vg = ap * ap * c.object.sigma_p * c.object.sigma_p + bp * bp * c.probe.sigma_P * c.probe.sigma_P;
        EXPECT_NEAR(moments(out.F_out).variance / vF, 1.0, 1e-3) << c.name;
        EXPECT_NEAR(moments(out.g_out).variance / vg, 1.0, 1e-3) << c.name;
        EXPECT_NEAR(out.F_out.mass(), 1.0, 1e-6) << c.name;
        EXPECT_NEAR(out.g_out.mass(), 1.0, 1e-6) << c.name;
    }
}

TEST(Outputs, DistributionGainReferredMatchesMoments) {
    const auto probe = ProbeStateSpec::minimum_uncertainty(1.0);
    const auto in = gaussian_inputs(ObjectStateSpec::minimum_uncertainty(1.0), probe);
    const auto unit = distribution_error_disturbance(params_from_gains(0.7, 0.7, 1.0), in.F, in.G);
    EXPECT_NEAR(unit.epsilon_star, 1.0, 1e-6);
    const auto a0 = distribution_error_disturbance(InteractionParams::make(0, 1, -1, 1), in.F, in.G);
    EXPECT_EQ(a0.epsilon_star, 0.0);
    EXPECT_TRUE(std::isinf(a0.eta_star));

    std::mt19937_64 rng(47);
    for (int k = 0; k < 50; ++k) {
        const auto p = random_params(rng);
        const auto d = distribution_error_disturbance(p, in.F, in.G);
        const auto m = gain_referred_error_disturbance(p, probe);
        EXPECT_NEAR(d.epsilon_star / m.epsilon_star, 1.0, 1e-6);
        EXPECT_NEAR(d.eta_star / m.eta_star, 1.0, 1e-6);
    }
}

TEST(DeltaLimit, ClosedFormGaussianDistances) {
    const auto in = gaussian_inputs(ObjectStateSpec::minimum_uncertainty(1.0), ProbeStateSpec::minimum_uncertainty(1.0));
    const auto seq = delta_limit_sequence();
    const auto rows = delta_limit_study(seq, in.f, in.F, in.g, in.G);
    ASSERT_EQ(rows.size(), seq.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const double a = seq[k];
        // F_out ~ N(0, sqrt(1 + a^2)) against f ~ N(0, 1); the momentum side
        // has the same width ratio.
        const double expect = gaussian_l1(1.0, std::sqrt(1 + a * a));
        EXPECT_NEAR(rows[k].l1_position, expect, 1e-6) << a;
        EXPECT_NEAR(rows[k].l1_momentum, expect, 1e-6) << a;
        if (k > 0) {
            EXPECT_LT(rows[k].l1_position, rows[k - 1].l1_position);
            EXPECT_LT(rows[k].l1_momentum, rows[k - 1].l1_momentum);
        }
    }
    EXPECT_LE(rows.back().l1_position, kDeltaLimitThresholdPosition);
    EXPECT_LE(rows.back().l1_momentum, kDeltaLimitThresholdMomentum);
}

TEST(DeltaLimit, DualLimitMirrors) {
    const auto in = gaussian_inputs(ObjectStateSpec::minimum_uncertainty(1.0), ProbeStateSpec::minimum_uncertainty(1.0));
    const auto seq = delta_limit_sequence();
    const auto a_rows = delta_limit_study(seq, in.f, in.F, in.g, in.G, {LimitParameter::A, 1.0, 1.0});
    const auto b_rows = delta_limit_study(seq, in.f, in.F, in.g, in.G, {LimitParameter::B, 1.0, 1.0});
    for (std::size_t k = 0; k < seq.size(); ++k) {
        EXPECT_NEAR(a_rows[k].l1_position, b_rows[k].l1_position, 1e-6);
        EXPECT_NEAR(a_rows[k].l1_momentum, b_rows[k].l1_momentum, 1e-6);
    }
}

TEST(DeltaLimit, UnitGainIsIdealBlur) {
    const auto in = gaussian_inputs(ObjectStateSpec::minimum_uncertainty(1.0), ProbeStateSpec::minimum_uncertainty(1.0));
    const auto rows = delta_limit_study(std::vector<double>{1.0}, in.f, in.F, in.g, in.G);
    EXPECT_NEAR(rows[0].l1_position, gaussian_l1(1.0, std::sqrt(2.0)), 1e-5);
    EXPECT_GT(rows[0].l1_position, 0.1);
}

TEST(DeltaLimit, RejectsBadSequences) {
    const auto in = gaussian_inputs(ObjectStateSpec::minimum_uncertainty(1.0), ProbeStateSpec::minimum_uncertainty(1.0));
    EXPECT_THROW(delta_limit_study(std::vector<double>{0.1, 0.2}, in.f, in.F, in.g, in.G), Error);
    EXPECT_THROW(delta_limit_study(std::vector<double>{1.5}, in.f, in.F, in.g, in.G), Error);
    EXPECT_THROW(delta_limit_study(std::vector<double>{0.0}, in.f, in.F, in.g, in.G), Error);
}

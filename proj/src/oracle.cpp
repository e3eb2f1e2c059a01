#include "qmeas/oracle.hpp"

#include <cmath>
#include <random>

#include <fmt/format.h>

#include "qmeas/errors.hpp"

namespace qmeas {

namespace {

void require_minimum_uncertainty(double sx, double sk, double hbar, const char* what) {
    if (std::abs(sx * sk - hbar / 2.0) > 1e-12 * hbar) {
        throw Error(ErrorKind::InvalidState,
                    fmt::format("oracle needs a minimum-uncertainty {} state", what));
    }
}

}  // namespace

double OracleComparison::variance_F_rel_error() const {
    return std::abs(variance_F_oracle - variance_F_law) / variance_F_law;
}

double OracleComparison::variance_g_rel_error() const {
    return std::abs(variance_g_oracle - variance_g_law) / variance_g_law;
}

double l1_on_samples(const GriddedDistribution& sampled, const GriddedDistribution& reference) {
    const auto v = sampled.values();
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += std::abs(v[i] - reference.value_at(sampled.coordinate(i)));
    }
    return s * sampled.step();
}

OracleComparison compare_with_oracle(const InteractionParams& params, const ObjectStateSpec& obj,
                                     const ProbeStateSpec& probe, const OracleSettings& s) {
    require_minimum_uncertainty(obj.sigma_q, obj.sigma_p, s.hbar, "object");
    require_minimum_uncertainty(probe.sigma_Q, probe.sigma_P, s.hbar, "probe");

    const auto psi = gaussian_packet(
        obj.mean_q, obj.sigma_q, obj.mean_p,
        Grid1D::centered(obj.mean_q, s.input_span_sigmas * obj.sigma_q, s.input_points), s.hbar);
    const auto Psi = gaussian_packet(
        probe.mean_Q, probe.sigma_Q, probe.mean_P,
        Grid1D::centered(probe.mean_Q, s.input_span_sigmas * probe.sigma_Q, s.input_points), s.hbar);

    const JointAxes axes = output_axes(params, psi, Psi, s.joint_points, s.joint_span_sigmas, s.hbar);
    const auto joint = apply_interaction(params, psi, Psi, axes);
    const auto momentum = momentum_representation(
        joint, s.hbar, s.sign, {axes.object_momentum_center, axes.probe_momentum_center});

    const auto position_marginals = marginals(joint);
    const auto momentum_marginals = marginals(momentum);
    const GriddedDistribution& F_oracle = position_marginals.probe;
    const GriddedDistribution& g_oracle = momentum_marginals.object;

    const auto inputs = gaussian_inputs(obj, probe, s.engine_points, s.engine_span_sigmas);
    const auto law = general_output_distributions(params, inputs.f, inputs.F, inputs.g, inputs.G);

    const double a = params.a(), b = params.b(), ap = params.a_p(), bp = params.b_p();
    OracleComparison r{};
    r.norm_position = joint.norm();
    r.norm_momentum = momentum.norm();
    r.l1_position = l1_on_samples(F_oracle, law.F_out);
    r.l1_momentum = l1_on_samples(g_oracle, law.g_out);
    r.variance_F_oracle = moments(F_oracle).variance;
    r.variance_F_law = b * b * obj.sigma_q * obj.sigma_q + a * a * probe.sigma_Q * probe.sigma_Q;
    r.variance_g_oracle = moments(g_oracle).variance;
    r.variance_g_law = ap * ap * obj.sigma_p * obj.sigma_p + bp * bp * probe.sigma_P * probe.sigma_P;
    return r;
}

double round_trip_l1(const InteractionParams& params, const ObjectStateSpec& obj, const ProbeStateSpec& probe,
                     std::size_t points, double hbar, Interpolation interpolation) {
    constexpr std::size_t kFine = std::size_t{1} << 16;
    constexpr double kSpan = 12.0;
    const auto psi = gaussian_packet(obj.mean_q, obj.sigma_q, obj.mean_p,
                                     Grid1D::centered(obj.mean_q, kSpan * obj.sigma_q, kFine), hbar);
    const auto Psi = gaussian_packet(probe.mean_Q, probe.sigma_Q, probe.mean_P,
                                     Grid1D::centered(probe.mean_Q, kSpan * probe.sigma_Q, kFine), hbar);
    const Grid1D in_object = Grid1D::centered(obj.mean_q, 10.0 * obj.sigma_q, points);
    const Grid1D in_probe = Grid1D::centered(probe.mean_Q, 10.0 * probe.sigma_Q, points);
    const auto initial = product_state(psi, Psi, in_object, in_probe);

    const double a = params.a(), b = params.b(), c = params.c(), d = params.d();
    JointAxes axes;
    axes.object = Grid1D::centered(d * obj.mean_q + c * probe.mean_Q,
                                   kSpan * std::hypot(d * obj.sigma_q, c * probe.sigma_Q), points);
    axes.probe = Grid1D::centered(b * obj.mean_q + a * probe.mean_Q,
                                  kSpan * std::hypot(b * obj.sigma_q, a * probe.sigma_Q), points);
    const auto forward = apply_interaction(params, psi, Psi, axes);
    const auto back = apply_map(CoordinateMap::from_params(params).inverse(), forward, in_object, in_probe,
                                interpolation);
    return density_l1(initial, back);
}

std::vector<OracleCase> oracle_test_matrix(std::uint64_t seed, double hbar) {
    using O = ObjectStateSpec;
    using P = ProbeStateSpec;
    std::vector<OracleCase> cases;
    cases.push_back({"ideal", InteractionParams::ideal(), O::minimum_uncertainty(1.0, hbar),
                     P::minimum_uncertainty(1.0, hbar)});
    cases.push_back({"contractive", InteractionParams::make(0.0, 1.0, -1.0, 1.0), O::minimum_uncertainty(1.0, hbar),
                     P::minimum_uncertainty(0.8, hbar)});
    cases.push_back({"swap", InteractionParams::make(0.0, 1.0, -1.0, 0.0), O::minimum_uncertainty(0.9, hbar),
                     P::minimum_uncertainty(1.1, hbar)});
    cases.push_back({"a0", InteractionParams::make(0.0, 2.0, -0.5, 0.7), O::minimum_uncertainty(1.0, hbar),
                     P::minimum_uncertainty(1.3, hbar)});
    cases.push_back({"b0", InteractionParams::make(1.5, 0.0, 0.4, 2.0 / 3.0), O::minimum_uncertainty(1.2, hbar),
                     P::minimum_uncertainty(0.7, hbar)});
    cases.push_back({"displaced", InteractionParams::make(0.7, 1.3, 0.4, 1.9),
                     O::minimum_uncertainty(0.8, hbar, 0.5, -0.4),
                     P::displaced(0.3, 0.8, 1.2, hbar / (2.0 * 1.2), hbar)});

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> gain(0.4, 1.6), cross(-1.0, 1.0), det(0.6, 1.6), width(0.6, 1.5);
    for (std::size_t k = 0; k < kRandomOracleCases; ++k) {
        const double a = gain(rng), b = gain(rng), c = cross(rng), delta = det(rng);
        const double d = (delta + b * c) / a;
        const double sq = width(rng), sQ = width(rng);
        cases.push_back({fmt::format("random{}", k), InteractionParams::make(a, b, c, d),
                         O::minimum_uncertainty(sq * std::sqrt(hbar), hbar),
                         P::minimum_uncertainty(sQ * std::sqrt(hbar), hbar)});
    }
    return cases;
}

}  // namespace qmeas

#include "qmeas/moments.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "qmeas/errors.hpp"

namespace qmeas {

namespace {

constexpr double kStateSlack = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_pair(double sigma_x, double sigma_k, double hbar, const char* what) {
    if (!(hbar > 0.0) || !std::isfinite(hbar)) {
        throw Error(ErrorKind::InvalidArgument, "hbar must be positive");
    }
    if (!(sigma_x > 0.0) || !(sigma_k > 0.0) || !std::isfinite(sigma_x) || !std::isfinite(sigma_k)) {
        throw Error(ErrorKind::InvalidState, fmt::format("{} standard deviations must be positive", what));
    }
    if (sigma_x * sigma_k < hbar / 2.0 - kStateSlack) {
        throw Error(ErrorKind::InvalidState,
                    fmt::format("{} state violates sigma_x sigma_p >= hbar/2 ({:g} < {:g})", what,
                                sigma_x * sigma_k, hbar / 2.0));
    }
}

bool at_least(double lhs, double rhs) {
    return lhs >= rhs - kBoundTolerance * std::abs(rhs);
}

}  // namespace

ObjectStateSpec ObjectStateSpec::make(double mean_q, double mean_p, double sigma_q, double sigma_p,
                                      double hbar) {
    check_pair(sigma_q, sigma_p, hbar, "object");
    return {mean_q, mean_p, sigma_q, sigma_p};
}

ObjectStateSpec ObjectStateSpec::minimum_uncertainty(double sigma_q, double hbar, double mean_q,
                                                     double mean_p) {
    return make(mean_q, mean_p, sigma_q, hbar / (2.0 * sigma_q), hbar);
}

ProbeStateSpec ProbeStateSpec::make(double sigma_Q, double sigma_P, double hbar) {
    check_pair(sigma_Q, sigma_P, hbar, "probe");
    return {0.0, 0.0, sigma_Q, sigma_P};
}

ProbeStateSpec ProbeStateSpec::minimum_uncertainty(double sigma_Q, double hbar) {
    return make(sigma_Q, hbar / (2.0 * sigma_Q), hbar);
}

ProbeStateSpec ProbeStateSpec::displaced(double mean_Q, double mean_P, double sigma_Q,
                                         double sigma_P, double hbar) {
    check_pair(sigma_Q, sigma_P, hbar, "probe");
    return {mean_Q, mean_P, sigma_Q, sigma_P};
}

ErrorDisturbance legacy_error_disturbance(const InteractionParams& p, const ObjectStateSpec& obj,
                                          const ProbeStateSpec& probe) {
    // Means drop out after the shift q1 = q - <q>, p1 = p - <p>; only the
    // centred second moments remain.
    const double e2 = p.a() * p.a() * probe.sigma_Q * probe.sigma_Q +
                      (p.b() - 1.0) * (p.b() - 1.0) * obj.sigma_q * obj.sigma_q;
    const double d2 = (p.a_p() - 1.0) * (p.a_p() - 1.0) * obj.sigma_p * obj.sigma_p +
                      p.b_p() * p.b_p() * probe.sigma_P * probe.sigma_P;
    return {std::sqrt(e2), std::sqrt(d2)};
}

GainReferred gain_referred_error_disturbance(const InteractionParams& p,
                                             const ProbeStateSpec& probe) {
    const double product = probe.sigma_Q * probe.sigma_P;
    if (p.a() == 0.0) {
        return {0.0, kInf, product, true};
    }
    if (p.b() == 0.0) {
        return {kInf, 0.0, product, true};
    }
    const double eps = (p.a() / p.b()) * probe.sigma_Q;
    const double eta = (p.b() / p.a()) * probe.sigma_P;
    return {eps, eta, eps * eta, false};
}

NormalizedMoments normalized_moments(const InteractionParams& p, double w) {
    if (!(w > 0.0) || !std::isfinite(w)) {
        throw Error(ErrorKind::NonpositiveBalance, fmt::format("balance w = {:g} must be positive", w));
    }
    const double e2 = p.a() * p.a() * w * w + (p.b() - 1.0) * (p.b() - 1.0);
    const double d2 = (p.a_p() - 1.0) * (p.a_p() - 1.0) + p.b_p() * p.b_p() / (w * w);
    return {std::sqrt(e2), std::sqrt(d2)};
}

bool BoundEvaluation::hur_satisfied() const { return at_least(hur_lhs, hur_rhs); }
bool BoundEvaluation::our_satisfied() const { return at_least(our_lhs, our_rhs); }
bool BoundEvaluation::circle_satisfied() const { return at_least(circle_lhs, circle_rhs); }

BoundEvaluation evaluate_bounds(const NormalizedMoments& m) {
    const double e = m.epsilon_tilde;
    const double n = m.eta_tilde;
    return {e * n, 1.0, e * n + e + n, 1.0, e * e + n * n, 1.0};
}

BoundEvaluation evaluate_bounds(const ErrorDisturbance& ed, double sigma_q, double sigma_p,
                                double hbar) {
    const double e = ed.epsilon;
    const double n = ed.eta;
    const double et = e / sigma_q;
    const double nt = n / sigma_p;
    return {e * n, hbar / 2.0, e * n + e * sigma_p + sigma_q * n, hbar / 2.0, et * et + nt * nt, 1.0};
}

UncertaintyReport make_report(const InteractionParams& p, const ObjectStateSpec& obj,
                              const ProbeStateSpec& probe, double hbar) {
    const auto legacy = legacy_error_disturbance(p, obj, probe);
    const auto star = gain_referred_error_disturbance(p, probe);
    const auto bounds = evaluate_bounds(legacy, obj.sigma_q, obj.sigma_p, hbar);
    UncertaintyReport r{};
    r.epsilon = legacy.epsilon;
    r.eta = legacy.eta;
    r.epsilon_star = star.epsilon_star;
    r.eta_star = star.eta_star;
    r.star_product = star.product;
    r.limit_resolved = star.limit_resolved;
    r.epsilon_tilde = legacy.epsilon / obj.sigma_q;
    r.eta_tilde = legacy.eta / obj.sigma_p;
    r.w = probe.sigma_Q / obj.sigma_q;
    r.hur_lhs = bounds.hur_lhs;
    r.our_lhs = bounds.our_lhs;
    r.circle_lhs = bounds.circle_lhs;
    r.bounds = bounds;
    return r;
}

std::vector<TrajectoryPoint> trajectory(const InteractionParams& p, std::span<const double> w_grid) {
    if (w_grid.empty()) {
        throw Error(ErrorKind::InvalidArgument, "trajectory needs a non-empty w grid");
    }
    std::vector<TrajectoryPoint> out;
    out.reserve(w_grid.size());
    for (std::size_t i = 0; i < w_grid.size(); ++i) {
        if (i > 0 && !(w_grid[i] > w_grid[i - 1])) {
            throw Error(ErrorKind::InvalidArgument, "w grid must be strictly increasing");
        }
        const auto m = normalized_moments(p, w_grid[i]);
        out.push_back({w_grid[i], m.epsilon_tilde, m.eta_tilde});
    }
    return out;
}

std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0) || !(hi > lo) || n < 2) {
        throw Error(ErrorKind::InvalidArgument, "log grid needs 0 < lo < hi and n >= 2");
    }
    const double l0 = std::log(lo);
    const double l1 = std::log(hi);
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = std::exp(l0 + (l1 - l0) * static_cast<double>(i) / static_cast<double>(n - 1));
    }
    w.front() = lo;
    w.back() = hi;
    return w;
}

std::vector<double> default_w_grid() {
    return log_spaced(kDefaultWMin, kDefaultWMax, kDefaultTrajectoryPoints);
}

InteractionParams params_from_gains(double a, double b, double delta) {
    if (a != 0.0) {
        return InteractionParams::make(a, b, 0.0, delta / a);
    }
    if (b != 0.0) {
        return InteractionParams::make(0.0, b, -delta / b, 0.0);
    }
    throw Error(ErrorKind::DegenerateInteraction, "a = b = 0 gives a zero determinant");
}

}  // namespace qmeas

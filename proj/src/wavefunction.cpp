#include "qmeas/wavefunction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "qmeas/errors.hpp"
#include "qmeas/fft.hpp"

namespace qmeas {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
/// Samples per axis used when estimating truncated mass.
constexpr std::size_t kTruncationProbe = 512;

double sum_abs2(std::span<const Complex> v) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return s;
}

/// Phase factors turning an unnormalized DFT into the continuous transform
/// from `from` to `to` (to.step = 2 pi hbar / (n from.step)):
///   out_k = post_k * DFT_sign[in_j * pre_j]_k.
struct AxisPhases {
    std::vector<Complex> pre;
    std::vector<Complex> post;
};

AxisPhases axis_phases(const Grid1D& from, const Grid1D& to, int sign, double hbar) {
    const std::size_t n = from.count;
    const double s = static_cast<double>(sign);
    const double scale = from.step / std::sqrt(kTwoPi * hbar);
    AxisPhases ph{std::vector<Complex>(n), std::vector<Complex>(n)};
    for (std::size_t j = 0; j < n; ++j) {
        ph.pre[j] = std::polar(1.0, s * to.origin * from.coordinate(j) / hbar);
        ph.post[j] = std::polar(scale, s * static_cast<double>(j) * to.step * from.origin / hbar);
    }
    return ph;
}

struct Stencil {
    std::ptrdiff_t base;
    std::array<double, 6> w;
    int width;
};

/// Lagrange weights on nodes base, ..., base + width - 1 around t.
Stencil stencil(double t, Interpolation kind) {
    const double fl = std::floor(t);
    const double u = t - fl;
    const int width = kind == Interpolation::Bilinear ? 2 : kind == Interpolation::Bicubic ? 4 : 6;
    const int shift = width / 2 - 1;
    Stencil s{static_cast<std::ptrdiff_t>(fl) - shift, {}, width};
    for (int k = 0; k < width; ++k) {
        double w = 1.0;
        for (int m = 0; m < width; ++m) {
            if (m != k) w *= (u - (m - shift)) / static_cast<double>(k - m);
        }
        s.w[k] = w;
    }
    return s;
}

std::size_t stride_for(std::size_t n) { return std::max<std::size_t>(1, n / kTruncationProbe); }

bool outside(const Grid1D& axis, double x) {
    return x < axis.origin - 0.5 * axis.step || x > axis.last() + 0.5 * axis.step;
}

void check_truncation(double truncated) {
    if (truncated > kTruncationTolerance) {
        throw Error(ErrorKind::GridTooNarrow,
                    fmt::format("output grid drops {:.3g} of the probability mass", truncated));
    }
}

}  // namespace

Wavefunction1D Wavefunction1D::make(const Grid1D& grid, std::vector<Complex> amplitudes) {
    if (grid.count != amplitudes.size() || grid.count < 2 || !(grid.step > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "wavefunction grid and amplitudes disagree");
    }
    const double n = grid.step * sum_abs2(amplitudes);
    if (std::abs(n - 1.0) > kWavefunctionNormTolerance) {
        throw Error(ErrorKind::InvalidState, fmt::format("wavefunction norm {:.12g} is not 1", n));
    }
    return Wavefunction1D(grid, std::move(amplitudes));
}

double Wavefunction1D::norm() const { return grid_.step * sum_abs2(amplitudes_); }

Complex Wavefunction1D::value_at(double x) const {
    const double t = (x - grid_.origin) / grid_.step;
    const double last = static_cast<double>(amplitudes_.size() - 1);
    if (!(t >= 0.0) || t > last) {
        return {0.0, 0.0};
    }
    const auto i = static_cast<std::size_t>(t);
    if (i + 1 >= amplitudes_.size()) {
        return amplitudes_.back();
    }
    const double u = t - static_cast<double>(i);
    return amplitudes_[i] * (1.0 - u) + amplitudes_[i + 1] * u;
}

GriddedDistribution Wavefunction1D::density() const {
    std::vector<double> v(amplitudes_.size());
    std::transform(amplitudes_.begin(), amplitudes_.end(), v.begin(), [](Complex z) { return std::norm(z); });
    return GriddedDistribution::make(grid_.origin, grid_.step, std::move(v));
}

Wavefunction1D gaussian_packet(double mean_x, double sigma, double mean_k, const Grid1D& grid, double hbar) {
    if (!(sigma > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "packet width must be positive");
    }
    if (grid.count < 2 || grid.origin > mean_x - 8.0 * sigma || grid.last() < mean_x + 8.0 * sigma) {
        throw Error(ErrorKind::GridTooNarrow,
                    fmt::format("grid [{:g}, {:g}] does not reach 8 sigma around {:g}", grid.origin,
                                grid.count ? grid.last() : grid.origin, mean_x));
    }
    const double amp = std::pow(kTwoPi * sigma * sigma, -0.25);
    std::vector<Complex> v(grid.count);
    for (std::size_t i = 0; i < grid.count; ++i) {
        const double x = grid.coordinate(i);
        const double z = (x - mean_x) / (2.0 * sigma);
        v[i] = std::polar(amp * std::exp(-z * z), mean_k * x / hbar);
    }
    return Wavefunction1D::make(grid, std::move(v));
}

Grid1D conjugate_axis(const Grid1D& axis, double center, double hbar) {
    const double dp = kTwoPi * hbar / (static_cast<double>(axis.count) * axis.step);
    return {center - static_cast<double>(axis.count / 2) * dp, dp, axis.count};
}

Wavefunction1D momentum_representation(const Wavefunction1D& psi, double hbar, FourierSign sign,
                                       double momentum_center) {
    const Grid1D& x = psi.grid();
    const Grid1D p = conjugate_axis(x, momentum_center, hbar);
    const int s = static_cast<int>(sign);
    const auto ph = axis_phases(x, p, s, hbar);
    std::vector<Complex> data(psi.amplitudes().begin(), psi.amplitudes().end());
    for (std::size_t j = 0; j < data.size(); ++j) data[j] *= ph.pre[j];
    fft::transform_1d(data, s);
    for (std::size_t k = 0; k < data.size(); ++k) data[k] *= ph.post[k];
    return Wavefunction1D::make(p, std::move(data));
}

JointWavefunction JointWavefunction::make(const Grid1D& object_axis, const Grid1D& probe_axis,
                                          std::vector<Complex> amplitudes, Basis basis) {
    if (object_axis.count * probe_axis.count != amplitudes.size() || object_axis.count < 2 ||
        probe_axis.count < 2) {
        throw Error(ErrorKind::InvalidArgument, "joint grid and amplitudes disagree");
    }
    const double n = object_axis.step * probe_axis.step * sum_abs2(amplitudes);
    if (std::abs(n - 1.0) > kWavefunctionNormTolerance) {
        throw Error(ErrorKind::InvalidState, fmt::format("joint wavefunction norm {:.12g} is not 1", n));
    }
    return JointWavefunction(object_axis, probe_axis, std::move(amplitudes), basis);
}

double JointWavefunction::norm() const {
    return object_axis_.step * probe_axis_.step * sum_abs2(amplitudes_);
}

JointWavefunction product_state(const Wavefunction1D& psi, const Wavefunction1D& Psi, const Grid1D& object_axis,
                                const Grid1D& probe_axis) {
    std::vector<Complex> v(object_axis.count * probe_axis.count);
    std::vector<Complex> col(probe_axis.count);
    for (std::size_t j = 0; j < probe_axis.count; ++j) col[j] = Psi.value_at(probe_axis.coordinate(j));
    for (std::size_t i = 0; i < object_axis.count; ++i) {
        const Complex row = psi.value_at(object_axis.coordinate(i));
        for (std::size_t j = 0; j < probe_axis.count; ++j) v[i * probe_axis.count + j] = row * col[j];
    }
    return JointWavefunction::make(object_axis, probe_axis, std::move(v));
}

JointAxes output_axes(const InteractionParams& params, const Wavefunction1D& psi, const Wavefunction1D& Psi,
                      std::size_t points, double span_sigmas, double hbar) {
    const auto mq = moments(psi.density());
    const auto mQ = moments(Psi.density());
    const auto mp = moments(momentum_representation(psi, hbar).density());
    const auto mP = moments(momentum_representation(Psi, hbar).density());

    const double a = params.a(), b = params.b(), c = params.c(), d = params.d();
    const double ap = params.a_p(), bp = params.b_p(), cp = params.c_p(), dp = params.d_p();

    struct Spread {
        double mean;
        double sigma;
    };
    auto combine = [](double u, const MomentSummary& x, double v, const MomentSummary& y) {
        return Spread{u * x.mean + v * y.mean, std::sqrt(u * u * x.variance + v * v * y.variance)};
    };
    // q' = d q + c Q, Q' = b q + a Q, p' = a' p - b' P, P' = -c' p + d' P.
    const Spread qo = combine(d, mq, c, mQ);
    const Spread Qo = combine(b, mq, a, mQ);
    const Spread po = combine(ap, mp, -bp, mP);
    const Spread Po = combine(-cp, mp, dp, mP);

    const double n = static_cast<double>(points);
    auto choose = [&](const Spread& x, const Spread& k, const char* name) {
        // n dx covers +-span sigma_x; pi hbar / dx (minus a sample) covers +-span sigma_p.
        const double dx_min = 2.0 * span_sigmas * x.sigma / (n - 2.0);
        const double dx_max = std::numbers::pi * hbar / (span_sigmas * k.sigma) * (1.0 - 2.0 / n);
        if (dx_min > dx_max) {
            throw Error(ErrorKind::GridTooNarrow,
                        fmt::format("{} axis: {} points cannot hold +-{:g} sigma in both position and momentum",
                                    name, points, span_sigmas));
        }
        const double dx = std::sqrt(dx_min * dx_max);
        return Grid1D{x.mean - static_cast<double>(points / 2) * dx, dx, points};
    };
    return {choose(qo, po, "object"), choose(Qo, Po, "probe"), po.mean, Po.mean};
}

JointWavefunction apply_interaction(const InteractionParams& params, const Wavefunction1D& psi,
                                    const Wavefunction1D& Psi, const JointAxes& axes) {
    const Matrix2 fwd = CoordinateMap::from_params(params).matrix();
    const Matrix2 inv = CoordinateMap::from_params(params).inverse().matrix();

    // Forward-map a decimated copy of the input to find mass landing off-grid.
    {
        const auto& gq = psi.grid();
        const auto& gQ = Psi.grid();
        const std::size_t sq = stride_for(gq.count), sQ = stride_for(gQ.count);
        double truncated = 0.0;
        for (std::size_t i = 0; i < gq.count; i += sq) {
            const double wq = std::norm(psi.amplitudes()[i]) * gq.step * static_cast<double>(sq);
            if (wq == 0.0) continue;
            const double q = gq.coordinate(i);
            for (std::size_t j = 0; j < gQ.count; j += sQ) {
                const double Q = gQ.coordinate(j);
                if (outside(axes.object, fwd(0, 0) * q + fwd(0, 1) * Q) ||
                    outside(axes.probe, fwd(1, 0) * q + fwd(1, 1) * Q)) {
                    truncated += wq * std::norm(Psi.amplitudes()[j]) * gQ.step * static_cast<double>(sQ);
                }
            }
        }
        check_truncation(truncated);
    }

    const double factor = 1.0 / std::sqrt(params.delta());
    const std::size_t nq = axes.object.count, nQ = axes.probe.count;
    std::vector<Complex> v(nq * nQ);
    for (std::size_t i = 0; i < nq; ++i) {
        const double qp = axes.object.coordinate(i);
        for (std::size_t j = 0; j < nQ; ++j) {
            const double Qp = axes.probe.coordinate(j);
            const double q0 = inv(0, 0) * qp + inv(0, 1) * Qp;
            const double Q0 = inv(1, 0) * qp + inv(1, 1) * Qp;
            v[i * nQ + j] = factor * psi.value_at(q0) * Psi.value_at(Q0);
        }
    }
    return JointWavefunction::make(axes.object, axes.probe, std::move(v));
}

JointWavefunction apply_interaction(const InteractionParams& params, const Wavefunction1D& psi,
                                    const Wavefunction1D& Psi) {
    return apply_interaction(params, psi, Psi, output_axes(params, psi, Psi));
}

JointWavefunction apply_map(const CoordinateMap& map, const JointWavefunction& state, const Grid1D& object_axis,
                            const Grid1D& probe_axis, Interpolation interpolation) {
    if (state.basis() != Basis::Position) {
        throw Error(ErrorKind::InvalidArgument, "coordinate maps act on position-basis states");
    }
    const Matrix2& fwd = map.matrix();
    const Matrix2 inv = map.inverse().matrix();
    const Grid1D& gi = state.object_axis();
    const Grid1D& gj = state.probe_axis();

    {
        const std::size_t si = stride_for(gi.count), sj = stride_for(gj.count);
        const double cell = gi.step * gj.step * static_cast<double>(si * sj);
        double truncated = 0.0;
        for (std::size_t i = 0; i < gi.count; i += si) {
            const double q = gi.coordinate(i);
            for (std::size_t j = 0; j < gj.count; j += sj) {
                const double Q = gj.coordinate(j);
                if (outside(object_axis, fwd(0, 0) * q + fwd(0, 1) * Q) ||
                    outside(probe_axis, fwd(1, 0) * q + fwd(1, 1) * Q)) {
                    truncated += std::norm(state.at(i, j)) * cell;
                }
            }
        }
        check_truncation(truncated);
    }

    const auto ni = static_cast<std::ptrdiff_t>(gi.count);
    const auto nj = static_cast<std::ptrdiff_t>(gj.count);
    const double factor = 1.0 / std::sqrt(map.determinant());
    std::vector<Complex> v(object_axis.count * probe_axis.count);
    for (std::size_t i = 0; i < object_axis.count; ++i) {
        const double qp = object_axis.coordinate(i);
        for (std::size_t j = 0; j < probe_axis.count; ++j) {
            const double Qp = probe_axis.coordinate(j);
            const double ti = (inv(0, 0) * qp + inv(0, 1) * Qp - gi.origin) / gi.step;
            const double tj = (inv(1, 0) * qp + inv(1, 1) * Qp - gj.origin) / gj.step;
            if (ti < -3.0 || tj < -3.0 || ti > static_cast<double>(ni + 2) || tj > static_cast<double>(nj + 2)) {
                continue;
            }
            const Stencil si = stencil(ti, interpolation);
            const Stencil sj = stencil(tj, interpolation);
            Complex acc{0.0, 0.0};
            for (int a = 0; a < si.width; ++a) {
                const std::ptrdiff_t r = si.base + a;
                if (r < 0 || r >= ni) continue;
                Complex row{0.0, 0.0};
                for (int b = 0; b < sj.width; ++b) {
                    const std::ptrdiff_t col = sj.base + b;
                    if (col < 0 || col >= nj) continue;
                    row += sj.w[b] * state.at(static_cast<std::size_t>(r), static_cast<std::size_t>(col));
                }
                acc += si.w[a] * row;
            }
            v[i * probe_axis.count + j] = factor * acc;
        }
    }
    return JointWavefunction::make(object_axis, probe_axis, std::move(v));
}

namespace {

JointWavefunction transform_joint(const JointWavefunction& joint, const Grid1D& to_object, const Grid1D& to_probe,
                                  int sign, double hbar, Basis out_basis) {
    const Grid1D& fo = joint.object_axis();
    const Grid1D& fp = joint.probe_axis();
    const auto po = axis_phases(fo, to_object, sign, hbar);
    const auto pp = axis_phases(fp, to_probe, sign, hbar);
    const std::size_t rows = fo.count, cols = fp.count;
    std::vector<Complex> data(joint.amplitudes().begin(), joint.amplitudes().end());
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) data[i * cols + j] *= po.pre[i] * pp.pre[j];
    }
    fft::transform_2d(data, rows, cols, sign);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) data[i * cols + j] *= po.post[i] * pp.post[j];
    }
    return JointWavefunction::make(to_object, to_probe, std::move(data), out_basis);
}

}  // namespace

JointWavefunction momentum_representation(const JointWavefunction& joint, double hbar, FourierSign sign,
                                          std::array<double, 2> momentum_centers) {
    if (joint.basis() != Basis::Position) {
        throw Error(ErrorKind::InvalidArgument, "state is already in the momentum basis");
    }
    return transform_joint(joint, conjugate_axis(joint.object_axis(), momentum_centers[0], hbar),
                           conjugate_axis(joint.probe_axis(), momentum_centers[1], hbar),
                           static_cast<int>(sign), hbar, Basis::Momentum);
}

JointWavefunction position_representation(const JointWavefunction& joint, std::array<double, 2> position_origins,
                                          double hbar, FourierSign sign) {
    if (joint.basis() != Basis::Momentum) {
        throw Error(ErrorKind::InvalidArgument, "state is already in the position basis");
    }
    auto back_axis = [hbar](const Grid1D& p, double origin) {
        return Grid1D{origin, kTwoPi * hbar / (static_cast<double>(p.count) * p.step), p.count};
    };
    return transform_joint(joint, back_axis(joint.object_axis(), position_origins[0]),
                           back_axis(joint.probe_axis(), position_origins[1]), -static_cast<int>(sign), hbar,
                           Basis::Position);
}

Marginals marginals(const JointWavefunction& joint) {
    const Grid1D& go = joint.object_axis();
    const Grid1D& gp = joint.probe_axis();
    std::vector<double> object(go.count, 0.0);
    std::vector<double> probe(gp.count, 0.0);
    for (std::size_t i = 0; i < go.count; ++i) {
        for (std::size_t j = 0; j < gp.count; ++j) {
            const double w = std::norm(joint.at(i, j));
            object[i] += w;
            probe[j] += w;
        }
    }
    for (double& v : object) v *= gp.step;
    for (double& v : probe) v *= go.step;
    return {GriddedDistribution::make(go.origin, go.step, std::move(object)),
            GriddedDistribution::make(gp.origin, gp.step, std::move(probe))};
}

double density_l1(const JointWavefunction& x, const JointWavefunction& y) {
    if (!(x.object_axis() == y.object_axis()) || !(x.probe_axis() == y.probe_axis())) {
        throw Error(ErrorKind::MismatchedGrids, "joint states live on different grids");
    }
    double s = 0.0;
    const auto ax = x.amplitudes();
    const auto ay = y.amplitudes();
    for (std::size_t k = 0; k < ax.size(); ++k) s += std::abs(std::norm(ax[k]) - std::norm(ay[k]));
    return s * x.object_axis().step * x.probe_axis().step;
}

}  // namespace qmeas

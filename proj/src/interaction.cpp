#include "qmeas/interaction.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "qmeas/errors.hpp"

namespace qmeas {

Matrix2 operator*(const Matrix2& x, const Matrix2& y) {
    Matrix2 r;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            r(i, j) = x(i, 0) * y(0, j) + x(i, 1) * y(1, j);
        }
    }
    return r;
}

double max_abs_difference(const Matrix2& x, const Matrix2& y) {
    double worst = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
        worst = std::max(worst, std::abs(x.m[k] - y.m[k]));
    }
    return worst;
}

InteractionParams::InteractionParams(double a, double b, double c, double d)
    : a_(a), b_(b), c_(c), d_(d), delta_(a * d - b * c), omega_(std::sqrt(delta_)) {}

InteractionParams InteractionParams::make(double a, double b, double c, double d) {
    for (double v : {a, b, c, d}) {
        if (!std::isfinite(v)) {
            throw Error(ErrorKind::InvalidArgument, "interaction coefficients must be finite");
        }
    }
    const double delta = a * d - b * c;
    const double scale = std::max({std::abs(a * d), std::abs(b * c), 1.0});
    if (std::abs(delta) <= kDegeneracyTolerance * scale) {
        throw Error(ErrorKind::DegenerateInteraction,
                    fmt::format("determinant {:g} is zero; interaction is not unitary", delta));
    }
    // The sign flips below preserve delta, so a negative determinant can
    // never be canonicalized away.
    if (delta < 0.0) {
        throw Error(ErrorKind::NegativeDeterminant, fmt::format("determinant \u2212{:g} \u2264 0", -delta));
    }
    if (a < 0.0) {
        // Q -> -Q, q' -> -q'
        a = -a;
        d = -d;
    }
    if (b < 0.0) {
        // q -> -q, q' -> -q'
        b = -b;
        c = -c;
    }
    // Normalize signed zeros so exact comparisons and printing agree.
    if (a == 0.0) a = 0.0;
    if (b == 0.0) b = 0.0;
    if (c == 0.0) c = 0.0;
    if (d == 0.0) d = 0.0;
    return InteractionParams(a, b, c, d);
}

std::string_view to_string(StandardForm form) {
    switch (form) {
        case StandardForm::TypeO: return "TypeO";
        case StandardForm::TypeA: return "TypeA";
        case StandardForm::TypeB: return "TypeB";
    }
    return "unknown";
}

namespace {

StandardFormClass classify_raw(const InteractionParams& p) {
    const double a = p.a(), b = p.b(), c = p.c(), d = p.d();
    if (a != 0.0 && b != 0.0) {
        return {StandardForm::TypeO,
                {{1.0, 1.0, p.b_p() * c, p.a_p() * d}},
                {{1.0, -1.0, -p.b_p() * c, p.a_p() * d}},
                {1.0 / a, 1.0 / b, a * b / p.delta()}};
    }
    if (a == 0.0) {
        // delta = -bc > 0 forces b, c != 0.
        return {StandardForm::TypeA,
                {{0.0, 1.0, -1.0, d / b}},
                {{0.0, -1.0, 1.0, d / b}},
                {-1.0 / c, 1.0 / b, 1.0}};
    }
    // b == 0: delta = ad > 0 forces d != 0.
    return {StandardForm::TypeB,
            {{1.0, 0.0, c / a, 1.0}},
            {{1.0, 0.0, -c / a, 1.0}},
            {1.0 / a, 1.0 / d, 1.0}};
}

Matrix2 without_negative_zero(Matrix2 m) {
    for (auto& x : m.m) x += 0.0;
    return m;
}

}  // namespace

StandardFormClass classify(const InteractionParams& p) {
    auto cls = classify_raw(p);
    cls.reduced_position_matrix = without_negative_zero(cls.reduced_position_matrix);
    cls.reduced_momentum_matrix = without_negative_zero(cls.reduced_momentum_matrix);
    return cls;
}

HeisenbergMatrices heisenberg_matrices(const InteractionParams& p) {
    const double inv = 1.0 / p.delta();
    return {{{p.a(), p.b(), p.c(), p.d()}},
            {{p.a() * inv, -p.b() * inv, -p.c() * inv, p.d() * inv}}};
}

HeisenbergMatrices apply_scale(const HeisenbergMatrices& raw, const ScaleTriple& s) {
    const Matrix2 left_pos{{1.0, 0.0, 0.0, s.mu}};
    const Matrix2 right_pos{{s.big_lambda, 0.0, 0.0, s.small_lambda}};
    const Matrix2 left_mom{{1.0 / s.mu, 0.0, 0.0, 1.0}};
    const Matrix2 right_mom{{1.0 / s.small_lambda, 0.0, 0.0, 1.0 / s.big_lambda}};
    return {left_pos * raw.position * right_pos, left_mom * raw.momentum * right_mom};
}

double CommutatorResiduals::max() const {
    return std::max({probe_pair, object_pair, cross_pair});
}

CommutatorResiduals commutator_residuals(const InteractionParams& p) {
    const double a = p.a(), b = p.b(), c = p.c(), d = p.d();
    return {std::abs(a * p.d_p() - b * p.c_p() - 1.0),
            std::abs(d * p.a_p() - c * p.b_p() - 1.0),
            std::abs(b * p.a_p() - a * p.b_p())};
}

CoordinateMap CoordinateMap::from_params(const InteractionParams& p) {
    return CoordinateMap(Matrix2{{p.d(), p.c(), p.b(), p.a()}});
}

CoordinateMap CoordinateMap::from_matrix(const Matrix2& m) {
    if (!(m.determinant() > 0.0)) {
        throw Error(ErrorKind::NegativeDeterminant,
                    fmt::format("coordinate map determinant {:g} <= 0", m.determinant()));
    }
    return CoordinateMap(m);
}

CoordinateMap CoordinateMap::inverse() const {
    const double inv = 1.0 / m_.determinant();
    return CoordinateMap(Matrix2{{m_(1, 1) * inv, -m_(0, 1) * inv, -m_(1, 0) * inv, m_(0, 0) * inv}});
}

}  // namespace qmeas

#pragma once

#include <array>
#include <string_view>

namespace qmeas {

inline constexpr double kDefaultHbar = 1.0;

/// Row-major 2x2 real matrix.
struct Matrix2 {
    std::array<double, 4> m{};

    double operator()(int row, int col) const { return m[2 * row + col]; }
    double& operator()(int row, int col) { return m[2 * row + col]; }

    static Matrix2 identity() { return {{1.0, 0.0, 0.0, 1.0}}; }
    double determinant() const { return m[0] * m[3] - m[1] * m[2]; }
    Matrix2 transpose() const { return {{m[0], m[2], m[1], m[3]}}; }

    friend Matrix2 operator*(const Matrix2& x, const Matrix2& y);
    friend bool operator==(const Matrix2&, const Matrix2&) = default;
};

double max_abs_difference(const Matrix2& x, const Matrix2& y);

/// Linear interaction acting on position eigenkets as
///   |q>|Q>  ->  sqrt(delta) |d q + c Q>|a Q + b q>,
/// i.e. Q' = a Q + b q and q' = c Q + d q in the Heisenberg picture.
///
/// Instances only come out of `make`, which rejects non-unitary maps and
/// applies the sign flips that make a >= 0 and b >= 0. The flips relabel
/// Q, q' (for a) and q, q' (for b) and leave delta unchanged.
class InteractionParams {
public:
    static InteractionParams make(double a, double b, double c, double d);

    static InteractionParams ideal() { return make(1.0, 1.0, 0.0, 1.0); }
    static InteractionParams identity() { return make(1.0, 0.0, 0.0, 1.0); }

    double a() const { return a_; }
    double b() const { return b_; }
    double c() const { return c_; }
    double d() const { return d_; }
    double delta() const { return delta_; }
    double a_p() const { return a_ / delta_; }
    double b_p() const { return b_ / delta_; }
    double c_p() const { return c_ / delta_; }
    double d_p() const { return d_ / delta_; }
    double omega() const { return omega_; }

    friend bool operator==(const InteractionParams&, const InteractionParams&) = default;

private:
    InteractionParams(double a, double b, double c, double d);

    double a_, b_, c_, d_;
    double delta_;
    double omega_;
};

/// Relative tolerance below which |delta| counts as zero.
inline constexpr double kDegeneracyTolerance = 1e-12;

enum class StandardForm { TypeO, TypeA, TypeB };

std::string_view to_string(StandardForm form);

/// Scale factors applied before (Lambda on Q, lambda on q) and after (mu on
/// q') the interaction to reach a standard form.
struct ScaleTriple {
    double big_lambda;
    double small_lambda;
    double mu;
};

struct StandardFormClass {
    StandardForm tag;
    Matrix2 reduced_position_matrix;
    Matrix2 reduced_momentum_matrix;
    ScaleTriple scale;
};

StandardFormClass classify(const InteractionParams& params);

struct HeisenbergMatrices {
    /// (Q, q) -> (Q', q')
    Matrix2 position;
    /// (p, P) -> (p', P')
    Matrix2 momentum;
};

HeisenbergMatrices heisenberg_matrices(const InteractionParams& params);

/// Rescales a pair of coefficient matrices with a scale triple:
///   position -> diag(1, mu) * position * diag(Lambda, lambda)
///   momentum -> diag(1/mu, 1) * momentum * diag(1/lambda, 1/Lambda)
HeisenbergMatrices apply_scale(const HeisenbergMatrices& raw, const ScaleTriple& scale);

/// |[Q', P'] / i hbar - 1|, |[q', p'] / i hbar - 1| and |[Q', p'] / i hbar|.
struct CommutatorResiduals {
    double probe_pair;
    double object_pair;
    double cross_pair;

    double max() const;
};

CommutatorResiduals commutator_residuals(const InteractionParams& params);

/// Invertible linear coordinate map (x', y') = M (x, y) with det M > 0.
/// The oracle works with these directly because inverse maps need not keep
/// the canonical signs of InteractionParams.
class CoordinateMap {
public:
    /// Position map on (q, Q): q' = d q + c Q, Q' = b q + a Q.
    static CoordinateMap from_params(const InteractionParams& params);
    static CoordinateMap from_matrix(const Matrix2& m);

    const Matrix2& matrix() const { return m_; }
    double determinant() const { return m_.determinant(); }
    CoordinateMap inverse() const;

private:
    explicit CoordinateMap(const Matrix2& m) : m_(m) {}
    Matrix2 m_;
};

}  // namespace qmeas

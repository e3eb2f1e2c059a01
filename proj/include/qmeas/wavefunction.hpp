#pragma once

#include <array>
#include <complex>
#include <span>
#include <utility>
#include <vector>

#include "qmeas/distribution.hpp"
#include "qmeas/interaction.hpp"

namespace qmeas {

using Complex = std::complex<double>;

inline constexpr double kWavefunctionNormTolerance = 1e-6;

/// Sign of the Fourier kernel exp(sign * i x p / hbar) taking position
/// amplitudes to momentum amplitudes. Negative is the physical convention;
/// Positive exists only to check that the test suites notice a flipped sign.
enum class FourierSign : int { Negative = -1, Positive = 1 };

class Wavefunction1D {
public:
    /// Throws InvalidState unless step * sum |amp|^2 = 1 within 1e-6.
    static Wavefunction1D make(const Grid1D& grid, std::vector<Complex> amplitudes);

    const Grid1D& grid() const { return grid_; }
    std::span<const Complex> amplitudes() const { return amplitudes_; }

    double norm() const;
    /// Linear interpolation of the amplitude, zero outside the grid.
    Complex value_at(double x) const;
    GriddedDistribution density() const;

private:
    Wavefunction1D(const Grid1D& grid, std::vector<Complex> amplitudes)
        : grid_(grid), amplitudes_(std::move(amplitudes)) {}

    Grid1D grid_;
    std::vector<Complex> amplitudes_;
};

/// Minimum-uncertainty packet with position spread `sigma` centred on
/// mean_x and mean momentum mean_k. Throws GridTooNarrow unless the grid
/// reaches 8 sigma past the mean on both sides.
Wavefunction1D gaussian_packet(double mean_x, double sigma, double mean_k, const Grid1D& grid,
                               double hbar = kDefaultHbar);

/// Conjugate grid of an n-point axis with spacing dx: dp = 2 pi hbar / (n dx),
/// centred on `center` (the n/2-th sample sits on it).
Grid1D conjugate_axis(const Grid1D& axis, double center, double hbar);

/// Momentum amplitudes phi(p) = (2 pi hbar)^(-1/2) integral psi(x) exp(sign i x p / hbar) dx.
Wavefunction1D momentum_representation(const Wavefunction1D& psi, double hbar = kDefaultHbar,
                                       FourierSign sign = FourierSign::Negative,
                                       double momentum_center = 0.0);

enum class Basis { Position, Momentum };

/// Two-particle amplitude on a row-major grid: rows follow the object axis
/// (q or p), columns the probe axis (Q or P).
class JointWavefunction {
public:
    static JointWavefunction make(const Grid1D& object_axis, const Grid1D& probe_axis,
                                  std::vector<Complex> amplitudes, Basis basis = Basis::Position);

    const Grid1D& object_axis() const { return object_axis_; }
    const Grid1D& probe_axis() const { return probe_axis_; }
    Basis basis() const { return basis_; }
    std::span<const Complex> amplitudes() const { return amplitudes_; }
    Complex at(std::size_t i, std::size_t j) const { return amplitudes_[i * probe_axis_.count + j]; }

    double norm() const;

private:
    JointWavefunction(const Grid1D& o, const Grid1D& p, std::vector<Complex> amplitudes, Basis basis)
        : object_axis_(o), probe_axis_(p), amplitudes_(std::move(amplitudes)), basis_(basis) {}

    Grid1D object_axis_;
    Grid1D probe_axis_;
    std::vector<Complex> amplitudes_;
    Basis basis_;
};

JointWavefunction product_state(const Wavefunction1D& psi, const Wavefunction1D& Psi,
                                const Grid1D& object_axis, const Grid1D& probe_axis);

/// Output grids for a joint state: position axes for (q', Q') and the
/// centres of the conjugate momentum axes for (p', P').
struct JointAxes {
    Grid1D object;
    Grid1D probe;
    double object_momentum_center = 0.0;
    double probe_momentum_center = 0.0;
};

/// Chooses a `points` x `points` grid holding +-span_sigmas standard
/// deviations of every output marginal in both position and momentum, using
/// the input moments pushed through the linear map. Throws GridTooNarrow if
/// no spacing satisfies both constraints.
JointAxes output_axes(const InteractionParams& params, const Wavefunction1D& psi, const Wavefunction1D& Psi,
                      std::size_t points = 1024, double span_sigmas = 12.0, double hbar = kDefaultHbar);

/// Truncated-mass limit for pre-images falling outside the output grid.
inline constexpr double kTruncationTolerance = 1e-9;

/// Applies the interaction to psi (object) x Psi (probe):
///   Psi'(q', Q') = delta^(-1/2) psi((a q' - c Q') / delta) Psi((d Q' - b q') / delta),
/// interpolating each factor linearly on its input grid (bilinear on the
/// product). Throws GridTooNarrow if more than 1e-9 of the input mass maps
/// outside the output grid.
JointWavefunction apply_interaction(const InteractionParams& params, const Wavefunction1D& psi,
                                    const Wavefunction1D& Psi, const JointAxes& axes);
JointWavefunction apply_interaction(const InteractionParams& params, const Wavefunction1D& psi,
                                    const Wavefunction1D& Psi);

/// Lagrange interpolation on 2, 4 or 6 nodes per axis.
enum class Interpolation { Bilinear, Bicubic, Quintic };

/// Pushes a joint position-basis state through (q', Q') = M (q, Q),
/// with amplitude factor det(M)^(-1/2).
JointWavefunction apply_map(const CoordinateMap& map, const JointWavefunction& state, const Grid1D& object_axis,
                            const Grid1D& probe_axis, Interpolation interpolation = Interpolation::Quintic);

/// 2-D transform to the momentum basis with kernel exp(sign i (q p + Q P) / hbar) / (2 pi hbar).
JointWavefunction momentum_representation(const JointWavefunction& joint, double hbar = kDefaultHbar,
                                          FourierSign sign = FourierSign::Negative,
                                          std::array<double, 2> momentum_centers = {0.0, 0.0});

/// Inverse of momentum_representation back onto position axes starting at
/// `position_origins`.
JointWavefunction position_representation(const JointWavefunction& joint, std::array<double, 2> position_origins,
                                          double hbar = kDefaultHbar, FourierSign sign = FourierSign::Negative);

struct Marginals {
    GriddedDistribution object;
    GriddedDistribution probe;
};

/// Integrates |amplitude|^2 over the other axis.
Marginals marginals(const JointWavefunction& joint);

/// Integral of ||x|^2 - |y|^2| over a shared grid.
double density_l1(const JointWavefunction& x, const JointWavefunction& y);

}  // namespace qmeas

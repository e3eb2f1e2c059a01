#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "qmeas/interaction.hpp"
#include "qmeas/wavefunction.hpp"

namespace qmeas {

enum class VerifyLevel { Quick, Full };

inline constexpr std::uint64_t kDefaultSeed = 20240601;

struct VerifyOptions {
    std::uint64_t seed = kDefaultSeed;
    VerifyLevel level = VerifyLevel::Full;
    /// Kernel sign used by the oracle's momentum transform. Flipping it is a
    /// deliberate fault for checking that the oracle suite notices.
    FourierSign sign = FourierSign::Negative;
    double hbar = kDefaultHbar;
};

struct InvariantResult {
    std::string suite;
    std::string name;
    bool passed;
    double residual;
    double tolerance;
};

struct VerifyReport {
    std::uint64_t seed;
    VerifyLevel level;
    std::vector<InvariantResult> results;

    bool passed() const;
    std::size_t failures() const;
};

VerifyReport run_verification(const VerifyOptions& options = {});

/// Stable JSON rendering: {"seed", "level", "passed", "results": [...]}.
/// Non-finite residuals are written as the strings "inf" / "nan".
std::string to_json(const VerifyReport& report);

// Settings shared with the acceptance suite.

/// Points of the dense w grid used to locate the circle-bound minimum.
inline constexpr std::size_t kCircleSearchPoints = 20001;

/// Gains a = 0.01, 0.1, ..., 0.9, 0.99 of the a + b = 1 sweep.
std::vector<double> sweep_gains();

/// Gain sequence and thresholds of the delta-limit study (b = 1, delta = 1,
/// unit Gaussians on 4096 points spanning +-10 sigma).
std::vector<double> delta_limit_sequence();
inline constexpr double kDeltaLimitThresholdPosition = 3.05e-4;
inline constexpr double kDeltaLimitThresholdMomentum = 3.05e-4;

/// Random valid parameters with a, b in [0.05, 3], c in [-2, 2] and delta in
/// [0.2, 3].
InteractionParams random_params(std::mt19937_64& rng);

}  // namespace qmeas

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>

namespace s4is {

using Vector = Eigen::VectorXd;

/// Point sets are stored one point per row.
using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Rng = std::mt19937_64;

/// Derives an independent generator for sub-task `stream` of a run seeded with `seed`.
inline Rng substream(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x5a4d15u};
    return Rng(seq);
}

}  // namespace s4is

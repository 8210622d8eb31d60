#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "truecluster/matrix.hpp"
#include "truecluster/types.hpp"

namespace truecluster {

/// Artificial 2-d datasets with known cluster structure.
///  blobs      `clusters` isotropic Gaussian blobs (sd = noise) with centres
///             20 units apart on a circle
///  flipper4   four Gaussian clusters in two pairs; the members of a pair
///             touch, the pairs are well separated
///  elongated2 two parallel bars 20 long, 4 apart, Gaussian thickness
///  ring       a central disc inside a concentric ring
///  spiral     two interleaved Archimedean spirals
///  modeclus3  a disc, a bar and an arc of different densities
/// For ring, spiral and modeclus3 `noise` is the half-width of a uniform
/// radial jitter, so every point stays within that distance of its curve.
enum class Shape { blobs, flipper4, elongated2, ring, spiral, modeclus3 };

std::string_view to_string(Shape shape) noexcept;
std::optional<Shape> parse_shape(std::string_view name) noexcept;

struct GenerateConfig {
    Shape shape = Shape::blobs;
    std::size_t n = 400;
    /// Negative selects the shape's default.
    double noise = -1.0;
    /// Blob count for Shape::blobs.
    std::size_t clusters = 2;
    std::uint64_t seed = 1;
};

struct GeneratedData {
    Matrix<double> points;
    CrispAssignment labels;
};

/// Default noise per shape: blobs 1, flipper4 1, elongated2 0.5, ring 0.2,
/// spiral 0.15, modeclus3 0.2.
double default_noise(Shape shape) noexcept;

/// Cases are split as evenly as possible over clusters, case i going to
/// cluster i mod K. Throws InvalidArgument for n < 4.
GeneratedData generate(const GenerateConfig& cfg);

}  // namespace truecluster

#include "truecluster/generate.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "truecluster/error.hpp"
#include "truecluster/random.hpp"

namespace truecluster {

namespace {

using std::numbers::pi;

struct Point {
    double x;
    double y;
};

double jitter(Rng& rng, double half_width) { return half_width * (2.0 * rng.uniform01() - 1.0); }

Point on_disc(Rng& rng, Point centre, double radius) {
    const double r = radius * std::sqrt(rng.uniform01());
    const double a = 2.0 * pi * rng.uniform01();
    return {centre.x + r * std::cos(a), centre.y + r * std::sin(a)};
}

Point blob_point(Rng& rng, std::size_t cluster, std::size_t clusters, double sd) {
    Point c{0.0, 0.0};
    if (clusters > 1) {
        const double radius = 10.0 / std::sin(pi / static_cast<double>(clusters));
        const double a = 2.0 * pi * static_cast<double>(cluster) / static_cast<double>(clusters);
        c = {radius * std::cos(a), radius * std::sin(a)};
    }
    return {c.x + sd * rng.normal(), c.y + sd * rng.normal()};
}

Point flipper_point(Rng& rng, std::size_t cluster, double sd) {
    constexpr std::array<Point, 4> centres{{{-6.0, -1.6}, {-6.0, 1.6}, {6.0, -1.6}, {6.0, 1.6}}};
    const Point c = centres[cluster];
    return {c.x + sd * rng.normal(), c.y + sd * rng.normal()};
}

Point elongated_point(Rng& rng, std::size_t cluster, double sd) {
    const double x = -10.0 + 20.0 * rng.uniform01();
    return {x, (cluster == 0 ? -2.0 : 2.0) + sd * rng.normal()};
}

Point ring_point(Rng& rng, std::size_t cluster, double half_width) {
    if (cluster == 0) return on_disc(rng, {0.0, 0.0}, 1.5);
    const double a = 2.0 * pi * rng.uniform01();
    const double r = 5.0 + jitter(rng, half_width);
    return {r * std::cos(a), r * std::sin(a)};
}

Point spiral_point(Rng& rng, std::size_t cluster, double half_width) {
    // r = theta, roughly uniform in arc length over [pi/2, 3 pi].
    constexpr double t0 = 0.5 * pi;
    constexpr double t1 = 3.0 * pi;
    const double theta = std::sqrt(t0 * t0 + rng.uniform01() * (t1 * t1 - t0 * t0));
    const double r = theta + jitter(rng, half_width);
    const double a = theta + (cluster == 0 ? 0.0 : pi);
    return {r * std::cos(a), r * std::sin(a)};
}

Point modeclus_point(Rng& rng, std::size_t cluster, double half_width) {
    switch (cluster) {
        case 0:
            return on_disc(rng, {-8.0, 0.0}, 1.5);
        case 1:
            return {-4.0 + 8.0 * rng.uniform01(), -6.0 + jitter(rng, half_width)};
        default: {
            const double a = pi * (0.15 + 0.7 * rng.uniform01());
            const double r = 5.0 + jitter(rng, half_width);
            return {r * std::cos(a), r * std::sin(a)};
        }
    }
}

}  // namespace

std::string_view to_string(Shape shape) noexcept {
    switch (shape) {
        case Shape::blobs: return "blobs";
        case Shape::flipper4: return "flipper4";
        case Shape::elongated2: return "elongated2";
        case Shape::ring: return "ring";
        case Shape::spiral: return "spiral";
        case Shape::modeclus3: return "modeclus3";
    }
    return "?";
}

std::optional<Shape> parse_shape(std::string_view name) noexcept {
    for (const Shape s : {Shape::blobs, Shape::flipper4, Shape::elongated2, Shape::ring, Shape::spiral, Shape::modeclus3})
        if (to_string(s) == name) return s;
    return std::nullopt;
}

double default_noise(Shape shape) noexcept {
    switch (shape) {
        case Shape::blobs: return 1.0;
        case Shape::flipper4: return 1.0;
        case Shape::elongated2: return 0.5;
        case Shape::ring: return 0.2;
        case Shape::spiral: return 0.15;
        case Shape::modeclus3: return 0.2;
    }
    return 1.0;
}

GeneratedData generate(const GenerateConfig& cfg) {
    if (cfg.n < 4) throw Error(ErrorCode::InvalidArgument, "n must be at least 4");
    std::size_t k = 2;
    switch (cfg.shape) {
        case Shape::blobs: k = cfg.clusters; break;
        case Shape::flipper4: k = 4; break;
        case Shape::modeclus3: k = 3; break;
        default: break;
    }
    if (k < 1 || k > cfg.n) throw Error(ErrorCode::InvalidArgument, "cluster count must be in 1..n");
    const double noise = cfg.noise < 0.0 ? default_noise(cfg.shape) : cfg.noise;

    Rng rng(derive_seed(cfg.seed, {static_cast<std::uint64_t>(cfg.shape)}));
    GeneratedData out{Matrix<double>(cfg.n, 2), CrispAssignment{std::vector<Label>(cfg.n), k}};
    for (std::size_t i = 0; i < cfg.n; ++i) {
        const std::size_t c = i % k;
        Point p{};
        switch (cfg.shape) {
            case Shape::blobs: p = blob_point(rng, c, k, noise); break;
            case Shape::flipper4: p = flipper_point(rng, c, noise); break;
            case Shape::elongated2: p = elongated_point(rng, c, noise); break;
            case Shape::ring: p = ring_point(rng, c, noise); break;
            case Shape::spiral: p = spiral_point(rng, c, noise); break;
            case Shape::modeclus3: p = modeclus_point(rng, c, noise); break;
        }
        out.points(i, 0) = p.x;
        out.points(i, 1) = p.y;
        out.labels.labels[i] = static_cast<Label>(c);
    }
    return out;
}

}  // namespace truecluster

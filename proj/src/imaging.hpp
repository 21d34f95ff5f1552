#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "apo.hpp"
#include "engine.hpp"

namespace protozoa {

struct GrayImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> pixels;  // row-major

    friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

struct Histogram {
    std::array<std::uint64_t, 256> counts{};
    std::uint64_t total = 0;
};

/// Malformed Netpbm input; offset is the byte position where parsing failed.
class ImageParseError : public std::runtime_error {
public:
    ImageParseError(std::size_t offset, const std::string& what);
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/*
 * Decodes P2/P5 (gray) and P3/P6 (RGB) with maxval 255. Colour pixels are
 * converted with 0.299 R + 0.587 G + 0.114 B, rounded half up.
 */
GrayImage load_image(std::span<const std::uint8_t> bytes);

/// Reads the whole file; throws std::runtime_error when it cannot be opened.
GrayImage load_image_file(const std::filesystem::path& path);

enum class PgmEncoding { ascii, binary };  // P2, P5

std::vector<std::uint8_t> encode_pgm(const GrayImage& img, PgmEncoding encoding);

Histogram histogram(const GrayImage& img);

/// omega0 * omega1 * (mu0 - mu1)^2 with class 0 = intensities <= t; 0 if a class is empty.
double between_class_variance(const Histogram& h, int t);

struct ThresholdChoice {
    int threshold = 0;
    double variance = 0.0;
};

/// Exhaustive argmax over t = 0..255, smallest t on ties.
ThresholdChoice brute_force_otsu(const Histogram& h);

/// Continuous search position -> threshold: round half up, clamp to [0, 255].
int position_to_threshold(double x) noexcept;

/// Objective minimising -between_class_variance(round(x)) over a 1-D position.
Objective otsu_objective(const Histogram& h);

/// Defaults matching the thresholding experiment: ps 100, 50 iterations, range [0, 255].
ApoConfig threshold_config(std::uint64_t seed = 0, std::size_t ps = 100,
                           std::uint64_t iterations = 50);

struct ApoThreshold {
    int threshold = 0;
    double variance = 0.0;
    RunResult run;
};

/// Forces dim = 1 and bounds [0, 255] on cfg before running.
ApoThreshold apo_threshold(const GrayImage& img, ApoConfig cfg, const EngineMode& mode);

/// Pixels <= t become 0, the rest 255.
GrayImage apply_threshold(const GrayImage& img, int t);

}  // namespace protozoa

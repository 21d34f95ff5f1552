#include "imaging.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>

namespace protozoa {

namespace {

class NetpbmReader {
public:
    explicit NetpbmReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::size_t offset() const noexcept { return pos_; }
    std::size_t last_token() const noexcept { return token_; }
    std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

    [[noreturn]] void fail(std::size_t at, const std::string& what) const {
        throw ImageParseError(at, what);
    }

    char magic() {
        if (bytes_.size() < 2 || bytes_[0] != 'P') {
            fail(0, "missing Netpbm magic number");
        }
        const char kind = static_cast<char>(bytes_[1]);
        if (kind != '2' && kind != '3' && kind != '5' && kind != '6') {
            fail(1, std::string("unsupported Netpbm type P") + kind);
        }
        pos_ = 2;
        return kind;
    }

    // Skips whitespace and '#' comments, then parses one decimal integer.
    std::uint64_t integer(const char* what) {
        skip_separators();
        const std::size_t start = pos_;
        token_ = start;
        std::uint64_t value = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            value = value * 10 + (bytes_[pos_] - '0');
            if (value > 0xFFFFFFFFULL) {
                fail(start, std::string(what) + " is out of range");
            }
            ++pos_;
        }
        if (pos_ == start) {
            fail(start, pos_ < bytes_.size() ? std::string("expected ") + what
                                             : std::string("truncated input, expected ") + what);
        }
        return value;
    }

    // Binary rasters start after exactly one whitespace byte.
    void single_whitespace() {
        if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
            fail(pos_, "expected whitespace before raster data");
        }
        ++pos_;
    }

    std::span<const std::uint8_t> take(std::size_t n) {
        if (remaining() < n) {
            fail(bytes_.size(), "truncated raster: expected " + std::to_string(n) + " bytes, found " +
                                    std::to_string(remaining()));
        }
        auto out = bytes_.subspan(pos_, n);
        pos_ += n;
        return out;
    }

private:
    void skip_separators() {
        while (pos_ < bytes_.size()) {
            if (std::isspace(bytes_[pos_])) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') {
                    ++pos_;
                }
            } else {
                break;
            }
        }
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
    std::size_t token_ = 0;
};

std::uint8_t luminance(std::uint32_t r, std::uint32_t g, std::uint32_t b) noexcept {
    const double y = 0.299 * r + 0.587 * g + 0.114 * b;
    return static_cast<std::uint8_t>(std::clamp(std::floor(y + 0.5), 0.0, 255.0));
}

}  // namespace

ImageParseError::ImageParseError(std::size_t offset, const std::string& what)
    : std::runtime_error("byte " + std::to_string(offset) + ": " + what), offset_(offset) {}

GrayImage load_image(std::span<const std::uint8_t> bytes) {
    NetpbmReader in(bytes);
    const char kind = in.magic();
    const bool color = kind == '3' || kind == '6';
    const bool binary = kind == '5' || kind == '6';

    const auto width = in.integer("width");
    if (width == 0) {
        in.fail(in.last_token(), "image width must be positive");
    }
    const auto height = in.integer("height");
    if (height == 0) {
        in.fail(in.last_token(), "image height must be positive");
    }
    const auto maxval = in.integer("maxval");
    if (maxval != 255) {
        in.fail(in.last_token(), "maxval " + std::to_string(maxval) + " unsupported (only 255)");
    }

    GrayImage img;
    img.width = width;
    img.height = height;
    const std::size_t count = img.width * img.height;
    const std::size_t channels = color ? 3 : 1;
    img.pixels.resize(count);

    if (binary) {
        in.single_whitespace();
        const auto raster = in.take(count * channels);
        for (std::size_t i = 0; i < count; ++i) {
            img.pixels[i] = color ? luminance(raster[3 * i], raster[3 * i + 1], raster[3 * i + 2])
                                  : raster[i];
        }
        return img;
    }

    std::array<std::uint32_t, 3> sample{};
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t c = 0; c < channels; ++c) {
            const auto v = in.integer("sample");
            if (v > 255) {
                in.fail(in.last_token(), "sample " + std::to_string(v) + " exceeds maxval");
            }
            sample[c] = static_cast<std::uint32_t>(v);
        }
        img.pixels[i] = color ? luminance(sample[0], sample[1], sample[2])
                              : static_cast<std::uint8_t>(sample[0]);
    }
    return img;
}

GrayImage load_image_file(const std::filesystem::path& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(file)),
                                    std::istreambuf_iterator<char>());
    return load_image(bytes);
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& img, PgmEncoding encoding) {
    const std::string header = std::string(encoding == PgmEncoding::binary ? "P5" : "P2") + "\n" +
                               std::to_string(img.width) + " " + std::to_string(img.height) +
                               "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    if (encoding == PgmEncoding::binary) {
        out.insert(out.end(), img.pixels.begin(), img.pixels.end());
        return out;
    }
    for (std::size_t row = 0; row < img.height; ++row) {
        std::string line;
        for (std::size_t col = 0; col < img.width; ++col) {
            if (col != 0) {
                line += ' ';
            }
            line += std::to_string(img.pixels[row * img.width + col]);
        }
        line += '\n';
        out.insert(out.end(), line.begin(), line.end());
    }
    return out;
}

Histogram histogram(const GrayImage& img) {
    Histogram h;
    for (std::uint8_t v : img.pixels) {
        ++h.counts[v];
    }
    h.total = img.pixels.size();
    return h;
}

double between_class_variance(const Histogram& h, int t) {
    if (t < 0 || t > 255) {
        throw std::invalid_argument("threshold must lie in [0, 255]");
    }
    std::uint64_t n0 = 0;
    std::uint64_t s0 = 0;
    std::uint64_t s_all = 0;
    for (int v = 0; v < 256; ++v) {
        const std::uint64_t weighted = static_cast<std::uint64_t>(v) * h.counts[v];
        s_all += weighted;
        if (v <= t) {
            n0 += h.counts[v];
            s0 += weighted;
        }
    }
    const std::uint64_t n1 = h.total - n0;
    if (n0 == 0 || n1 == 0) {
        return 0.0;
    }
    const double total = static_cast<double>(h.total);
    const double w0 = static_cast<double>(n0) / total;
    const double w1 = static_cast<double>(n1) / total;
    const double mu0 = static_cast<double>(s0) / static_cast<double>(n0);
    const double mu1 = static_cast<double>(s_all - s0) / static_cast<double>(n1);
    const double diff = mu0 - mu1;
    return w0 * w1 * diff * diff;
}

ThresholdChoice brute_force_otsu(const Histogram& h) {
    ThresholdChoice best{0, between_class_variance(h, 0)};
    for (int t = 1; t < 256; ++t) {
        const double v = between_class_variance(h, t);
        if (v > best.variance) {
            best = {t, v};
        }
    }
    return best;
}

int position_to_threshold(double x) noexcept {
    if (std::isnan(x)) {
        return 0;
    }
    return static_cast<int>(std::clamp(std::floor(x + 0.5), 0.0, 255.0));
}

Objective otsu_objective(const Histogram& h) {
    return Objective(
        "otsu", [h](std::span<const double> x) {
            return -between_class_variance(h, position_to_threshold(x[0]));
        },
        1);
}

ApoConfig threshold_config(std::uint64_t seed, std::size_t ps, std::uint64_t iterations) {
    ApoConfig cfg;
    cfg.ps = ps;
    cfg.dim = 1;
    cfg.bounds = Bounds{0.0, 255.0, 1};
    cfg.max_iterations = iterations;
    cfg.seed = seed;
    return cfg;
}

ApoThreshold apo_threshold(const GrayImage& img, ApoConfig cfg, const EngineMode& mode) {
    cfg.dim = 1;
    cfg.bounds = Bounds{0.0, 255.0, 1};
    const Histogram h = histogram(img);
    ApoThreshold out;
    out.run = run(cfg, otsu_objective(h), mode);
    out.threshold = position_to_threshold(out.run.best_position.at(0));
    out.variance = between_class_variance(h, out.threshold);
    return out;
}

GrayImage apply_threshold(const GrayImage& img, int t) {
    if (t < 0 || t > 255) {
        throw std::invalid_argument("threshold must lie in [0, 255]");
    }
    GrayImage out = img;
    for (auto& p : out.pixels) {
        p = p <= t ? 0 : 255;
    }
    return out;
}

}  // namespace protozoa

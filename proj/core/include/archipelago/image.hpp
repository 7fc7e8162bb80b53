#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace archipelago {

/// Packed 8-bit RGB color.
struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Row-major RGB raster. Pixels outside the written area default to black.
class Image {
public:
    Image() = default;
    Image(int height, int width) : height_(height), width_(width), data_(static_cast<std::size_t>(height) * width * 3, 0) {}

    [[nodiscard]] int height() const { return height_; }
    [[nodiscard]] int width() const { return width_; }

    [[nodiscard]] Rgb at(int row, int col) const {
        const std::size_t base = offset(row, col);
        return Rgb{data_[base], data_[base + 1], data_[base + 2]};
    }

    void set(int row, int col, Rgb color) {
        const std::size_t base = offset(row, col);
        data_[base] = color.r;
        data_[base + 1] = color.g;
        data_[base + 2] = color.b;
    }

    /// Flat [height*width*3] buffer, row-major, channels interleaved.
    [[nodiscard]] const std::vector<std::uint8_t>& data() const { return data_; }

    /// Channel values scaled to [0,1] in the same layout as data().
    [[nodiscard]] std::vector<double> to_doubles() const {
        std::vector<double> out(data_.size());
        for (std::size_t i = 0; i < data_.size(); ++i) {
            out[i] = static_cast<double>(data_[i]) / 255.0;
        }
        return out;
    }

    friend bool operator==(const Image&, const Image&) = default;

private:
    [[nodiscard]] std::size_t offset(int row, int col) const {
        return (static_cast<std::size_t>(row) * width_ + col) * 3;
    }

    int height_ = 0;
    int width_ = 0;
    std::vector<std::uint8_t> data_;
};

}  // namespace archipelago

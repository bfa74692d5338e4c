// Writes a synthetic piecewise-smooth grayscale test image (binary PGM).
// Useful as the phase map of a simulated pure phase object:
//
//   make_phantom 256 256 phantom.pgm
//   ctv simulate phantom.pgm run.cfg measurement.ctvf

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "ctv/io.hpp"

namespace {

double phantom_value(double y, double x) {
    // Normalized coordinates in [0,1): a ramp background with a disk, a
    // rectangle, and a ring on top. Values stay inside [0,1].
    double value = 0.15 + 0.2 * x;
    const double dx = x - 0.35, dy = y - 0.4;
    if (dx * dx + dy * dy < 0.04) value = 0.85;
    if (x > 0.55 && x < 0.85 && y > 0.55 && y < 0.8) value = 0.65;
    const double r = std::sqrt((x - 0.7) * (x - 0.7) + (y - 0.25) * (y - 0.25));
    if (r > 0.1 && r < 0.14) value = 0.95;
    return value;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 4) {
        std::fprintf(stderr, "usage: %s <rows> <cols> <output.pgm>\n", argv[0]);
        return 2;
    }
    const long rows = std::strtol(argv[1], nullptr, 10);
    const long cols = std::strtol(argv[2], nullptr, 10);
    if (rows < 1 || cols < 1) {
        std::fprintf(stderr, "invalid dimensions\n");
        return 2;
    }

    std::vector<std::uint8_t> pixels(static_cast<std::size_t>(rows * cols));
    for (long i = 0; i < rows; ++i)
        for (long j = 0; j < cols; ++j) {
            const double value = phantom_value(static_cast<double>(i) / static_cast<double>(rows),
                                               static_cast<double>(j) / static_cast<double>(cols));
            pixels[static_cast<std::size_t>(i * cols + j)] =
                static_cast<std::uint8_t>(std::lround(255.0 * value));
        }

    ctv::write_pgm(argv[3], pixels, static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
    std::printf("wrote %ldx%ld phantom to %s\n", rows, cols, argv[3]);
    return 0;
}

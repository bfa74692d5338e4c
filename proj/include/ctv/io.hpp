#pragma once

#include <bit>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "field.hpp"
#include "retrieval.hpp"

namespace ctv {

struct FieldFileError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// FieldFile: "CTVF", u32 version=1, u32 rows, u32 cols (little-endian),
// then rows*cols f64 LE row-major for the real part, then for the imaginary.

namespace detail {

inline void put_u32(std::ostream& out, std::uint32_t value) {
    unsigned char b[4] = {static_cast<unsigned char>(value & 0xff),
                          static_cast<unsigned char>((value >> 8) & 0xff),
                          static_cast<unsigned char>((value >> 16) & 0xff),
                          static_cast<unsigned char>((value >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

inline std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw FieldFileError("field file truncated");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

static_assert(std::endian::native == std::endian::little,
              "FieldFile payload assumes a little-endian host");

inline void put_doubles(std::ostream& out, const Matrix& m) {
    out.write(reinterpret_cast<const char*>(m.data()),
              static_cast<std::streamsize>(m.size() * sizeof(double)));
}

inline void get_doubles(std::istream& in, Matrix& m) {
    in.read(reinterpret_cast<char*>(m.data()),
            static_cast<std::streamsize>(m.size() * sizeof(double)));
    if (!in) throw FieldFileError("field file truncated");
}

}  // namespace detail

inline void write_field(const std::filesystem::path& path, const ComplexField& field) {
    if (!field.u.all_finite() || !field.v.all_finite())
        throw FieldFileError("refusing to write non-finite field");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FieldFileError("cannot open for writing: " + path.string());
    out.write("CTVF", 4);
    detail::put_u32(out, 1);
    detail::put_u32(out, static_cast<std::uint32_t>(field.rows()));
    detail::put_u32(out, static_cast<std::uint32_t>(field.cols()));
    detail::put_doubles(out, field.u);
    detail::put_doubles(out, field.v);
    if (!out) throw FieldFileError("write failed: " + path.string());
}

inline ComplexField read_field(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FieldFileError("cannot open: " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "CTVF", 4) != 0)
        throw FieldFileError("bad magic: " + path.string());
    if (detail::get_u32(in) != 1) throw FieldFileError("unsupported version: " + path.string());
    const std::uint32_t rows = detail::get_u32(in);
    const std::uint32_t cols = detail::get_u32(in);
    if (rows < 1 || cols < 1) throw FieldFileError("empty field: " + path.string());

    // Validate the payload length against the declared dimensions before
    // allocating anything.
    std::error_code ec;
    const auto file_size = std::filesystem::file_size(path, ec);
    const std::uintmax_t expected =
        16 + 16 * static_cast<std::uintmax_t>(rows) * static_cast<std::uintmax_t>(cols);
    if (ec || file_size != expected) {
        if (!ec && file_size > expected) throw FieldFileError("trailing bytes: " + path.string());
        throw FieldFileError("field file truncated: " + path.string());
    }

    Matrix u(rows, cols), v(rows, cols);
    detail::get_doubles(in, u);
    detail::get_doubles(in, v);
    if (!u.all_finite() || !v.all_finite())
        throw FieldFileError("non-finite payload: " + path.string());
    return ComplexField(std::move(u), std::move(v));
}

// ---------------------------------------------------------------------------
// 8-bit binary PGM (P5, maxval 255)

inline void write_pgm(const std::filesystem::path& path, const std::vector<std::uint8_t>& pixels,
                      std::size_t rows, std::size_t cols) {
    if (pixels.size() != rows * cols) throw std::invalid_argument("write_pgm: size mismatch");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FieldFileError("cannot open for writing: " + path.string());
    out << "P5\n" << cols << " " << rows << "\n255\n";
    out.write(reinterpret_cast<const char*>(pixels.data()),
              static_cast<std::streamsize>(pixels.size()));
    if (!out) throw FieldFileError("write failed: " + path.string());
}

/// Reads a binary 8-bit PGM; values are returned unscaled in 0..255.
inline Matrix read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FieldFileError("cannot open: " + path.string());
    auto next_token = [&in]() -> std::string {
        std::string token;
        while (true) {
            const int c = in.get();
            if (c == EOF) throw FieldFileError("pgm header truncated");
            if (c == '#') {  // comment runs to end of line
                std::string skip;
                std::getline(in, skip);
                continue;
            }
            if (std::isspace(c)) {
                if (!token.empty()) return token;
                continue;
            }
            token.push_back(static_cast<char>(c));
        }
    };
    if (next_token() != "P5") throw FieldFileError("not a binary pgm: " + path.string());
    const unsigned long cols = std::stoul(next_token());
    const unsigned long rows = std::stoul(next_token());
    const unsigned long maxval = std::stoul(next_token());
    if (rows < 1 || cols < 1) throw FieldFileError("empty pgm: " + path.string());
    if (maxval != 255) throw FieldFileError("pgm maxval must be 255: " + path.string());
    std::vector<std::uint8_t> pixels(rows * cols);
    in.read(reinterpret_cast<char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
    if (!in) throw FieldFileError("pgm payload truncated: " + path.string());
    Matrix m(rows, cols);
    for (std::size_t k = 0; k < pixels.size(); ++k) m.data()[k] = static_cast<double>(pixels[k]);
    return m;
}

enum class PgmChannel { Phase, Magnitude, Real, Imag };

struct PgmBounds {
    double lo = 0.0;
    double hi = 0.0;
};

/// Maps a field channel to bytes. Phase uses the fixed (-pi, pi] -> 0..255
/// mapping; the other channels are min-max scaled (constant images map to 0).
inline PgmBounds field_to_pgm_bytes(const ComplexField& field, PgmChannel channel,
                                    std::vector<std::uint8_t>& out) {
    const std::size_t total = field.u.size();
    Matrix values(field.rows(), field.cols());
    for (std::size_t i = 0; i < field.rows(); ++i)
        for (std::size_t j = 0; j < field.cols(); ++j) {
            switch (channel) {
                case PgmChannel::Phase: values(i, j) = field.argument(i, j); break;
                case PgmChannel::Magnitude: values(i, j) = field.modulus(i, j); break;
                case PgmChannel::Real: values(i, j) = field.u(i, j); break;
                case PgmChannel::Imag: values(i, j) = field.v(i, j); break;
            }
        }

    PgmBounds bounds;
    out.resize(total);
    if (channel == PgmChannel::Phase) {
        bounds.lo = -std::numbers::pi;
        bounds.hi = std::numbers::pi;
        for (std::size_t k = 0; k < total; ++k) {
            const double scaled =
                255.0 * (values.data()[k] + std::numbers::pi) / (2.0 * std::numbers::pi);
            out[k] = static_cast<std::uint8_t>(std::clamp(std::lround(scaled), 0L, 255L));
        }
    } else {
        bounds.lo = bounds.hi = values.data()[0];
        for (double x : values) {
            bounds.lo = std::min(bounds.lo, x);
            bounds.hi = std::max(bounds.hi, x);
        }
        const double span = bounds.hi - bounds.lo;
        for (std::size_t k = 0; k < total; ++k) {
            const double scaled = span > 0.0 ? 255.0 * (values.data()[k] - bounds.lo) / span : 0.0;
            out[k] = static_cast<std::uint8_t>(std::clamp(std::lround(scaled), 0L, 255L));
        }
    }
    return bounds;
}

// ---------------------------------------------------------------------------
// Run configuration: plain key=value lines, '#' comments, blank lines ignored.
// Unknown and duplicate keys are rejected with the offending line number.

enum class ConfigAlgorithm { Fista, Ista, Ip, Gp, Fgp };

struct RunConfig {
    double wavelength_m = 500e-9;
    double distance_m = 5e-3;
    double pixel_pitch_m = 5e-6;
    TvVariant tv_variant = TvVariant::type1_aniso();
    double alpha = 0.5;
    double tau = 0.01;
    double lambda = 0.2;
    int outer_iters = 150;
    int inner_iters = 10;
    ConstraintSet constraint = ConstraintSet::FullSpace;
    std::optional<ConfigAlgorithm> algorithm;  // commands pick their default
    NoiseKind noise_kind = NoiseKind::None;
    double noise_level = 0.0;
    std::uint64_t seed = 0;
    bool warm_start = true;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

[[noreturn]] inline void config_fail(std::size_t line, const std::string& message) {
    throw ConfigError("config line " + std::to_string(line) + ": " + message);
}

inline double parse_double(const std::string& value, std::size_t line) {
    try {
        std::size_t used = 0;
        const double parsed = std::stod(value, &used);
        if (used != value.size()) config_fail(line, "trailing characters in number '" + value + "'");
        return parsed;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        config_fail(line, "not a number: '" + value + "'");
    }
}

inline long parse_int(const std::string& value, std::size_t line) {
    try {
        std::size_t used = 0;
        const long parsed = std::stol(value, &used);
        if (used != value.size()) config_fail(line, "trailing characters in integer '" + value + "'");
        return parsed;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        config_fail(line, "not an integer: '" + value + "'");
    }
}

}  // namespace detail

inline RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::vector<std::string> seen;
    std::optional<TvKind> variant_kind;

    std::istringstream stream(text);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(stream, raw)) {
        ++line_no;
        std::string line = detail::trim(raw);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) detail::config_fail(line_no, "expected key=value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty()) detail::config_fail(line_no, "empty key");
        if (value.empty()) detail::config_fail(line_no, "empty value for '" + key + "'");
        for (const auto& prior : seen)
            if (prior == key) detail::config_fail(line_no, "duplicate key '" + key + "'");
        seen.push_back(key);

        if (key == "wavelength_m") {
            cfg.wavelength_m = detail::parse_double(value, line_no);
            if (!(cfg.wavelength_m > 0.0)) detail::config_fail(line_no, "wavelength_m must be > 0");
        } else if (key == "distance_m") {
            cfg.distance_m = detail::parse_double(value, line_no);
        } else if (key == "pixel_pitch_m") {
            cfg.pixel_pitch_m = detail::parse_double(value, line_no);
            if (!(cfg.pixel_pitch_m > 0.0))
                detail::config_fail(line_no, "pixel_pitch_m must be > 0");
        } else if (key == "tv_variant") {
            if (value == "i-iso") variant_kind = TvKind::TypeIIsotropic;
            else if (value == "i-aniso") variant_kind = TvKind::TypeIAnisotropic;
            else if (value == "ii-iso") variant_kind = TvKind::TypeIIIsotropic;
            else if (value == "ii-aniso") variant_kind = TvKind::TypeIIAnisotropic;
            else detail::config_fail(line_no, "unknown tv_variant '" + value + "'");
        } else if (key == "alpha") {
            cfg.alpha = detail::parse_double(value, line_no);
            if (!(cfg.alpha >= 0.0 && cfg.alpha <= 1.0))
                detail::config_fail(line_no, "alpha must lie in [0,1]");
        } else if (key == "tau") {
            cfg.tau = detail::parse_double(value, line_no);
            if (!(cfg.tau > 0.0)) detail::config_fail(line_no, "tau must be > 0");
        } else if (key == "lambda") {
            cfg.lambda = detail::parse_double(value, line_no);
            if (!(cfg.lambda > 0.0)) detail::config_fail(line_no, "lambda must be > 0");
        } else if (key == "outer_iters") {
            const long parsed = detail::parse_int(value, line_no);
            if (parsed < 1) detail::config_fail(line_no, "outer_iters must be >= 1");
            cfg.outer_iters = static_cast<int>(parsed);
        } else if (key == "inner_iters") {
            const long parsed = detail::parse_int(value, line_no);
            if (parsed < 1) detail::config_fail(line_no, "inner_iters must be >= 1");
            cfg.inner_iters = static_cast<int>(parsed);
        } else if (key == "constraint") {
            if (value == "none") cfg.constraint = ConstraintSet::FullSpace;
            else if (value == "unit-disk") cfg.constraint = ConstraintSet::UnitDisk;
            else detail::config_fail(line_no, "unknown constraint '" + value + "'");
        } else if (key == "algorithm") {
            if (value == "fista") cfg.algorithm = ConfigAlgorithm::Fista;
            else if (value == "ista") cfg.algorithm = ConfigAlgorithm::Ista;
            else if (value == "ip") cfg.algorithm = ConfigAlgorithm::Ip;
            else if (value == "gp") cfg.algorithm = ConfigAlgorithm::Gp;
            else if (value == "fgp") cfg.algorithm = ConfigAlgorithm::Fgp;
            else detail::config_fail(line_no, "unknown algorithm '" + value + "'");
        } else if (key == "noise_kind") {
            if (value == "none") cfg.noise_kind = NoiseKind::None;
            else if (value == "intensity-gaussian") cfg.noise_kind = NoiseKind::IntensityGaussian;
            else if (value == "phase-gaussian") cfg.noise_kind = NoiseKind::PhaseGaussian;
            else detail::config_fail(line_no, "unknown noise_kind '" + value + "'");
        } else if (key == "noise_level") {
            cfg.noise_level = detail::parse_double(value, line_no);
            if (cfg.noise_level < 0.0) detail::config_fail(line_no, "noise_level must be >= 0");
        } else if (key == "seed") {
            const long parsed = detail::parse_int(value, line_no);
            if (parsed < 0) detail::config_fail(line_no, "seed must be >= 0");
            cfg.seed = static_cast<std::uint64_t>(parsed);
        } else if (key == "warm_start") {
            if (value == "on") cfg.warm_start = true;
            else if (value == "off") cfg.warm_start = false;
            else detail::config_fail(line_no, "warm_start must be on or off");
        } else {
            detail::config_fail(line_no, "unknown key '" + key + "'");
        }
    }

    const TvKind kind = variant_kind.value_or(TvKind::TypeIAnisotropic);
    switch (kind) {
        case TvKind::TypeIIsotropic: cfg.tv_variant = TvVariant::type1_iso(); break;
        case TvKind::TypeIAnisotropic: cfg.tv_variant = TvVariant::type1_aniso(); break;
        case TvKind::TypeIIIsotropic: cfg.tv_variant = TvVariant::type2_iso(cfg.alpha); break;
        case TvKind::TypeIIAnisotropic: cfg.tv_variant = TvVariant::type2_aniso(cfg.alpha); break;
    }
    return cfg;
}

inline RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

// ---------------------------------------------------------------------------
// CSV traces, header "iter,objective,rmse"; the rmse column is left empty
// when no reference was supplied.

inline void write_trace_csv(const std::filesystem::path& path,
                            const std::vector<double>& objective,
                            const std::vector<double>& rmse) {
    std::ofstream out(path);
    if (!out) throw FieldFileError("cannot open for writing: " + path.string());
    out << "iter,objective,rmse\n";
    char buffer[64];
    for (std::size_t i = 0; i < objective.size(); ++i) {
        out << i << ',';
        std::snprintf(buffer, sizeof(buffer), "%.17g", objective[i]);
        out << buffer << ',';
        if (i < rmse.size()) {
            std::snprintf(buffer, sizeof(buffer), "%.17g", rmse[i]);
            out << buffer;
        }
        out << '\n';
    }
    if (!out) throw FieldFileError("write failed: " + path.string());
}

}  // namespace ctv

// Command-line front end: TV denoising, measurement simulation, free-space
// propagation, phase retrieval, and PGM export over the CTVF field format.
//
// Exit codes: 0 success, 1 malformed input file, 2 invalid configuration,
// 3 shape mismatch between measurement and reference.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "ctv/ctv.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitBadFile = 1;
constexpr int kExitBadConfig = 2;
constexpr int kExitShapeMismatch = 3;

void print_kv(const std::string& key, double value) {
    std::printf("%s=%.17g\n", key.c_str(), value);
}

void print_kv(const std::string& key, const std::string& value) {
    std::printf("%s=%s\n", key.c_str(), value.c_str());
}

std::string variant_name(const ctv::TvVariant& variant) {
    switch (variant.kind) {
        case ctv::TvKind::TypeIIsotropic: return "i-iso";
        case ctv::TvKind::TypeIAnisotropic: return "i-aniso";
        case ctv::TvKind::TypeIIIsotropic: return "ii-iso";
        case ctv::TvKind::TypeIIAnisotropic: return "ii-aniso";
    }
    return "?";
}

bool has_pgm_magic(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    char magic[2] = {0, 0};
    in.read(magic, 2);
    return in && magic[0] == 'P' && magic[1] == '5';
}

ctv::PropagatorConfig make_propagator(const ctv::RunConfig& cfg, std::size_t rows,
                                      std::size_t cols) {
    ctv::PropagatorConfig pc;
    pc.wavelength = cfg.wavelength_m;
    pc.distance = cfg.distance_m;
    pc.pixel_pitch = cfg.pixel_pitch_m;
    pc.rows = rows;
    pc.cols = cols;
    return pc;
}

// Measurements are CTVF files carrying the intensity in the real part with a
// zero imaginary part; P5 images are accepted scaled to [0, 1].
ctv::Intensity read_measurement(const fs::path& path) {
    if (has_pgm_magic(path)) {
        ctv::Matrix img = ctv::read_pgm(path);
        for (double& x : img) x /= 255.0;
        return ctv::Intensity(std::move(img));
    }
    ctv::ComplexField field = ctv::read_field(path);
    for (double x : field.v)
        if (x != 0.0) throw ctv::FieldFileError("measurement has a nonzero imaginary part");
    for (double x : field.u)
        if (x < 0.0) throw ctv::FieldFileError("measurement has negative intensities");
    return ctv::Intensity(std::move(field.u));
}

int cmd_denoise(const std::string& input, const std::string& config_path,
                const std::string& output, const std::string& reference) {
    const ctv::ComplexField noisy = ctv::read_field(input);
    const ctv::RunConfig cfg = ctv::parse_config(config_path);

    const ctv::ConfigAlgorithm algo = cfg.algorithm.value_or(ctv::ConfigAlgorithm::Fgp);
    if (algo != ctv::ConfigAlgorithm::Fgp && algo != ctv::ConfigAlgorithm::Gp)
        throw ctv::ConfigError("denoise: algorithm must be fgp or gp");

    ctv::DenoiseParams params;
    params.lambda = cfg.lambda;
    params.variant = cfg.tv_variant;
    params.constraint = cfg.constraint;
    params.iterations = cfg.inner_iters;
    params.mode = (algo == ctv::ConfigAlgorithm::Gp) ? ctv::DenoiseMode::Gp : ctv::DenoiseMode::Fgp;

    std::optional<ctv::ComplexField> ref;
    if (!reference.empty()) {
        ref = ctv::read_field(reference);
        if (!ref->same_shape(noisy)) {
            std::cerr << "reference shape does not match input\n";
            return kExitShapeMismatch;
        }
    }

    const ctv::DenoiseResult result = ctv::denoise(noisy, params);
    ctv::write_field(output, result.x);

    print_kv("lambda", params.lambda);
    print_kv("variant", variant_name(params.variant));
    print_kv("iterations", static_cast<double>(params.iterations));
    const auto& trace = result.dual_objective_trace;
    print_kv("dual_delta", trace.size() >= 2 ? trace[trace.size() - 1] - trace[trace.size() - 2]
                                             : 0.0);
    if (ref) {
        print_kv("rmse_before", ctv::phase_rmse(noisy, *ref));
        print_kv("rmse_after", ctv::phase_rmse(result.x, *ref));
    }
    return 0;
}

int cmd_retrieve(const std::string& measurement_path, const std::string& config_path,
                 const std::string& output, const std::string& reference,
                 std::string trace_path) {
    const ctv::Intensity y = read_measurement(measurement_path);
    const ctv::RunConfig cfg = ctv::parse_config(config_path);
    const ctv::PropagatorConfig pc = make_propagator(cfg, y.rows(), y.cols());

    std::optional<ctv::ComplexField> ref;
    if (!reference.empty()) {
        ref = ctv::read_field(reference);
        if (ref->rows() != y.rows() || ref->cols() != y.cols()) {
            std::cerr << "reference shape does not match measurement\n";
            return kExitShapeMismatch;
        }
    }

    const ctv::ConfigAlgorithm algo = cfg.algorithm.value_or(ctv::ConfigAlgorithm::Fista);
    ctv::RetrievalParams params;
    params.tau = cfg.tau;
    params.variant = cfg.tv_variant;
    params.constraint = cfg.constraint;
    params.outer_iters = cfg.outer_iters;
    params.inner_iters = cfg.inner_iters;
    params.warm_start_dual = cfg.warm_start;
    params.seed = cfg.seed;
    switch (algo) {
        case ctv::ConfigAlgorithm::Fista: params.algorithm = ctv::RetrievalAlgorithm::Fista; break;
        case ctv::ConfigAlgorithm::Ista: params.algorithm = ctv::RetrievalAlgorithm::Ista; break;
        case ctv::ConfigAlgorithm::Ip: params.algorithm = ctv::RetrievalAlgorithm::Ip; break;
        default: throw ctv::ConfigError("retrieve: algorithm must be fista, ista, or ip");
    }

    const ctv::RetrievalReport report =
        ctv::retrieve(y, pc, params, ref ? &*ref : nullptr);

    ctv::write_field(output, report.x_hat);
    if (trace_path.empty()) trace_path = fs::path(output).replace_extension("csv").string();
    ctv::write_trace_csv(trace_path, report.objective_trace, report.rmse_trace);

    print_kv("algorithm", algo == ctv::ConfigAlgorithm::Ip    ? "ip"
                          : algo == ctv::ConfigAlgorithm::Ista ? "ista"
                                                                : "fista");
    print_kv("outer_iters", static_cast<double>(params.outer_iters));
    print_kv("objective_final", report.objective_trace.back());
    if (!report.rmse_trace.empty()) print_kv("rmse_final", report.rmse_trace.back());
    std::fprintf(stderr, "wall_time_s=%.3f\n", report.wall_time);
    return 0;
}

int cmd_simulate(const std::string& object_path, const std::string& config_path,
                 const std::string& output) {
    const ctv::RunConfig cfg = ctv::parse_config(config_path);

    ctv::ComplexField object;
    if (has_pgm_magic(object_path)) {
        // Pure phase object: unit modulus, phase pi * pixel / 255.
        const ctv::Matrix img = ctv::read_pgm(object_path);
        object = ctv::ComplexField::zeros(img.rows(), img.cols());
        for (std::size_t k = 0; k < img.size(); ++k) {
            const double phase = std::numbers::pi * img.data()[k] / 255.0;
            object.u.data()[k] = std::cos(phase);
            object.v.data()[k] = std::sin(phase);
        }
    } else {
        object = ctv::read_field(object_path);
    }

    const ctv::PropagatorConfig pc = make_propagator(cfg, object.rows(), object.cols());
    ctv::NoiseModel noise;
    switch (cfg.noise_kind) {
        case ctv::NoiseKind::None: noise = ctv::NoiseModel::none(); break;
        case ctv::NoiseKind::IntensityGaussian:
            noise = ctv::NoiseModel::intensity_gaussian(cfg.noise_level);
            break;
        case ctv::NoiseKind::PhaseGaussian:
            noise = ctv::NoiseModel::phase_gaussian(cfg.noise_level);
            break;
    }
    const ctv::Intensity y = ctv::simulate_measurement(object, pc, noise, cfg.seed);

    ctv::ComplexField out(y.values, ctv::Matrix(y.rows(), y.cols()));
    ctv::write_field(output, out);
    print_kv("rows", static_cast<double>(y.rows()));
    print_kv("cols", static_cast<double>(y.cols()));
    print_kv("mean_intensity", ctv::sum(y.values) / static_cast<double>(y.values.size()));
    return 0;
}

int cmd_export_pgm(const std::string& input, const std::string& channel_name,
                   const std::string& output) {
    const ctv::ComplexField field = ctv::read_field(input);
    ctv::PgmChannel channel;
    if (channel_name == "phase") channel = ctv::PgmChannel::Phase;
    else if (channel_name == "magnitude") channel = ctv::PgmChannel::Magnitude;
    else if (channel_name == "real") channel = ctv::PgmChannel::Real;
    else if (channel_name == "imag") channel = ctv::PgmChannel::Imag;
    else throw ctv::ConfigError("unknown channel '" + channel_name + "'");

    std::vector<std::uint8_t> bytes;
    const ctv::PgmBounds bounds = ctv::field_to_pgm_bytes(field, channel, bytes);
    ctv::write_pgm(output, bytes, field.rows(), field.cols());
    print_kv("channel", channel_name);
    print_kv("lo", bounds.lo);
    print_kv("hi", bounds.hi);
    return 0;
}

int cmd_propagate(const std::string& input, const std::string& config_path,
                  const std::string& output) {
    const ctv::ComplexField field = ctv::read_field(input);
    const ctv::RunConfig cfg = ctv::parse_config(config_path);
    const ctv::PropagatorConfig pc = make_propagator(cfg, field.rows(), field.cols());
    ctv::write_field(output, ctv::propagate(field, pc));
    print_kv("distance_m", pc.distance);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Complex constrained TV denoising and single-shot phase retrieval"};
    app.require_subcommand(1);

    std::string input, config_path, output, reference, channel, trace_path;

    auto* denoise = app.add_subcommand("denoise", "TV-denoise a complex field");
    denoise->add_option("input", input, "input field (CTVF)")->required();
    denoise->add_option("config", config_path, "run configuration")->required();
    denoise->add_option("output", output, "output field (CTVF)")->required();
    denoise->add_option("--reference", reference, "clean field for RMSE reporting");

    auto* retrieve = app.add_subcommand("retrieve", "phase retrieval from an intensity");
    retrieve->add_option("measurement", input, "measurement (CTVF intensity or P5 image)")
        ->required();
    retrieve->add_option("config", config_path, "run configuration")->required();
    retrieve->add_option("output", output, "reconstructed field (CTVF)")->required();
    retrieve->add_option("--reference", reference, "ground-truth field for RMSE traces");
    retrieve->add_option("--trace", trace_path, "CSV trace path (default: output with .csv)");

    auto* simulate = app.add_subcommand("simulate", "simulate a holographic measurement");
    simulate->add_option("object", input, "object (P5 image as pure phase, or CTVF field)")
        ->required();
    simulate->add_option("config", config_path, "run configuration")->required();
    simulate->add_option("output", output, "measurement field (CTVF)")->required();

    auto* export_pgm = app.add_subcommand("export-pgm", "export a field channel as binary PGM");
    export_pgm->add_option("input", input, "input field (CTVF)")->required();
    export_pgm->add_option("channel", channel, "phase | magnitude | real | imag")->required();
    export_pgm->add_option("output", output, "output image (P5)")->required();

    auto* propagate = app.add_subcommand("propagate", "free-space propagate a field");
    propagate->add_option("input", input, "input field (CTVF)")->required();
    propagate->add_option("config", config_path, "run configuration")->required();
    propagate->add_option("output", output, "output field (CTVF)")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(denoise)) return cmd_denoise(input, config_path, output, reference);
        if (app.got_subcommand(retrieve))
            return cmd_retrieve(input, config_path, output, reference, trace_path);
        if (app.got_subcommand(simulate)) return cmd_simulate(input, config_path, output);
        if (app.got_subcommand(export_pgm)) return cmd_export_pgm(input, channel, output);
        if (app.got_subcommand(propagate)) return cmd_propagate(input, config_path, output);
    } catch (const ctv::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadConfig;
    } catch (const ctv::FieldFileError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadFile;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadConfig;
    }
    return 0;
}

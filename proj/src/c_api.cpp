#include "protozoa/protozoa.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <new>
#include <string>

#include "engine.hpp"
#include "imaging.hpp"
#include "objective.hpp"

struct pz_config {
    protozoa::ApoConfig cfg;
};

struct pz_result {
    protozoa::RunResult result;
};

struct pz_image {
    protozoa::GrayImage img;
};

namespace {

thread_local std::string g_last_error;
thread_local std::size_t g_last_offset = 0;

pz_status fail(pz_status status, std::string message) {
    g_last_error = std::move(message);
    return status;
}

// Maps exceptions from the core onto status codes.
template <typename Fn>
pz_status guarded(Fn&& fn) noexcept {
    try {
        fn();
        return PZ_OK;
    } catch (const protozoa::ConfigError& e) {
        return fail(PZ_ERR_CONFIG, e.what());
    } catch (const protozoa::ObjectiveError& e) {
        return fail(PZ_ERR_OBJECTIVE, e.what());
    } catch (const protozoa::ImageParseError& e) {
        g_last_offset = e.offset();
        return fail(PZ_ERR_PARSE, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(PZ_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::bad_alloc&) {
        return fail(PZ_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(PZ_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(PZ_ERR_INTERNAL, "unknown error");
    }
}

bool valid_id(pz_objective id) {
    return static_cast<int>(id) >= 0 &&
           static_cast<std::size_t>(id) < protozoa::builtin_objectives().size();
}

protozoa::ObjectiveId to_core(pz_objective id) {
    return protozoa::builtin_objectives()[static_cast<std::size_t>(id)];
}

protozoa::EngineMode to_mode(pz_engine engine, unsigned workers) {
    return engine == PZ_ENGINE_PARALLEL ? protozoa::EngineMode::parallel(workers)
                                        : protozoa::EngineMode::sequential();
}

template <typename Setter>
pz_status set(pz_config* cfg, Setter&& setter) {
    if (cfg == nullptr) {
        return fail(PZ_ERR_INVALID_ARGUMENT, "config is NULL");
    }
    setter(cfg->cfg);
    return PZ_OK;
}

pz_status run_with(const pz_config* cfg, const protozoa::Objective& objective, pz_engine engine,
                   unsigned workers, pz_result** out) {
    if (cfg == nullptr || out == nullptr) {
        return fail(PZ_ERR_INVALID_ARGUMENT, "config and output must be non-NULL");
    }
    return guarded([&] {
        auto result = protozoa::run(cfg->cfg, objective, to_mode(engine, workers));
        *out = new pz_result{std::move(result)};
    });
}

std::size_t copy_out(const std::vector<double>& src, double* out, std::size_t capacity) {
    if (out != nullptr) {
        std::copy_n(src.begin(), std::min(capacity, src.size()), out);
    }
    return src.size();
}

}  // namespace

extern "C" {

const char* pz_version(void) {
    return "0.1.0";
}

const char* pz_last_error(void) {
    return g_last_error.c_str();
}

size_t pz_last_error_offset(void) {
    return g_last_offset;
}

pz_status pz_objective_from_name(const char* name, pz_objective* out) {
    if (name == nullptr || out == nullptr) {
        return fail(PZ_ERR_INVALID_ARGUMENT, "name and output must be non-NULL");
    }
    const auto id = protozoa::objective_from_string(name);
    if (!id) {
        return fail(PZ_ERR_INVALID_ARGUMENT, std::string("unknown function '") + name +
                                                 "'; valid: " + protozoa::builtin_objective_names());
    }
    *out = static_cast<pz_objective>(*id);
    return PZ_OK;
}

const char* pz_objective_name(pz_objective id) {
    if (!valid_id(id)) {
        return nullptr;
    }
    return protozoa::to_string(to_core(id)).data();
}

const char* pz_objective_names(void) {
    static const std::string names = protozoa::builtin_objective_names();
    return names.c_str();
}

pz_status pz_evaluate(pz_objective id, const double* x, size_t dim, double* out) {
    if (!valid_id(id) || x == nullptr || out == nullptr) {
        return fail(PZ_ERR_INVALID_ARGUMENT, "invalid objective id or NULL pointer");
    }
    return guarded([&] { *out = protozoa::evaluate(to_core(id), {x, dim}); });
}

pz_status pz_config_create(pz_config** out) {
    if (out == nullptr) {
        return fail(PZ_ERR_INVALID_ARGUMENT, "output is NULL");
    }
    return guarded([&] { *out = new pz_config{}; });
}

void pz_config_destroy(pz_config* cfg) {
    delete cfg;
}

pz_status pz_config_set_population(pz_config* cfg, size_t ps) {
    return set(cfg, [&](auto& c) { c.ps = ps; });
}

pz_status pz_config_set_dimension(pz_config* cfg, size_t dim) {
    return set(cfg, [&](auto& c) {
        c.dim = dim;
        c.bounds.dim = dim;
    });
}

pz_status pz_config_set_neighbor_pairs(pz_config* cfg, size_t np) {
    return set(cfg, [&](auto& c) { c.np = np; });
}

pz_status pz_config_set_pf_max(pz_config* cfg, double pf_max) {
    return set(cfg, [&](auto& c) { c.pf_max = pf_max; });
}

pz_status pz_config_set_bounds(pz_config* cfg, double lower, double upper) {
    return set(cfg, [&](auto& c) {
        c.bounds.lower = lower;
        c.bounds.upper = upper;
    });
}

pz_status pz_config_set_max_iterations(pz_config* cfg, uint64_t iterations) {
    return set(cfg, [&](auto& c) { c.max_iterations = iterations; });
}

pz_status pz_config_set_max_fes(pz_config* cfg, uint64_t max_fes) {
    return set(cfg, [&](auto& c) {
        if (max_fes == 0) {
            c.max_fes.reset();
        } else {
            c.max_fes = max_fes;
        }
    });
}

pz_status pz_config_set_seed(pz_config* cfg, uint64_t seed) {
    return set(cfg, [&](auto& c) { c.seed = seed; });
}

pz_status pz_config_set_eps(pz_config* cfg, double eps) {
    return set(cfg, [&](auto& c) { c.eps = eps; });
}

pz_status pz_config_validate(const pz_config* cfg) {
    if (cfg == nullptr) {
        return fail(PZ_ERR_INVALID_ARGUMENT, "config is NULL");
    }
    return guarded([&] { cfg->cfg.validate(); });
}

pz_status pz_run(const pz_config* cfg, pz_objective id, pz_engine engine, unsigned workers,
                 pz_result** out) {
    if (!valid_id(id)) {
        return fail(PZ_ERR_INVALID_ARGUMENT, "invalid objective id");
    }
    return run_with(cfg, protozoa::Objective(to_core(id)), engine, workers, out);
}

pz_status pz_run_custom(const pz_config* cfg, pz_objective_fn fn, void* user_data, pz_engine engine,
                        unsigned workers, pz_result** out) {
    if (fn == nullptr) {
        return fail(PZ_ERR_INVALID_ARGUMENT, "objective callback is NULL");
    }
    protozoa::Objective objective("external", [fn, user_data](std::span<const double> x) {
        return fn(x.data(), x.size(), user_data);
    });
    return run_with(cfg, objective, engine, workers, out);
}

void pz_result_destroy(pz_result* result) {
    delete result;
}

double pz_result_best_fitness(const pz_result* result) {
    return result->result.best_fitness;
}

size_t pz_result_dimension(const pz_result* result) {
    return result->result.best_position.size();
}

size_t pz_result_best_position(const pz_result* result, double* out, size_t capacity) {
    return copy_out(result->result.best_position, out, capacity);
}

size_t pz_result_trace_length(const pz_result* result) {
    return result->result.trace.size();
}

size_t pz_result_trace(const pz_result* result, double* out, size_t capacity) {
    return copy_out(result->result.trace, out, capacity);
}

uint64_t pz_result_fe_count(const pz_result* result) {
    return result->result.fe_count;
}

uint64_t pz_result_iterations(const pz_result* result) {
    return result->result.iterations;
}

uint64_t pz_result_warnings(const pz_result* result) {
    return result->result.warnings;
}

double pz_result_seconds(const pz_result* result) {
    return result->result.wall_clock_seconds;
}

unsigned pz_result_workers(const pz_result* result) {
    return result->result.mode.workers;
}

pz_engine pz_result_engine(const pz_result* result) {
    return result->result.mode.kind == protozoa::EngineMode::Kind::parallel ? PZ_ENGINE_PARALLEL
                                                                            : PZ_ENGINE_SEQUENTIAL;
}

pz_status pz_image_load(const char* path, pz_image** out) {
    if (path == nullptr || out == nullptr) {
        return fail(PZ_ERR_INVALID_ARGUMENT, "path and output must be non-NULL");
    }
    std::ifstream file(path, std::ios::binary);
    if (!file) {
        return fail(PZ_ERR_IO, std::string("cannot open ") + path);
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(file)),
                                    std::istreambuf_iterator<char>());
    if (file.bad()) {
        return fail(PZ_ERR_IO, std::string("read failed: ") + path);
    }
    return pz_image_load_memory(bytes.data(), bytes.size(), out);
}

pz_status pz_image_load_memory(const uint8_t* bytes, size_t size, pz_image** out) {
    if ((bytes == nullptr && size != 0) || out == nullptr) {
        return fail(PZ_ERR_INVALID_ARGUMENT, "bytes and output must be non-NULL");
    }
    return guarded([&] { *out = new pz_image{protozoa::load_image({bytes, size})}; });
}

pz_status pz_image_create(size_t width, size_t height, const uint8_t* pixels, pz_image** out) {
    if (width == 0 || height == 0 || pixels == nullptr || out == nullptr) {
        return fail(PZ_ERR_INVALID_ARGUMENT, "image needs positive size and pixel data");
    }
    return guarded([&] {
        protozoa::GrayImage img{width, height, {pixels, pixels + width * height}};
        *out = new pz_image{std::move(img)};
    });
}

void pz_image_destroy(pz_image* img) {
    delete img;
}

size_t pz_image_width(const pz_image* img) {
    return img->img.width;
}

size_t pz_image_height(const pz_image* img) {
    return img->img.height;
}

const uint8_t* pz_image_pixels(const pz_image* img) {
    return img->img.pixels.data();
}

pz_status pz_image_save(const pz_image* img, const char* path, pz_pgm_encoding encoding) {
    if (img == nullptr || path == nullptr) {
        return fail(PZ_ERR_INVALID_ARGUMENT, "image and path must be non-NULL");
    }
    const auto bytes = protozoa::encode_pgm(
        img->img, encoding == PZ_PGM_BINARY ? protozoa::PgmEncoding::binary
                                            : protozoa::PgmEncoding::ascii);
    const std::string tmp = std::string(path) + ".tmp";
    {
        std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
        if (!file) {
            return fail(PZ_ERR_IO, "cannot write " + tmp);
        }
        file.write(reinterpret_cast<const char*>(bytes.data()),
                   static_cast<std::streamsize>(bytes.size()));
        if (!file.flush()) {
            std::remove(tmp.c_str());
            return fail(PZ_ERR_IO, "write failed: " + tmp);
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::remove(tmp.c_str());
        return fail(PZ_ERR_IO, std::string("cannot rename to ") + path + ": " + ec.message());
    }
    return PZ_OK;
}

pz_status pz_between_class_variance(const pz_image* img, int threshold, double* out) {
    if (img == nullptr || out == nullptr) {
        return fail(PZ_ERR_INVALID_ARGUMENT, "image and output must be non-NULL");
    }
    return guarded([&] {
        *out = protozoa::between_class_variance(protozoa::histogram(img->img), threshold);
    });
}

pz_status pz_otsu_brute_force(const pz_image* img, int* threshold, double* variance) {
    if (img == nullptr || threshold == nullptr || variance == nullptr) {
        return fail(PZ_ERR_INVALID_ARGUMENT, "image and outputs must be non-NULL");
    }
    return guarded([&] {
        const auto best = protozoa::brute_force_otsu(protozoa::histogram(img->img));
        *threshold = best.threshold;
        *variance = best.variance;
    });
}

pz_status pz_otsu_apo(const pz_image* img, const pz_config* cfg, pz_engine engine, unsigned workers,
                      int* threshold, double* variance, pz_result** result) {
    if (img == nullptr || cfg == nullptr || threshold == nullptr || variance == nullptr) {
        return fail(PZ_ERR_INVALID_ARGUMENT, "image, config and outputs must be non-NULL");
    }
    return guarded([&] {
        auto found = protozoa::apo_threshold(img->img, cfg->cfg, to_mode(engine, workers));
        *threshold = found.threshold;
        *variance = found.variance;
        if (result != nullptr) {
            *result = new pz_result{std::move(found.run)};
        }
    });
}

pz_status pz_image_threshold(const pz_image* img, int threshold, pz_image** out) {
    if (img == nullptr || out == nullptr) {
        return fail(PZ_ERR_INVALID_ARGUMENT, "image and output must be non-NULL");
    }
    return guarded([&] { *out = new pz_image{protozoa::apply_threshold(img->img, threshold)}; });
}

}  // extern "C"

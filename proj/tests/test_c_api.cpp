#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "protozoa/protozoa.h"

namespace {

struct ConfigHandle {
    pz_config* ptr = nullptr;
    ConfigHandle() { EXPECT_EQ(pz_config_create(&ptr), PZ_OK); }
    ~ConfigHandle() { pz_config_destroy(ptr); }
};

void small(pz_config* cfg, size_t ps, size_t dim, uint64_t iters, uint64_t seed) {
    ASSERT_EQ(pz_config_set_population(cfg, ps), PZ_OK);
    ASSERT_EQ(pz_config_set_dimension(cfg, dim), PZ_OK);
    ASSERT_EQ(pz_config_set_max_iterations(cfg, iters), PZ_OK);
    ASSERT_EQ(pz_config_set_seed(cfg, seed), PZ_OK);
}

double abs_sum(const double* x, size_t dim, void*) {
    double s = 0;
    for (size_t i = 0; i < dim; ++i) s += std::fabs(x[i]);
    return s;
}

double throws_inside(const double*, size_t, void*) {
    throw std::runtime_error("boom");
}

}  // namespace

TEST(CApi, VersionAndNames) {
    EXPECT_STREQ(pz_version(), "0.1.0");
    pz_objective id;
    ASSERT_EQ(pz_objective_from_name("hgbat", &id), PZ_OK);
    EXPECT_EQ(id, PZ_HGBAT);
    EXPECT_STREQ(pz_objective_name(PZ_GRIEWANK), "griewank");
    EXPECT_EQ(pz_objective_from_name("nope", &id), PZ_ERR_INVALID_ARGUMENT);
    EXPECT_NE(std::string(pz_last_error()).find("sphere"), std::string::npos);
    EXPECT_NE(std::string(pz_objective_names()).find("rosenbrock"), std::string::npos);
    EXPECT_EQ(pz_objective_from_name(nullptr, &id), PZ_ERR_INVALID_ARGUMENT);
}

TEST(CApi, Evaluate) {
    const double x[] = {1.0, 1.0, 1.0};
    double out = 0;
    ASSERT_EQ(pz_evaluate(PZ_BENT_CIGAR, x, 3, &out), PZ_OK);
    EXPECT_EQ(out, 2000001.0);
    EXPECT_EQ(pz_evaluate(PZ_ROSENBROCK, x, 1, &out), PZ_ERR_INVALID_ARGUMENT);
    EXPECT_EQ(pz_evaluate(static_cast<pz_objective>(42), x, 3, &out), PZ_ERR_INVALID_ARGUMENT);
}

TEST(CApi, ConfigValidation) {
    ConfigHandle cfg;
    EXPECT_EQ(pz_config_validate(cfg.ptr), PZ_OK);
    ASSERT_EQ(pz_config_set_population(cfg.ptr, 3), PZ_OK);
    ASSERT_EQ(pz_config_set_neighbor_pairs(cfg.ptr, 3), PZ_OK);
    ASSERT_EQ(pz_config_set_pf_max(cfg.ptr, 2.0), PZ_OK);
    EXPECT_EQ(pz_config_validate(cfg.ptr), PZ_ERR_CONFIG);
    const std::string msg = pz_last_error();
    EXPECT_NE(msg.find("np"), std::string::npos);
    EXPECT_NE(msg.find("pf_max"), std::string::npos);
    EXPECT_EQ(pz_config_create(nullptr), PZ_ERR_INVALID_ARGUMENT);
    pz_config_destroy(nullptr);
}

TEST(CApi, RunSequentialMatchesParallel) {
    ConfigHandle cfg;
    small(cfg.ptr, 25, 5, 30, 17);
    pz_result* seq = nullptr;
    pz_result* par = nullptr;
    ASSERT_EQ(pz_run(cfg.ptr, PZ_ROSENBROCK, PZ_ENGINE_SEQUENTIAL, 0, &seq), PZ_OK);
    ASSERT_EQ(pz_run(cfg.ptr, PZ_ROSENBROCK, PZ_ENGINE_PARALLEL, 3, &par), PZ_OK);

    EXPECT_EQ(pz_result_best_fitness(seq), pz_result_best_fitness(par));
    ASSERT_EQ(pz_result_dimension(seq), 5u);
    std::vector<double> a(5), b(5);
    EXPECT_EQ(pz_result_best_position(seq, a.data(), a.size()), 5u);
    pz_result_best_position(par, b.data(), b.size());
    EXPECT_EQ(0, std::memcmp(a.data(), b.data(), 5 * sizeof(double)));

    ASSERT_EQ(pz_result_trace_length(seq), 31u);
    std::vector<double> trace(31);
    pz_result_trace(seq, trace.data(), trace.size());
    EXPECT_EQ(trace.back(), pz_result_best_fitness(seq));
    EXPECT_EQ(pz_result_fe_count(seq), 25u * 31u);
    EXPECT_EQ(pz_result_iterations(seq), 30u);
    EXPECT_EQ(pz_result_workers(par), 3u);
    EXPECT_EQ(pz_result_engine(par), PZ_ENGINE_PARALLEL);
    EXPECT_GE(pz_result_seconds(seq), 0.0);

    // Short buffers receive a prefix; the return value is the full length.
    double one = 0;
    EXPECT_EQ(pz_result_best_position(seq, &one, 1), 5u);
    EXPECT_EQ(one, a[0]);
    pz_result_destroy(seq);
    pz_result_destroy(par);
}

TEST(CApi, RunCustomObjective) {
    ConfigHandle cfg;
    small(cfg.ptr, 20, 3, 50, 2);
    ASSERT_EQ(pz_config_set_bounds(cfg.ptr, -5.0, 5.0), PZ_OK);
    pz_result* res = nullptr;
    ASSERT_EQ(pz_run_custom(cfg.ptr, abs_sum, nullptr, PZ_ENGINE_PARALLEL, 2, &res), PZ_OK);
    EXPECT_LT(pz_result_best_fitness(res), 1.0);
    pz_result_destroy(res);

    EXPECT_EQ(pz_run_custom(cfg.ptr, throws_inside, nullptr, PZ_ENGINE_SEQUENTIAL, 0, &res),
              PZ_ERR_OBJECTIVE);
    EXPECT_NE(std::string(pz_last_error()).find("boom"), std::string::npos);
    EXPECT_EQ(pz_run_custom(cfg.ptr, nullptr, nullptr, PZ_ENGINE_SEQUENTIAL, 0, &res),
              PZ_ERR_INVALID_ARGUMENT);
}

TEST(CApi, RunRejectsBadConfig) {
    ConfigHandle cfg;
    small(cfg.ptr, 4, 1, 5, 0);
    pz_result* res = nullptr;
    EXPECT_EQ(pz_run(cfg.ptr, PZ_HGBAT, PZ_ENGINE_SEQUENTIAL, 0, &res), PZ_ERR_CONFIG);
    EXPECT_EQ(res, nullptr);
}

TEST(CApi, ImagesAndOtsu) {
    const char* text = "P2 4 1 255 50 50 150 150";
    pz_image* img = nullptr;
    ASSERT_EQ(pz_image_load_memory(reinterpret_cast<const uint8_t*>(text), std::strlen(text), &img),
              PZ_OK);
    EXPECT_EQ(pz_image_width(img), 4u);
    EXPECT_EQ(pz_image_pixels(img)[2], 150);

    double var = 0;
    ASSERT_EQ(pz_between_class_variance(img, 100, &var), PZ_OK);
    EXPECT_EQ(var, 2500.0);
    int t = -1;
    ASSERT_EQ(pz_otsu_brute_force(img, &t, &var), PZ_OK);
    EXPECT_EQ(t, 50);

    ConfigHandle cfg;
    ASSERT_EQ(pz_config_set_population(cfg.ptr, 30), PZ_OK);
    ASSERT_EQ(pz_config_set_max_iterations(cfg.ptr, 20), PZ_OK);
    int apo_t = -1;
    double apo_var = 0;
    pz_result* res = nullptr;
    ASSERT_EQ(pz_otsu_apo(img, cfg.ptr, PZ_ENGINE_PARALLEL, 2, &apo_t, &apo_var, &res), PZ_OK);
    EXPECT_EQ(apo_var, 2500.0);
    EXPECT_EQ(pz_result_dimension(res), 1u);
    pz_result_destroy(res);
    ASSERT_EQ(pz_otsu_apo(img, cfg.ptr, PZ_ENGINE_SEQUENTIAL, 0, &apo_t, &apo_var, nullptr), PZ_OK);

    pz_image* bw = nullptr;
    ASSERT_EQ(pz_image_threshold(img, 100, &bw), PZ_OK);
    EXPECT_EQ(pz_image_pixels(bw)[0], 0);
    EXPECT_EQ(pz_image_pixels(bw)[3], 255);
    pz_image_destroy(bw);
    pz_image_destroy(img);
}

TEST(CApi, ImageErrors) {
    const char* bad = "P2 1 1 17 0";
    pz_image* img = nullptr;
    EXPECT_EQ(pz_image_load_memory(reinterpret_cast<const uint8_t*>(bad), std::strlen(bad), &img),
              PZ_ERR_PARSE);
    EXPECT_EQ(pz_last_error_offset(), 7u);
    EXPECT_EQ(pz_image_load("/nonexistent.pgm", &img), PZ_ERR_IO);
    const uint8_t px[] = {1, 2};
    EXPECT_EQ(pz_image_create(0, 2, px, &img), PZ_ERR_INVALID_ARGUMENT);
    ASSERT_EQ(pz_image_create(2, 1, px, &img), PZ_OK);
    EXPECT_EQ(pz_image_save(img, "/nonexistent/dir/out.pgm", PZ_PGM_ASCII), PZ_ERR_IO);
    double v = 0;
    EXPECT_EQ(pz_between_class_variance(img, 300, &v), PZ_ERR_INVALID_ARGUMENT);
    pz_image_destroy(img);
}

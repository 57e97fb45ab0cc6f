// Exercises the shared-library C interface exactly as an external consumer
// would: through mipred.h only, no internal headers.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "mipred.h"

namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag)
        : path(fs::temp_directory_path() / ("mipred_capi_" + tag)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

struct ConfigGuard {
    mipred_config* handle = nullptr;
    ~ConfigGuard() { mipred_config_free(handle); }
};

}  // namespace

TEST_CASE("version and error state are exposed") {
    CHECK(std::string(mipred_version()) == "0.1.0");
    CHECK(mipred_last_error() != nullptr);
}

TEST_CASE("configuration handles get, set, save, and load") {
    ConfigGuard config;
    REQUIRE(mipred_config_create(&config.handle) == MIPRED_OK);

    char buffer[64];
    REQUIRE(mipred_config_get(config.handle, "solve.k_prob", buffer, sizeof(buffer)) ==
            MIPRED_OK);
    CHECK(std::string(buffer) == "0.5");
    REQUIRE(mipred_config_set(config.handle, "solve.k_prob", "0.01") == MIPRED_OK);
    REQUIRE(mipred_config_get(config.handle, "solve.k_prob", buffer, sizeof(buffer)) ==
            MIPRED_OK);
    CHECK(std::string(buffer) == "0.01");
    CHECK(std::string(mipred_last_error()).empty());

    // Unknown keys and bad values report as invalid arguments with a message.
    CHECK(mipred_config_set(config.handle, "no.such.key", "1") ==
          MIPRED_ERR_INVALID_ARGUMENT);
    CHECK(std::string(mipred_last_error()).find("unknown configuration key") !=
          std::string::npos);
    CHECK(mipred_config_set(config.handle, "tune.maxiter", "soon") ==
          MIPRED_ERR_INVALID_ARGUMENT);

    // Buffer too small is rejected, large enough succeeds.
    char tiny[2];
    CHECK(mipred_config_get(config.handle, "paths.dataset", tiny, sizeof(tiny)) ==
          MIPRED_ERR_INVALID_ARGUMENT);
    CHECK(std::string(mipred_last_error()).find("buffer too small") != std::string::npos);

    TempDir dir("config");
    REQUIRE(mipred_config_save(config.handle, dir.file("run.conf").c_str()) == MIPRED_OK);
    ConfigGuard loaded;
    REQUIRE(mipred_config_load(dir.file("run.conf").c_str(), &loaded.handle) == MIPRED_OK);
    REQUIRE(mipred_config_get(loaded.handle, "solve.k_prob", buffer, sizeof(buffer)) ==
            MIPRED_OK);
    CHECK(std::string(buffer) == "0.01");

    ConfigGuard missing;
    CHECK(mipred_config_load(dir.file("absent.conf").c_str(), &missing.handle) ==
          MIPRED_ERR_RUNTIME);
    CHECK(missing.handle == nullptr);
    CHECK(std::string(mipred_last_error()).find("cannot open") != std::string::npos);
}

TEST_CASE("null handles and pointers are rejected, not dereferenced") {
    CHECK(mipred_config_create(nullptr) == MIPRED_ERR_INVALID_ARGUMENT);
    CHECK(mipred_config_set(nullptr, "seed", "1") == MIPRED_ERR_INVALID_ARGUMENT);
    CHECK(mipred_run_gen_data(nullptr, nullptr) == MIPRED_ERR_INVALID_ARGUMENT);
    CHECK(mipred_run_tune(nullptr, nullptr) == MIPRED_ERR_INVALID_ARGUMENT);

    ConfigGuard config;
    REQUIRE(mipred_config_create(&config.handle) == MIPRED_OK);
    CHECK(mipred_config_set(config.handle, nullptr, "1") == MIPRED_ERR_INVALID_ARGUMENT);
    CHECK(mipred_config_get(config.handle, "seed", nullptr, 8) ==
          MIPRED_ERR_INVALID_ARGUMENT);
    CHECK(mipred_run_solve(config.handle, nullptr, nullptr) == MIPRED_ERR_INVALID_ARGUMENT);
    mipred_string_free(nullptr);  // must be a no-op
}

TEST_CASE("commands run through the C interface and report failures") {
    TempDir dir("pipeline");
    ConfigGuard config;
    REQUIRE(mipred_config_create(&config.handle) == MIPRED_OK);
    const std::string params = std::string(MIPRED_DATA_DIR) + "/desk_params.json";
    REQUIRE(mipred_config_set(config.handle, "paths.parameters", params.c_str()) == MIPRED_OK);
    REQUIRE(mipred_config_set(config.handle, "paths.dataset",
                              dir.file("dataset.tsv").c_str()) == MIPRED_OK);
    REQUIRE(mipred_config_set(config.handle, "gen.levels", "3") == MIPRED_OK);
    REQUIRE(mipred_config_set(config.handle, "gen.replicates", "2") == MIPRED_OK);
    REQUIRE(mipred_config_set(config.handle, "gen.max_patients", "3") == MIPRED_OK);
    REQUIRE(mipred_config_set(config.handle, "seed", "11") == MIPRED_OK);
    REQUIRE(mipred_config_set(config.handle, "threads", "1") == MIPRED_OK);

    char* summary = nullptr;
    REQUIRE(mipred_run_gen_data(config.handle, &summary) == MIPRED_OK);
    REQUIRE(summary != nullptr);
    CHECK(std::string(summary).find("generated 18 instances") != std::string::npos);
    mipred_string_free(summary);
    CHECK(fs::exists(dir.file("dataset.tsv")));

    // A failing command returns a runtime error and a useful message.
    REQUIRE(mipred_config_set(config.handle, "paths.parameters", "nowhere.json") ==
            MIPRED_OK);
    summary = nullptr;
    CHECK(mipred_run_gen_data(config.handle, &summary) == MIPRED_ERR_RUNTIME);
    CHECK(summary == nullptr);
    CHECK(std::string(mipred_last_error()).find("nowhere.json") != std::string::npos);

    // Solve surfaces missing models the same way.
    REQUIRE(mipred_config_set(config.handle, "paths.parameters", params.c_str()) == MIPRED_OK);
    std::ofstream demand(dir.file("demand.csv"));
    demand << "# patient,center,arrival_day horizon=90\n1,c1,10\n";
    demand.close();
    CHECK(mipred_run_solve(config.handle, dir.file("demand.csv").c_str(), &summary) ==
          MIPRED_ERR_RUNTIME);
    CHECK(std::string(mipred_last_error()).find("model") != std::string::npos);
}

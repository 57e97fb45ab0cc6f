#include "mipred.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <stdexcept>
#include <string>

#include "pipeline/commands.hpp"
#include "pipeline/run_config.hpp"

struct mipred_config {
    mipred::pipeline::RunConfig impl;
};

namespace {

thread_local std::string g_last_error;

int fail(int code, const std::string& message) {
    g_last_error = message;
    return code;
}

int ok() {
    g_last_error.clear();
    return MIPRED_OK;
}

char* copy_string(const std::string& text) {
    char* out = static_cast<char*>(std::malloc(text.size() + 1));
    if (out != nullptr) std::memcpy(out, text.c_str(), text.size() + 1);
    return out;
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const std::invalid_argument& e) {
        return fail(MIPRED_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::bad_alloc&) {
        return fail(MIPRED_ERR_RUNTIME, "out of memory");
    } catch (const std::exception& e) {
        return fail(MIPRED_ERR_RUNTIME, e.what());
    }
}

template <typename Fn>
int run_command(const mipred_config* config, char** summary_out, Fn&& command) {
    if (config == nullptr) return fail(MIPRED_ERR_INVALID_ARGUMENT, "null configuration handle");
    return guarded([&]() {
        const std::string summary = command(config->impl);
        if (summary_out != nullptr) {
            *summary_out = copy_string(summary);
            if (*summary_out == nullptr) return fail(MIPRED_ERR_RUNTIME, "out of memory");
        }
        return ok();
    });
}

}  // namespace

extern "C" {

const char* mipred_version(void) { return "0.1.0"; }

const char* mipred_last_error(void) { return g_last_error.c_str(); }

int mipred_config_create(mipred_config** out) {
    if (out == nullptr) return fail(MIPRED_ERR_INVALID_ARGUMENT, "null output pointer");
    return guarded([&]() {
        *out = new mipred_config{};
        return ok();
    });
}

int mipred_config_load(const char* path, mipred_config** out) {
    if (out == nullptr) return fail(MIPRED_ERR_INVALID_ARGUMENT, "null output pointer");
    if (path == nullptr) return fail(MIPRED_ERR_INVALID_ARGUMENT, "null path");
    *out = nullptr;
    return guarded([&]() {
        auto config = new mipred_config{};
        try {
            config->impl = mipred::pipeline::RunConfig::load_file(path);
        } catch (...) {
            delete config;
            throw;
        }
        *out = config;
        return ok();
    });
}

int mipred_config_set(mipred_config* config, const char* key, const char* value) {
    if (config == nullptr) return fail(MIPRED_ERR_INVALID_ARGUMENT, "null configuration handle");
    if (key == nullptr || value == nullptr) {
        return fail(MIPRED_ERR_INVALID_ARGUMENT, "null key or value");
    }
    return guarded([&]() {
        config->impl.set(key, value);
        return ok();
    });
}

int mipred_config_get(const mipred_config* config, const char* key, char* buffer,
                      size_t buffer_size) {
    if (config == nullptr) return fail(MIPRED_ERR_INVALID_ARGUMENT, "null configuration handle");
    if (key == nullptr) return fail(MIPRED_ERR_INVALID_ARGUMENT, "null key");
    if (buffer == nullptr || buffer_size == 0) {
        return fail(MIPRED_ERR_INVALID_ARGUMENT, "null or empty buffer");
    }
    return guarded([&]() {
        const std::string value = config->impl.get(key);
        if (value.size() + 1 > buffer_size) {
            return fail(MIPRED_ERR_INVALID_ARGUMENT,
                        "buffer too small for value of '" + std::string(key) + "' (" +
                            std::to_string(value.size() + 1) + " bytes needed)");
        }
        std::memcpy(buffer, value.c_str(), value.size() + 1);
        return ok();
    });
}

int mipred_config_save(const mipred_config* config, const char* path) {
    if (config == nullptr) return fail(MIPRED_ERR_INVALID_ARGUMENT, "null configuration handle");
    if (path == nullptr) return fail(MIPRED_ERR_INVALID_ARGUMENT, "null path");
    return guarded([&]() {
        config->impl.save_file(path);
        return ok();
    });
}

void mipred_config_free(mipred_config* config) { delete config; }

int mipred_run_gen_data(const mipred_config* config, char** summary_out) {
    return run_command(config, summary_out, mipred::pipeline::cmd_gen_data);
}

int mipred_run_tune(const mipred_config* config, char** summary_out) {
    return run_command(config, summary_out, mipred::pipeline::cmd_tune);
}

int mipred_run_train(const mipred_config* config, char** summary_out) {
    return run_command(config, summary_out, mipred::pipeline::cmd_train);
}

int mipred_run_evaluate(const mipred_config* config, char** summary_out) {
    return run_command(config, summary_out, mipred::pipeline::cmd_evaluate);
}

int mipred_run_solve(const mipred_config* config, const char* instance_path,
                     char** summary_out) {
    if (instance_path == nullptr) return fail(MIPRED_ERR_INVALID_ARGUMENT, "null instance path");
    return run_command(config, summary_out, [&](const mipred::pipeline::RunConfig& impl) {
        return mipred::pipeline::cmd_solve(impl, instance_path);
    });
}

void mipred_string_free(char* text) { std::free(text); }

}  // extern "C"

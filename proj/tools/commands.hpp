#pragma once

#include "run_config.hpp"

#include <blochlab/error.hpp>

#include <exception>
#include <ostream>

namespace blochlab::cli {

enum ExitCode : int { ok = 0, runtime_error = 1, config_error = 2, validation_failure = 3 };

/// Each command writes its files under cfg.output_dir and a human summary to `log`.
int cmd_bands(const RunConfig& cfg, std::ostream& log);
int cmd_trace(const RunConfig& cfg, std::ostream& log);
int cmd_reconstruct(const RunConfig& cfg, std::ostream& log);
int cmd_validate(const RunConfig& cfg, std::ostream& log);

/// Runs `body` and maps exceptions onto exit codes, printing the message to `err`.
template <class Fn>
int guarded(Fn&& body, std::ostream& err)
{
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const InvalidArgument& e) {
        err << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return runtime_error;
    }
}

} // namespace blochlab::cli

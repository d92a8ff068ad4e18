#pragma once

#include <chrono>
#include <string>
#include <vector>

namespace cjtrans::engine {

struct ProcessResult {
    int exit_code = -1;
    std::string stdout_text;
    std::string stderr_text;
    bool timed_out = false;
};

/// Runs argv[0] (looked up on PATH) without a shell, feeds `input` on
/// standard input and captures both output streams. The process group is
/// killed when `timeout` elapses. Throws ToolchainError when the program
/// cannot be started.
ProcessResult run_process(const std::vector<std::string>& argv, const std::string& input,
                          std::chrono::milliseconds timeout, const std::string& working_dir = {});

} // namespace cjtrans::engine

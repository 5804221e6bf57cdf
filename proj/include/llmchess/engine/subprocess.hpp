#pragma once

#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <sys/types.h>

namespace llmchess::engine {

class SpawnError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Child process with line-oriented stdin/stdout pipes (POSIX).
/// The child is asked to quit, then killed, on destruction.
class Subprocess {
public:
    /// argv[0] is resolved through PATH. Throws SpawnError when exec fails.
    explicit Subprocess(const std::vector<std::string>& argv);
    ~Subprocess();

    Subprocess(const Subprocess&) = delete;
    Subprocess& operator=(const Subprocess&) = delete;

    enum class ReadStatus { Line, Timeout, Eof };

    struct ReadResult {
        ReadStatus status;
        std::string line;
    };

    /// Returns false when the child's stdin is closed.
    bool write_line(const std::string& line);
    ReadResult read_line(std::chrono::milliseconds timeout);

    bool running();
    /// Sends `quit_command` (if non-empty), waits up to `grace`, then SIGKILLs.
    void terminate(const std::string& quit_command, std::chrono::milliseconds grace);

    pid_t pid() const noexcept { return pid_; }

private:
    pid_t pid_ = -1;
    int in_fd_ = -1;
    int out_fd_ = -1;
    std::string buffer_;
    bool eof_ = false;
    bool reaped_ = false;
};

}  // namespace llmchess::engine

#include "llmchess/engine/subprocess.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>
#include <mutex>
#include <thread>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

namespace llmchess::engine {

namespace {

void ignore_sigpipe_once() {
    static std::once_flag flag;
    std::call_once(flag, [] { std::signal(SIGPIPE, SIG_IGN); });
}

void close_fd(int& fd) {
    if (fd >= 0) ::close(fd);
    fd = -1;
}

}  // namespace

Subprocess::Subprocess(const std::vector<std::string>& argv) {
    if (argv.empty()) throw SpawnError("empty command line");
    ignore_sigpipe_once();

    int to_child[2], from_child[2], exec_err[2];
    if (::pipe2(to_child, O_CLOEXEC) != 0 || ::pipe2(from_child, O_CLOEXEC) != 0 ||
        ::pipe2(exec_err, O_CLOEXEC) != 0)
        throw SpawnError(std::string("pipe: ") + std::strerror(errno));

    std::vector<char*> cargv;
    for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
    cargv.push_back(nullptr);

    pid_ = ::fork();
    if (pid_ < 0) throw SpawnError(std::string("fork: ") + std::strerror(errno));
    if (pid_ == 0) {
        ::dup2(to_child[0], STDIN_FILENO);
        ::dup2(from_child[1], STDOUT_FILENO);
        ::execvp(cargv[0], cargv.data());
        const int err = errno;
        [[maybe_unused]] auto n = ::write(exec_err[1], &err, sizeof err);
        ::_exit(127);
    }

    ::close(to_child[0]);
    ::close(from_child[1]);
    ::close(exec_err[1]);
    in_fd_ = to_child[1];
    out_fd_ = from_child[0];

    int child_errno = 0;
    ssize_t n;
    do {
        n = ::read(exec_err[0], &child_errno, sizeof child_errno);
    } while (n < 0 && errno == EINTR);
    ::close(exec_err[0]);
    if (n > 0) {
        ::waitpid(pid_, nullptr, 0);
        reaped_ = true;
        close_fd(in_fd_);
        close_fd(out_fd_);
        throw SpawnError("cannot execute '" + argv[0] + "': " + std::strerror(child_errno));
    }
}

Subprocess::~Subprocess() { terminate("", std::chrono::milliseconds(200)); }

bool Subprocess::write_line(const std::string& line) {
    if (in_fd_ < 0) return false;
    std::string data = line + "\n";
    std::size_t off = 0;
    while (off < data.size()) {
        const ssize_t n = ::write(in_fd_, data.data() + off, data.size() - off);
        if (n < 0) {
            if (errno == EINTR) continue;
            return false;
        }
        off += static_cast<std::size_t>(n);
    }
    return true;
}

Subprocess::ReadResult Subprocess::read_line(std::chrono::milliseconds timeout) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    for (;;) {
        if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
            std::string line = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            return {ReadStatus::Line, std::move(line)};
        }
        if (eof_) {
            if (!buffer_.empty()) {
                std::string line;
                line.swap(buffer_);
                return {ReadStatus::Line, std::move(line)};
            }
            return {ReadStatus::Eof, {}};
        }
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) return {ReadStatus::Timeout, {}};

        pollfd pfd{out_fd_, POLLIN, 0};
        const int rc = ::poll(&pfd, 1, static_cast<int>(left.count()));
        if (rc < 0 && errno == EINTR) continue;
        if (rc == 0) return {ReadStatus::Timeout, {}};
        char chunk[4096];
        const ssize_t n = ::read(out_fd_, chunk, sizeof chunk);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) {
            eof_ = true;
            continue;
        }
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

bool Subprocess::running() {
    if (reaped_ || pid_ <= 0) return false;
    int status = 0;
    if (::waitpid(pid_, &status, WNOHANG) == pid_) {
        reaped_ = true;
        return false;
    }
    return true;
}

void Subprocess::terminate(const std::string& quit_command, std::chrono::milliseconds grace) {
    if (!quit_command.empty()) write_line(quit_command);
    close_fd(in_fd_);
    if (pid_ > 0 && !reaped_) {
        const auto deadline = std::chrono::steady_clock::now() + grace;
        while (running() && std::chrono::steady_clock::now() < deadline)
            std::this_thread::sleep_for(std::chrono::milliseconds(2));
        if (!reaped_) {
            ::kill(pid_, SIGKILL);
            ::waitpid(pid_, nullptr, 0);
            reaped_ = true;
        }
    }
    close_fd(out_fd_);
}

}  // namespace llmchess::engine

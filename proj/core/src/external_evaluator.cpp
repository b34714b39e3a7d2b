#include "s4is/errors.hpp"
#include "s4is/evaluation.hpp"

#include <nlohmann/json.hpp>

#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <csignal>
#include <cstring>
#include <mutex>

namespace s4is {

struct ExternalEvaluator::Impl {
    std::string command;
    std::size_t dim = 0;
    pid_t child = -1;
    int fd = -1;
    std::uint64_t next_id = 1;
    std::string buffer;
    bool broken = false;
    std::mutex mutex;

    void fail(const std::string& why) {
        broken = true;
        throw EvaluationError("external evaluator '" + command + "': " + why);
    }

    void fail_protocol(const std::string& why) {
        broken = true;
        throw ProtocolError("external evaluator '" + command + "': " + why);
    }

    void send_line(const std::string& line) {
        std::size_t off = 0;
        while (off < line.size()) {
            const ssize_t n = ::send(fd, line.data() + off, line.size() - off, MSG_NOSIGNAL);
            if (n < 0) {
                if (errno == EINTR) continue;
                fail(std::string("write failed: ") + std::strerror(errno));
            }
            off += static_cast<std::size_t>(n);
        }
    }

    std::string read_line() {
        for (;;) {
            if (auto pos = buffer.find('\n'); pos != std::string::npos) {
                std::string line = buffer.substr(0, pos);
                buffer.erase(0, pos + 1);
                return line;
            }
            char chunk[4096];
            const ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
            if (n < 0) {
                if (errno == EINTR) continue;
                fail(std::string("read failed: ") + std::strerror(errno));
            }
            if (n == 0) fail("process exited before answering");
            buffer.append(chunk, static_cast<std::size_t>(n));
        }
    }
};

ExternalEvaluator::ExternalEvaluator(const std::string& command, std::size_t dim) : impl_(std::make_unique<Impl>()) {
    if (command.empty()) throw ConfigError("external evaluator command is empty");
    if (dim == 0) throw ConfigError("external evaluator dimension must be >= 1");
    impl_->command = command;
    impl_->dim = dim;

    int fds[2];
    if (::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) != 0) {
        throw EvaluationError(std::string("cannot create evaluator channel: ") + std::strerror(errno));
    }
    const pid_t pid = ::fork();
    if (pid < 0) {
        ::close(fds[0]);
        ::close(fds[1]);
        throw EvaluationError(std::string("cannot fork evaluator: ") + std::strerror(errno));
    }
    if (pid == 0) {
        ::close(fds[0]);
        ::dup2(fds[1], STDIN_FILENO);
        ::dup2(fds[1], STDOUT_FILENO);
        ::close(fds[1]);
        ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        ::_exit(127);
    }
    ::close(fds[1]);
    impl_->child = pid;
    impl_->fd = fds[0];
}

ExternalEvaluator::~ExternalEvaluator() {
    if (impl_->fd >= 0) {
        ::shutdown(impl_->fd, SHUT_RDWR);
        ::close(impl_->fd);
    }
    if (impl_->child > 0) {
        int status = 0;
        if (::waitpid(impl_->child, &status, WNOHANG) == 0) {
            ::kill(impl_->child, SIGTERM);
            ::waitpid(impl_->child, &status, 0);
        }
    }
}

std::uint64_t ExternalEvaluator::requests_sent() const { return impl_->next_id - 1; }

double ExternalEvaluator::evaluate(const Vector& theta) {
    std::lock_guard lock(impl_->mutex);
    if (impl_->broken) throw EvaluationError("external evaluator '" + impl_->command + "' failed earlier; refusing to re-drive it");
    if (static_cast<std::size_t>(theta.size()) != impl_->dim) {
        throw PreconditionError("external evaluator expects dimension " + std::to_string(impl_->dim));
    }
    const std::uint64_t id = impl_->next_id++;
    nlohmann::json request{{"id", id}, {"theta", std::vector<double>(theta.data(), theta.data() + theta.size())}};
    impl_->send_line(request.dump() + "\n");

    const std::string line = impl_->read_line();
    nlohmann::json response;
    try {
        response = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
        impl_->fail_protocol("malformed response line: " + line);
    }
    if (!response.is_object() || !response.contains("id") || !response["id"].is_number_unsigned()) {
        impl_->fail_protocol("response without an unsigned integer id: " + line);
    }
    if (response["id"].get<std::uint64_t>() != id) {
        impl_->fail_protocol("response id " + response["id"].dump() + " does not match request id " + std::to_string(id));
    }
    if (response.contains("error")) {
        const auto& err = response["error"];
        impl_->fail("evaluation " + std::to_string(id) + " failed: " + (err.is_string() ? err.get<std::string>() : err.dump()));
    }
    if (!response.contains("g") || !response["g"].is_number()) impl_->fail_protocol("response without numeric g: " + line);
    const double g = response["g"].get<double>();
    if (!std::isfinite(g)) {
        impl_->broken = true;
        throw NumericError("external evaluator returned a non-finite value");
    }
    return g;
}

}  // namespace s4is

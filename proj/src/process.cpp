#include "adasharp/process.hpp"

#include <fcntl.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "adasharp/error.hpp"

extern char** environ;

namespace adasharp {

namespace {

bool is_executable_file(const std::filesystem::path& p) {
    std::error_code ec;
    return std::filesystem::is_regular_file(p, ec) && ::access(p.c_str(), X_OK) == 0;
}

std::optional<std::filesystem::path> search_dirs(const char* list, const std::string& name) {
    if (list == nullptr) {
        return std::nullopt;
    }
    std::stringstream dirs(list);
    std::string dir;
    while (std::getline(dirs, dir, ':')) {
        if (dir.empty()) {
            continue;
        }
        const auto candidate = std::filesystem::path(dir) / name;
        if (is_executable_file(candidate)) {
            return candidate;
        }
    }
    return std::nullopt;
}

// RAII wrapper so every exit path destroys the spawn attributes.
class FileActions {
public:
    FileActions() {
        if (posix_spawn_file_actions_init(&actions_) != 0) {
            throw EnvironmentError("posix_spawn_file_actions_init failed");
        }
    }
    ~FileActions() { posix_spawn_file_actions_destroy(&actions_); }
    FileActions(const FileActions&) = delete;
    FileActions& operator=(const FileActions&) = delete;

    posix_spawn_file_actions_t* get() { return &actions_; }

private:
    posix_spawn_file_actions_t actions_;
};

}  // namespace

std::optional<std::filesystem::path> resolve_executable(const std::string& name) {
    if (name.empty()) {
        return std::nullopt;
    }
    if (name.find('/') != std::string::npos) {
        return is_executable_file(name) ? std::optional<std::filesystem::path>(name)
                                        : std::nullopt;
    }
    if (auto hit = search_dirs(std::getenv("ADASHARP_ENCODER_PATH"), name)) {
        return hit;
    }
    return search_dirs(std::getenv("PATH"), name);
}

ProcessResult run_process(const std::vector<std::string>& argv,
                          const std::filesystem::path& stderr_log) {
    if (argv.empty()) {
        throw PreconditionError("empty command line");
    }
    FileActions actions;
    posix_spawn_file_actions_addopen(actions.get(), STDIN_FILENO, "/dev/null", O_RDONLY, 0);
    posix_spawn_file_actions_addopen(actions.get(), STDOUT_FILENO, "/dev/null", O_WRONLY, 0);
    posix_spawn_file_actions_addopen(actions.get(), STDERR_FILENO, stderr_log.c_str(),
                                     O_WRONLY | O_CREAT | O_TRUNC, 0644);

    std::vector<char*> args;
    args.reserve(argv.size() + 1);
    for (const auto& a : argv) {
        args.push_back(const_cast<char*>(a.c_str()));
    }
    args.push_back(nullptr);

    pid_t pid = 0;
    const int rc = posix_spawn(&pid, argv.front().c_str(), actions.get(), nullptr, args.data(),
                               environ);
    if (rc != 0) {
        throw EnvironmentError("cannot start '" + argv.front() + "': " + std::strerror(rc));
    }
    int status = 0;
    while (::waitpid(pid, &status, 0) < 0) {
        if (errno != EINTR) {
            throw EnvironmentError("waitpid failed for '" + argv.front() +
                                   "': " + std::strerror(errno));
        }
    }

    ProcessResult result;
    if (WIFEXITED(status)) {
        result.exit_code = WEXITSTATUS(status);
    } else if (WIFSIGNALED(status)) {
        result.exit_code = 128 + WTERMSIG(status);
    }
    std::ifstream log(stderr_log);
    std::ostringstream text;
    text << log.rdbuf();
    result.stderr_text = text.str();
    return result;
}

}  // namespace adasharp

#include "kilm/scoring/subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <thread>
#include <unordered_map>

#include "kilm/error.hpp"

namespace kilm::scoring {

namespace {

class SigpipeGuard {
 public:
  SigpipeGuard() {
    struct sigaction ignore {};
    ignore.sa_handler = SIG_IGN;
    sigemptyset(&ignore.sa_mask);
    sigaction(SIGPIPE, &ignore, &previous_);
  }
  ~SigpipeGuard() { sigaction(SIGPIPE, &previous_, nullptr); }
  SigpipeGuard(const SigpipeGuard&) = delete;
  SigpipeGuard& operator=(const SigpipeGuard&) = delete;

 private:
  struct sigaction previous_ {};
};

class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  Fd(Fd&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Fd& operator=(Fd&& o) noexcept {
    reset();
    fd_ = std::exchange(o.fd_, -1);
    return *this;
  }
  ~Fd() { reset(); }
  int get() const { return fd_; }
  explicit operator bool() const { return fd_ >= 0; }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

void set_nonblocking(int fd) { ::fcntl(fd, F_SETFL, ::fcntl(fd, F_GETFL) | O_NONBLOCK); }

class Child {
 public:
  explicit Child(const std::vector<std::string>& argv) {
    if (argv.empty()) throw ConfigError("empty scorer command");
    int in_pipe[2];
    int out_pipe[2];
    if (::pipe2(in_pipe, O_CLOEXEC) != 0) throw ScorerError(std::string("pipe: ") + std::strerror(errno));
    if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
      ::close(in_pipe[0]);
      ::close(in_pipe[1]);
      throw ScorerError(std::string("pipe: ") + std::strerror(errno));
    }
    std::vector<char*> args;
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);
    pid_ = ::fork();
    if (pid_ < 0) throw ScorerError(std::string("fork: ") + std::strerror(errno));
    if (pid_ == 0) {
      ::dup2(in_pipe[0], STDIN_FILENO);
      ::dup2(out_pipe[1], STDOUT_FILENO);
      ::execvp(args[0], args.data());
      _exit(127);
    }
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    to_child = Fd(in_pipe[1]);
    from_child = Fd(out_pipe[0]);
    set_nonblocking(to_child.get());
    set_nonblocking(from_child.get());
  }

  ~Child() {
    if (pid_ > 0) {
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, nullptr, 0);
    }
  }

  // Waits briefly for a voluntary exit, then kills.
  void reap(SubprocessReport& report, bool force) {
    if (pid_ <= 0) return;
    to_child.reset();
    from_child.reset();
    int status = 0;
    pid_t r = 0;
    if (!force) {
      for (int i = 0; i < 200 && r == 0; ++i) {
        r = ::waitpid(pid_, &status, WNOHANG);
        if (r == 0) std::this_thread::sleep_for(std::chrono::milliseconds(10));
      }
    }
    if (r == 0 || force) {
      ::kill(pid_, SIGKILL);
      r = ::waitpid(pid_, &status, 0);
    }
    if (r == pid_) {
      if (WIFEXITED(status)) report.exit_status = WEXITSTATUS(status);
      if (WIFSIGNALED(status)) report.signal = WTERMSIG(status);
    }
    pid_ = -1;
  }

  Fd to_child;
  Fd from_child;

 private:
  pid_t pid_ = -1;
};

}  // namespace

SubprocessScorer::SubprocessScorer(std::vector<std::string> argv, SubprocessOptions options)
    : argv_(std::move(argv)), options_(options) {
  if (argv_.empty()) throw ConfigError("empty scorer command");
  if (options_.max_inflight == 0) throw ConfigError("max_inflight must be >= 1");
}

SubprocessScorer SubprocessScorer::from_shell(const std::string& command, SubprocessOptions options) {
  return SubprocessScorer({"/bin/sh", "-c", command}, options);
}

std::vector<ScoreResponse> SubprocessScorer::run(const std::vector<ScoreRequest>& requests) {
  report_ = {};
  std::vector<std::optional<ScoreResponse>> answers(requests.size());
  if (requests.empty()) return {};
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    if (!index.emplace(requests[i].id, i).second) throw ProtocolError("duplicate request id " + requests[i].id);
  }

  SigpipeGuard guard;
  Child child(argv_);
  std::string out_buf;
  std::size_t out_pos = 0;
  std::string in_buf;
  std::size_t next = 0;
  std::size_t answered = 0;
  std::size_t inflight = 0;
  bool child_eof = false;
  auto last_progress = std::chrono::steady_clock::now();

  auto handle_line = [&](std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) return;
    ScoreResponse resp = parse_response_line(line);
    auto it = index.find(resp.id);
    if (it == index.end()) throw ProtocolError("response for unknown id: " + std::string(line));
    if (answers[it->second]) throw ProtocolError("duplicate response for id: " + std::string(line));
    answers[it->second] = std::move(resp);
    ++answered;
    --inflight;
  };

  try {
    while (answered < requests.size() && !child_eof) {
      while (inflight < options_.max_inflight && next < requests.size() && child.to_child) {
        out_buf += to_json(requests[next]).dump();
        out_buf.push_back('\n');
        ++next;
        ++inflight;
      }
      report_.max_observed_inflight = std::max(report_.max_observed_inflight, inflight);

      pollfd fds[2];
      nfds_t nfds = 0;
      fds[nfds++] = {child.from_child.get(), POLLIN, 0};
      const bool want_write = child.to_child && out_pos < out_buf.size();
      if (want_write) fds[nfds++] = {child.to_child.get(), POLLOUT, 0};

      const auto waited = std::chrono::steady_clock::now() - last_progress;
      const auto remaining = options_.timeout - std::chrono::duration_cast<std::chrono::milliseconds>(waited);
      if (remaining.count() <= 0) {
        report_.timed_out = true;
        break;
      }
      int rc = ::poll(fds, nfds, static_cast<int>(std::min<long long>(remaining.count(), 1000)));
      if (rc < 0) {
        if (errno == EINTR) continue;
        throw ScorerError(std::string("poll: ") + std::strerror(errno));
      }
      if (rc == 0) continue;

      if (want_write && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
        ssize_t w = ::write(child.to_child.get(), out_buf.data() + out_pos, out_buf.size() - out_pos);
        if (w > 0) {
          out_pos += static_cast<std::size_t>(w);
          if (out_pos == out_buf.size()) {
            out_buf.clear();
            out_pos = 0;
          }
        } else if (w < 0 && errno != EAGAIN && errno != EINTR) {
          child.to_child.reset();  // child closed its stdin
        }
      }
      if (child.to_child && next == requests.size() && out_buf.empty()) child.to_child.reset();

      if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
        char chunk[65536];
        ssize_t r = ::read(child.from_child.get(), chunk, sizeof chunk);
        if (r > 0) {
          in_buf.append(chunk, static_cast<std::size_t>(r));
          std::size_t start = 0;
          for (auto nl = in_buf.find('\n'); nl != std::string::npos; nl = in_buf.find('\n', start)) {
            handle_line(std::string_view(in_buf).substr(start, nl - start));
            start = nl + 1;
            last_progress = std::chrono::steady_clock::now();
          }
          in_buf.erase(0, start);
        } else if (r == 0) {
          child_eof = true;
        } else if (errno != EAGAIN && errno != EINTR) {
          child_eof = true;
        }
      }
      if (want_write && out_pos > 0) last_progress = std::chrono::steady_clock::now();
    }
    if (child_eof && !in_buf.empty()) {
      handle_line(in_buf);
      in_buf.clear();
    }
  } catch (...) {
    child.reap(report_, true);
    throw;
  }
  child.reap(report_, answered < requests.size());

  std::vector<ScoreResponse> out;
  out.reserve(requests.size());
  for (std::size_t i = 0; i < requests.size(); ++i) {
    if (answers[i]) {
      out.push_back(std::move(*answers[i]));
      continue;
    }
    report_.unanswered.push_back(requests[i].id);
    out.push_back(ScoreResponse::failure(requests[i].id, report_.timed_out ? "scorer timed out"
                                                                          : "scorer exited before responding"));
  }
  return out;
}

std::vector<ScoreResponse> CallbackScorer::run(const std::vector<ScoreRequest>& requests) {
  std::vector<ScoreResponse> out;
  out.reserve(requests.size());
  for (const auto& r : requests) {
    try {
      out.push_back(fn_(r));
    } catch (const std::exception& e) {
      out.push_back(ScoreResponse::failure(r.id, e.what()));
    }
  }
  return out;
}

}  // namespace kilm::scoring

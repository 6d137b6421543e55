#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "imli/maxsat.hpp"

extern char **environ;

namespace imli {

namespace {

// Whitespace split honouring single and double quotes.
std::vector<std::string> tokenize(const std::string &cmd) {
  std::vector<std::string> out;
  std::string cur;
  bool have = false;
  char quote = 0;
  for (char c : cmd) {
    if (quote) {
      if (c == quote) {
        quote = 0;
      } else {
        cur.push_back(c);
      }
    } else if (c == '"' || c == '\'') {
      quote = c;
      have = true;
    } else if (c == ' ' || c == '\t') {
      if (have) out.push_back(cur);
      cur.clear();
      have = false;
    } else {
      cur.push_back(c);
      have = true;
    }
  }
  if (quote) throw UsageError("unbalanced quote in solver command");
  if (have) out.push_back(cur);
  return out;
}

class TempFile {
 public:
  explicit TempFile(const std::string &contents) {
    std::string tmpl =
        (std::filesystem::temp_directory_path() / "imli-XXXXXX.wcnf").string();
    const int fd = mkstemps(tmpl.data(), 5);
    if (fd < 0) throw SolverError(std::string("cannot create temp file: ") + std::strerror(errno));
    close(fd);
    path_ = tmpl;
    std::ofstream out(path_, std::ios::binary);
    out << contents;
    if (!out) throw SolverError("cannot write " + path_);
  }
  ~TempFile() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  TempFile(const TempFile &) = delete;
  TempFile &operator=(const TempFile &) = delete;
  const std::string &path() const { return path_; }

 private:
  std::string path_;
};

struct RunResult {
  std::string out;
  std::string err;
  int status = 0;
  bool timed_out = false;
};

RunResult run_with_limit(const std::vector<std::string> &argv, double time_limit) {
  int out_pipe[2], err_pipe[2];
  if (pipe(out_pipe) != 0 || pipe(err_pipe) != 0)
    throw SolverError(std::string("pipe: ") + std::strerror(errno));

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);
  posix_spawn_file_actions_adddup2(&actions, err_pipe[1], STDERR_FILENO);
  posix_spawn_file_actions_addclose(&actions, out_pipe[0]);
  posix_spawn_file_actions_addclose(&actions, err_pipe[0]);
  posix_spawnattr_t attr;
  posix_spawnattr_init(&attr);
  posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP);
  posix_spawnattr_setpgroup(&attr, 0);

  std::vector<char *> cargv;
  for (const auto &a : argv) cargv.push_back(const_cast<char *>(a.c_str()));
  cargv.push_back(nullptr);

  pid_t pid = 0;
  const int rc = posix_spawnp(&pid, cargv[0], &actions, &attr, cargv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  posix_spawnattr_destroy(&attr);
  close(out_pipe[1]);
  close(err_pipe[1]);
  if (rc != 0) {
    close(out_pipe[0]);
    close(err_pipe[0]);
    throw SolverError("cannot start '" + argv[0] + "': " + std::strerror(rc));
  }

  RunResult r;
  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                            std::chrono::duration<double>(time_limit));
  pollfd fds[2] = {{out_pipe[0], POLLIN, 0}, {err_pipe[0], POLLIN, 0}};
  int open_fds = 2;
  char buf[4096];
  while (open_fds > 0) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                          deadline - std::chrono::steady_clock::now())
                          .count();
    if (left <= 0) {
      r.timed_out = true;
      break;
    }
    const int n = poll(fds, 2, static_cast<int>(std::min<long long>(left, 1000)));
    if (n < 0 && errno != EINTR) break;
    for (int i = 0; i < 2; ++i) {
      if (fds[i].fd < 0 || !(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
      const ssize_t got = read(fds[i].fd, buf, sizeof buf);
      if (got <= 0) {
        close(fds[i].fd);
        fds[i].fd = -1;
        --open_fds;
      } else {
        (i == 0 ? r.out : r.err).append(buf, static_cast<std::size_t>(got));
      }
    }
  }
  if (r.timed_out) {
    kill(-pid, SIGTERM);
    usleep(100000);
    kill(-pid, SIGKILL);
    // Drain whatever was flushed before the kill.
    for (auto &fd : fds) {
      if (fd.fd < 0) continue;
      fcntl(fd.fd, F_SETFL, O_NONBLOCK);
      ssize_t got;
      while ((got = read(fd.fd, buf, sizeof buf)) > 0)
        (&fd == &fds[0] ? r.out : r.err).append(buf, static_cast<std::size_t>(got));
      close(fd.fd);
    }
  }
  int status = 0;
  while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  r.status = status;
  return r;
}

}  // namespace

SolveOutcome solve_external(const MaxSatQuery &q, const ExternalOptions &opts) {
  const auto start = std::chrono::steady_clock::now();
  auto finish = [&](SolveOutcome o) {
    o.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return o;
  };

  TempFile file(to_wcnf(q, opts.dialect));
  std::vector<std::string> argv;
  bool placed = false;
  for (auto tok : tokenize(opts.command)) {
    for (auto pos = tok.find("{}"); pos != std::string::npos; pos = tok.find("{}")) {
      tok.replace(pos, 2, file.path());
      placed = true;
    }
    argv.push_back(std::move(tok));
  }
  if (argv.empty()) throw UsageError("empty solver command");
  if (!placed) argv.push_back(file.path());

  RunResult run;
  try {
    run = run_with_limit(argv, opts.time_limit);
  } catch (const SolverError &e) {
    SolveOutcome o;
    o.status = SolveStatus::solver_error;
    o.message = e.what();
    return finish(o);
  }

  const std::size_t nvars = q.vars.num_vars();
  SolveOutcome o = parse_solver_output(run.out, nvars);
  if (run.timed_out) {
    o.status = o.weight ? SolveStatus::best_found : SolveStatus::timeout_no_solution;
    o.message = "time limit reached";
  } else if (o.status == SolveStatus::solver_error) {
    const bool exited = WIFEXITED(run.status);
    o.message += exited ? " (exit code " + std::to_string(WEXITSTATUS(run.status)) + ")"
                        : " (killed by signal)";
    if (!run.err.empty()) o.message += ": " + run.err.substr(0, 500);
    return finish(o);
  }

  if (o.has_solution()) {
    o.assignment.resize(nvars + 1, 0);
    const auto w = weight_of_assignment(q, o.assignment);
    if (!w) {
      o.status = SolveStatus::solver_error;
      o.message = "solver model violates a hard clause";
      o.assignment.clear();
    } else if (o.weight && *o.weight != *w) {
      o.status = SolveStatus::solver_error;
      o.message = "solver reported cost " + std::to_string(*o.weight) +
                  " but its model costs " + std::to_string(*w);
    } else {
      o.weight = w;
    }
  } else if (o.status == SolveStatus::optimum) {
    o.status = SolveStatus::solver_error;
    o.message = "solver claimed an optimum without printing a model";
  }
  return finish(o);
}

}  // namespace imli

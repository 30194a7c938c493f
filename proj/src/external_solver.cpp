#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>

#include "msaverify/error.hpp"
#include "msaverify/smt_export.hpp"

namespace msaverify {

std::string_view to_string(ExternalStatus status) {
  switch (status) {
    case ExternalStatus::Sat: return "sat";
    case ExternalStatus::Unsat: return "unsat";
    case ExternalStatus::Unknown: return "unknown";
    case ExternalStatus::Timeout: return "timeout";
  }
  return "?";
}

namespace {

// Minimal s-expression reader for solver responses.
struct Sexp {
  std::string atom;  // set for atoms
  std::vector<Sexp> items;
  bool is_list = false;
};

class SexpReader {
 public:
  explicit SexpReader(std::string_view text) : text_(text) {}

  bool at_end() {
    skip();
    return pos_ >= text_.size();
  }

  Sexp read() {
    skip();
    if (pos_ >= text_.size()) throw SolverError("unexpected end of solver output");
    Sexp s;
    if (text_[pos_] == '(') {
      ++pos_;
      s.is_list = true;
      while (true) {
        skip();
        if (pos_ >= text_.size()) throw SolverError("unbalanced parentheses in solver output");
        if (text_[pos_] == ')') {
          ++pos_;
          break;
        }
        s.items.push_back(read());
      }
      return s;
    }
    if (text_[pos_] == ')') throw SolverError("unbalanced parentheses in solver output");
    if (text_[pos_] == '"') {
      const std::size_t start = pos_++;
      while (pos_ < text_.size() && text_[pos_] != '"') ++pos_;
      ++pos_;
      s.atom = std::string(text_.substr(start, pos_ - start));
      return s;
    }
    if (text_[pos_] == '|') {
      const std::size_t start = ++pos_;
      while (pos_ < text_.size() && text_[pos_] != '|') ++pos_;
      s.atom = std::string(text_.substr(start, pos_ - start));
      ++pos_;
      return s;
    }
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
           text_[pos_] != '(' && text_[pos_] != ')') {
      ++pos_;
    }
    s.atom = std::string(text_.substr(start, pos_ - start));
    return s;
  }

 private:
  void skip() {
    while (pos_ < text_.size()) {
      if (std::isspace(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
      } else if (text_[pos_] == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::optional<long long> integer_value(const Sexp& s) {
  if (!s.is_list) {
    char* end = nullptr;
    const long long v = std::strtoll(s.atom.c_str(), &end, 10);
    if (!s.atom.empty() && end && *end == '\0') return v;
    return std::nullopt;
  }
  if (s.items.size() == 2 && !s.items[0].is_list && s.items[0].atom == "-") {
    if (auto v = integer_value(s.items[1])) return -*v;
  }
  return std::nullopt;
}

void collect_definitions(const Sexp& s, std::map<std::string, std::string>& out) {
  if (!s.is_list) return;
  if (s.items.size() == 5 && !s.items[0].is_list && s.items[0].atom == "define-fun" && !s.items[4].is_list) {
    out[s.items[1].atom] = s.items[4].atom;
    return;
  }
  for (const auto& item : s.items) collect_definitions(item, out);
}

}  // namespace

ExternalVerdict parse_solver_output(const SmtDocument& document, const std::string& output) {
  ExternalVerdict verdict;
  verdict.raw_output = output;
  SexpReader reader(output);
  bool have_status = false;
  std::map<std::string, std::string> definitions;

  while (!reader.at_end()) {
    Sexp s = reader.read();
    if (!s.is_list) {
      if (!have_status && (s.atom == "sat" || s.atom == "unsat" || s.atom == "unknown")) {
        verdict.status = s.atom == "sat" ? ExternalStatus::Sat
                         : s.atom == "unsat" ? ExternalStatus::Unsat
                                             : ExternalStatus::Unknown;
        have_status = true;
        continue;
      }
      if (s.atom == "timeout") {
        verdict.status = ExternalStatus::Timeout;
        have_status = true;
        continue;
      }
      throw SolverError("unexpected token '" + s.atom + "' in solver output");
    }
    if (!s.items.empty() && !s.items[0].is_list) {
      const std::string& head = s.items[0].atom;
      if (head == "error") {
        // Model queries after unsat are expected to fail.
        if (have_status && verdict.status != ExternalStatus::Sat) continue;
        throw SolverError("solver reported an error: " + (s.items.size() > 1 ? s.items[1].atom : ""));
      }
      if (head == "objectives") {
        for (std::size_t i = 1; i < s.items.size(); ++i) {
          if (s.items[i].is_list && s.items[i].items.size() == 2) {
            verdict.objective = integer_value(s.items[i].items[1]);
          }
        }
        continue;
      }
    }
    collect_definitions(s, definitions);
  }
  if (!have_status) throw SolverError("solver output has no check-sat response");

  for (const auto& [symbol, value] : definitions) {
    auto it = document.var_manifest.find(symbol);
    if (it == document.var_manifest.end() || it->second.kind == SmtVar::Kind::Order) continue;
    const bool now = value == "true";
    const SmtVar& var = it->second;
    if (now == var.original) continue;
    if (var.kind == SmtVar::Kind::Edge) {
      verdict.changes.push_back(RemoveEdge{var.edge});
    } else if (now) {
      verdict.changes.push_back(AddRole{var.endpoint, var.role});
    } else {
      verdict.changes.push_back(RemoveRole{var.endpoint, var.role});
    }
  }
  std::sort(verdict.changes.begin(), verdict.changes.end(), change_less);
  return verdict;
}

namespace {

class TempFile {
 public:
  explicit TempFile(const std::string& contents) {
    std::string pattern = (std::filesystem::temp_directory_path() / "msaverify-XXXXXX.smt2").string();
    std::vector<char> buffer(pattern.begin(), pattern.end());
    buffer.push_back('\0');
    const int fd = ::mkstemps(buffer.data(), 5);
    if (fd < 0) throw SolverError(std::string("cannot create temporary file: ") + std::strerror(errno));
    path_ = buffer.data();
    std::size_t written = 0;
    while (written < contents.size()) {
      const ssize_t n = ::write(fd, contents.data() + written, contents.size() - written);
      if (n <= 0) {
        ::close(fd);
        throw SolverError("cannot write temporary file");
      }
      written += static_cast<std::size_t>(n);
    }
    ::close(fd);
  }
  ~TempFile() { std::filesystem::remove(path_); }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct Pipe {
  int fds[2] = {-1, -1};
  Pipe() {
    if (::pipe2(fds, O_CLOEXEC) != 0) throw SolverError("pipe creation failed");
  }
  ~Pipe() {
    for (int fd : fds) {
      if (fd >= 0) ::close(fd);
    }
  }
  void close_end(int i) {
    if (fds[i] >= 0) ::close(fds[i]);
    fds[i] = -1;
  }
};

}  // namespace

ExternalVerdict run_external(const SmtDocument& document, const std::string& solver_path,
                             double timeout_seconds) {
  if (timeout_seconds <= 0.0) {
    ExternalVerdict verdict;
    verdict.status = ExternalStatus::Timeout;
    return verdict;
  }
  TempFile file(document.text);
  Pipe output;
  Pipe exec_status;  // carries errno if execvp fails

  const pid_t pid = ::fork();
  if (pid < 0) throw SolverError("fork failed");
  if (pid == 0) {
    ::dup2(output.fds[1], STDOUT_FILENO);
    const int devnull = ::open("/dev/null", O_WRONLY);
    if (devnull >= 0) ::dup2(devnull, STDERR_FILENO);
    std::string arg0 = solver_path;
    std::string arg1 = file.path();
    char* argv[] = {arg0.data(), arg1.data(), nullptr};
    ::execvp(argv[0], argv);
    const int err = errno;
    [[maybe_unused]] auto ignored = ::write(exec_status.fds[1], &err, sizeof err);
    ::_exit(127);
  }
  output.close_end(1);
  exec_status.close_end(1);

  int exec_errno = 0;
  if (::read(exec_status.fds[0], &exec_errno, sizeof exec_errno) == sizeof exec_errno) {
    ::waitpid(pid, nullptr, 0);
    throw SolverError("cannot launch solver '" + solver_path + "': " + std::strerror(exec_errno));
  }

  using Clock = std::chrono::steady_clock;
  const auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                           std::chrono::duration<double>(timeout_seconds));
  std::string text;
  char buffer[4096];
  bool timed_out = false;
  while (true) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
    if (left <= 0) {
      timed_out = true;
      break;
    }
    pollfd pfd{output.fds[0], POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(left, 1000)));
    if (ready < 0 && errno != EINTR) throw SolverError("poll failed");
    if (ready <= 0) continue;
    const ssize_t n = ::read(output.fds[0], buffer, sizeof buffer);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    text.append(buffer, static_cast<std::size_t>(n));
  }
  if (timed_out) {
    ::kill(pid, SIGKILL);
    ::waitpid(pid, nullptr, 0);
    ExternalVerdict verdict;
    verdict.status = ExternalStatus::Timeout;
    verdict.raw_output = std::move(text);
    return verdict;
  }
  int status = 0;
  ::waitpid(pid, &status, 0);
  return parse_solver_output(document, text);
}

}  // namespace msaverify

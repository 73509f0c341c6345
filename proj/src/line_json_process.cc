/*!
 *  Copyright (c) 2026 by Contributors
 * \file line_json_process.cc
 */
#include <dialtree/error.h>
#include <dialtree/line_json_process.h>

#include <csignal>
#include <sys/wait.h>
#include <unistd.h>

namespace dialtree {

LineJsonProcess::LineJsonProcess(const std::string& command) : command_(command) {
  int in_pipe[2], out_pipe[2];
  if (pipe(in_pipe) != 0) throw SessionError("pipe() failed for '" + command + "'");
  if (pipe(out_pipe) != 0) {
    close(in_pipe[0]);
    close(in_pipe[1]);
    throw SessionError("pipe() failed for '" + command + "'");
  }
  pid_ = fork();
  if (pid_ < 0) throw SessionError("fork() failed for '" + command + "'");
  if (pid_ == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  to_child_ = fdopen(in_pipe[1], "w");
  from_child_ = fdopen(out_pipe[0], "r");
  if (!to_child_ || !from_child_) throw SessionError("fdopen() failed for '" + command + "'");
  // A dead child must surface as a write error, not kill us.
  std::signal(SIGPIPE, SIG_IGN);
}

LineJsonProcess::~LineJsonProcess() {
  if (to_child_) std::fclose(to_child_);
  if (from_child_) std::fclose(from_child_);
  if (pid_ > 0) {
    int status = 0;
    waitpid(pid_, &status, 0);
  }
}

nlohmann::json LineJsonProcess::Request(const nlohmann::json& request) {
  std::string line = request.dump() + "\n";
  if (std::fwrite(line.data(), 1, line.size(), to_child_) != line.size() ||
      std::fflush(to_child_) != 0) {
    throw SessionError("write to '" + command_ + "' failed");
  }
  std::string reply;
  int c;
  while ((c = std::fgetc(from_child_)) != EOF && c != '\n') reply.push_back(static_cast<char>(c));
  if (c == EOF && reply.empty()) throw SessionError("'" + command_ + "' closed its output");
  nlohmann::json out;
  try {
    out = nlohmann::json::parse(reply);
  } catch (const nlohmann::json::exception& e) {
    throw SessionError("malformed reply from '" + command_ + "': " + e.what());
  }
  if (!out.is_object()) throw SessionError("reply from '" + command_ + "' is not an object");
  if (out.contains("error")) throw SessionError("'" + command_ + "' reported: " + out["error"].dump());
  return out;
}

}  // namespace dialtree

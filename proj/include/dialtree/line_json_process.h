/*!
 *  Copyright (c) 2026 by Contributors
 * \file dialtree/line_json_process.h
 * \brief A child process answering one JSON object per line on stdout for each JSON request
 *  line written to its stdin.
 */
#ifndef DIALTREE_LINE_JSON_PROCESS_H_
#define DIALTREE_LINE_JSON_PROCESS_H_

#include <json.hpp>

#include <cstdio>
#include <string>
#include <sys/types.h>

namespace dialtree {

class LineJsonProcess {
 public:
  /*! \brief Runs `command` through /bin/sh. \throws SessionError */
  explicit LineJsonProcess(const std::string& command);
  ~LineJsonProcess();

  LineJsonProcess(const LineJsonProcess&) = delete;
  LineJsonProcess& operator=(const LineJsonProcess&) = delete;

  /*! \throws SessionError on write failure, EOF, malformed JSON or an "error" field. */
  nlohmann::json Request(const nlohmann::json& request);

 private:
  pid_t pid_ = -1;
  std::FILE* to_child_ = nullptr;
  std::FILE* from_child_ = nullptr;
  std::string command_;
};

}  // namespace dialtree

#endif  // DIALTREE_LINE_JSON_PROCESS_H_

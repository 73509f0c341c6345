/*!
 *  Copyright (c) 2026 by Contributors
 * \file dialtree/error.h
 * \brief Exception hierarchy shared by every dialtree module.
 */
#ifndef DIALTREE_ERROR_H_
#define DIALTREE_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dialtree {

/*! \brief Base class of all errors raised by the toolkit. */
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define DIALTREE_DEFINE_ERROR(Name)    \
  class Name : public Error {          \
   public:                             \
    using Error::Error;                \
  }

/*! \brief Malformed annotation notation. Carries the byte offset of the failure. */
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, std::size_t offset)
      : Error(what + " at byte " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/*! \brief Line-oriented file format violation. Carries the 1-based line number. */
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  explicit FormatError(const std::string& what) : Error(what), line_(0) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// meaning representation
DIALTREE_DEFINE_ERROR(DuplicateIdError);
DIALTREE_DEFINE_ERROR(UnresolvedRefError);

// ontology
DIALTREE_DEFINE_ERROR(DanglingConceptError);
DIALTREE_DEFINE_ERROR(UnknownConceptError);
DIALTREE_DEFINE_ERROR(UnknownRelationError);

// smatch / evaluation
DIALTREE_DEFINE_ERROR(TooLargeError);
DIALTREE_DEFINE_ERROR(KeyMismatchError);

// decoding
DIALTREE_DEFINE_ERROR(DeadEndError);
DIALTREE_DEFINE_ERROR(IllegalTokenError);
DIALTREE_DEFINE_ERROR(AnnotationTruncatedError);

// language model boundary
DIALTREE_DEFINE_ERROR(EmptyHistoryError);
DIALTREE_DEFINE_ERROR(SessionError);

// lora
DIALTREE_DEFINE_ERROR(RankError);
DIALTREE_DEFINE_ERROR(AlphaError);
DIALTREE_DEFINE_ERROR(DimensionError);

// quality estimation
DIALTREE_DEFINE_ERROR(DimMismatchError);
DIALTREE_DEFINE_ERROR(DegenerateDataError);
DIALTREE_DEFINE_ERROR(ProviderError);

// corpus / pipeline
DIALTREE_DEFINE_ERROR(DuplicateKeyError);
DIALTREE_DEFINE_ERROR(AnnotationParseError);
DIALTREE_DEFINE_ERROR(ConfigError);

#undef DIALTREE_DEFINE_ERROR

}  // namespace dialtree

#endif  // DIALTREE_ERROR_H_

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace opr {

// Root of every error raised by the library. Callers that only need to know
// "something in opr failed" catch this; the subclasses carry the detail.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeMismatchError : public Error {
 public:
  using Error::Error;
};

// blendfake synthesis
class DegenerateHullError : public Error {
 public:
  using Error::Error;
};

class EmptyPoolError : public Error {
 public:
  using Error::Error;
};

class WarpOutOfBoundsError : public Error {
 public:
  using Error::Error;
};

// bridging
class FrameMismatchError : public Error {
 public:
  using Error::Error;
};

// metrics / latent analysis
class SingleClassError : public Error {
 public:
  using Error::Error;
};

class ZeroStdError : public Error {
 public:
  using Error::Error;
};

class EmptyDumpError : public Error {
 public:
  using Error::Error;
};

class DegenerateOrderingError : public Error {
 public:
  using Error::Error;
};

// training
class NanLossError : public Error {
 public:
  NanLossError(const std::string& what, std::vector<std::string> batch_frame_ids)
      : Error(what), batch_frame_ids_(std::move(batch_frame_ids)) {}
  const std::vector<std::string>& batch_frame_ids() const { return batch_frame_ids_; }

 private:
  std::vector<std::string> batch_frame_ids_;
};

class CheckpointError : public Error {
 public:
  using Error::Error;
};

class CheckpointVersionError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};

class CheckpointMismatchError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};

// ingestion
class ManifestError : public Error {
 public:
  using Error::Error;
};

class DuplicateFrameError : public ManifestError {
 public:
  DuplicateFrameError(const std::string& frame_id)
      : ManifestError("duplicate frame_id in manifest: " + frame_id), frame_id_(frame_id) {}
  const std::string& frame_id() const { return frame_id_; }

 private:
  std::string frame_id_;
};

class MissingFilesError : public ManifestError {
 public:
  explicit MissingFilesError(std::vector<std::string> missing);
  const std::vector<std::string>& missing() const { return missing_; }

 private:
  std::vector<std::string> missing_;
};

class SplitLeakError : public ManifestError {
 public:
  using ManifestError::ManifestError;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace opr

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gsml {

/// Input violates a documented precondition or type invariant.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// ||Wx|| fell below the encoder's norm guard, so the sample has no direction.
class DegenerateEmbedding : public std::runtime_error {
 public:
  DegenerateEmbedding(std::size_t sample, double norm)
      : std::runtime_error("degenerate embedding for sample " + std::to_string(sample) +
                           " (||Wx|| = " + std::to_string(norm) + ")"),
        sample_(sample),
        norm_(norm) {}

  std::size_t sample() const noexcept { return sample_; }
  double norm() const noexcept { return norm_; }

 private:
  std::size_t sample_;
  double norm_;
};

/// Training stopped on a non-finite loss or another unrecoverable state.
class TrainingAborted : public std::runtime_error {
 public:
  TrainingAborted(const std::string& what, std::size_t epoch, std::size_t batch)
      : std::runtime_error(what + " (epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(batch) + ")"),
        epoch_(epoch),
        batch_(batch) {}

  std::size_t epoch() const noexcept { return epoch_; }
  std::size_t batch() const noexcept { return batch_; }

 private:
  std::size_t epoch_;
  std::size_t batch_;
};

/// File could not be opened, read, or parsed.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gsml

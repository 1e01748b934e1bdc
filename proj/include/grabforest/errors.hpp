#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace grabforest {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Outdegree sequence whose Lukasiewicz walk does not encode the requested
// forest. index() is 1-based.
class InvalidSequence : public Error {
 public:
  InvalidSequence(const std::string& what, std::size_t index)
      : Error(what), index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

// Text input that could not be parsed. position() is a 0-based offset.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " (at position " + std::to_string(position) + ")"),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// GW sample that reached its vertex budget before extinction.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(const std::string& what, std::size_t partial_size)
      : Error(what), partial_size_(partial_size) {}
  std::size_t partial_size() const { return partial_size_; }

 private:
  std::size_t partial_size_;
};

#define GRABFOREST_ERROR(Name)        \
  class Name : public Error {         \
   public:                            \
    using Error::Error;               \
  }

GRABFOREST_ERROR(NotNormalized);
GRABFOREST_ERROR(InvalidLaw);
GRABFOREST_ERROR(InvalidLabels);
GRABFOREST_ERROR(InvalidArms);
GRABFOREST_ERROR(ConditioningImpossible);
GRABFOREST_ERROR(OutOfRange);
GRABFOREST_ERROR(BadSum);
GRABFOREST_ERROR(Infeasible);
GRABFOREST_ERROR(Unreachable);
GRABFOREST_ERROR(ZeroMean);
GRABFOREST_ERROR(TooLarge);
GRABFOREST_ERROR(HypothesisViolated);
GRABFOREST_ERROR(PeriodicSupport);
GRABFOREST_ERROR(DegenerateCells);

#undef GRABFOREST_ERROR

}  // namespace grabforest

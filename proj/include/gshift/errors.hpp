#pragma once

#include <stdexcept>
#include <string>

namespace gshift {

// Base of every error raised by the library. Verdict-like outcomes
// (Exhausted, Inconsistent, No, ...) are values, never exceptions.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MalformedInput : public Error {
 public:
  using Error::Error;
};

// A rewriting system failed to reach a normal form within its step budget.
class SolverBudgetExceeded : public Error {
 public:
  using Error::Error;
};

class BallBudgetExceeded : public Error {
 public:
  using Error::Error;
};

class UnsupportedGroup : public Error {
 public:
  using Error::Error;
};

class ComponentExhausted : public Error {
 public:
  using Error::Error;
};

class CompletionBudgetExceeded : public Error {
 public:
  using Error::Error;
};

// Raised by boolean-returning window operations whose underlying search ran
// out of budget. Never folded into a negative answer.
class Undetermined : public Error {
 public:
  using Error::Error;
};

class RetargetUnsound : public Error {
 public:
  using Error::Error;
};

// M_PATH reached the origin with every direction exhausted.
class GroupExhausted : public Error {
 public:
  using Error::Error;
};

class UndefinedTransition : public Error {
 public:
  using Error::Error;
};

}  // namespace gshift

#pragma once

#include <stdexcept>
#include <string>

namespace permuton {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input or violated precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Enumeration or memory cap exceeded; the message names the cap.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

// Repeated coordinate ties while sampling.
class CollisionError : public Error {
 public:
  using Error::Error;
};

// A numerical self-check failed (root structure, poles, fuses).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace permuton

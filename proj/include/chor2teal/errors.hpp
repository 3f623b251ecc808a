#pragma once

#include <stdexcept>
#include <string>

namespace chor2teal {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Malformed input: XML, XES, TEAL source, JSON documents.
class ParseError : public Error {
public:
  using Error::Error;
};

// Model or net violates a structural invariant.
class ValidationError : public Error {
public:
  using Error::Error;
};

class EmissionError : public Error {
public:
  using Error::Error;
};

class SimulationError : public Error {
public:
  using Error::Error;
};

} // namespace chor2teal

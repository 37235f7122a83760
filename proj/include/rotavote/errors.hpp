#pragma once

#include <stdexcept>
#include <string>

namespace rotavote {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Geometry
struct PoleProximity : Error {
  using Error::Error;
};

// Voting / estimation
struct EmptyInput : Error {
  using Error::Error;
};
struct NoPeak : Error {
  using Error::Error;
};
struct DegenerateProjection : Error {
  using Error::Error;
};
struct NoVotes : Error {
  using Error::Error;
};
struct AllDegenerate : Error {
  using Error::Error;
};
struct RankDeficient : Error {
  using Error::Error;
};
struct NoConsensus : Error {
  using Error::Error;
};
struct InvalidConfig : Error {
  using Error::Error;
};

// I/O
struct IoError : Error {
  using Error::Error;
};
struct EmptyFile : Error {
  using Error::Error;
};
struct ParseError : Error {
  ParseError(const std::string& msg, int line_number)
      : Error(msg + " (line " + std::to_string(line_number) + ")"),
        line(line_number) {}
  int line;
};

}  // namespace rotavote

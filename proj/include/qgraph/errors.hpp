#pragma once

#include <stdexcept>
#include <string>

namespace qgraph {

enum class ErrorKind {
  SingularMatrix,
  NotHermitian,
  DimensionMismatch,
  NotCompatible,
  Degenerate,
  NonpositiveLength,
  TooFewEdges,
  InvalidOuterBlock,
  InvalidPotential,
  StepUnderflow,
  ZetaMismatch,
  WindowTooWide,
  NoConvergence,
  NotAnEigenvalue,
  ZetaInSpectrum,
  SpectrumHit,
  DirichletSpectrumHit,
  YSingular,
  BranchAmbiguity,
  DegenerateCrossing,
  InterlacingViolation,
  NotDegenerate,
  AtBandEdge,
  ConfigError,
  IoError,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace qgraph

#include "qgraph/errors.hpp"

namespace qgraph {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotCompatible: return "NotCompatible";
    case ErrorKind::Degenerate: return "Degenerate";
    case ErrorKind::NonpositiveLength: return "NonpositiveLength";
    case ErrorKind::TooFewEdges: return "TooFewEdges";
    case ErrorKind::InvalidOuterBlock: return "InvalidOuterBlock";
    case ErrorKind::InvalidPotential: return "InvalidPotential";
    case ErrorKind::StepUnderflow: return "StepUnderflow";
    case ErrorKind::ZetaMismatch: return "ZetaMismatch";
    case ErrorKind::WindowTooWide: return "WindowTooWide";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NotAnEigenvalue: return "NotAnEigenvalue";
    case ErrorKind::ZetaInSpectrum: return "ZetaInSpectrum";
    case ErrorKind::SpectrumHit: return "SpectrumHit";
    case ErrorKind::DirichletSpectrumHit: return "DirichletSpectrumHit";
    case ErrorKind::YSingular: return "YSingular";
    case ErrorKind::BranchAmbiguity: return "BranchAmbiguity";
    case ErrorKind::DegenerateCrossing: return "DegenerateCrossing";
    case ErrorKind::InterlacingViolation: return "InterlacingViolation";
    case ErrorKind::NotDegenerate: return "NotDegenerate";
    case ErrorKind::AtBandEdge: return "AtBandEdge";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

}  // namespace qgraph

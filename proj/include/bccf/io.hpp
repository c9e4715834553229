#pragma once

// Protocol files and result serialization.
//
// Protocol JSON: {"alice_dims":[...],"bob_dims":[...],"alpha0":[...],
// "alpha1":[...],"beta0":[...],"beta1":[...]}, flat arrays in the row-major
// order of core.hpp.

#include <filesystem>
#include <string>

#include "bccf/core.hpp"
#include "bccf/quantum.hpp"

namespace bccf {

class ParseError : public BccfError {
 public:
  using BccfError::BccfError;
};

class IoError : public BccfError {
 public:
  using BccfError::BccfError;
};

/// Throws ParseError on malformed JSON or missing/mistyped fields;
/// NormalizationError, DomainError and DimensionError come from validation.
BccfProtocol protocol_from_json(const std::string& text);
std::string protocol_to_json(const BccfProtocol& proto, int indent = 2);

BccfProtocol load_protocol(const std::filesystem::path& path);  // IoError if unreadable
void save_text(const std::filesystem::path& path, const std::string& text);

/// {party, outcome, primal_value, dual_value, gap, iterations, converged, dual_certificate}
std::string quantum_result_json(const QuantumResult& r, int indent = 2);

/// The protocol of the worked example with all four values 3/4.
BccfProtocol three_quarters_protocol();

}  // namespace bccf

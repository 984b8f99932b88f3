#pragma once

#include <array>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pflow/model.hpp"

namespace pflow {

/// A network plus its document-level envelope: free-form metadata (base
/// power, description, ...) and the root phasors in the magnitude/degrees
/// presentation the file format uses. Keeping the polar presentation here —
/// instead of re-deriving it from the rectangular root_voltage — is what
/// makes parse/emit a lossless round trip.
struct NetworkDocument {
  Network net;
  std::vector<std::pair<std::string, std::string>> metadata;
  std::array<std::pair<double, double>, 3> root_polar{};  // (pu, degrees)
};

/// Build a document from an in-memory network (derives the polar root).
NetworkDocument make_document(const Network& net);

struct ParseError : std::runtime_error {
  int line;
  ParseError(int line_number, const std::string& message);
};

/// Parse the line-oriented network format:
///
///   pflow-network v1
///   [metadata]              # free-form `key = value` entries
///   [root]                  # node id and per-phase `magnitude degrees`
///   [segments]              # from to + nine complex entries re+jim
///   [customers]             # id node p q z_service psd|fixed a|b|c
///
/// `#` starts a comment, blank lines are ignored. Throws ParseError with the
/// offending line number. Structural validity is not enforced here — run
/// validate_network on the result.
NetworkDocument parse_network(std::istream& in);
NetworkDocument parse_network(const std::string& text);
NetworkDocument load_network_file(const std::string& path);

/// Canonical emission: sections in fixed order, segments sorted by
/// (from, to), customers by id, numbers in shortest round-trip form.
/// parse(emit(doc)) reproduces doc exactly.
std::string emit_network(const NetworkDocument& doc);

/// Shortest decimal form that parses back to exactly the same double.
std::string format_double(double value);
/// Complex in file form, e.g. "0.024+j0.017".
std::string format_complex(const Phasor& z);

}  // namespace pflow

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gilbert/certify.hpp"
#include "gilbert/model.hpp"

namespace gilbert {

// Instance documents:
//   { "dimension": 2,
//     "norm": {"kind": "lp", "p": 2.0},      // or {"kind": "euclidean"}
//     "weight": {"d": 1.0, "h": 0.5},
//     "sources": [{"position": [x, y], "flow": t}, ...],
//     "sink": [x, y] }

enum class InputErrorCode {
  kSyntax = 10,
  kSchema,
  kDimension,
  kNorm,
  kWeightFixed,      // d <= 0
  kWeightVariable,   // h < 0
  kFlow,
  kCoordinate,
  kSinkOnSource,
};

const char* to_string(InputErrorCode code);

class InstanceParseError : public InvalidInput {
 public:
  InstanceParseError(InputErrorCode code, const std::string& what)
      : InvalidInput(std::string(to_string(code)) + ": " + what), code_(code) {}
  InputErrorCode code() const { return code_; }

 private:
  InputErrorCode code_;
};

struct ParsedInstance {
  Instance instance;
  std::vector<std::string> warnings;
};

// Sources sharing coordinates are merged by summing their flows, with a
// warning. Throws InstanceParseError.
ParsedInstance parse_instance(std::string_view text);

std::string emit_instance(const Instance& inst);

struct OracleSummary {
  double cost = 0.0;
  double bound = 0.0;
  double spacing = 0.0;
  std::string topology_key;
};

struct PerturbationSummary {
  std::uint64_t seed = 0;
  int trials = 0;
  double magnitude = 0.0;
  double max_decrease = 0.0;
};

struct ResultMetadata {
  int topologies_examined = 0;
  int topologies_failed = 0;
  long iterations = 0;
  std::string topology_key;
  std::optional<OracleSummary> oracle;
  std::optional<PerturbationSummary> perturbation;
};

// Deterministic JSON: fixed key order, 17 significant digits, non-finite
// numbers as null. Ends with an echo of the instance.
std::string emit_result(const EmbeddedArborescence& arb, const Certificate& cert, double cost,
                        const ResultMetadata& meta = {});

// SVG 1.1 drawing of a planar arborescence. Throws InvalidInput when the
// dimension is not 2.
std::string emit_svg(const EmbeddedArborescence& arb);

}  // namespace gilbert

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "repind/error.hpp"
#include "repind/harness.hpp"

namespace repind::cli {

using json = nlohmann::ordered_json;

/// A scenario problem located by a JSON pointer (RFC 6901).
class ValidationError : public Error {
 public:
  ValidationError(std::string pointer, const std::string& message)
      : Error(pointer + ": " + message), pointer_(std::move(pointer)) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

/// Escapes one reference token of a JSON pointer.
std::string pointer_token(const std::string& key);

struct SpaceSpec {
  std::string name;
  std::vector<std::string> vocabulary;
  std::optional<std::string> restriction;
  /// Names of earlier spaces; the space is then their product.
  std::optional<std::vector<std::string>> factors;
  bool operator==(const SpaceSpec&) const = default;
};

struct PriorSpec {
  std::string kind = "uniform";  // uniform | product | finite
  /// finite: space name -> list of weight vectors (rationals as strings).
  std::map<std::string, std::vector<std::vector<std::string>>> measures;
  bool operator==(const PriorSpec&) const = default;
};

struct ProcedureSpec {
  std::string kind = "maxent";  // entailment | maxent | i0 | i1 | prior | broken
  std::optional<PriorSpec> prior;
  std::optional<std::uint64_t> seed;
  bool operator==(const ProcedureSpec&) const = default;
};

struct EmbeddingSpec {
  std::string kind;  // surjection | interpretation | product | permutation
  std::optional<std::string> source;
  std::optional<std::string> target;
  std::map<std::string, std::string> map;
  std::vector<EmbeddingSpec> parts;
  std::vector<std::size_t> pi;
  bool operator==(const EmbeddingSpec&) const = default;
};

struct HarnessSpec {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> budget;
  std::optional<double> eps;
  std::optional<std::size_t> max_worlds;
  std::optional<std::string> templates;  // general | objective
  bool operator==(const HarnessSpec&) const = default;
};

struct Scenario {
  std::vector<SpaceSpec> spaces;
  /// Space the kb and queries live on; defaults to the first space.
  std::optional<std::string> space;
  std::string kb = "true";
  std::vector<std::string> queries;
  ProcedureSpec procedure;
  std::vector<EmbeddingSpec> embeddings;
  std::optional<HarnessSpec> harness;
  bool operator==(const Scenario&) const = default;
};

/// Structural parse; throws ValidationError on shape errors.
Scenario scenario_from_json(const json& j);
json to_json(const Scenario& s);

/// A scenario with every reference resolved.
struct Built {
  std::map<std::string, SpacePtr> spaces;
  SpacePtr space;
  std::optional<Constraint> kb;
  std::vector<Constraint> queries;
  std::optional<InferenceProcedure> procedure;
  std::vector<Embedding> embeddings;
};

/// Validates references, parses the DSL strings and builds the objects.
Built build(const Scenario& s);

InferenceProcedure build_procedure(const ProcedureSpec& spec, const std::map<std::string, SpacePtr>& spaces,
                                   const std::string& pointer = "/procedure");

}  // namespace repind::cli

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "repind/constraint.hpp"
#include "repind/entail.hpp"
#include "repind/measure_set.hpp"
#include "repind/optimize.hpp"

namespace repind {

struct InferenceConfig {
  EntailConfig entail;
  ProjectionConfig projection;
  /// Tolerance for evaluating queries on float measures.
  double eps = 1e-8;
  /// Points drawn in sampling mode.
  std::size_t samples = 64;
  std::uint64_t seed = 0;
};

/// Chooses the prior measures used by a prior-based procedure.
class PriorFunction {
 public:
  enum class Kind { kUniform, kFinite, kProductFamily };
  using Table = std::vector<std::pair<SpacePtr, std::vector<Measure>>>;

  static PriorFunction uniform() { return PriorFunction(Kind::kUniform, {}); }
  /// Spaces are matched with same_space; each list must be nonempty.
  static PriorFunction finite(Table table);
  /// All product measures over the product decomposition.
  static PriorFunction product_family() { return PriorFunction(Kind::kProductFamily, {}); }

  Kind kind() const { return kind_; }
  /// The prior set for a space. Throws DomainError for an unknown space and
  /// Error for the product family, which is never enumerated.
  std::vector<Measure> priors(const SpacePtr& space) const;

 private:
  PriorFunction(Kind k, Table t) : kind_(k), table_(std::move(t)) {}
  Kind kind_;
  Table table_;
};

/// A kb split into per-factor constraints over the product decomposition.
struct FactorizedKb {
  SpacePtr space;
  Decomposition decomposition;
  /// parts[i] lives on decomposition.factors[i].
  std::vector<Constraint> parts;
};

/// Splits the top-level conjuncts of kb into constraints that each mention
/// cylinder events of a single factor; nullopt if some conjunct does not.
std::optional<FactorizedKb> factorize(const Constraint& kb);

/// What a procedure selects from [[kb]].
struct Selection {
  enum class Kind {
    kDenotation,     // exactly [[constraint]]
    kFinite,         // an explicit list of float measures
    kProductFamily,  // products of measures satisfying each factor's part
    kSampled,        // a sample of an infinite selection
  };
  Kind kind = Kind::kDenotation;
  SpacePtr space;
  std::optional<Constraint> constraint;
  std::vector<Measure> measures;
  std::optional<FactorizedKb> factors;
  bool empty = false;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::string note;
};

class InferenceProcedure {
 public:
  enum class Kind { kEntailment, kMaxent, kI0, kI1, kPriorBased, kCustom };
  using Custom = std::function<Selection(const Constraint&, const InferenceConfig&)>;

  static InferenceProcedure entailment() { return InferenceProcedure("entailment", Kind::kEntailment); }
  static InferenceProcedure maxent() { return InferenceProcedure("maxent", Kind::kMaxent); }
  static InferenceProcedure i0() { return InferenceProcedure("i0", Kind::kI0); }
  static InferenceProcedure i1() { return InferenceProcedure("i1", Kind::kI1); }
  static InferenceProcedure prior_based(PriorFunction prior, std::string name = "prior");
  static InferenceProcedure custom(std::string name, Custom select);

  const std::string& name() const { return name_; }
  Kind kind() const { return kind_; }
  const std::optional<PriorFunction>& prior() const { return prior_; }
  const Custom& custom_select() const { return custom_; }

 private:
  InferenceProcedure(std::string name, Kind kind) : name_(std::move(name)), kind_(kind) {}
  std::string name_;
  Kind kind_;
  std::optional<PriorFunction> prior_;
  Custom custom_;
};

enum class VerdictMode { kExact, kSampled };

struct Verdict {
  bool holds = true;
  VerdictMode mode = VerdictMode::kExact;
  /// A selected measure violating the query, when one was found.
  std::optional<ExactMeasure> exact_witness;
  std::optional<Measure> witness;
  /// The selected measures for finite selections.
  std::vector<Measure> attainers;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::string note;
};

/// Throws DomainError("KB outside procedure domain ...") when a needed
/// projection is not attained.
Selection select(const InferenceProcedure& proc, const Constraint& kb, const InferenceConfig& cfg = {});
/// Does every selected measure satisfy theta? Sampled selections and
/// product queries over infinite selections are falsification-only.
Verdict evaluate(const Selection& sel, const Constraint& theta, const InferenceConfig& cfg = {});
Verdict infers(const InferenceProcedure& proc, const Constraint& kb, const Constraint& theta,
               const InferenceConfig& cfg = {});

/// The objective case keeps Pr(T) = 1 and adds full support on T.
Selection i0_select(const Constraint& kb, const InferenceConfig& cfg = {});
/// Pr(S) >= 1/4 becomes Pr(S) >= 1/3; other kbs select themselves.
Selection i1_select(const Constraint& kb, const InferenceConfig& cfg = {});

/// Selects one seeded random measure whatever the kb says (empty only for an
/// unsatisfiable kb). Used as a negative control.
InferenceProcedure broken_procedure(std::uint64_t seed);

struct KlmViolation {
  std::string property;
  std::string kb;
  std::string theta;
  std::string other;
};

struct KlmReport {
  std::string procedure;
  /// Instances checked per property.
  std::map<std::string, std::size_t> checks;
  std::vector<KlmViolation> violations;
  /// KBs skipped because they are outside the procedure's domain.
  std::size_t out_of_domain = 0;

  bool holds(const std::string& property) const;
  bool all_hold() const { return violations.empty(); }
};

inline const std::vector<std::string> kKlmProperties = {"reflexivity", "left-logical-equivalence",
                                                        "right-weakening", "and", "consistency"};

/// Checks the five properties over the corpus; thetas are paired with the
/// kbs on the same space.
KlmReport klm_properties_check(const InferenceProcedure& proc, const std::vector<Constraint>& kbs,
                               const std::vector<Constraint>& thetas, const InferenceConfig& cfg = {});

/// Lifts kb on X to X x Y and asks whether Pr(S x T) = Pr(S) * Pr(T) follows.
Verdict minimal_default_independence_check(const InferenceProcedure& proc, const Constraint& kb, const Event& s,
                                           const Event& t, const InferenceConfig& cfg = {});

/// I^P for the product family with kb = conjunction of `kbs` (all on
/// theta's space). Falls back to sampling when kb does not factorize.
Verdict product_prior_infer(const std::vector<Constraint>& kbs, const Constraint& theta,
                            const InferenceConfig& cfg = {});

}  // namespace repind

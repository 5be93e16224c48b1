#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "repind/constraint.hpp"
#include "repind/embedding.hpp"
#include "repind/procedures.hpp"

namespace repind {

// ---------------------------------------------------------------------------
// Template grammar shared by the falsifiers.

/// Bounds used by generated atoms: 0, 1/8, 1/4, 1/3, 1/2, 2/3, 3/4, 1.
const std::vector<Rational>& template_bounds();
/// A uniformly random event; `proper` excludes the empty event and the whole space.
Event random_event(const SpacePtr& space, std::mt19937_64& rng, bool proper = true);
/// Pr(S) cmp b, Pr(S1) - Pr(S2) cmp b or Pr(S1 | S2) cmp b.
Constraint random_atom(const SpacePtr& space, std::mt19937_64& rng, bool allow_strict = true);
/// Boolean combination of atoms of depth at most `depth` (0 = a single atom).
Constraint random_constraint(const SpacePtr& space, std::mt19937_64& rng, int depth, bool allow_strict = true);
/// A random space of `worlds` worlds over the fewest symbols that fit.
SpacePtr random_space(std::size_t worlds, std::mt19937_64& rng, const std::string& prefix = "v");
/// `k` worlds over symbols prefix1..prefixk with exactly one true; indecomposable for k >= 2.
SpacePtr one_hot_space(const std::string& prefix, std::size_t k);

// ---------------------------------------------------------------------------

struct HarnessConfig {
  InferenceConfig inference;
  std::size_t budget = 1000;
  std::uint64_t seed = 0;
  std::size_t max_worlds = 8;
  /// kObjective restricts generated kbs to the form Pr(T) = 1.
  enum class Templates { kGeneral, kObjective } templates = Templates::kGeneral;
  /// After the random trials, try the embedding construction driven by a
  /// nontrivial lower bound on the default-independence gadget.
  bool gadget_path = false;
};

std::string describe(const Embedding& f);

struct InvarianceViolation {
  std::string kb;
  std::string theta;
  std::string kb_translated;
  std::string theta_translated;
  std::string verdict_x;
  std::string verdict_y;
  std::string embedding;
  std::uint64_t trial_seed = 0;
  std::string note;
};

struct InvarianceReport {
  std::string procedure;
  std::string embedding;
  std::size_t trials = 0;
  std::size_t pairs_tested = 0;
  std::vector<InvarianceViolation> violations;
  VerdictMode mode = VerdictMode::kExact;
  bool ok() const { return violations.empty(); }
};

/// Runs infers on (kb, theta) and on (f*(kb), f*(theta)) and records any
/// disagreement, including a kb that is in the domain on one side only.
InvarianceReport invariance_check(const InferenceProcedure& proc, const Embedding& f, const Constraint& kb,
                                  const Constraint& theta, const InferenceConfig& cfg = {});
InvarianceReport invariance_check(const InferenceProcedure& proc, const Embedding& f,
                                  const std::vector<std::pair<Constraint, Constraint>>& corpus,
                                  const InferenceConfig& cfg = {});

/// Random spaces, faithful surjections and template (kb, theta) pairs until
/// a replayable violation is found or the budget runs out.
InvarianceReport rep_independence_falsify(const InferenceProcedure& proc, const HarnessConfig& cfg = {});

/// Embeddings f_1..f_N of X into X x Z (|Z| = M N, M the nonempty atoms over
/// `kb_events`) that agree on every kb event and send `s` to pairwise
/// disjoint sets. Requires each atom to meet both s and its complement.
std::vector<Embedding> disjoint_copy_embeddings(const SpacePtr& x, const std::vector<Event>& kb_events, const Event& s,
                                                std::size_t copies);

// ---------------------------------------------------------------------------

struct RobustnessReport {
  ConservativeReport conservative;
  bool skipped = false;
  std::size_t queries = 0;
  struct Disagreement {
    std::string query;
    bool holds_x;
    bool holds_z;
  };
  std::vector<Disagreement> violations;
  bool ok() const { return violations.empty(); }
};

/// Compares KB |~ phi with f*(KB) & psi |~ f*(phi) for each query, when psi
/// is verified conservative over kb along `lift`.
RobustnessReport robustness_check(const InferenceProcedure& proc, const Constraint& kb, const Embedding& lift,
                                  const Constraint& psi, const std::vector<Constraint>& queries,
                                  const InferenceConfig& cfg = {});

struct IntervalFinding {
  std::string event;
  Rational alpha;
  Rational beta;
};

struct EssentialEntailmentReport {
  /// Open intervals inferred that entailment does not give.
  std::vector<IntervalFinding> witnesses;
  /// Witnesses whose closed interval is not entailed either.
  std::vector<IntervalFinding> violations;
  bool essentially_entailment() const { return violations.empty(); }
  /// Every witness is the interval (0, 1).
  bool only_unit_interval() const;
};

EssentialEntailmentReport essentially_entailment_probe(const InferenceProcedure& proc, const Constraint& kb,
                                                       const std::vector<Event>& events,
                                                       const std::vector<Rational>& grid,
                                                       const InferenceConfig& cfg = {});

// ---------------------------------------------------------------------------

struct NoindepGadget {
  SpacePtr x;        // {x, x'}
  SpacePtr xx;       // X x X
  Constraint kb;     // 1/3 <= Pr(x * X) <= 2/3 on X x X
  Constraint query;  // Pr({(x,x),(x',x')}) > 1/3
  Event s;           // {(x,x),(x',x')}
  Event s_prime;     // {(x,x),(x,x')}
  std::vector<Event> atoms;
  bool atoms_nonempty = false;
};
NoindepGadget noindep_gadget();

struct AlmostTrivialGadget {
  std::size_t n = 0;
  std::size_t d = 0;
  Rational gamma;
  Rational alpha;
  SpacePtr y0;
  std::vector<Event> u;

  std::size_t worlds = 0;
  std::size_t u_size = 0;
  std::size_t pair_size = 0;
  bool counts_match = false;
  /// Each tuple lies in exactly d of the U_i.
  bool sum_identity = false;
  /// (alpha, conjunction of Pr(U_i) > alpha infeasible) on the probe grid.
  std::vector<std::pair<Rational, bool>> threshold_probe;
  bool threshold_exact = false;
  bool witnesses_exact = false;
  bool parameters_ok = false;

  bool ok() const { return counts_match && sum_identity && threshold_exact && witnesses_exact && parameters_ok; }
};

/// Builds Y0 and U_1..U_n and verifies the counting identities, the
/// threshold d/n and the uniform-on-U_i witnesses.
AlmostTrivialGadget almosttrivial2_gadget(std::size_t n, std::size_t d, std::size_t max_worlds = 120);

struct SigmaExtensionReport {
  std::size_t z_worlds = 0;
  /// mu'(V_j) = gamma for j != i and mu'(V_i) = nu(S).
  bool y_part_exact = false;
  /// Every X_j marginal is nu and every Pr(S_j <=> V_j) is 1.
  bool extension_exact = false;
  bool ok() const { return y_part_exact && extension_exact; }
};

/// Builds the extension witnessing that sigma is X_i-conservative for a
/// measure nu on X = {x, x'} with S = {x}.
SigmaExtensionReport sigma_extension_check(std::size_t n, std::size_t d, const Rational& gamma,
                                           const ExactMeasure& nu, std::size_t i);

// ---------------------------------------------------------------------------

struct BootstrapReport {
  bool corresponding = false;
  InvarianceReport invariance;
  /// corresponding iff no invariance violation.
  bool biconditional_holds() const { return corresponding == invariance.ok(); }
};

/// I^P for priors P(X) = prior_x, P(Y) = prior_y on the corpus plus kb = true
/// queries that pin down each prior.
BootstrapReport bootstrap_check(const std::vector<Measure>& prior_x, const std::vector<Measure>& prior_y,
                                const Embedding& f, const std::vector<std::pair<Constraint, Constraint>>& corpus,
                                const InferenceConfig& cfg = {});

struct ProductsReport {
  std::size_t product_embeddings = 0;
  std::size_t permutation_embeddings = 0;
  std::size_t pairs = 0;
  std::vector<InvarianceViolation> violations;
  bool crossing_violation_found = false;
  std::optional<InvarianceViolation> crossing_example;
};

/// I^P for the product family over sampled faithful product embeddings and
/// permutation embeddings of factorised corpora, plus the factor-crossing
/// embedding (a, b) -> (a, a xor b) searched within the budget.
ProductsReport products_invariance_check(std::size_t product_embeddings, std::size_t permutation_embeddings,
                                         const HarnessConfig& cfg = {});

// ---------------------------------------------------------------------------

struct KlmCorpus {
  std::vector<Constraint> kbs;
  std::vector<Constraint> thetas;
  std::vector<SpacePtr> spaces;
};

/// `kbs` random kbs (plus `true`) spread over a few spaces of 2-4 worlds, with
/// six queries per space. `closed` keeps every atom non-strict.
KlmCorpus random_klm_corpus(std::size_t kbs, std::uint64_t seed, bool closed = true, std::size_t spaces = 3);

}  // namespace repind

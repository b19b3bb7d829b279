#pragma once
// Per-prime data collection: enumerate curve classes, detect doubly
// isogenous pairs, classify twist vs nontwist, apply the cover-based
// refinements, flag supersingular-twist and split-field explanations, and
// emit deterministic CSV/JSON reports over a window of primes near 2^n.

#include <map>
#include <optional>
#include <string>

#include "d6lab/quadcover.hpp"

namespace d6lab {

/// The `count` primes > 3 minimizing |p - 2^n|, ties broken toward the
/// smaller prime; stored sorted ascending.
struct PrimeWindow {
    int n = 0;
    int count = 0;
    std::vector<u64> primes;
};
PrimeWindow primes_near(int n, int count);

/// One isomorphism class together with its 16-trace signature.
struct ClassRecord {
    CurveClass cls;
    TraceSignature sig;
};

// One record per isomorphism class (canonical representative), sorted by
// class.  Asserts the class-count identity
//   sum of orbit sizes = 2 (p - 1 - |excluded u-set|).
// Primes with no valid parameters (e.g. p = 11) give an empty list.
std::vector<ClassRecord> enumerate_classes(const PrimeField& K,
                                           const std::vector<std::int16_t>* table = nullptr);

/// A doubly isogenous pair: two distinct classes sharing tBase and the
/// 15-trace multiset.  Refinements are unset until refine_pair fills them.
struct PairRecord {
    u64 p = 0;
    CurveClass a, b;
    bool isTwist = false;  // equal coarse invariants
    std::optional<bool> special3, mult3, four;
    bool easyTwistTheorem = false;  // twist pairs only
    bool extraordinary = false;     // nontwist pairs only
};

// All unordered pairs of classes with equal flattened signatures, ordered by
// (a, b); fills isTwist and both flags (cheap), leaves refinements unset.
std::vector<PairRecord> find_pairs(const PrimeField& K, const std::vector<ClassRecord>& classes);

inline constexpr int kRefineSpecial3 = 1;
inline constexpr int kRefineMult3 = 2;
inline constexpr int kRefineFour = 4;

/// Per-class memo for the cover invariants, shared across the pairs of one
/// prime so each class is analyzed once.
struct RefineCache {
    std::map<std::pair<u64, int>, std::array<i64, 4>> special3;
    std::map<std::pair<u64, int>, Mult3Signature> mult3;
    std::map<std::pair<u64, int>, WeilPolynomial> four;
};

// Fills the refinements selected by mask: special3 = unordered special
// triple-cover Prym pairs match, mult3 = full multiplication-by-3 signatures
// match, four = aggregate fourfold-cover Weil polynomials equal.
void refine_pair(const PrimeField& K, PairRecord& rec, int mask, RefineCache* cache = nullptr);

// The supersingular-twist criterion at u (requires p = 3 mod 4, u valid):
// the Legendre curves at (u-1)^3 (u+3) / ((u+1)^3 (u-3)) and
// 4u / ((u-1)(u+3)) both have trace 0, and u(u-1)(u+3), -u(u+1)(u-3) are
// both nonsquares.
bool easytwist_predicate(const PrimeField& K, u64 u);

// Pair-level flag: twist pair whose class orbit contains some u passing
// easytwist_predicate (false whenever p = 1 mod 4).
bool easytwist_flag(const PrimeField& K, const PairRecord& rec);

// Nontwist explanation: x^2 - 27x + 1 splits with distinct roots {r1, r2}
// and the two classes have {r, 729/r} meeting {r1, r2} in a matched way.
bool extraordinary_detect(const PrimeField& K, const PairRecord& rec);

// True iff x^2 - 29, x^2 + 1 and x^3 + x^2 + 2 all split into distinct
// linear factors mod p (p > 3); the density of such primes is ~ 1/12.
bool split_completely_in_L(u64 p);

/// One CSV row of per-prime tallies plus the q^{-1/2} heuristic weight used
/// by the cross-window decay diagnostic.
struct PrimeRow {
    u64 p = 0;
    u64 classes = 0;
    u64 twist_pairs = 0, nontwist_pairs = 0;
    u64 twist_3a = 0, twist_3b = 0, twist_4 = 0;
    u64 nontwist_3a = 0, nontwist_3b = 0, nontwist_4 = 0;
    u64 easytwist_yes = 0, easytwist_no = 0;
    u64 extraordinary_yes = 0, extraordinary_no = 0;
    double heuristic_weight = 0.0;
    PrimeRow& operator+=(const PrimeRow& o);
};

struct SurveyOptions {
    int refineMask = 0;
    int jobs = 1;  // overridden by D6LAB_THREADS when set
};

struct SurveyReport {
    PrimeWindow window;
    int refineMask = 0;
    std::vector<PrimeRow> rows;     // primes ascending
    std::vector<PairRecord> pairs;  // by (p, a, b)
    PrimeRow aggregate() const;     // column sums, p = 0
};

SurveyReport run_survey(const PrimeWindow& w, const SurveyOptions& opt);

// Deterministic serializations (LF endings, ASCII decimal).
std::string perprime_csv(const SurveyReport& rep);
std::string aggregate_csv(const SurveyReport& rep);
std::string pairs_json(const SurveyReport& rep);

// Writes perprime.csv, aggregate.csv and pairs.json into outDir.
void emit_report(const SurveyReport& rep, const std::string& outDir);

/// Soft cross-window diagnostic: nontwist pair counts with the
/// extraordinary-flagged pairs removed, and the q^{-1/2} heuristic weight
/// sums predicting their ratio (~ 1/sqrt(2) per step of n).
struct DecayPoint {
    int n = 0;
    u64 adjusted_nontwist = 0;
    double weight_sum = 0.0;
};
std::vector<DecayPoint> decay_diagnostic(int nLo, int nHi, int count, const SurveyOptions& opt);

}  // namespace d6lab

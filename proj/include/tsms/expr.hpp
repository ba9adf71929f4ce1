#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tsms/algebra.hpp"
#include "tsms/time_series.hpp"

namespace tsms {

// Inclusive query interval over calendar indices.
struct QueryInterval {
    std::size_t start = 0;
    std::size_t end = 0;
};

} // namespace tsms

namespace tsms::expr {

enum class OpId : std::uint8_t {
    Base,
    Scale,
    Sel,
    Proj,
    Win,
    Mavg,
    Xavg,
    Rsi,
    Mom,
    Shift,
    Plus,
    Minus,
    Mult,
    Divide,
    Union,
    Intersect,
    Join,
    Ref, // plan-internal hole referencing an atomic sub-query result
};

const std::string& op_name(OpId id);

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

// Functional computation tree. The canonical serialization of a tree is the
// name of the series it computes and the key it is indexed under.
struct ExprNode {
    OpId op = OpId::Base;
    std::string base;                 // Base leaves only
    std::vector<ExprPtr> children;
    std::vector<double> params;       // numeric parameters (w, factor, alpha, ref index)
    std::optional<Predicate> pred;    // Sel
    std::optional<MapFn> map_fn;      // Proj
    std::optional<CombineFn> combine; // Win, Join

    bool is_base() const { return op == OpId::Base; }
};

ExprPtr make_base(std::string name);

// Parse the functional expression grammar:
//   expr := IDENT | OPNAME '(' arg (',' arg)* ')'
//   arg  := expr | number | predicate (e.g. ">0") | fn id (e.g. SUM)
// Operator names are case-insensitive; base names are taken verbatim.
// MACD(s,short,long), BUY(s) and SELL(s) are accepted and expand to their
// definitions in terms of the primitive operators.
// Throws SyntaxError, UnknownOperator, ArityError.
ExprPtr parse(std::string_view text);

// Deterministic canonical serialization: uppercase operators, no
// whitespace, shortest round-trip numbers, commutative operators (PLUS,
// MULT) with lexicographically sorted arguments. No algebraic rewriting.
std::string canonical_name(const ExprNode& node);
inline std::string canonical_name(const ExprPtr& node) { return canonical_name(*node); }

// Tree in canonical form (commutative arguments sorted recursively).
ExprPtr canonicalize(const ExprPtr& node);

// Entries strictly before t that the expression needs to produce output at
// t: window operators add w-1 (or w for RSI/MOM, 1 for SHIFT) along each
// path, n-ary operators take the maximum over children.
std::size_t lookback(const ExprNode& node);

// Names of the base series referenced by the tree, deduplicated.
std::vector<std::string> base_names(const ExprNode& node);

// Atomic sub-query: a chain of single-input operators down to one base
// leaf, executable on one peer.
bool is_atomic(const ExprNode& node);

// N-ary JOIN over a decomposable combine fn (SUM, PRODUCT, MAX, MIN)
// rewritten as a left-deep chain of binary joins; AVG joins keep their
// arity since AVG(AVG(a,b),c) differs from AVG(a,b,c).
ExprPtr rewrite_joins(const ExprPtr& node);

struct Decomposition {
    std::vector<ExprPtr> atomics; // maximal single-series operator chains
    ExprPtr plan;                 // combining plan; Ref(i) refers to atomics[i]
};

// Split a query into atomic sub-queries followed by combining operations.
Decomposition decompose(const ExprPtr& node);

using SeriesEnv = std::map<std::string, TimeSeries>;

// Apply one non-base operator to already-evaluated child slices. This is
// the single dispatch point used by both the centralized evaluator and the
// per-segment executor.
std::vector<Value> apply_op(const ExprNode& node,
                            std::span<const std::span<const Value>> children);

// Slice-level recursive evaluation with sub-expression memoization; leaves
// are resolved through the callback.
using LeafResolver = std::function<std::span<const Value>(const std::string&)>;
std::vector<Value> eval_slice(const ExprNode& node, const LeafResolver& leaf);

// Centralized reference evaluation: computes over the full materialized
// range of the base series, then restricts to the interval. Result name is
// the canonical serialization.
// Throws UnknownBaseSeries, CalendarMismatch, EngineError on a bad interval.
TimeSeries evaluate(const ExprNode& node, const SeriesEnv& env,
                    const QueryInterval& interval);
TimeSeries evaluate(const ExprPtr& node, const SeriesEnv& env,
                    const QueryInterval& interval);

} // namespace tsms::expr

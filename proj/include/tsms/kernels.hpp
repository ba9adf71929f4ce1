#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tsms/algebra.hpp"
#include "tsms/value.hpp"

namespace tsms::kernels {

// Slice-level kernels shared by the centralized evaluator and the
// per-segment executor, so both paths run the exact same code. `in` is a
// contiguous slice of a series; window reads before the slice use its
// first cell (val0 padding).

enum class PointwiseOp : std::uint8_t { Add, Sub, Mul, Div };

std::vector<Value> pointwise(PointwiseOp op, std::span<const Value> a,
                             std::span<const Value> b);
std::vector<Value> scale(double factor, std::span<const Value> in);
std::vector<Value> sel(const Predicate& pred, std::span<const Value> in);
std::vector<Value> proj(MapFn fn, std::span<const Value> in);
std::vector<Value> set_union(std::span<const Value> a, std::span<const Value> b);
std::vector<Value> set_intersect(std::span<const Value> a, std::span<const Value> b);
std::vector<Value> join(CombineFn fn, std::span<const std::span<const Value>> inputs);
std::vector<Value> win(CombineFn fn, std::size_t w, std::span<const Value> in);

// Moving average over the w entries ending at t, maintained incrementally:
// one add and one subtract per step regardless of w.
std::vector<Value> mavg(std::size_t w, std::span<const Value> in);

// Exponential moving average: weighted window mean with weights (1-alpha)^i
// for lag i in [0, w-1], normalized by the weight sum.
std::vector<Value> xavg(std::size_t w, double alpha, std::span<const Value> in);

// Relative strength index 100*G/(G+L) over the w consecutive first
// differences ending at t; G+L = 0 gives ?.
std::vector<Value> rsi(std::size_t w, std::span<const Value> in);

// Momentum in[t] - in[t-w].
std::vector<Value> mom(std::size_t w, std::span<const Value> in);

// One-step lag; the first cell repeats.
std::vector<Value> shift(std::span<const Value> in);

} // namespace tsms::kernels

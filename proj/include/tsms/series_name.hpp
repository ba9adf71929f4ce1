#pragma once

#include <string>

namespace tsms {

// Shortest decimal that round-trips the double; integral values print
// without a decimal point ("10", not "10.0"). Used everywhere a number is
// embedded in a canonical series name.
std::string format_number(double v);

// Canonical two-argument name for a commutative operator: arguments are
// sorted lexicographically so PLUS(B,A) and PLUS(A,B) produce one key.
std::string commutative_pair_name(const std::string& op, const std::string& a,
                                  const std::string& b);

} // namespace tsms

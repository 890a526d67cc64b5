#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace gcx {

// Counts, pre-order numbers and lengths can be exponential in the grammar size.
using BigInt = boost::multiprecision::cpp_int;

}  // namespace gcx

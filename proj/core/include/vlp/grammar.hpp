#pragma once

#include "vlp/exponent.hpp"
#include "vlp/func.hpp"
#include "vlp/space.hpp"

#include <string_view>

namespace vlp {

/// constant(p) | piecewise(b0,...,bk; v1,...,vk) | log | spiked(J,s,b)
/// | shuffle(<exponent>, seed[, depth]) | discretize(<exponent>, depth)
/// | dual(<exponent>) | rearrange(<exponent>)
Exponent parse_exponent(std::string_view text);

/// indicator(a,b) | poly(b0,...,bk; c0 c1 .. / c0 c1 ..) | cpoly(...) | const(c)
/// | mask(<function>, omega(n)) | mask(<function>, [a,b]) | sum(<function>, ...)
/// | scale(alpha, <function>) | sin(a,b,c) | exp(a,b) | pow(a,b)
/// omega(n) resolves against `p`; it is an error when `p` is null.
Func parse_func(std::string_view text, const Exponent* p = nullptr);

/// Signed sum of terms w*delta(t), delta(t), w*integral(<function>), integral(<function>).
FunctionalSpec parse_functional(std::string_view text);

} // namespace vlp

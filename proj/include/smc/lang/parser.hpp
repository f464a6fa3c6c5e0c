#pragma once

#include <string_view>

#include "smc/lang/ast.hpp"

namespace smc::lang {

// Parses model text. Throws ParseError with line and column on failure.
//
// Accepted forms, optionally wrapped in one outer `{ ... }`:
//   name[idx] ~ dist(args)     stochastic declaration
//   name[idx] <- expr          deterministic declaration
//   for(i in a:b) { ... }      loop (a single statement body is also allowed)
// Distributions: dnorm(mean, tau) with named `tau`, `var` or `sd`;
// dbeta(shape1, shape2); dgamma(shape, rate); dunif(min, max).
ModelSource parse(std::string_view text);

}  // namespace smc::lang

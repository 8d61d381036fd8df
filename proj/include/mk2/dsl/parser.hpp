#pragma once

#include "mk2/dsl/lexer.hpp"
#include "mk2/model/defs.hpp"

namespace mk2::dsl {

/// Parse a `.cmodel` document into a validated ModelDefs.
/// Declarations must precede their uses; errors carry source spans.
model::ModelDefs parse(const ModelSource& src);

/// Deterministic pretty-printer; parse(format(defs)) is structurally equal
/// to defs.
std::string format(const model::ModelDefs& defs);

} // namespace mk2::dsl

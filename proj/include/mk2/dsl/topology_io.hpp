#pragma once

#include "mk2/dsl/lexer.hpp"
#include "mk2/scj/topology.hpp"

namespace mk2::dsl {

/// Parse a `.topo` document into a validated Topology. Accepts the keyword
/// tree format (`topo 1` header) or a JSON encoding of the same schema when
/// the document starts with '{'.
scj::Topology parse_topology(const ModelSource& src);

} // namespace mk2::dsl

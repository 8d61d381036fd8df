#include "mk2/explore/compare.hpp"

namespace mk2::explore {

ProtocolComparison compare_protocols(const scj::Topology& t, const ExploreLimits& limits) {
    ProtocolComparison cmp;
    auto current_bundle = scj::build_model(t, scj::ProtocolVariant::Current);
    auto proposed_bundle =
        scj::build_model(t.rewritten_for_proposed(), scj::ProtocolVariant::Proposed);
    cmp.current = explore(current_bundle, limits);
    cmp.proposed = explore(proposed_bundle, limits);
    if (cmp.current.states > 0)
        cmp.reduction = 1.0 - static_cast<double>(cmp.proposed.states) /
                                  static_cast<double>(cmp.current.states);
    cmp.conclusive = !cmp.current.truncated && !cmp.proposed.truncated;
    return cmp;
}

} // namespace mk2::explore

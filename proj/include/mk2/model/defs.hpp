#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mk2/model/channel.hpp"
#include "mk2/model/symbols.hpp"
#include "mk2/model/term.hpp"
#include "mk2/model/value.hpp"

namespace mk2::model {

/// A declared store variable with its domain and initial value.
struct VarDecl {
    std::string name;
    DomainId domain = 0;
    Atom initial = Atom::boolean(false);
};

/// A named, possibly parameterised process definition.
struct ProcessDef {
    std::string name;
    std::vector<std::pair<std::string, DomainId>> params;
    TermPtr body;
};

/// A complete model: domains, channels, variables, process definitions and
/// the entry-point process name. Cross-references are by name/id and are
/// checked by validate().
struct ModelDefs {
    SymbolTable symbols;
    std::vector<ValueDomain> domains; // index 0 is the builtin boolean domain
    std::vector<ChannelDecl> channels;
    std::vector<VarDecl> variables;
    std::vector<ProcessDef> processes;
    std::string main;

    ModelDefs();

    // --- construction helpers ---------------------------------------------
    DomainId add_symbol_domain(const std::string& name, const std::vector<std::string>& members);
    DomainId add_int_domain(const std::string& name, std::int32_t lo, std::int32_t hi);
    ChannelId add_channel(const std::string& name, std::vector<DomainId> params = {});
    void add_variable(const std::string& name, DomainId domain, Atom initial);
    void add_process(const std::string& name, TermPtr body,
                     std::vector<std::pair<std::string, DomainId>> params = {});

    // --- lookups ------------------------------------------------------------
    std::optional<DomainId> find_domain(const std::string& name) const;
    std::optional<ChannelId> find_channel(const std::string& name) const;
    const ProcessDef* find_process(const std::string& name) const;
    const VarDecl* find_variable(const std::string& name) const;
    /// Resolve an identifier used as a value to (owning domain, atom).
    std::optional<std::pair<DomainId, Atom>> find_atom(const std::string& name) const;

    const ValueDomain& domain(DomainId id) const { return domains.at(static_cast<std::size_t>(id)); }
    const ChannelDecl& channel(ChannelId id) const {
        return channels.at(static_cast<std::size_t>(id));
    }
    std::string atom_name(const Atom& a) const;

    /// Full structural validation: reference resolution, channel arity and
    /// argument typing, name-set disjointness, finite-domain bounds,
    /// parameter shadowing. Throws ValidationError on the first failure.
    void validate(std::int32_t max_int_range = 16) const;
};

/// Deep structural equality of two models (domains, channels, variables,
/// process bodies and main), used by the round-trip checks.
bool structurally_equal(const ModelDefs& a, const ModelDefs& b);

} // namespace mk2::model

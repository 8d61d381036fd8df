#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "mk2/calc/store.hpp"
#include "mk2/model/defs.hpp"

namespace mk2::calc {

/// A state of the transition system: a closed process term plus a store.
/// Terms held by configurations produced through a StepEngine are interned,
/// so structural equality of configurations is pointer + store equality.
struct Configuration {
    model::TermPtr term;
    Store store;

    bool is_terminated() const { return term && term->kind == model::Term::Kind::Omega; }

    friend bool operator==(const Configuration& a, const Configuration& b) {
        return a.term.get() == b.term.get() && a.store == b.store;
    }
};

struct ConfigurationHash {
    std::size_t operator()(const Configuration& c) const;
};

struct Transition {
    model::EventLabel label;
    Configuration target;
};

/// Hash-consing table for process terms. Structurally equal terms intern to
/// the same shared node; interning also applies the canonical normalisation
/// (post-termination absorption in sequences, deterministic ordering of
/// choice operands). Interned nodes carry a dense id used for deterministic
/// ordering of transitions.
class TermInterner {
  public:
    model::TermPtr intern(const model::TermPtr& t);
    std::uint32_t id_of(const model::TermPtr& interned) const;
    std::size_t size() const { return by_key_.size(); }

  private:
    model::TermPtr intern_fresh(const model::TermPtr& t);

    std::unordered_map<std::string, model::TermPtr> by_key_;
    // Dense ids for interned nodes; doubles as the "already canonical" set.
    // Only nodes retained by by_key_ are keys here, so addresses are stable.
    std::unordered_map<const model::Term*, std::uint32_t> ids_;
};

struct StepOptions {
    std::int32_t unfold_budget = 64; // Ref unfolds allowed within one step
};

/// Small-step labelled semantics over a fixed model. The engine owns the
/// interner and per-model lookup tables; step() itself is a pure function of
/// the configuration.
class StepEngine {
  public:
    explicit StepEngine(const model::ModelDefs& defs, StepOptions options = {});

    const model::ModelDefs& defs() const { return defs_; }
    TermInterner& interner() { return interner_; }

    /// Configuration of the main process (or a named one) with every
    /// variable at its declared initial value.
    Configuration initial(const std::string& process = "") const;

    /// All transitions licensed by the operational rules, deterministically
    /// ordered and deduplicated.
    std::vector<Transition> transitions(const Configuration& c) const;

    int var_index(const std::string& name) const; // -1 when undeclared

  private:
    friend class StepperImpl;
    const model::ModelDefs& defs_;
    StepOptions options_;
    mutable TermInterner interner_;
    std::unordered_map<std::string, int> var_index_;
    std::unordered_map<std::string, const model::ProcessDef*> procs_;
    // Per-node caches; keys are interned nodes (or nodes owned by the cache),
    // so the pointers are stable. The engine is single-threaded.
    mutable std::unordered_map<const model::Term*,
                               std::pair<std::vector<std::uint16_t>, std::vector<std::uint16_t>>>
        ns_cache_;
    // Keeps the source node alive alongside its expansion so keys can never
    // be recycled addresses.
    mutable std::unordered_map<const model::Term*, std::pair<model::TermPtr, model::TermPtr>>
        iter_cache_;
    mutable std::vector<model::TermPtr> ns_keepalive_;
};

/// One-shot helpers used by tests and small callers; each constructs a
/// private engine, so pointer identity is not stable across calls.
Configuration initial(const model::ModelDefs& defs, const std::string& process = "");
std::vector<Transition> step(const Configuration& c, const model::ModelDefs& defs,
                             StepOptions options = {});

/// Channels syntactically reachable from a term, following process
/// references to a fixed point.
std::vector<model::ChannelId> alphabet(const model::TermPtr& t, const model::ModelDefs& defs);

/// Rendering helpers for diagnostics and reports.
std::string label_to_string(const model::EventLabel& l, const model::ModelDefs& defs);
std::string term_to_string(const model::TermPtr& t, const model::ModelDefs& defs);

} // namespace mk2::calc

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mk2::model {

/// A single runtime value: a boolean, a bounded integer, or a named symbol.
/// Symbols are interned per ModelDefs; `sym` holds the interned index.
class Atom {
  public:
    enum class Kind : std::uint8_t { Bool, Int, Sym };

    static Atom boolean(bool b) { return Atom(Kind::Bool, b ? 1 : 0); }
    static Atom integer(std::int32_t v) { return Atom(Kind::Int, v); }
    static Atom symbol(std::int32_t interned_id) { return Atom(Kind::Sym, interned_id); }

    Kind kind() const { return kind_; }
    bool as_bool() const { return value_ != 0; }
    std::int32_t as_int() const { return value_; }
    std::int32_t sym_id() const { return value_; }

    friend bool operator==(const Atom& a, const Atom& b) {
        return a.kind_ == b.kind_ && a.value_ == b.value_;
    }
    friend bool operator!=(const Atom& a, const Atom& b) { return !(a == b); }
    friend bool operator<(const Atom& a, const Atom& b) {
        if (a.kind_ != b.kind_) return a.kind_ < b.kind_;
        return a.value_ < b.value_;
    }

  private:
    Atom(Kind k, std::int32_t v) : kind_(k), value_(v) {}
    Kind kind_;
    std::int32_t value_;
};

using DomainId = std::int32_t;
constexpr DomainId kBoolDomain = 0; // builtin, always present

/// A finite, ordered value domain: the builtin booleans, a bounded integer
/// range, or a declared set of symbolic members.
struct ValueDomain {
    enum class Kind : std::uint8_t { Bool, IntRange, Symbols };

    std::string name;
    Kind kind = Kind::Symbols;
    std::int32_t lo = 0; // IntRange only
    std::int32_t hi = 0; // IntRange only, inclusive
    std::vector<std::int32_t> members; // Symbols only: interned symbol ids

    std::size_t size() const {
        switch (kind) {
        case Kind::Bool: return 2;
        case Kind::IntRange: return static_cast<std::size_t>(hi - lo + 1);
        case Kind::Symbols: return members.size();
        }
        return 0;
    }

    Atom member(std::size_t i) const {
        switch (kind) {
        case Kind::Bool: return Atom::boolean(i != 0);
        case Kind::IntRange: return Atom::integer(lo + static_cast<std::int32_t>(i));
        case Kind::Symbols: return Atom::symbol(members[i]);
        }
        return Atom::boolean(false);
    }

    bool contains(const Atom& a) const {
        switch (kind) {
        case Kind::Bool: return a.kind() == Atom::Kind::Bool;
        case Kind::IntRange:
            return a.kind() == Atom::Kind::Int && a.as_int() >= lo && a.as_int() <= hi;
        case Kind::Symbols:
            if (a.kind() != Atom::Kind::Sym) return false;
            for (auto id : members)
                if (id == a.sym_id()) return true;
            return false;
        }
        return false;
    }
};

} // namespace mk2::model

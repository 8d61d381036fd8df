#pragma once

#include <cstdint>
#include <vector>

#include "mk2/model/defs.hpp"

namespace mk2::calc {

/// Finite variable store. Values are kept as member indices into each
/// variable's domain (one byte per variable), in ModelDefs declaration order.
/// The variable set is fixed at initialisation.
class Store {
  public:
    Store() = default;

    static Store initial(const model::ModelDefs& defs);

    model::Atom get(const model::ModelDefs& defs, std::size_t var_index) const {
        const auto& v = defs.variables[var_index];
        return defs.domain(v.domain).member(values_[var_index]);
    }

    void set_index(std::size_t var_index, std::uint8_t member_index) {
        values_[var_index] = member_index;
    }
    std::uint8_t index_at(std::size_t var_index) const { return values_[var_index]; }

    std::size_t size() const { return values_.size(); }
    const std::vector<std::uint8_t>& raw() const { return values_; }

    friend bool operator==(const Store& a, const Store& b) { return a.values_ == b.values_; }
    friend bool operator!=(const Store& a, const Store& b) { return !(a == b); }
    friend bool operator<(const Store& a, const Store& b) { return a.values_ < b.values_; }

  private:
    std::vector<std::uint8_t> values_;
};

/// Index of an atom within a domain; -1 when absent.
int domain_index_of(const model::ValueDomain& d, const model::Atom& a);

} // namespace mk2::calc

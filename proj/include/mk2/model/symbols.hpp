#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace mk2::model {

/// String interner. Symbol ids are dense indices; lookup is O(1) both ways.
class SymbolTable {
  public:
    std::int32_t intern(const std::string& s) {
        auto it = ids_.find(s);
        if (it != ids_.end()) return it->second;
        auto id = static_cast<std::int32_t>(names_.size());
        names_.push_back(s);
        ids_.emplace(s, id);
        return id;
    }

    const std::string& name(std::int32_t id) const { return names_.at(static_cast<std::size_t>(id)); }

    std::int32_t find(const std::string& s) const {
        auto it = ids_.find(s);
        return it == ids_.end() ? -1 : it->second;
    }

    std::size_t size() const { return names_.size(); }

  private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, std::int32_t> ids_;
};

} // namespace mk2::model

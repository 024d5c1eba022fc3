#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "prodgraph/types.hpp"

namespace prodgraph {

// Bijective mapping between external string ids and dense internal ids,
// assigned in first-seen order.
template <typename IdT>
class IdDictionary {
 public:
  IdT intern(std::string_view name) {
    auto [it, inserted] = index_.try_emplace(std::string(name), IdT{names_.size()});
    if (inserted) names_.emplace_back(name);
    return it->second;
  }

  std::optional<IdT> find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const std::string& name(IdT id) const {
    if (id.value >= names_.size()) {
      throw ConsistencyError("identifier " + std::to_string(id.value) + " has no external name");
    }
    return names_[id.value];
  }

  std::size_t size() const { return names_.size(); }

 private:
  std::unordered_map<std::string, IdT> index_;
  std::vector<std::string> names_;
};

struct Dictionaries {
  IdDictionary<UserId> users;
  IdDictionary<ItemId> items;
  IdDictionary<CategoryId> categories;
};

}  // namespace prodgraph

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "prodgraph/types.hpp"

namespace prodgraph {

// item -> category map plus per-category purchase counters N(c).
class Catalog {
 public:
  // Maps item to category. Returns false (and changes nothing) when the item
  // is already mapped to a different category.
  bool assign(ItemId item, CategoryId category) {
    if (item.value >= item_category_.size()) item_category_.resize(item.value + 1);
    auto& slot = item_category_[item.value];
    if (slot && *slot != category) return false;
    if (!slot) ++mapped_;
    slot = category;
    return true;
  }

  std::optional<CategoryId> category_of(ItemId item) const {
    if (item.value >= item_category_.size()) return std::nullopt;
    return item_category_[item.value];
  }

  // Throws ValidationError when the item has no category.
  CategoryId require_category(ItemId item) const {
    auto c = category_of(item);
    if (!c) throw ValidationError("item " + std::to_string(item.value) + " has no category in the catalog");
    return *c;
  }

  std::size_t item_count() const { return mapped_; }

  // One past the largest category id in use.
  std::size_t category_id_bound() const {
    std::size_t bound = 0;
    for (const auto& c : item_category_) {
      if (c) bound = std::max<std::size_t>(bound, c->value + 1);
    }
    return bound;
  }

  // Recomputes N(c) as the number of purchase events whose item maps to c.
  // Every purchased item must have a category.
  void count_purchases(std::span<const BehaviorEvent> events) {
    purchase_count_.assign(category_id_bound(), 0);
    for (const auto& e : events) {
      if (e.action != Action::Purchase) continue;
      purchase_count_[require_category(e.item).value] += 1;
    }
  }

  std::size_t purchase_count(CategoryId c) const {
    return c.value < purchase_count_.size() ? purchase_count_[c.value] : 0;
  }

 private:
  std::vector<std::optional<CategoryId>> item_category_;
  std::vector<std::size_t> purchase_count_;
  std::size_t mapped_ = 0;
};

}  // namespace prodgraph

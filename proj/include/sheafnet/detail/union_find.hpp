#pragma once

#include <cstddef>
#include <vector>

#include <boost/pending/disjoint_sets.hpp>

namespace sheafnet::detail {

class Components {
 public:
  explicit Components(std::size_t n) : rank_(n), parent_(n), sets_(rank_.data(), parent_.data()) {
    for (std::size_t i = 0; i < n; ++i) sets_.make_set(i);
  }
  Components(const Components&) = delete;
  Components& operator=(const Components&) = delete;

  void unite(std::size_t a, std::size_t b) { sets_.union_set(a, b); }
  std::size_t find(std::size_t a) { return sets_.find_set(a); }

  /// Component number of every element, numbered by first occurrence.
  std::vector<std::size_t> labels() {
    std::vector<std::size_t> root_label(parent_.size(), parent_.size());
    std::vector<std::size_t> out(parent_.size());
    std::size_t next = 0;
    for (std::size_t i = 0; i < parent_.size(); ++i) {
      const std::size_t r = find(i);
      if (root_label[r] == parent_.size()) root_label[r] = next++;
      out[i] = root_label[r];
    }
    return out;
  }

 private:
  std::vector<std::size_t> rank_;
  std::vector<std::size_t> parent_;
  boost::disjoint_sets<std::size_t*, std::size_t*> sets_;
};

}  // namespace sheafnet::detail

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "entvec/core.hpp"

namespace entvec {

// Ordered, labelled collection of nonzero rays in entropy space.
class RaySet {
 public:
  explicit RaySet(int n) : n_(n) {}

  void add(std::string label, EntropyVector ray);

  int variables() const { return n_; }
  std::size_t size() const { return rays_.size(); }
  bool empty() const { return rays_.empty(); }

  const EntropyVector& ray(std::size_t k) const { return rays_.at(k); }
  const std::string& label(std::size_t k) const { return labels_.at(k); }
  const std::vector<EntropyVector>& rays() const { return rays_; }
  const std::vector<std::string>& labels() const { return labels_; }

  std::optional<std::size_t> find(const std::string& label) const;
  // Throws invalid-argument when the label is absent.
  const EntropyVector& at(const std::string& label) const;

  // Rays whose labels start with `prefix`, in order.
  RaySet with_prefix(const std::string& prefix) const;

 private:
  int n_;
  std::vector<EntropyVector> rays_;
  std::vector<std::string> labels_;
};

}  // namespace entvec

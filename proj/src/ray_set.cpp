#include "entvec/ray_set.hpp"

#include "entvec/error.hpp"

namespace entvec {

void RaySet::add(std::string label, EntropyVector ray) {
  if (ray.variables() != n_)
    fail(ErrorKind::kInvalidArgument, "ray '" + label + "' has the wrong dimension");
  if (ray.is_zero()) fail(ErrorKind::kInvalidArgument, "ray '" + label + "' is zero");
  if (find(label)) fail(ErrorKind::kInvalidArgument, "duplicate ray label '" + label + "'");
  labels_.push_back(std::move(label));
  rays_.push_back(std::move(ray));
}

std::optional<std::size_t> RaySet::find(const std::string& label) const {
  for (std::size_t k = 0; k < labels_.size(); ++k)
    if (labels_[k] == label) return k;
  return std::nullopt;
}

const EntropyVector& RaySet::at(const std::string& label) const {
  const auto k = find(label);
  if (!k) fail(ErrorKind::kInvalidArgument, "no ray labelled '" + label + "'");
  return rays_[*k];
}

RaySet RaySet::with_prefix(const std::string& prefix) const {
  RaySet out(n_);
  for (std::size_t k = 0; k < size(); ++k)
    if (labels_[k].rfind(prefix, 0) == 0) out.add(labels_[k], rays_[k]);
  return out;
}

}  // namespace entvec

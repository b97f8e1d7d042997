#include "pgso/rules.hpp"

#include <set>

namespace pgso {

double jaccard(const std::vector<DataProperty>& a,
               const std::vector<DataProperty>& b) {
  std::set<std::string> sa, sb;
  for (const auto& p : a) sa.insert(p.name);
  for (const auto& p : b) sb.insert(p.name);
  if (sa.empty() && sb.empty()) return 0.0;
  std::size_t common = 0;
  for (const auto& n : sa) common += sb.count(n);
  std::size_t unions = sa.size() + sb.size() - common;
  return static_cast<double>(common) / static_cast<double>(unions);
}

namespace {

Result<WorkingSchema> apply_copy(const WorkingSchema& s, RuleKind kind,
                                 const std::string& rel, double theta1 = 0.0,
                                 double theta2 = 0.0) {
  WorkingSchema out = s;
  auto res = out.apply(kind, rel, theta1, theta2);
  if (!res.ok()) return res.error();
  return out;
}

}  // namespace

Result<WorkingSchema> apply_union(const WorkingSchema& s,
                                  const std::string& rel) {
  return apply_copy(s, RuleKind::Union, rel);
}

Result<WorkingSchema> apply_inheritance(const WorkingSchema& s,
                                        const std::string& rel, double theta1,
                                        double theta2) {
  return apply_copy(s, RuleKind::Inheritance, rel, theta1, theta2);
}

Result<WorkingSchema> apply_one_to_one(const WorkingSchema& s,
                                       const std::string& rel) {
  return apply_copy(s, RuleKind::OneToOne, rel);
}

Result<WorkingSchema> apply_one_to_many(const WorkingSchema& s,
                                        const std::string& rel) {
  return apply_copy(s, RuleKind::OneToMany, rel);
}

Result<WorkingSchema> apply_many_to_many(const WorkingSchema& s,
                                         const std::string& rel,
                                         MnDirection dir) {
  if (dir == MnDirection::Forward)
    return apply_copy(s, RuleKind::MnForward, rel);
  if (dir == MnDirection::Backward)
    return apply_copy(s, RuleKind::MnBackward, rel);
  WorkingSchema out = s;
  auto fwd = out.apply(RuleKind::MnForward, rel);
  if (!fwd.ok()) return fwd.error();
  auto bwd = out.apply(RuleKind::MnBackward, rel);
  if (!bwd.ok()) return bwd.error();
  return out;
}

}  // namespace pgso

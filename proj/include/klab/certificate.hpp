#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "klab/logtower.hpp"

namespace klab {

enum class Status { verified_to_depth, candidate_refutation, inconclusive };

inline std::string_view to_string(Status s) {
  switch (s) {
    case Status::verified_to_depth:
      return "verified_to_depth";
    case Status::candidate_refutation:
      return "candidate_refutation";
    case Status::inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

inline Status status_from_string(std::string_view s) {
  if (s == "verified_to_depth") return Status::verified_to_depth;
  if (s == "candidate_refutation") return Status::candidate_refutation;
  if (s == "inconclusive") return Status::inconclusive;
  throw std::invalid_argument("unknown certificate status '" + std::string(s) + "'");
}

/// One tested instance: the parameters and both sides of its inequality.
struct Witness {
  std::map<std::string, std::int64_t> params;
  LogTower lhs;
  LogTower rhs;

  friend bool operator==(const Witness&, const Witness&) = default;
};

/// Outcome of a quantified inequality tested over finite ranges.
struct Certificate {
  std::string condition;
  std::map<std::string, std::int64_t> bounds;
  Status status = Status::inconclusive;
  std::map<std::string, LogTower> constants;
  std::vector<Witness> witnesses;
  std::string notes;

  bool verified() const { return status == Status::verified_to_depth; }
  bool refuted() const { return status == Status::candidate_refutation; }

  /// Integer-valued constant (grades such as p or r); throws if absent.
  std::int64_t grade(const std::string& name) const {
    auto it = constants.find(name);
    if (it == constants.end()) throw std::out_of_range("certificate has no constant '" + name + "'");
    return static_cast<std::int64_t>(std::llround(it->second.to_real()));
  }

  friend bool operator==(const Certificate&, const Certificate&) = default;
};

/// Exit-status convention shared by the command-line front end.
inline int exit_code(Status s) {
  switch (s) {
    case Status::verified_to_depth:
      return 0;
    case Status::candidate_refutation:
      return 2;
    case Status::inconclusive:
      return 3;
  }
  return 3;
}

}  // namespace klab

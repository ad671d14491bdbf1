#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hyperlab/grid.hpp"
#include "hyperlab/schedule.hpp"

namespace hyperlab {

enum class Status { pass, fail, saturated, warning };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::saturated: return "saturated";
    case Status::warning: return "warning";
  }
  return "unknown";
}

/// Tolerance on margins for exact (closed-form) evaluation paths.
inline constexpr double kClosedFormTolerance = 1e-8;
/// Tolerance on margins for grid and quadrature paths.
inline constexpr double kGridTolerance = 1e-6;
inline constexpr double kSaturationTolerance = 1e-6;

using Params = std::vector<std::pair<std::string, double>>;

/// One checked inequality lhs <= rhs.
struct InequalityReport {
  std::string check;
  std::string subject;
  double lhs = 0;
  double rhs = 0;
  double margin = 0;
  double log_ratio = NAN;
  std::optional<ExponentSchedule> schedule;
  Params params;
  Params extras;
  double tolerance = kGridTolerance;
  double saturation_tolerance = kSaturationTolerance;
  Status status = Status::pass;
  std::vector<std::string> notes;

  bool ok() const { return status != Status::fail; }

  double extra(const std::string& key) const {
    for (const auto& [k, v] : extras)
      if (k == key) return v;
    return NAN;
  }

  /// Recomputes margin, log ratio and status from lhs/rhs. A forced warning
  /// (non-evaluable instance) survives unless the margin fails.
  void finalize(bool force_warning = false) {
    margin = rhs - lhs;
    log_ratio = (lhs > 0 && rhs > 0) ? std::log(rhs / lhs) : NAN;
    if (!std::isfinite(lhs) || !std::isfinite(rhs)) {
      status = Status::warning;
      notes.push_back("non-finite side (range limit reached)");
      return;
    }
    if (margin < -tolerance) {
      status = Status::fail;
    } else if (force_warning) {
      status = Status::warning;
    } else if (std::isfinite(log_ratio) ? std::abs(log_ratio) <= saturation_tolerance
                                        : std::abs(margin) <= saturation_tolerance) {
      status = Status::saturated;
    } else {
      status = Status::pass;
    }
  }

  void absorb(const Diagnostics& d) {
    for (const auto& w : d.warnings) notes.push_back(w);
  }
};

inline InequalityReport make_report(std::string check, double lhs, double rhs,
                                    double tolerance, Params params = {},
                                    std::optional<ExponentSchedule> schedule = std::nullopt) {
  InequalityReport r;
  r.check = std::move(check);
  r.lhs = lhs;
  r.rhs = rhs;
  r.tolerance = tolerance;
  r.schedule = std::move(schedule);
  if (r.schedule) {
    r.params = r.schedule->parameters();
    r.params.insert(r.params.end(), params.begin(), params.end());
  } else {
    r.params = std::move(params);
  }
  r.finalize();
  return r;
}

}  // namespace hyperlab

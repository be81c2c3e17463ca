#pragma once

// Code-editing interventions: each rewrites only the statement that defines
// the target variable and leaves every other statement untouched.

#include <memory>
#include <string>
#include <variant>

#include "ministan/dsl.hpp"

namespace ministan {

struct Intervention;

namespace intervention {

struct Do {
  std::string var;
  double value;
  friend bool operator==(const Do&, const Do&) = default;
};

struct Shift {
  std::string var;
  double delta;
  friend bool operator==(const Shift&, const Shift&) = default;
};

/// Rewrites `x ~ normal(m, s)` to `x ~ normal(m, s / d)` with d = 1 / factor.
struct VarianceScale {
  std::string var;
  double factor;
  double std_divisor() const { return 1.0 / factor; }
  friend bool operator==(const VarianceScale&, const VarianceScale&) = default;
};

struct Compose {
  std::shared_ptr<const Intervention> first;
  std::shared_ptr<const Intervention> then;
  friend bool operator==(const Compose& a, const Compose& b);
};

}  // namespace intervention

struct Intervention {
  std::variant<intervention::Do, intervention::Shift,
               intervention::VarianceScale, intervention::Compose>
      op;
  friend bool operator==(const Intervention&, const Intervention&) = default;
};

Intervention make_do(std::string var, double value);
Intervention make_shift(std::string var, double delta);
Intervention make_variance_scale(std::string var, double factor);
Intervention compose(Intervention first, Intervention then);

struct InterventionOptions {
  /// When set, an intervention on a variable the program does not define
  /// leaves the program unchanged instead of throwing NoSuchVariable.
  bool lenient = false;
};

Program apply_do(const Program& p, const std::string& var, double value,
                 const InterventionOptions& options = {});
Program apply_shift(const Program& p, const std::string& var, double delta,
                    const InterventionOptions& options = {});
Program apply_variance_scale(const Program& p, const std::string& var,
                             double factor,
                             const InterventionOptions& options = {});
Program apply_intervention(const Program& p, const Intervention& i,
                           const InterventionOptions& options = {});

/// Human-readable one-liner, e.g. "do(b = 5)".
std::string describe(const Intervention& i);

}  // namespace ministan

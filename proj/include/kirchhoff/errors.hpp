#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace kirchhoff {

/// Argument outside the domain of an operation (t <= 0, p out of range, ...).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// No sign change of the fiber derivative inside the admissible t window.
class DegenerateFieldError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A projected field failed its Pohozaev / mass post-check.
class ProjectionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ShootingError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class EigenIterationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The problem violates one of the potential hypotheses and the caller did
/// not opt out of the admissibility gate.
class AdmissibilityError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Warnings go through a process-wide sink so that library code never writes
// to stderr behind the caller's back. The default sink prints to std::clog.
using WarningSink = std::function<void(std::string_view)>;

void set_warning_sink(WarningSink sink);
void warn(const std::string& message);

} // namespace kirchhoff

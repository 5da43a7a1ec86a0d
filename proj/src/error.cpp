#include "mimm/error.hpp"

namespace mimm {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::shape: return "shape";
    case ErrorKind::insufficient_data: return "insufficient-data";
    case ErrorKind::boundary_violation: return "boundary-violation";
    case ErrorKind::degenerate_scale: return "degenerate-scale";
    case ErrorKind::validation: return "validation";
    case ErrorKind::stationarity: return "stationarity";
    case ErrorKind::parameter_domain: return "parameter-domain";
    case ErrorKind::contract: return "contract";
    case ErrorKind::budget_exceeded: return "budget-exceeded";
    case ErrorKind::io: return "io";
    case ErrorKind::no_solution_found: return "no-solution-found";
    case ErrorKind::ill_conditioned: return "ill-conditioned";
    case ErrorKind::unbounded_likelihood: return "unbounded-likelihood";
    case ErrorKind::internal: return "internal";
    case ErrorKind::timeout: return "timeout";
  }
  return "unknown";
}

void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, std::string(to_string(kind)) + " error: " + message);
}

Deadline Deadline::after(double seconds) {
  Deadline d;
  if (seconds > 0) {
    d.at_ = clock::now() + std::chrono::duration_cast<clock::duration>(
                               std::chrono::duration<double>(seconds));
  }
  return d;
}

void Deadline::check(const char* where) const {
  if (expired()) fail(ErrorKind::timeout, std::string(where) + " exceeded its time limit");
}

}  // namespace mimm

#include "hgas/error.hpp"

namespace hgas {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::invalid_dimension: return "invalid_dimension";
    case Errc::invalid_kernel: return "invalid_kernel";
    case Errc::domain: return "domain";
    case Errc::invalid_weight: return "invalid_weight";
    case Errc::malformed_law: return "malformed_law";
    case Errc::singular_configuration: return "singular_configuration";
    case Errc::tolerance: return "tolerance";
    case Errc::wrong_regime: return "wrong_regime";
    case Errc::internal_consistency: return "internal_consistency";
    case Errc::incompatible_target: return "incompatible_target";
    case Errc::integration_failure: return "integration_failure";
    case Errc::integration_artifact: return "integration_artifact";
    case Errc::insufficient_statistics: return "insufficient_statistics";
    case Errc::undefined_metric: return "undefined_metric";
    case Errc::explicit_tag_required: return "explicit_tag_required";
    case Errc::unsupported: return "unsupported";
    case Errc::config: return "config";
    case Errc::convergence: return "convergence";
    case Errc::io: return "io";
  }
  return "unknown";
}

}  // namespace hgas

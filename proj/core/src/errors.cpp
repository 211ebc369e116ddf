#include "billiards/errors.hpp"

namespace billiards {

const char* errc_name(errc code) {
  switch (code) {
    case errc::non_positive_radius: return "NonPositiveRadius";
    case errc::spherical_radius_too_large: return "SphericalRadiusTooLarge";
    case errc::theta_out_of_range: return "ThetaOutOfRange";
    case errc::normalization_failure: return "NormalizationFailure";
    case errc::empty_interval: return "EmptyInterval";
    case errc::truncated_state_space: return "TruncatedStateSpace";
    case errc::image_escapes_state_space: return "ImageEscapesStateSpace";
    case errc::reducible_chain: return "ReducibleChain";
    case errc::no_convergence: return "NoConvergence";
    case errc::invalid_path: return "InvalidPath";
    case errc::not_admissible: return "NotAdmissible";
    case errc::too_few_points: return "TooFewPoints";
    case errc::invalid_interval: return "InvalidInterval";
    case errc::negative_density: return "NegativeDensity";
    case errc::bin_mismatch: return "BinMismatch";
    case errc::unsupported_alpha_form: return "UnsupportedAlphaForm";
    case errc::invalid_argument: return "InvalidArgument";
  }
  return "UnknownError";
}

}  // namespace billiards
